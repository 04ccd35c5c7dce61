mod args;
mod commands;

use args::{Cli, Command};
use clap::Parser;
use disk_harmonics::ErrorKind;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Unreadable input file.
    Input(String),
    Core(disk_harmonics::Error),
}

impl From<disk_harmonics::Error> for CliError {
    fn from(e: disk_harmonics::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Usage => 2,
                ErrorKind::InvalidInput => 3,
                ErrorKind::Numeric => 4,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Input(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Flags over config-file values: every flag that was given replaces the
/// file's entry of the same name.
fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Value>) -> CliResult<T> {
    let Some(Value::Object(base)) = config else {
        return Ok(
            serde_json::from_value(serde_json::to_value(flags).expect("flags serialize"))
                .expect("flags round-trip"),
        );
    };
    let mut merged = base.clone();
    if let Value::Object(given) = serde_json::to_value(flags).expect("flags serialize") {
        for (k, v) in given {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Usage(format!("bad config value: {e}")))
}

fn load_config(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if !v.is_object() {
        return Err(CliError::Usage(format!(
            "{}: config must be a JSON object",
            path.display()
        )));
    }
    Ok(v)
}

fn init_threads() -> CliResult<()> {
    if let Ok(s) = std::env::var("DHKIT_THREADS") {
        let n: usize = s
            .parse()
            .map_err(|_| CliError::Usage(format!("DHKIT_THREADS must be a count, got '{s}'")))?;
        // Fails only if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<Value> {
    init_threads()?;
    let config = cli.config.as_deref().map(load_config).transpose()?;
    let c = config.as_ref();
    match &cli.command {
        Command::Generate(a) => commands::generate(&merge(a, c)?),
        Command::Param(a) => commands::param(&merge(a, c)?),
        Command::Analyze(a) => commands::analyze(&merge(a, c)?),
        Command::Hurst(a) => commands::hurst(&merge(a, c)?),
        Command::Reconstruct(a) => commands::reconstruct(&merge(a, c)?),
        Command::Project(a) => commands::project(&merge(a, c)?),
        Command::Pipeline(a) => commands::pipeline(&merge(a, c)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (summary, code) = match run(&cli) {
        Ok(v) => (v, 0),
        Err(e) => {
            eprintln!("dhkit: {e}");
            (
                serde_json::json!({ "ok": false, "error": e.to_string(), "exit_code": e.exit_code() }),
                e.exit_code(),
            )
        }
    };
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    // A closed pipe downstream is not our failure.
    let _ = writeln!(std::io::stdout(), "{text}");
    if let Some(path) = &cli.json {
        if let Err(e) = std::fs::write(path, text + "\n") {
            eprintln!("dhkit: cannot write {}: {e}", path.display());
            return ExitCode::from(if code == 0 { 3 } else { code });
        }
    }
    ExitCode::from(code)
}
