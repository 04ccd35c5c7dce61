use crate::args::*;
use crate::{CliError, CliResult};
use disk_harmonics::analysis::{
    analyze_with_plan, descriptors, fdec_fit, plan_for, reconstruct as rebuild, uniform_disk_mesh,
    AnalysisOptions, FdecMethod, HarmonicCoeffs, LsqPlan, SolverMethod, Weighting,
};
use disk_harmonics::basis::{BoundaryCondition, EigenTable};
use disk_harmonics::cap::{project_rough_patch, CapSpec};
use disk_harmonics::fractal::{
    fit_hurst_with_floor, generate_surface, psd_m0, random_patch_centers, sample_circular_patch,
    sample_patch, sample_square_patch, HeightGrid, HurstFit, Patch, PowerLawSpec, Spectrum,
    SpectrumAxis, DEFAULT_FLOOR,
};
use disk_harmonics::mesh::{
    boundary_loop, hausdorff_rmse, hausdorff_rmse_symmetric, load_mesh, write_obj, TriMesh,
};
use disk_harmonics::param::{area_preserving_param, DiskParam, ParamOptions};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

const DEFAULT_FIT_MAX: usize = 70;

fn need<T: Clone>(v: &Option<T>, flag: &str) -> CliResult<T> {
    v.clone()
        .ok_or_else(|| CliError::Usage(format!("missing required flag --{flag}")))
}

/// Checks that an input file exists so the diagnostic can name it.
fn input(path: &Path) -> CliResult<&Path> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(CliError::Input(format!(
            "cannot read {}: no such file",
            path.display()
        )))
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}{suffix}", prefix.display()))
}

fn surface_spec(s: &SurfaceArgs) -> CliResult<PowerLawSpec> {
    let n = s.n.unwrap_or(512);
    let spec = PowerLawSpec {
        hurst: need(&s.hurst, "H")?,
        q_r: s.qr.unwrap_or(0.0),
        q_l: s.ql.unwrap_or(4.0),
        q_s: s.qs.unwrap_or(n as f64 / 2.0),
        rms: s.rms.unwrap_or(1.0),
        seed: s.seed.unwrap_or(0),
        n,
        rayleigh: s.rayleigh,
    };
    spec.validate()?;
    Ok(spec)
}

fn analysis_options(fit: &FitArgs, default_k: usize) -> CliResult<AnalysisOptions> {
    let bc: BoundaryCondition = fit.bc.as_deref().unwrap_or("neumann").parse()?;
    let mut opts = AnalysisOptions::new(fit.kmax.unwrap_or(default_k), bc);
    opts.weighting = match fit.weighting.as_deref().unwrap_or("uniform") {
        "uniform" => Weighting::Uniform,
        "disk-area" => Weighting::DiskArea,
        w => return Err(CliError::Usage(format!("unknown weighting '{w}'"))),
    };
    opts.method = match fit.solver.as_deref().unwrap_or("auto") {
        "auto" => SolverMethod::Auto,
        "qr" => SolverMethod::Qr,
        "normal" => SolverMethod::NormalEquations,
        m => return Err(CliError::Usage(format!("unknown solver '{m}'"))),
    };
    Ok(opts)
}

fn parse_axis(s: Option<&str>) -> CliResult<SpectrumAxis> {
    Ok(match s.unwrap_or("z") {
        "x" => SpectrumAxis::X,
        "y" => SpectrumAxis::Y,
        "z" => SpectrumAxis::Z,
        "normalized" => SpectrumAxis::Normalized,
        a => return Err(CliError::Usage(format!("unknown axis '{a}'"))),
    })
}

fn summary_fit(fit: &Option<HurstFit>) -> Value {
    serde_json::to_value(fit).expect("fit serializes")
}

pub fn generate(a: &GenerateArgs) -> CliResult<Value> {
    let spec = surface_spec(&a.surface)?;
    let grid = generate_surface(&spec)?;
    let prefix = a.out.clone().unwrap_or_else(|| "surface".into());
    let bin = with_suffix(&prefix, ".bin");
    grid.save(&bin)?;
    let mut files = vec![bin.clone(), bin.with_extension("json")];
    if !a.no_obj {
        let obj = with_suffix(&prefix, ".obj");
        write_obj(&grid.to_mesh(), &obj)?;
        files.push(obj);
    }
    Ok(json!({
        "ok": true,
        "command": "generate",
        "spec": spec,
        "extent": grid.extent,
        "rms": grid.rms(),
        "files": files,
    }))
}

pub fn param(a: &ParamArgs) -> CliResult<Value> {
    let mesh = load_mesh(input(&need(&a.mesh, "mesh")?)?)?;
    let mut opts = ParamOptions::default();
    if let Some(t) = a.tau_cap {
        opts.tau_cap = t;
    }
    if let Some(n) = a.max_iters {
        opts.dem.max_iters = n;
    }
    if let Some(t) = a.tol {
        opts.dem.tol = t;
    }
    let (p, report) = area_preserving_param(&mesh, &opts)?;
    let out = a.out.clone().unwrap_or_else(|| "param.csv".into());
    p.write_csv(&out)?;
    Ok(json!({
        "ok": true,
        "command": "param",
        "vertices": mesh.num_vertices(),
        "faces": mesh.num_faces(),
        "report": report,
        "files": [out],
    }))
}

/// Analyses a flat grid patch: circular by default, the whole square if asked.
fn grid_patch(grid: &HeightGrid, square: bool) -> CliResult<Patch> {
    Ok(if square {
        sample_square_patch(grid)?
    } else {
        sample_circular_patch(grid)?
    })
}

fn coeff_summary(coeffs: &HarmonicCoeffs) -> Value {
    let fdec = fdec_fit(coeffs, FdecMethod::Eigenproblem).ok();
    json!({
        "k_max": coeffs.k_max,
        "bc": coeffs.bc,
        "residual": coeffs.residual,
        "condition": coeffs.condition,
        "warnings": coeffs.warnings,
        "fdec": fdec.map(|f| json!({ "a": f.a, "b": f.b, "c": f.c, "curvature": f.curvature() })),
    })
}

pub fn analyze(a: &AnalyzeArgs) -> CliResult<Value> {
    let opts = analysis_options(&a.fit, 20)?;
    let (mesh, p, param_note) = match (&a.mesh, &a.grid) {
        (Some(path), None) => {
            let mesh = load_mesh(input(path)?)?;
            match &a.param {
                Some(pp) => {
                    let p = DiskParam::read_csv(input(pp)?)?;
                    p.validate(&mesh)?;
                    (mesh, p, Value::Null)
                }
                None => {
                    let (p, report) = area_preserving_param(&mesh, &ParamOptions::default())?;
                    (
                        mesh,
                        p,
                        serde_json::to_value(report).expect("report serializes"),
                    )
                }
            }
        }
        (None, Some(g)) => {
            let patch = grid_patch(&HeightGrid::load(input(g)?)?, a.square)?;
            (patch.mesh, patch.param, Value::Null)
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --mesh or --grid".into(),
            ))
        }
    };
    let plan = plan_for(&mesh, &p, &opts)?;
    let coeffs = analyze_with_plan(&mesh, &plan)?;
    let desc = descriptors(&coeffs);
    let coeffs_out = a.coeffs_out.clone().unwrap_or_else(|| "coeffs.json".into());
    let desc_out = a
        .descriptors_out
        .clone()
        .unwrap_or_else(|| "descriptors.csv".into());
    coeffs.write_json(&coeffs_out)?;
    desc.write_csv(&desc_out)?;
    let mut s = coeff_summary(&coeffs);
    let obj = s.as_object_mut().expect("object");
    obj.insert("ok".into(), json!(true));
    obj.insert("command".into(), json!("analyze"));
    obj.insert("vertices".into(), json!(mesh.num_vertices()));
    obj.insert("param_report".into(), param_note);
    obj.insert("descriptor_warnings".into(), json!(desc.warnings));
    obj.insert("files".into(), json!([coeffs_out, desc_out]));
    Ok(s)
}

fn fit_range(a: &HurstArgs, top: usize) -> (usize, usize) {
    (
        a.fit_min.unwrap_or(2),
        a.fit_max.unwrap_or(top.min(DEFAULT_FIT_MAX)),
    )
}

fn spectrum_of(coeffs: &HarmonicCoeffs, axis: SpectrumAxis) -> CliResult<Spectrum> {
    let table = EigenTable::new(coeffs.k_max, coeffs.bc)?;
    Ok(psd_m0(coeffs, &table, axis)?)
}

fn fit_and_write(a: &HurstArgs, spectrum: &Spectrum, top: usize, extra: Value) -> CliResult<Value> {
    let (k_min, k_max) = fit_range(a, top);
    let fitted = fit_hurst_with_floor(spectrum, k_min, k_max, a.floor.unwrap_or(DEFAULT_FLOOR))?;
    let out = a.out.clone().unwrap_or_else(|| "fit.json".into());
    let spec_out = a
        .spectrum_out
        .clone()
        .unwrap_or_else(|| "spectrum.csv".into());
    std::fs::write(
        &out,
        serde_json::to_string_pretty(&fitted.fit).expect("fit serializes") + "\n",
    )?;
    fitted.write_csv(&spec_out)?;
    Ok(json!({
        "ok": true,
        "command": "hurst",
        "axis": fitted.axis,
        "fit": summary_fit(&fitted.fit),
        "source": extra,
        "files": [out, spec_out],
    }))
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

pub fn hurst(a: &HurstArgs) -> CliResult<Value> {
    let axis = parse_axis(a.axis.as_deref())?;
    match (&a.coeffs, &a.spectrum, &a.grid) {
        (Some(c), None, None) => {
            let coeffs = HarmonicCoeffs::read_json(input(c)?)?;
            let s = spectrum_of(&coeffs, axis)?;
            fit_and_write(a, &s, coeffs.k_max, json!({ "coeffs": c }))
        }
        (None, Some(path), None) => {
            let text = std::fs::read_to_string(input(path)?)?;
            let s = Spectrum::from_csv(&text, axis)?;
            let top = s.k.iter().copied().max().unwrap_or(0);
            fit_and_write(a, &s, top, json!({ "spectrum": path }))
        }
        (None, None, Some(g)) => {
            let grid = HeightGrid::load(input(g)?)?;
            let opts = analysis_options(&a.fit, a.fit_max.unwrap_or(DEFAULT_FIT_MAX))?;
            match a.patches {
                None => {
                    let patch = grid_patch(&grid, a.square)?;
                    let plan = plan_for(&patch.mesh, &patch.param, &opts)?;
                    let coeffs = analyze_with_plan(&patch.mesh, &plan)?;
                    let s = spectrum_of(&coeffs, axis)?;
                    fit_and_write(
                        a,
                        &s,
                        opts.k_max,
                        json!({ "grid": g, "vertices": patch.mesh.num_vertices() }),
                    )
                }
                Some(count) => hurst_batch(a, &grid, count, axis, &opts),
            }
        }
        _ => Err(CliError::Usage(
            "give exactly one of --coeffs, --spectrum or --grid".into(),
        )),
    }
}

fn same_layout(a: &DiskParam, b: &DiskParam) -> bool {
    a.len() == b.len()
        && a.rho.iter().zip(&b.rho).all(|(x, y)| (x - y).abs() < 1e-12)
        && a.phi.iter().zip(&b.phi).all(|(x, y)| (x - y).abs() < 1e-12)
}

fn hurst_batch(
    a: &HurstArgs,
    grid: &HeightGrid,
    count: usize,
    axis: SpectrumAxis,
    opts: &AnalysisOptions,
) -> CliResult<Value> {
    if count == 0 {
        return Err(CliError::Usage("--patches must be at least 1".into()));
    }
    let radius = a.patch_radius.unwrap_or(grid.n as f64 / 4.0 - 0.5);
    let centers = random_patch_centers(grid, radius, count, a.patch_seed.unwrap_or(0))?;
    let patches: Vec<Patch> = centers
        .iter()
        .map(|&c| sample_patch(grid, c, radius))
        .collect::<Result<_, _>>()?;
    // Patches placed on the lattice share one layout, so one factorisation serves all.
    let shared: Option<LsqPlan> = if patches
        .iter()
        .all(|p| same_layout(&p.param, &patches[0].param))
    {
        Some(plan_for(&patches[0].mesh, &patches[0].param, opts)?)
    } else {
        None
    };
    let (k_min, k_max) = fit_range(a, opts.k_max);
    let floor = a.floor.unwrap_or(DEFAULT_FLOOR);
    let fits: Vec<Spectrum> = patches
        .par_iter()
        .map(|p| -> CliResult<Spectrum> {
            let coeffs = match &shared {
                Some(plan) => analyze_with_plan(&p.mesh, plan)?,
                None => analyze_with_plan(&p.mesh, &plan_for(&p.mesh, &p.param, opts)?)?,
            };
            Ok(fit_hurst_with_floor(
                &spectrum_of(&coeffs, axis)?,
                k_min,
                k_max,
                floor,
            )?)
        })
        .collect::<CliResult<_>>()?;
    let dir = a.spectrum_out.clone().unwrap_or_else(|| "spectra".into());
    std::fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    for (i, s) in fits.iter().enumerate() {
        let f = dir.join(format!("patch_{i:02}.csv"));
        s.write_csv(&f)?;
        files.push(f);
    }
    let slopes: Vec<f64> = fits
        .iter()
        .map(|s| s.fit.as_ref().expect("fitted").slope)
        .collect();
    let hs: Vec<f64> = fits
        .iter()
        .map(|s| s.fit.as_ref().expect("fitted").hurst)
        .collect();
    let (slope_mean, slope_std) = mean_std(&slopes);
    let (h_mean, h_std) = mean_std(&hs);
    let per_patch: Vec<Value> = centers
        .iter()
        .zip(&fits)
        .map(|(c, s)| json!({ "center": c, "fit": summary_fit(&s.fit) }))
        .collect();
    let batch = json!({
        "radius": radius,
        "patches": per_patch,
        "slope_mean": slope_mean,
        "slope_std": slope_std,
        "H_mean": h_mean,
        "H_std": h_std,
    });
    let out = a.out.clone().unwrap_or_else(|| "fit.json".into());
    std::fs::write(
        &out,
        serde_json::to_string_pretty(&batch).expect("batch serializes") + "\n",
    )?;
    files.push(out);
    Ok(
        json!({ "ok": true, "command": "hurst", "axis": axis, "batch": batch, "shared_plan": shared.is_some(), "files": files }),
    )
}

pub fn reconstruct(a: &ReconstructArgs) -> CliResult<Value> {
    let coeffs = HarmonicCoeffs::read_json(input(&need(&a.coeffs, "coeffs")?)?)?;
    let ks = a.k.clone().unwrap_or_else(|| vec![coeffs.k_max]);
    if let Some(&bad) = ks.iter().find(|&&k| k > coeffs.k_max) {
        return Err(CliError::Usage(format!(
            "--k {bad} exceeds the coefficient order {}",
            coeffs.k_max
        )));
    }
    let reference = a
        .reference
        .as_deref()
        .map(|r| load_mesh(input(r)?).map_err(CliError::from))
        .transpose()?;
    let (grid, p) = uniform_disk_mesh(a.edge.unwrap_or(0.025))?;
    let prefix = a.out.clone().unwrap_or_else(|| "recon".into());
    let mut files = Vec::new();
    let mut rows = Vec::new();
    for &k in &ks {
        let mesh = rebuild(&coeffs, &grid, &p, k)?;
        let path = with_suffix(&prefix, &format!("_k{k}.obj"));
        write_obj(&mesh, &path)?;
        files.push(path);
        let rmse = match &reference {
            Some(r) if a.symmetric => Some(hausdorff_rmse_symmetric(r, &mesh)?),
            Some(r) => Some(hausdorff_rmse(r, &mesh)?),
            None => None,
        };
        rows.push((k, rmse));
    }
    let mut report = Value::Null;
    if reference.is_some() {
        let path = a
            .report_out
            .clone()
            .unwrap_or_else(|| with_suffix(&prefix, "_report.csv"));
        let mut csv = String::from("k,rmse\n");
        for (k, r) in &rows {
            csv.push_str(&format!(
                "{k},{}\n",
                disk_harmonics::fmt::sig(r.expect("reference given"), 9)
            ));
        }
        std::fs::write(&path, csv)?;
        files.push(path);
        let errs: Vec<f64> = rows.iter().map(|r| r.1.expect("reference given")).collect();
        report = json!({
            "rmse": rows.iter().map(|(k, r)| json!({ "k": k, "rmse": r })).collect::<Vec<_>>(),
            "non_increasing": errs.windows(2).all(|w| w[1] <= w[0]),
        });
    }
    let fdec = if coeffs.k_max >= 1 {
        let f = fdec_fit(&coeffs, FdecMethod::ObbAtK(1))?;
        json!({ "2a": 2.0 * f.a, "2b": 2.0 * f.b, "c": f.c })
    } else {
        Value::Null
    };
    Ok(
        json!({ "ok": true, "command": "reconstruct", "k": ks, "error": report, "fdec_k1": fdec, "files": files }),
    )
}

fn patch_from_mesh(mesh: TriMesh) -> CliResult<(TriMesh, DiskParam)> {
    let mut boundary = vec![false; mesh.num_vertices()];
    for v in boundary_loop(&mesh)? {
        boundary[v] = true;
    }
    let pos: Vec<[f64; 2]> = mesh.vertices.iter().map(|v| [v.x, v.y]).collect();
    Ok((mesh, DiskParam::from_positions(&pos, boundary)))
}

pub fn project(a: &ProjectArgs) -> CliResult<Value> {
    let cap = CapSpec::new(need(&a.theta, "theta")?, a.radius.unwrap_or(1.0))?;
    let (flat, p) = match (&a.patch, &a.grid) {
        (Some(path), None) => patch_from_mesh(load_mesh(input(path)?)?)?,
        (None, Some(g)) => {
            let patch = sample_circular_patch(&HeightGrid::load(input(g)?)?)?;
            (patch.mesh, patch.param)
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --patch or --grid".into(),
            ))
        }
    };
    let (curved, report) = project_rough_patch(&flat, &cap)?;
    let out = a.out.clone().unwrap_or_else(|| "cap.obj".into());
    write_obj(&curved, &out)?;
    let mut files = vec![out];
    if let Some(pp) = &a.param_out {
        p.write_csv(pp)?;
        files.push(pp.clone());
    }
    Ok(
        json!({ "ok": true, "command": "project", "report": report, "curvature": cap.curvature(), "files": files }),
    )
}

pub fn pipeline(a: &PipelineArgs) -> CliResult<Value> {
    let spec = surface_spec(&a.surface)?;
    let dir = a.out_dir.clone().unwrap_or_else(|| ".".into());
    std::fs::create_dir_all(&dir)?;
    let grid = generate_surface(&spec)?;
    grid.save(dir.join("surface.bin"))?;
    let patch = grid_patch(&grid, a.square)?;
    let opts = AnalysisOptions::new(
        a.kmax.unwrap_or(DEFAULT_FIT_MAX),
        BoundaryCondition::Neumann,
    );
    let plan = plan_for(&patch.mesh, &patch.param, &opts)?;
    let coeffs = analyze_with_plan(&patch.mesh, &plan)?;
    coeffs.write_json(dir.join("coeffs.json"))?;
    descriptors(&coeffs).write_csv(dir.join("descriptors.csv"))?;
    let s = psd_m0(&coeffs, plan.table(), SpectrumAxis::Z)?;
    let fitted = fit_hurst_with_floor(
        &s,
        a.fit_min.unwrap_or(2),
        a.fit_max.unwrap_or(opts.k_max),
        DEFAULT_FLOOR,
    )?;
    fitted.write_csv(dir.join("spectrum.csv"))?;
    std::fs::write(
        dir.join("fit.json"),
        serde_json::to_string_pretty(&fitted.fit).expect("fit serializes") + "\n",
    )?;
    let files: Vec<PathBuf> = [
        "surface.bin",
        "surface.json",
        "coeffs.json",
        "descriptors.csv",
        "spectrum.csv",
        "fit.json",
    ]
    .iter()
    .map(|f| dir.join(f))
    .collect();
    Ok(json!({
        "ok": true,
        "command": "pipeline",
        "spec": spec,
        "vertices": patch.mesh.num_vertices(),
        "condition": coeffs.condition,
        "fit": summary_fit(&fitted.fit),
        "files": files,
    }))
}
