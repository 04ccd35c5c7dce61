//! Generates self-affine surfaces, samples circular patches and recovers the
//! Hurst exponent from the m = 0 disk-harmonic spectrum.
//!
//!     cargo run --release --example fractal_hurst [n] [kmax]

use disk_harmonics::analysis::{analyze_with_plan, plan_for, AnalysisOptions};
use disk_harmonics::basis::{BoundaryCondition, EigenTable};
use disk_harmonics::fractal::{
    fit_hurst, generate_surface, psd_m0, random_patch_centers, sample_patch, PowerLawSpec,
    SpectrumAxis,
};

fn main() -> disk_harmonics::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().ok());
    let n = args.next().flatten().unwrap_or(256);
    let k_max = args.next().flatten().unwrap_or(30);
    let table = EigenTable::new(k_max, BoundaryCondition::Neumann)?;
    let radius = n as f64 / 4.0 - 0.5;

    for hurst in [0.5, 0.7, 0.9] {
        let spec = PowerLawSpec {
            hurst,
            q_r: 0.0,
            q_l: 4.0,
            q_s: n as f64 / 2.0,
            rms: 1.0,
            seed: 7,
            n,
            rayleigh: false,
        };
        let grid = generate_surface(&spec)?;
        let centers = random_patch_centers(&grid, radius, 4, 1)?;
        let patches: Vec<_> = centers
            .iter()
            .map(|&c| sample_patch(&grid, c, radius))
            .collect::<Result<_, _>>()?;
        let opts = AnalysisOptions::new(k_max, BoundaryCondition::Neumann);
        let plan = plan_for(&patches[0].mesh, &patches[0].param, &opts)?;
        let mut fits = Vec::new();
        for p in &patches {
            let coeffs = analyze_with_plan(&p.mesh, &plan)?;
            let s = fit_hurst(&psd_m0(&coeffs, &table, SpectrumAxis::Z)?, 2, k_max)?;
            fits.push(s.fit.expect("fit"));
        }
        let slopes: Vec<String> = fits.iter().map(|f| format!("{:.3}", f.slope)).collect();
        let h = fits.iter().map(|f| f.hurst).sum::<f64>() / fits.len() as f64;
        println!(
            "H={hurst}: slopes [{}], mean H estimate {h:.3}",
            slopes.join(", ")
        );
    }
    Ok(())
}
