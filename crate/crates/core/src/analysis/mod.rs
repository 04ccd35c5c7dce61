//! Least-squares disk-harmonic analysis of parameterised surfaces, series
//! reconstruction, shape descriptors and FDEC fits.

mod coeffs;
mod descriptors;
mod fdec;
mod lsq;
mod reconstruct;

pub use coeffs::HarmonicCoeffs;
pub use descriptors::{descriptors, Descriptors};
pub use fdec::{fdec_fit, FdecFit, FdecMethod};
pub use lsq::{unknowns, LsqPlan, ScalarFit, SolverMethod};
pub use reconstruct::{evaluate, reconstruct, uniform_disk_mesh, Evaluation};

use crate::basis::{BoundaryCondition, EigenTable};
use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::param::DiskParam;

/// Condition estimates above this add a warning to the result.
pub const CONDITION_WARNING: f64 = 1e12;

/// Per-sample weights of the least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    #[default]
    Uniform,
    /// A third of the disk area of the faces around each vertex.
    DiskArea,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub k_max: usize,
    pub bc: BoundaryCondition,
    pub weighting: Weighting,
    pub method: SolverMethod,
}

impl AnalysisOptions {
    pub fn new(k_max: usize, bc: BoundaryCondition) -> Self {
        AnalysisOptions {
            k_max,
            bc,
            weighting: Weighting::Uniform,
            method: SolverMethod::Auto,
        }
    }
}

/// Builds the fit for the vertex layout of `param`.
pub fn plan_for(mesh: &TriMesh, param: &DiskParam, opts: &AnalysisOptions) -> Result<LsqPlan> {
    if param.len() != mesh.num_vertices() {
        return Err(Error::InvalidArgument(
            "parameterisation size does not match the mesh".into(),
        ));
    }
    let needed = unknowns(opts.k_max);
    if mesh.num_vertices() < needed {
        return Err(Error::Underdetermined {
            samples: mesh.num_vertices(),
            unknowns: needed,
        });
    }
    let table = EigenTable::new(opts.k_max, opts.bc)?;
    let weights = match opts.weighting {
        Weighting::Uniform => None,
        Weighting::DiskArea => {
            let mut w = vec![0.0; param.len()];
            for (f, a) in mesh.faces.iter().zip(param.signed_areas(&mesh.faces)) {
                for &v in f {
                    w[v] += a.abs() / 3.0;
                }
            }
            Some(w)
        }
    };
    LsqPlan::new(
        &table,
        param.rho.clone(),
        param.phi.clone(),
        weights,
        opts.method,
    )
}

/// Fits the three coordinate functions of `mesh` with a plan built by [`plan_for`].
pub fn analyze_with_plan(mesh: &TriMesh, plan: &LsqPlan) -> Result<HarmonicCoeffs> {
    let axes: Vec<Vec<f64>> = (0..3)
        .map(|i| mesh.vertices.iter().map(|v| v[i]).collect())
        .collect();
    let fits = plan.solve_batch(&[&axes[0], &axes[1], &axes[2]])?;
    Ok(combine(plan, &fits))
}

/// Packs three scalar fits (x, y, z) into coefficient vectors.
pub fn combine(plan: &LsqPlan, fits: &[ScalarFit]) -> HarmonicCoeffs {
    let table = plan.table();
    let mut out = HarmonicCoeffs::zeros(table.k_max(), table.bc());
    for (j, q) in out.q.iter_mut().enumerate() {
        *q = [fits[0].q[j], fits[1].q[j], fits[2].q[j]];
    }
    out.residual = [fits[0].residual, fits[1].residual, fits[2].residual];
    out.condition = plan.condition_estimate();
    if out.condition > CONDITION_WARNING {
        out.warnings.push(format!(
            "ill-conditioned fit (condition estimate {:.3e})",
            out.condition
        ));
    }
    out
}

/// Disk-harmonic coefficients of `mesh` under the parameterisation `param`.
pub fn analyze(
    mesh: &TriMesh,
    param: &DiskParam,
    k_max: usize,
    bc: BoundaryCondition,
) -> Result<HarmonicCoeffs> {
    analyze_with(mesh, param, &AnalysisOptions::new(k_max, bc))
}

pub fn analyze_with(
    mesh: &TriMesh,
    param: &DiskParam,
    opts: &AnalysisOptions,
) -> Result<HarmonicCoeffs> {
    let plan = plan_for(mesh, param, opts)?;
    analyze_with_plan(mesh, &plan)
}
