//! Least-squares fits of disk-harmonic coefficients to scattered samples.
//!
//! For real signals the complex coefficients obey `q_{-m} = (-1)^m conj(q_m)`,
//! so the fit is carried out over a real basis of `(K+1)^2` columns:
//! `R_{0k}` for m = 0 and `2 R_{mk} cos(m phi)`, `-2 R_{mk} sin(m phi)` for
//! m > 0, whose unknowns are `Re q_m^k` and `Im q_m^k`. This has exactly the
//! same solution as the complex problem.

use crate::basis::{EigenTable, RadialTable};
use crate::error::{invalid, Error, Result};
use nalgebra::{DMatrix, Dyn, QR};
use num_complex::Complex64;

/// Factorisation used by an [`LsqPlan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverMethod {
    /// QR when the design matrix fits in memory comfortably, otherwise normal equations.
    #[default]
    Auto,
    /// Householder QR of the full design matrix.
    Qr,
    /// Cholesky factorisation of the Gram matrix, assembled in row chunks.
    NormalEquations,
}

/// Largest design matrix (entries) that `Auto` factorises by QR.
const QR_LIMIT: usize = 1 << 23;
const CHUNK: usize = 1024;
const GRAM_NB: usize = 512;
const NB: usize = 128;

enum Factor {
    Qr(QR<f64, Dyn, Dyn>),
    // Lower Cholesky factor, row-major p x p.
    Cholesky(Vec<f64>),
}

/// Coefficients of one scalar signal, indexed `k^2 + k + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFit {
    pub q: Vec<Complex64>,
    /// Euclidean norm of the (weighted) residual.
    pub residual: f64,
}

/// A factorised least-squares problem for one sample layout, reusable for any
/// number of signals sampled at the same points.
pub struct LsqPlan {
    table: EigenTable,
    radial: RadialTable,
    rho: Vec<f64>,
    phi: Vec<f64>,
    sqrt_w: Option<Vec<f64>>,
    factor: Factor,
    condition: f64,
}

impl std::fmt::Debug for LsqPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LsqPlan")
            .field("k_max", &self.table.k_max())
            .field("samples", &self.rho.len())
            .field("method", &self.method())
            .field("condition", &self.condition)
            .finish()
    }
}

impl LsqPlan {
    /// Builds and factorises the design matrix for samples at `(rho, phi)`,
    /// optionally weighted. `rho` may exceed 1 (e.g. square patches).
    pub fn new(
        table: &EigenTable,
        rho: Vec<f64>,
        phi: Vec<f64>,
        weights: Option<Vec<f64>>,
        method: SolverMethod,
    ) -> Result<Self> {
        let n = rho.len();
        let p = unknowns(table.k_max());
        if phi.len() != n {
            return Err(invalid("rho and phi have different lengths"));
        }
        if n < p {
            return Err(Error::Underdetermined {
                samples: n,
                unknowns: p,
            });
        }
        if rho.iter().chain(&phi).any(|x| !x.is_finite()) || rho.iter().any(|&r| r < 0.0) {
            return Err(invalid("sample coordinates must be finite with rho >= 0"));
        }
        let sqrt_w = match weights {
            Some(w) => {
                if w.len() != n || w.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                    return Err(invalid("weights must be positive, one per sample"));
                }
                Some(w.iter().map(|x| x.sqrt()).collect())
            }
            None => None,
        };
        let rho_max = rho.iter().cloned().fold(1.0, f64::max);
        let radial = RadialTable::new(table, rho_max);
        let mut plan = LsqPlan {
            table: table.clone(),
            radial,
            rho,
            phi,
            sqrt_w,
            factor: Factor::Cholesky(Vec::new()),
            condition: 0.0,
        };
        let use_qr = match method {
            SolverMethod::Auto => n * p <= QR_LIMIT,
            SolverMethod::Qr => true,
            SolverMethod::NormalEquations => false,
        };
        if use_qr {
            let mut b = DMatrix::<f64>::zeros(n, p);
            let mut rad = vec![0.0; plan.radial.len()];
            let mut row = vec![0.0; p];
            for i in 0..n {
                plan.fill_row(i, &mut rad, &mut row);
                for (j, v) in row.iter().enumerate() {
                    b[(i, j)] = *v;
                }
            }
            let qr = b.qr();
            let d: Vec<f64> = qr.r().diagonal().iter().map(|x| x.abs()).collect();
            plan.condition = diag_condition(&d)?;
            plan.factor = Factor::Qr(qr);
        } else {
            let mut g = plan.gram();
            cholesky_in_place(&mut g, p)?;
            let d: Vec<f64> = (0..p).map(|i| g[i * p + i]).collect();
            plan.condition = diag_condition(&d)?;
            plan.factor = Factor::Cholesky(g);
        }
        Ok(plan)
    }

    pub fn table(&self) -> &EigenTable {
        &self.table
    }

    pub fn num_samples(&self) -> usize {
        self.rho.len()
    }

    pub fn num_unknowns(&self) -> usize {
        unknowns(self.table.k_max())
    }

    pub fn method(&self) -> SolverMethod {
        match self.factor {
            Factor::Qr(_) => SolverMethod::Qr,
            Factor::Cholesky(_) => SolverMethod::NormalEquations,
        }
    }

    /// Estimated condition number of `B^T B`, from the factor's diagonal.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// Fits every signal in `signals` (each one value per sample).
    pub fn solve_batch(&self, signals: &[&[f64]]) -> Result<Vec<ScalarFit>> {
        let n = self.num_samples();
        let p = self.num_unknowns();
        for s in signals {
            if s.len() != n {
                return Err(invalid(format!(
                    "signal has {} values for {n} samples",
                    s.len()
                )));
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("input signal".into()));
            }
        }
        let r = signals.len();
        let w = |i: usize| self.sqrt_w.as_ref().map_or(1.0, |w| w[i]);
        let mut out = Vec::with_capacity(r);
        match &self.factor {
            Factor::Qr(qr) => {
                let mut rhs = DMatrix::<f64>::from_fn(n, r, |i, j| signals[j][i] * w(i));
                qr.q_tr_mul(&mut rhs);
                let rmat = qr.r();
                for j in 0..r {
                    let top = rhs.view((0, j), (p, 1)).into_owned();
                    let x = rmat
                        .solve_upper_triangular(&top)
                        .ok_or_else(|| Error::Singular("R factor".into()))?;
                    let residual = rhs.view((p, j), (n - p, 1)).norm();
                    out.push(ScalarFit {
                        q: self.unpack(x.as_slice()),
                        residual,
                    });
                }
            }
            Factor::Cholesky(l) => {
                // B^T V, p x r row-major, accumulated chunk by chunk.
                let mut btv = vec![0.0; p * r];
                let mut chunk = vec![0.0; CHUNK * p];
                let mut vals = vec![0.0; CHUNK * r];
                let mut rad = vec![0.0; self.radial.len()];
                for start in (0..n).step_by(CHUNK) {
                    let rows = CHUNK.min(n - start);
                    for i in 0..rows {
                        self.fill_row(start + i, &mut rad, &mut chunk[i * p..(i + 1) * p]);
                        for j in 0..r {
                            let v = signals[j][start + i] * w(start + i);
                            vals[i * r + j] = v;
                        }
                    }
                    // SAFETY: all pointers address live buffers with the given shapes and strides.
                    unsafe {
                        matrixmultiply::dgemm(
                            p,
                            rows,
                            r,
                            1.0,
                            chunk.as_ptr(),
                            1,
                            p as isize,
                            vals.as_ptr(),
                            r as isize,
                            1,
                            1.0,
                            btv.as_mut_ptr(),
                            r as isize,
                            1,
                        );
                    }
                }
                // X, p x r row-major.
                let mut x = vec![0.0; p * r];
                for j in 0..r {
                    let b: Vec<f64> = (0..p).map(|i| btv[i * r + j]).collect();
                    for (i, v) in cholesky_solve(l, p, &b).into_iter().enumerate() {
                        x[i * r + j] = v;
                    }
                }
                // Second pass for the residual; the shortcut |V|^2 - X^T B^T V cancels badly.
                let mut res2 = vec![0.0; r];
                let mut fitted = vec![0.0; CHUNK * r];
                for start in (0..n).step_by(CHUNK) {
                    let rows = CHUNK.min(n - start);
                    for i in 0..rows {
                        self.fill_row(start + i, &mut rad, &mut chunk[i * p..(i + 1) * p]);
                    }
                    // SAFETY: as above.
                    unsafe {
                        matrixmultiply::dgemm(
                            rows,
                            p,
                            r,
                            1.0,
                            chunk.as_ptr(),
                            p as isize,
                            1,
                            x.as_ptr(),
                            r as isize,
                            1,
                            0.0,
                            fitted.as_mut_ptr(),
                            r as isize,
                            1,
                        );
                    }
                    for i in 0..rows {
                        for j in 0..r {
                            let d = signals[j][start + i] * w(start + i) - fitted[i * r + j];
                            res2[j] += d * d;
                        }
                    }
                }
                for j in 0..r {
                    let xj: Vec<f64> = (0..p).map(|i| x[i * r + j]).collect();
                    out.push(ScalarFit {
                        q: self.unpack(&xj),
                        residual: res2[j].sqrt(),
                    });
                }
            }
        }
        Ok(out)
    }

    /// Writes the weighted design-matrix row of sample `i`.
    fn fill_row(&self, i: usize, rad: &mut [f64], row: &mut [f64]) {
        let k_max = self.table.k_max();
        self.radial.eval_all(self.rho[i], rad);
        let w = self.sqrt_w.as_ref().map_or(1.0, |w| w[i]);
        for k in 0..=k_max {
            row[k] = w * rad[k];
        }
        let (s1, c1) = self.phi[i].sin_cos();
        let (mut s, mut c) = (0.0, 1.0);
        let mut col = k_max + 1;
        for m in 1..=k_max {
            (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
            let (cw, sw) = (2.0 * w * c, -2.0 * w * s);
            for &r in &rad[self.radial.offset(m)..][..k_max + 1 - m] {
                row[col] = cw * r;
                row[col + 1] = sw * r;
                col += 2;
            }
        }
    }

    /// Expands packed real unknowns into complex coefficients for all (k, m).
    fn unpack(&self, x: &[f64]) -> Vec<Complex64> {
        let k_max = self.table.k_max();
        let mut q = vec![Complex64::new(0.0, 0.0); unknowns(k_max)];
        for k in 0..=k_max {
            q[k * k + k] = Complex64::new(x[k], 0.0);
        }
        let mut col = k_max + 1;
        for m in 1..=k_max {
            for k in m..=k_max {
                let z = Complex64::new(x[col], x[col + 1]);
                col += 2;
                q[k * k + k + m] = z;
                let zc = if m % 2 == 0 { z.conj() } else { -z.conj() };
                q[k * k + k - m] = zc;
            }
        }
        q
    }

    /// Lower triangle of `B^T B`, row-major.
    fn gram(&self) -> Vec<f64> {
        let n = self.num_samples();
        let p = self.num_unknowns();
        let mut g = vec![0.0; p * p];
        let mut chunk = vec![0.0; CHUNK * p];
        let mut rad = vec![0.0; self.radial.len()];
        for start in (0..n).step_by(CHUNK) {
            let rows = CHUNK.min(n - start);
            for i in 0..rows {
                self.fill_row(start + i, &mut rad, &mut chunk[i * p..(i + 1) * p]);
            }
            for j0 in (0..p).step_by(GRAM_NB) {
                let nb = GRAM_NB.min(p - j0);
                // G[j0.., j0..j0+nb] += C[:, j0..]^T C[:, j0..j0+nb]
                // SAFETY: the operands lie inside `chunk` and `g` for the given strides.
                unsafe {
                    matrixmultiply::dgemm(
                        p - j0,
                        rows,
                        nb,
                        1.0,
                        chunk.as_ptr().add(j0),
                        1,
                        p as isize,
                        chunk.as_ptr().add(j0),
                        p as isize,
                        1,
                        1.0,
                        g.as_mut_ptr().add(j0 * p + j0),
                        p as isize,
                        1,
                    );
                }
            }
        }
        g
    }
}

/// Number of real unknowns (and complex coefficients) up to degree `k_max`.
pub fn unknowns(k_max: usize) -> usize {
    (k_max + 1) * (k_max + 1)
}

fn diag_condition(d: &[f64]) -> Result<f64> {
    let max = d.iter().cloned().fold(0.0, f64::max);
    let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) || !max.is_finite() {
        return Err(Error::Singular("design matrix is rank deficient".into()));
    }
    Ok((max / min).powi(2))
}

/// Blocked right-looking Cholesky on the lower triangle of a row-major matrix.
fn cholesky_in_place(g: &mut [f64], p: usize) -> Result<()> {
    for k0 in (0..p).step_by(NB) {
        let k1 = (k0 + NB).min(p);
        for j in k0..k1 {
            let d = g[j * p + j] - (k0..j).map(|t| g[j * p + t] * g[j * p + t]).sum::<f64>();
            if !(d > 0.0) {
                return Err(Error::Singular(format!(
                    "Gram matrix is not positive definite at column {j}"
                )));
            }
            let ljj = d.sqrt();
            g[j * p + j] = ljj;
            for i in j + 1..k1 {
                let s = g[i * p + j] - (k0..j).map(|t| g[i * p + t] * g[j * p + t]).sum::<f64>();
                g[i * p + j] = s / ljj;
            }
        }
        for i in k1..p {
            for j in k0..k1 {
                let s = g[i * p + j] - (k0..j).map(|t| g[i * p + t] * g[j * p + t]).sum::<f64>();
                g[i * p + j] = s / g[j * p + j];
            }
        }
        for j0 in (k1..p).step_by(NB) {
            let nb = NB.min(p - j0);
            // G[j0.., j0..j0+nb] -= L[j0.., k0..k1] L[j0..j0+nb, k0..k1]^T
            // SAFETY: reads columns k0..k1 and writes columns >= k1 of the same buffer.
            unsafe {
                let base = g.as_mut_ptr();
                matrixmultiply::dgemm(
                    p - j0,
                    k1 - k0,
                    nb,
                    -1.0,
                    base.add(j0 * p + k0),
                    p as isize,
                    1,
                    base.add(j0 * p + k0),
                    1,
                    p as isize,
                    1.0,
                    base.add(j0 * p + j0),
                    p as isize,
                    1,
                );
            }
        }
    }
    Ok(())
}

fn cholesky_solve(l: &[f64], p: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..p {
        let row = &l[i * p..i * p + i];
        let s: f64 = row.iter().zip(&y[..i]).map(|(a, b)| a * b).sum();
        y[i] = (y[i] - s) / l[i * p + i];
    }
    for i in (0..p).rev() {
        y[i] /= l[i * p + i];
        let xi = y[i];
        for t in 0..i {
            y[t] -= l[i * p + t] * xi;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{eval_basis, BoundaryCondition};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn samples(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                (
                    rng.random::<f64>().sqrt(),
                    rng.random::<f64>() * std::f64::consts::TAU,
                )
            })
            .unzip()
    }

    #[test]
    fn blocked_cholesky_matches_product() {
        let p = 300;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: Vec<f64> = (0..p * p).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut g = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..=i {
                let s: f64 = (0..p).map(|t| a[i * p + t] * a[j * p + t]).sum();
                g[i * p + j] = s + if i == j { p as f64 } else { 0.0 };
            }
        }
        let orig = g.clone();
        cholesky_in_place(&mut g, p).unwrap();
        for i in (0..p).step_by(37) {
            for j in (0..=i).step_by(11) {
                let s: f64 = (0..=j).map(|t| g[i * p + t] * g[j * p + t]).sum();
                assert!((s - orig[i * p + j]).abs() < 1e-9 * orig[i * p + i].abs());
            }
        }
    }

    #[test]
    fn both_factorisations_agree() {
        let table = EigenTable::new(6, BoundaryCondition::Neumann).unwrap();
        let (rho, phi) = samples(400, 1);
        let v: Vec<f64> = rho
            .iter()
            .zip(&phi)
            .map(|(r, p)| (3.0 * r * p.cos()).sin() + r * r)
            .collect();
        let a = LsqPlan::new(&table, rho.clone(), phi.clone(), None, SolverMethod::Qr).unwrap();
        let b = LsqPlan::new(&table, rho, phi, None, SolverMethod::NormalEquations).unwrap();
        assert_eq!(a.method(), SolverMethod::Qr);
        assert_eq!(b.method(), SolverMethod::NormalEquations);
        let fa = &a.solve_batch(&[&v]).unwrap()[0];
        let fb = &b.solve_batch(&[&v]).unwrap()[0];
        for (x, y) in fa.q.iter().zip(&fb.q) {
            assert!((x - y).norm() < 1e-9);
        }
        assert!((fa.residual - fb.residual).abs() < 1e-6);
    }

    #[test]
    fn single_basis_function_is_recovered() {
        let table = EigenTable::new(7, BoundaryCondition::Neumann).unwrap();
        let (rho, phi) = samples(2000, 2);
        let a = Complex64::new(0.7, -0.4);
        // Real signal a D_3^5 + conj(a D_3^5) = 2 Re(a D_3^5).
        let v: Vec<f64> = rho
            .iter()
            .zip(&phi)
            .map(|(&r, &p)| 2.0 * (a * eval_basis(&table, 5, 3, r, p).unwrap()).re)
            .collect();
        for method in [SolverMethod::Qr, SolverMethod::NormalEquations] {
            let plan = LsqPlan::new(&table, rho.clone(), phi.clone(), None, method).unwrap();
            let fit = &plan.solve_batch(&[&v]).unwrap()[0];
            for (j, q) in fit.q.iter().enumerate() {
                let want = if j == 25 + 5 + 3 {
                    a
                } else if j == 25 + 5 - 3 {
                    -a.conj()
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((q - want).norm() < 1e-8, "{method:?} j={j} {q} vs {want}");
            }
            assert!(fit.residual < 1e-8);
        }
    }

    #[test]
    fn too_few_samples() {
        let table = EigenTable::new(4, BoundaryCondition::Neumann).unwrap();
        let (rho, phi) = samples(24, 0);
        let e = LsqPlan::new(&table, rho, phi, None, SolverMethod::Auto).unwrap_err();
        assert!(matches!(
            e,
            Error::Underdetermined {
                samples: 24,
                unknowns: 25
            }
        ));
    }
}
