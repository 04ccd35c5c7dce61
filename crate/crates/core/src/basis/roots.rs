//! Bracketing scan plus Muller refinement for the zeros of J_m and J'_m.

use super::bessel::{bessel_j, bessel_j_prime};
use super::BoundaryCondition;
use crate::error::{Error, Result};
use std::f64::consts::PI;

const SCAN_STEP: f64 = PI / 8.0;
const MAX_ITERS: usize = 100;
const RESIDUAL_TARGET: f64 = 1e-13;
const RESIDUAL_ACCEPT: f64 = 1e-12;

/// The first `count` positive roots of J'_m (Neumann) or J_m (Dirichlet), ascending.
///
/// The trivial root at zero is never returned; the eigen table adds it back for
/// the Neumann constant mode.
pub fn find_eigenvalues(m: u32, count: usize, bc: BoundaryCondition) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(crate::error::invalid("root count must be at least 1"));
    }
    let f = |x: f64| match bc {
        BoundaryCondition::Neumann => bessel_j_prime(m, x),
        BoundaryCondition::Dirichlet => bessel_j(m, x),
    };
    // No admissible root lies below m (or below 1.8 when m is 0 or 1).
    let mut a = (m as f64).max(0.5);
    let mut fa = f(a);
    let mut roots = Vec::with_capacity(count);
    while roots.len() < count {
        let b = a + SCAN_STEP;
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            roots.push(muller(&f, a, b, fa, fb).map_err(|e| match e {
                Error::NoConvergence(msg) => {
                    Error::NoConvergence(format!("m = {m}, bracket [{a}, {b}]: {msg}"))
                }
                other => other,
            })?);
        }
        a = b;
        fa = fb;
    }
    validate_count(m, bc, &roots)?;
    Ok(roots)
}

/// Compares the number of roots found with the Debye phase estimate of how many
/// zeros lie below the last one. A skipped root shows up as an off-by-one.
fn validate_count(m: u32, bc: BoundaryCondition, roots: &[f64]) -> Result<()> {
    let last = *roots.last().expect("non-empty");
    let (order, offset) = match (bc, m) {
        (BoundaryCondition::Dirichlet, _) => (m as f64, 0.25),
        (BoundaryCondition::Neumann, 0) => (1.0, 0.25),
        (BoundaryCondition::Neumann, _) => (m as f64, 0.75),
    };
    let x = last.max(order);
    let phase = (x * x - order * order).max(0.0).sqrt() - order * (order / x).min(1.0).acos();
    let estimate = phase / PI + offset;
    if (estimate - roots.len() as f64).abs() > 1.0 {
        return Err(Error::NoConvergence(format!(
            "root count check failed for m = {m}: found {}, expected about {estimate:.2}",
            roots.len()
        )));
    }
    for w in roots.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::NoConvergence(format!(
                "roots not increasing for m = {m}"
            )));
        }
    }
    Ok(())
}

fn muller(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fb: f64) -> Result<f64> {
    let (mut lo, mut hi, mut flo) = (a, b, fa);
    let mut xs = [a, b, 0.5 * (a + b)];
    let mut fs = [fa, fb, f(xs[2])];
    let mut best = (xs[2], fs[2]);
    for _ in 0..MAX_ITERS {
        let (x2, f2) = (xs[2], fs[2]);
        if f2.abs() < best.1.abs() {
            best = (x2, f2);
        }
        if f2.abs() < RESIDUAL_TARGET {
            return Ok(x2);
        }
        if f2 == 0.0 || (hi - lo) <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let h1 = xs[1] - xs[0];
        let h2 = xs[2] - xs[1];
        let d1 = (fs[1] - fs[0]) / h1;
        let d2 = (fs[2] - fs[1]) / h2;
        let aa = (d2 - d1) / (h2 + h1);
        let bb = aa * h2 + d2;
        let disc = bb * bb - 4.0 * aa * f2;
        let mut x3 = f64::NAN;
        if disc >= 0.0 {
            let rad = disc.sqrt();
            let den = if (bb + rad).abs() > (bb - rad).abs() {
                bb + rad
            } else {
                bb - rad
            };
            if den != 0.0 {
                x3 = x2 - 2.0 * f2 / den;
            }
        }
        if !x3.is_finite() || x3 <= lo || x3 >= hi {
            x3 = 0.5 * (lo + hi);
        }
        let f3 = f(x3);
        if (f3 < 0.0) == (flo < 0.0) {
            lo = x3;
            flo = f3;
        } else {
            hi = x3;
        }
        xs = [xs[1], xs[2], x3];
        fs = [fs[1], fs[2], f3];
    }
    if fs[2].abs() < best.1.abs() {
        best = (xs[2], fs[2]);
    }
    if best.1.abs() < RESIDUAL_ACCEPT {
        Ok(best.0)
    } else {
        Err(Error::NoConvergence(format!(
            "residual {:e} after {MAX_ITERS} iterations",
            best.1
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_roots_match_known_values() {
        let r = find_eigenvalues(0, 3, BoundaryCondition::Neumann).unwrap();
        assert!((r[0] - 3.831_705_970_207_512).abs() < 1e-12);
        assert!((r[1] - 7.015_586_669_815_619).abs() < 1e-12);
        let r = find_eigenvalues(0, 2, BoundaryCondition::Dirichlet).unwrap();
        assert!((r[0] - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((r[1] - 5.520_078_110_286_311).abs() < 1e-12);
    }

    #[test]
    fn high_order_roots_are_all_found() {
        for m in [10u32, 40, 70] {
            for bc in [BoundaryCondition::Neumann, BoundaryCondition::Dirichlet] {
                let r = find_eigenvalues(m, 30, bc).unwrap();
                assert_eq!(r.len(), 30);
                assert!(r[0] > m as f64);
            }
        }
    }
}
