use disk_harmonics::basis::{
    bessel_j, bessel_j_prime, eval_basis, find_eigenvalues, normalization, BoundaryCondition,
    EigenTable,
};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Power series of J_m, good to ~1e-12 for x below about 12.
fn series_j(m: i32, x: f64) -> f64 {
    if m < 0 {
        let s = series_j(-m, x);
        return if m % 2 == 0 { s } else { -s };
    }
    let h = x / 2.0;
    let mut term = h.powi(m) / (1..=m).map(f64::from).product::<f64>();
    let mut sum = term;
    for j in 1..80 {
        term *= -h * h / (j as f64 * (j + m) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn series_jp(m: i32, x: f64) -> f64 {
    0.5 * (series_j(m - 1, x) - series_j(m + 1, x))
}

/// Roots of f in (0, hi] by scanning and bisection.
fn bracketed_roots(f: impl Fn(f64) -> f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let step = 1e-3;
    let mut a = 1e-6;
    while a < hi {
        let b = a + step;
        if f(a) * f(b) < 0.0 {
            let (mut lo, mut up) = (a, b);
            for _ in 0..200 {
                let mid = 0.5 * (lo + up);
                if f(lo) * f(mid) <= 0.0 {
                    up = mid
                } else {
                    lo = mid
                }
            }
            out.push(0.5 * (lo + up));
        }
        a = b;
    }
    out
}

#[test]
fn first_roots_match_known_values() {
    let n0 = find_eigenvalues(0, 1, BoundaryCondition::Neumann).unwrap();
    let n1 = find_eigenvalues(1, 1, BoundaryCondition::Neumann).unwrap();
    assert!((n0[0] - 3.8317059702).abs() < 1e-9);
    assert!((n1[0] - 1.8411837813).abs() < 1e-9);
}

#[test]
fn roots_agree_with_bisection_on_series() {
    for m in 0..6 {
        let neu = bracketed_roots(|x| series_jp(m, x), 12.0);
        let got = find_eigenvalues(m as u32, neu.len(), BoundaryCondition::Neumann).unwrap();
        for (a, b) in neu.iter().zip(&got) {
            assert!((a - b).abs() < 1e-9, "neumann m={m}: {a} vs {b}");
        }
        let dir = bracketed_roots(|x| series_j(m, x), 12.0);
        let got = find_eigenvalues(m as u32, dir.len(), BoundaryCondition::Dirichlet).unwrap();
        for (a, b) in dir.iter().zip(&got) {
            assert!((a - b).abs() < 1e-9, "dirichlet m={m}: {a} vs {b}");
        }
    }
}

#[test]
fn bessel_values_match_series() {
    for m in 0..8u32 {
        for i in 0..60 {
            let x = 0.2 * i as f64;
            assert!(
                (bessel_j(m, x) - series_j(m as i32, x)).abs() < 1e-11,
                "J_{m}({x})"
            );
            assert!(
                (bessel_j_prime(m, x) - series_jp(m as i32, x)).abs() < 1e-11,
                "J'_{m}({x})"
            );
        }
    }
}

#[test]
fn eigenvalue_spacing_tends_to_pi() {
    let t = EigenTable::new(40, BoundaryCondition::Neumann).unwrap();
    for k in 20..40 {
        let gap = t.eigenvalue(0, k + 1) - t.eigenvalue(0, k);
        assert!((gap - PI).abs() < 0.05, "gap at k={k}: {gap}");
    }
}

/// Midpoint polar quadrature of <D_a, D_b> over the unit disk.
#[test]
fn basis_is_orthonormal_under_quadrature() {
    for bc in [BoundaryCondition::Neumann, BoundaryCondition::Dirichlet] {
        let k_max = 5;
        let t = EigenTable::new(k_max, bc).unwrap();
        let (nr, np) = (600, 64);
        let mut idx = Vec::new();
        for k in 0..=k_max {
            for m in -(k as i32)..=k as i32 {
                idx.push((k, m));
            }
        }
        let mut vals = vec![Vec::with_capacity(nr * np); idx.len()];
        let mut w = Vec::with_capacity(nr * np);
        for i in 0..nr {
            let r = (i as f64 + 0.5) / nr as f64;
            for j in 0..np {
                let p = 2.0 * PI * j as f64 / np as f64;
                w.push(r / nr as f64 * 2.0 * PI / np as f64);
                for (s, &(k, m)) in idx.iter().enumerate() {
                    vals[s].push(eval_basis(&t, k, m, r, p).unwrap());
                }
            }
        }
        for a in 0..idx.len() {
            for b in 0..idx.len() {
                let g: num_complex::Complex64 = (0..w.len())
                    .map(|q| vals[a][q] * vals[b][q].conj() * w[q])
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (g.re - want).abs() < 1e-3 && g.im.abs() < 1e-3,
                    "{bc} {:?} {:?}: {g}",
                    idx[a],
                    idx[b]
                );
            }
        }
    }
}

#[test]
fn constant_mode_normalisation() {
    assert!(
        (normalization(0, 0.0, BoundaryCondition::Neumann).unwrap() - 1.0 / PI.sqrt()).abs()
            < 1e-15
    );
    assert!(normalization(1, 0.0, BoundaryCondition::Neumann).is_err());
}

proptest! {
    #[test]
    fn negative_orders_follow_condon_shortley(k in 1usize..12, m in 1i32..12, rho in 0.0f64..1.0, phi in 0.0f64..std::f64::consts::TAU) {
        prop_assume!(m as usize <= k);
        let t = EigenTable::new(12, BoundaryCondition::Neumann).unwrap();
        let pos = eval_basis(&t, k, m, rho, phi).unwrap();
        let neg = eval_basis(&t, k, -m, rho, phi).unwrap();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((neg - pos.conj() * sign).norm() < 1e-14);
    }

    #[test]
    fn bessel_recurrence(m in 1u32..30, x in 0.1f64..150.0) {
        let lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
        let rhs = 2.0 * m as f64 / x * bessel_j(m, x);
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()), "m={} x={}: {} vs {}", m, x, lhs, rhs);
    }

    #[test]
    fn roots_are_roots(m in 0u32..40, count in 1usize..30) {
        for l in find_eigenvalues(m, count, BoundaryCondition::Neumann).unwrap() {
            prop_assert!(bessel_j_prime(m, l).abs() < 1e-10);
        }
        let d = find_eigenvalues(m, count, BoundaryCondition::Dirichlet).unwrap();
        prop_assert!(d.windows(2).all(|w| w[1] > w[0]));
        for l in d {
            prop_assert!(bessel_j(m, l).abs() < 1e-10);
        }
    }
}
