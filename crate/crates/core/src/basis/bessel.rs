//! Bessel functions of the first kind, integer order.
//!
//! Small arguments use the ascending series. Everything else goes through
//! Miller's backward recurrence normalised with J0 + 2(J2 + J4 + ...) = 1.

const RESCALE_AT: f64 = 1e250;

/// J_m(x).
pub fn bessel_j(m: u32, x: f64) -> f64 {
    triplet(m, x).1
}

/// J'_m(x), using J'_m = (J_{m-1} - J_{m+1}) / 2 and J'_0 = -J_1.
pub fn bessel_j_prime(m: u32, x: f64) -> f64 {
    let (lo, _, hi) = triplet(m, x);
    if m == 0 {
        -hi
    } else {
        0.5 * (lo - hi)
    }
}

/// (J_m(x), J'_m(x)) from a single evaluation.
pub fn bessel_j_and_prime(m: u32, x: f64) -> (f64, f64) {
    let (lo, mid, hi) = triplet(m, x);
    let d = if m == 0 { -hi } else { 0.5 * (lo - hi) };
    (mid, d)
}

/// (J_{m-1}, J_m, J_{m+1}); for m = 0 the first slot holds J_{-1} = -J_1.
fn triplet(m: u32, x: f64) -> (f64, f64, f64) {
    if x < 0.0 {
        // J_n(-x) = (-1)^n J_n(x)
        let (a, b, c) = triplet(m, -x);
        let s = if m % 2 == 0 { 1.0 } else { -1.0 };
        return (-s * a, s * b, -s * c);
    }
    if x == 0.0 {
        let at = |n: i64| if n == 0 { 1.0 } else { 0.0 };
        return (at(m as i64 - 1), at(m as i64), at(m as i64 + 1));
    }
    let h = 0.5 * x;
    if x <= 8.0 || h * h < (m as f64 + 1.0) {
        let jm = series(m, x);
        let jp = series(m + 1, x);
        let jl = if m == 0 { -jp } else { series(m - 1, x) };
        (jl, jm, jp)
    } else {
        miller(m, x)
    }
}

fn series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut t = 1.0;
    for i in 1..=n {
        t *= h / i as f64;
    }
    if t == 0.0 {
        return 0.0;
    }
    let q = -h * h;
    let mut sum = t;
    let mut biggest = t.abs();
    let mut s = 0.0;
    loop {
        s += 1.0;
        t *= q / (s * (s + n as f64));
        sum += t;
        biggest = biggest.max(t.abs());
        if t.abs() <= 1e-18 * biggest || s > 400.0 {
            break;
        }
    }
    sum
}

fn miller(m: u32, x: f64) -> (f64, f64, f64) {
    let top = (m as f64 + 1.0).max(x.ceil());
    let mut start = (top + (160.0 * top).sqrt() + 20.0) as u64;
    start += start % 2;
    let m = m as u64;
    let two_over_x = 2.0 / x;

    let mut above = 0.0;
    let mut cur = 1.0;
    let mut sum = 0.0;
    let mut rec = [0.0f64; 3];
    let mut k = start;
    loop {
        if k + 1 == m {
            rec[0] = cur;
        } else if k == m {
            rec[1] = cur;
        } else if k == m + 1 {
            rec[2] = cur;
        }
        if k == 0 {
            sum += cur;
            break;
        }
        if k % 2 == 0 {
            sum += 2.0 * cur;
        }
        let below = k as f64 * two_over_x * cur - above;
        above = cur;
        cur = below;
        k -= 1;
        if cur.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            cur *= s;
            above *= s;
            sum *= s;
            for r in &mut rec {
                *r *= s;
            }
        }
    }
    let scale = 1.0 / sum;
    if m == 0 {
        rec[0] = -rec[2];
    }
    (rec[0] * scale, rec[1] * scale, rec[2] * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert_eq!(bessel_j(1, 0.0), 0.0);
        assert_eq!(bessel_j_prime(0, 0.0), 0.0);
        assert_eq!(bessel_j_prime(1, 0.0), 0.5);
        assert_eq!(bessel_j_prime(2, 0.0), 0.0);
    }

    #[test]
    fn series_and_recurrence_agree_where_both_apply() {
        for m in 0..6u32 {
            for &x in &[8.5, 9.0, 10.0, 11.5] {
                let a = series(m, x);
                let b = miller(m, x).1;
                assert!((a - b).abs() < 1e-12, "m={m} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn negative_argument_parity() {
        assert!((bessel_j(3, -2.5) + bessel_j(3, 2.5)).abs() < 1e-16);
        assert!((bessel_j(2, -12.5) - bessel_j(2, 12.5)).abs() < 1e-16);
    }

    #[test]
    fn huge_order_small_argument_underflows_cleanly() {
        let v = bessel_j(300, 1.0);
        assert!(v >= 0.0 && v < 1e-300);
    }
}
