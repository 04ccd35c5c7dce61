//! Linear finite elements on planar triangulations.

use crate::sparse::{CsrMatrix, TripletBuilder};

pub(crate) type P2 = [f64; 2];

pub(crate) fn signed_area(a: P2, b: P2, c: P2) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

/// Hat-function gradients of a planar triangle, with its signed area.
pub(crate) fn hat_gradients(p: [P2; 3]) -> ([P2; 3], f64) {
    let area = signed_area(p[0], p[1], p[2]);
    let mut g = [[0.0; 2]; 3];
    for i in 0..3 {
        let a = p[(i + 1) % 3];
        let b = p[(i + 2) % 3];
        // Edge opposite vertex i rotated by -90 degrees, over twice the area.
        g[i] = [(a[1] - b[1]) / (2.0 * area), (b[0] - a[0]) / (2.0 * area)];
    }
    (g, area)
}

/// Lumped (barycentric) mass: a third of each incident face's area.
pub(crate) fn lumped_mass(pos: &[P2], faces: &[[usize; 3]]) -> Vec<f64> {
    let mut m = vec![0.0; pos.len()];
    for f in faces {
        let a = signed_area(pos[f[0]], pos[f[1]], pos[f[2]]).abs() / 3.0;
        for &v in f {
            m[v] += a;
        }
    }
    m
}

/// Gradient of the piecewise-linear interpolant of `values` on one face.
pub(crate) fn face_gradient(pos: &[P2], f: &[usize; 3], values: &[f64]) -> P2 {
    let (g, _) = hat_gradients([pos[f[0]], pos[f[1]], pos[f[2]]]);
    let mut out = [0.0; 2];
    for i in 0..3 {
        out[0] += values[f[i]] * g[i][0];
        out[1] += values[f[i]] * g[i][1];
    }
    out
}

/// `diag + scale * K` with K the cotangent stiffness matrix. Each face adds
/// |A| g_i . g_j, so K stays positive semidefinite even on inverted faces.
pub(crate) fn shifted_stiffness(
    pos: &[P2],
    faces: &[[usize; 3]],
    scale: f64,
    diag: &[f64],
) -> CsrMatrix {
    let mut t = TripletBuilder::new(pos.len());
    for f in faces {
        let (g, area) = hat_gradients([pos[f[0]], pos[f[1]], pos[f[2]]]);
        let w = scale * area.abs();
        for i in 0..3 {
            for j in 0..3 {
                t.add(f[i], f[j], w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]));
            }
        }
    }
    for (i, &d) in diag.iter().enumerate() {
        t.add(i, i, d);
    }
    t.build()
}
