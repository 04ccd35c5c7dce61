//! Oriented bounding boxes from principal component analysis.

use super::Vec3;
use crate::error::{invalid, Result};
use nalgebra::{Matrix3, SymmetricEigen};

/// Oriented box with half-lengths sorted `a >= b >= c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObbFit {
    pub half_lengths: [f64; 3],
    /// Columns are the box axes, in the order of `half_lengths`.
    pub rotation: Matrix3<f64>,
    pub center: Vec3,
}

/// PCA box: axes from the covariance of the centred points, extents from the
/// projected min/max along each axis.
pub fn obb_fit(points: &[Vec3]) -> Result<ObbFit> {
    if points.len() < 2 {
        return Err(invalid("obb_fit needs at least 2 points"));
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(Vec3::zeros(), |s, p| s + p) / n;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - mean;
        cov += d * d.transpose();
    }
    cov /= n;
    let eig = SymmetricEigen::new(cov);
    let mut axes: Vec<(f64, Vec3)> = (0..3)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
        .collect();
    axes.sort_by(|x, y| y.0.total_cmp(&x.0));

    let mut boxes: Vec<(f64, f64, Vec3)> = axes
        .iter()
        .map(|(_, axis)| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in points {
                let t = (p - mean).dot(axis);
                lo = lo.min(t);
                hi = hi.max(t);
            }
            (0.5 * (hi - lo), 0.5 * (hi + lo), *axis)
        })
        .collect();
    boxes.sort_by(|x, y| y.0.total_cmp(&x.0));

    let mut rotation = Matrix3::from_columns(&[boxes[0].2, boxes[1].2, boxes[2].2]);
    if rotation.determinant() < 0.0 {
        rotation.set_column(2, &(-boxes[2].2));
    }
    let center = mean + boxes.iter().fold(Vec3::zeros(), |s, b| s + b.2 * b.1);
    Ok(ObbFit {
        half_lengths: [boxes[0].0, boxes[1].0, boxes[2].0],
        rotation,
        center,
    })
}
