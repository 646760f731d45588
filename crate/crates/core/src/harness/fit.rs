//! Least-squares polynomial trend lines.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFit {
    pub degree: usize,
    /// Lowest order first.
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Fit `y = Σ c_j x^j` by least squares.
///
/// The design matrix is built on `x` centred and scaled to `[-1, 1]` and
/// solved by SVD, which keeps degree-4 fits over `x` in the hundreds well
/// conditioned; the coefficients are then expanded back to powers of raw `x`.
pub fn fit_polynomial(points: &[(f64, f64)], degree: usize) -> Result<PolyFit> {
    if points.len() < degree + 1 {
        return Err(Error::Fit(format!(
            "degree {degree} needs at least {} points, got {}",
            degree + 1,
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Fit("points must be finite".into()));
    }
    let n = points.len();
    let centre = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let spread = points.iter().map(|p| (p.0 - centre).abs()).fold(0.0, f64::max);
    let scale = if spread > 0.0 { spread } else { 1.0 };

    let design = DMatrix::from_fn(n, degree + 1, |i, j| ((points[i].0 - centre) / scale).powi(j as i32));
    let rhs = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let svd = design.clone().svd(true, true);
    let largest = svd.singular_values.max();
    let tol = largest * 1e-12 * n.max(degree + 1) as f64;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < degree + 1 {
        return Err(Error::Fit(format!(
            "design matrix has rank {rank}, degree {degree} needs {}; too few distinct x values",
            degree + 1
        )));
    }
    let scaled = svd
        .solve(&rhs, tol)
        .map_err(|e| Error::Fit(e.to_string()))?;

    // Σ_j s_j ((x - m)/d)^j = Σ_j s_j d^-j Σ_i C(j,i) x^i (-m)^(j-i)
    let mut coefficients = vec![0.0; degree + 1];
    for j in 0..=degree {
        let sj = scaled[j] / scale.powi(j as i32);
        let mut binom = 1.0;
        for i in 0..=j {
            coefficients[i] += sj * binom * (-centre).powi((j - i) as i32);
            binom = binom * (j - i) as f64 / (i + 1) as f64;
        }
    }

    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let fitted: f64 = (0..=degree).map(|j| scaled[j] * design[(i, j)]).sum();
            (p.1 - fitted).powi(2)
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(PolyFit {
        degree,
        coefficients,
        r_squared,
    })
}
