//! Small statistics helpers shared by the simulator reports and the harness.

use serde::{Deserialize, Serialize};

use crate::evolve::DegreeHistogram;
use crate::meanfield::MeanFieldConstants;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Ordinary least-squares line through `(x, y)` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

pub fn fit_line(points: &[(f64, f64)]) -> Option<LineFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        points: points.len(),
    })
}

/// Which variable the log-log fit of a degree density uses on its abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlopeAxis {
    /// `ln k`.
    Degree,
    /// `ln(A k + B - 2zC)`, the variable the analytic density is a pure power of.
    Shifted { consts: MeanFieldConstants, z: f64 },
}

impl SlopeAxis {
    fn transform(&self, k: f64) -> Option<f64> {
        let x = match self {
            SlopeAxis::Degree => k,
            SlopeAxis::Shifted { consts, z } => consts.argument(k, *z),
        };
        (x > 0.0).then(|| x.ln())
    }
}

/// Least-squares slope of `ln density` against the chosen axis over the
/// observed degrees in `[k_lo, k_hi]`.
pub fn density_slope(hist: &DegreeHistogram, k_lo: u32, k_hi: u32, axis: SlopeAxis) -> Option<LineFit> {
    let points: Vec<(f64, f64)> = hist
        .density()
        .into_iter()
        .filter(|&(k, d)| k >= k_lo && k <= k_hi && d > 0.0)
        .filter_map(|(k, d)| axis.transform(k as f64).map(|x| (x, d.ln())))
        .collect();
    fit_line(&points)
}

/// Same fit applied to a density given as a function, sampled at every
/// integer degree in `[k_lo, k_hi]`.
pub fn curve_slope(f: impl Fn(f64) -> f64, k_lo: u32, k_hi: u32, axis: SlopeAxis) -> Option<LineFit> {
    let points: Vec<(f64, f64)> = (k_lo..=k_hi)
        .filter_map(|k| {
            let y = f(k as f64);
            if y > 0.0 {
                axis.transform(k as f64).map(|x| (x, y.ln()))
            } else {
                None
            }
        })
        .collect();
    fit_line(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::KindFilter;
    use crate::meanfield::{constants, degree_distribution, DegreeDistributionQuery};

    #[test]
    fn line_fit_recovers_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        let f = fit_line(&pts).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 3.0).abs() < 1e-12);
        assert!(fit_line(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
    }

    #[test]
    fn mean_and_std() {
        assert_eq!(mean(&[1.0, 2.0, 3.0]), 2.0);
        assert!((std_dev(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]) - 2.138_089_935_299_395).abs() < 1e-12);
        assert_eq!(std_dev(&[5.0]), 0.0);
    }

    #[test]
    fn shifted_axis_recovers_analytic_exponent() {
        let consts = constants(0.5).unwrap();
        let density = |k: f64| degree_distribution(&DegreeDistributionQuery { k, p: 0.5, z: 0.0 }).unwrap();
        let shifted = curve_slope(density, 4, 9, SlopeAxis::Shifted { consts, z: 0.0 }).unwrap();
        assert!((shifted.slope + 4.0).abs() < 1e-9);
        // On a short low-degree window the raw axis sees the curvature of the
        // (k + 3)^-4 shape instead of its exponent.
        let raw = curve_slope(density, 4, 9, SlopeAxis::Degree).unwrap();
        assert!(raw.slope > -3.0 && raw.slope < -2.0, "{}", raw.slope);
    }

    #[test]
    fn histogram_slope_of_power_law_counts() {
        let mut degrees = Vec::new();
        for k in 1u32..=20 {
            let count = (1e6 * (k as f64).powi(-2)).round() as usize;
            degrees.extend(std::iter::repeat(k).take(count));
        }
        let hist = DegreeHistogram::from_degrees(KindFilter::All, degrees);
        let fit = density_slope(&hist, 2, 20, SlopeAxis::Degree).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-3);
    }
}
