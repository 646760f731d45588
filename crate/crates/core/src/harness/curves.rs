//! Plot-ready curve data: the published node-count curves with their quartic
//! trend lines, and analytic functions on grids.
//!
//! Curve CSV columns: `figure,series,N,clusters`, x = total nodes and
//! y = cluster nodes. Series `*-published` hold table values; `*-trend` the
//! degree-4 fit evaluated every 10 nodes.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::fit::{fit_polynomial, PolyFit};
use super::tables::{PublishedRow, PUBLISHED_ROWS};
use crate::error::Result;
use crate::geoproto::Protocol;
use crate::meanfield::{degree_distribution, p_of_k, z_critical, DegreeDistributionQuery};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub figure: String,
    pub series: String,
    #[serde(rename = "N")]
    pub n: f64,
    pub clusters: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    pub figure: String,
    pub series: String,
    pub fit: PolyFit,
}

fn rows_of(protocol: Protocol) -> Vec<PublishedRow> {
    PUBLISHED_ROWS.iter().copied().filter(|r| r.protocol == protocol).collect()
}

/// Both figures: simple tree and A3 (II), rule K (III); theory and experiment each.
pub fn figure_curves() -> Result<(Vec<CurvePoint>, Vec<SeriesFit>)> {
    let plan = [
        ("II", Protocol::SimpleTree),
        ("II", Protocol::A3),
        ("III", Protocol::CdsRuleK),
    ];
    let mut points = Vec::new();
    let mut fits = Vec::new();
    for (figure, protocol) in plan {
        let rows = rows_of(protocol);
        for (label, pick) in [("n_T", 0), ("n_E", 1)] {
            let series = format!("{}-{label}", protocol.name());
            let data: Vec<(f64, f64)> = rows
                .iter()
                .map(|r| (r.n as f64, if pick == 0 { r.n_t } else { r.n_e } as f64))
                .collect();
            for &(n, c) in &data {
                points.push(CurvePoint {
                    figure: figure.into(),
                    series: format!("{series}-published"),
                    n,
                    clusters: c,
                });
            }
            let fit = fit_polynomial(&data, 4)?;
            for n in (100..=500).step_by(10) {
                points.push(CurvePoint {
                    figure: figure.into(),
                    series: format!("{series}-trend"),
                    n: n as f64,
                    clusters: fit.eval(n as f64),
                });
            }
            fits.push(SeriesFit {
                figure: figure.into(),
                series,
                fit,
            });
        }
    }
    Ok((points, fits))
}

pub fn write_curves_csv<W: Write>(out: W, points: &[CurvePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

/// Function sampled by the `analytic` command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticCurve {
    /// Cluster probability against `k`.
    ClusterProbability,
    /// Critical deletion rate against `k` at fixed `p`.
    ZCritical { p: f64 },
    /// Degree density against `k` at fixed `p` and `z`.
    Distribution { p: f64, z: f64 },
}

/// Evaluate `curve` at `k_lo, k_lo + step, ...` up to `k_hi`; points where the
/// function is undefined are skipped.
pub fn analytic_grid(curve: AnalyticCurve, k_lo: f64, k_hi: f64, step: f64) -> Vec<(f64, f64)> {
    if !(step > 0.0) || !(k_hi >= k_lo) {
        return Vec::new();
    }
    let count = ((k_hi - k_lo) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| k_lo + i as f64 * step)
        .filter_map(|k| {
            let y = match curve {
                AnalyticCurve::ClusterProbability => p_of_k(k).map(|c| c.p),
                AnalyticCurve::ZCritical { p } => z_critical(k, p),
                AnalyticCurve::Distribution { p, z } => degree_distribution(&DegreeDistributionQuery { k, p, z }),
            };
            y.ok().map(|y| (k, y))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_curves_are_interpolated() {
        let (points, fits) = figure_curves().unwrap();
        assert_eq!(fits.len(), 6);
        assert!(fits.iter().all(|f| (f.fit.r_squared - 1.0).abs() < 1e-9));
        assert!(points.iter().any(|p| p.series == "simple-tree-n_T-published" && p.n == 100.0 && p.clusters == 37.0));
    }

    #[test]
    fn grid_skips_undefined_points() {
        let g = analytic_grid(AnalyticCurve::ClusterProbability, 1.0, 3.0, 0.5);
        assert_eq!(g.len(), 4);
        assert_eq!(g[0].0, 1.5);
        assert!((g.last().unwrap().1 - (3f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    }
}
