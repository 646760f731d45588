//! Simulation runs paired with their mean-field overlays.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::evolve::{run, DegreeHistogram, EvolutionParams, KindFilter, SnapshotRecord};
use crate::meanfield::{constants, degree_distribution, mean_degree, DegreeDistributionQuery};
use crate::stats::{density_slope, LineFit, SlopeAxis};

/// Lowest degree used by the tail fits.
pub const TAIL_K_LO: u32 = 4;
/// The fit stops at this quantile of the degree histogram.
pub const TAIL_QUANTILE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub k_lo: u32,
    pub k_hi: u32,
    /// `ln P` against `ln k`.
    pub raw: Option<LineFit>,
    /// `ln P` against `ln(A k + B - 2zC)`; the analytic density is a pure
    /// power of this variable.
    pub shifted: Option<LineFit>,
    /// Exponent of the analytic density, `-(1 + 2p)/p`.
    pub analytic_exponent: f64,
}

/// Fit the cluster-degree tail of `hist` between `TAIL_K_LO` and the 95th percentile.
pub fn tail_fit(hist: &DegreeHistogram, p: f64, z: f64) -> Result<TailFit> {
    let consts = constants(p)?;
    let k_hi = hist.quantile(TAIL_QUANTILE).unwrap_or(TAIL_K_LO).max(TAIL_K_LO);
    Ok(TailFit {
        k_lo: TAIL_K_LO,
        k_hi,
        raw: density_slope(hist, TAIL_K_LO, k_hi, SlopeAxis::Degree),
        shifted: density_slope(hist, TAIL_K_LO, k_hi, SlopeAxis::Shifted { consts, z }),
        analytic_exponent: consts.tail_exponent(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanDegreePoint {
    pub t: u64,
    pub simulated: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub k: u32,
    pub simulated: f64,
    pub analytic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveReport {
    pub params: EvolutionParams,
    pub steps: u64,
    pub snapshot_every: u64,
    pub additions: u64,
    pub deletions: u64,
    pub orphaned: u64,
    pub cluster_nodes: u64,
    pub normal_nodes: u64,
    pub final_histogram: Vec<(u32, u64)>,
    pub tail: TailFit,
    pub mean_degree_overlay: Vec<MeanDegreePoint>,
    pub density_overlay: Vec<DensityPoint>,
    pub invariant_violation: Option<String>,
}

/// Run one simulation and return its snapshots together with the report.
pub fn evolve_experiment(
    params: EvolutionParams,
    steps: u64,
    snapshot_every: u64,
) -> Result<(Vec<SnapshotRecord>, EvolveReport)> {
    let traj = run(params.clone(), steps, snapshot_every)?;
    let net = &traj.network;
    let hist = net.degree_histogram(KindFilter::Cluster);
    let tail = tail_fit(&hist, params.p, params.z)?;
    let m0 = params.m0 as f64;
    let mean_degree_overlay = traj
        .records
        .iter()
        .map(|r| MeanDegreePoint {
            t: r.t,
            simulated: r.mean_cluster_degree,
            analytic: mean_degree(r.t as f64, m0, params.p),
        })
        .collect();
    let density_overlay = hist
        .density()
        .into_iter()
        .map(|(k, d)| DensityPoint {
            k,
            simulated: d,
            analytic: degree_distribution(&DegreeDistributionQuery {
                k: k as f64,
                p: params.p,
                z: params.z,
            })
            .ok(),
        })
        .collect();
    let stats = net.stats();
    let report = EvolveReport {
        steps,
        snapshot_every,
        additions: stats.additions,
        deletions: stats.deletions,
        orphaned: net.orphans().len() as u64,
        cluster_nodes: net.cluster_count() as u64,
        normal_nodes: (net.node_count() - net.cluster_count()) as u64,
        final_histogram: hist.counts.iter().map(|(&k, &c)| (k, c)).collect(),
        tail,
        mean_degree_overlay,
        density_overlay,
        invariant_violation: net.check_invariants().err(),
        params,
    };
    Ok((traj.records, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledTail {
    pub seeds: Vec<u64>,
    pub steps: u64,
    pub cluster_nodes: u64,
    pub tail: TailFit,
}

/// Pool final cluster-degree histograms over several seeds and fit the tail.
pub fn pooled_tail(params: &EvolutionParams, steps: u64, seeds: &[u64]) -> Result<PooledTail> {
    let hists: Vec<DegreeHistogram> = seeds
        .par_iter()
        .map(|&seed| {
            let p = EvolutionParams { seed, ..params.clone() };
            let traj = run(p, steps, steps)?;
            Ok(traj.network.degree_histogram(KindFilter::Cluster))
        })
        .collect::<Result<_>>()?;
    let mut pooled = DegreeHistogram::from_degrees(KindFilter::Cluster, std::iter::empty());
    for h in &hists {
        pooled.merge(h);
    }
    Ok(PooledTail {
        seeds: seeds.to_vec(),
        steps,
        cluster_nodes: pooled.total,
        tail: tail_fit(&pooled, params.p, params.z)?,
    })
}

pub fn write_evolve_report<W: Write>(mut out: W, report: &EvolveReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_evolve_report<R: Read>(input: R) -> Result<EvolveReport> {
    Ok(serde_json::from_reader(input)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_deletion_run_reports_no_deletions() {
        let params = EvolutionParams { seed: 3, ..EvolutionParams::default() };
        let (records, report) = evolve_experiment(params, 2_000, 500).unwrap();
        assert_eq!(report.deletions, 0);
        assert_eq!(records.len(), 4);
        assert!(report.invariant_violation.is_none());
        assert_eq!(report.mean_degree_overlay.len(), 4);
    }

    #[test]
    fn analytic_exponent_at_half() {
        let params = EvolutionParams {
            p: 0.5,
            relaxed: true,
            local_world: usize::MAX,
            k_max: 10_000,
            ..EvolutionParams::default()
        };
        let (_, report) = evolve_experiment(params, 10_000, 10_000).unwrap();
        assert_eq!(report.tail.analytic_exponent, -4.0);
        assert!(report.tail.shifted.unwrap().slope.is_finite());
        assert!(report.tail.raw.unwrap().slope.is_finite());
    }

    #[test]
    fn report_round_trips() {
        let params = EvolutionParams { z: 0.3, seed: 9, ..EvolutionParams::default() };
        let (_, report) = evolve_experiment(params, 1_000, 250).unwrap();
        let mut a = Vec::new();
        write_evolve_report(&mut a, &report).unwrap();
        let back = read_evolve_report(a.as_slice()).unwrap();
        let mut b = Vec::new();
        write_evolve_report(&mut b, &back).unwrap();
        assert_eq!(a, b);
    }
}
