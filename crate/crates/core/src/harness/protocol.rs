//! Protocol sweeps over random deployments and their report formats.
//!
//! CSV report: header `N,k,n_T,n_E_mean,n_E_std,protocol,trials,seed0`, one
//! row per node count. `k` is the mean radio degree of the heads, `n_T` the
//! prediction from `k` rounded to the nearest integer (empty when the row is
//! unusable or the rounded `k` is at most 1), `n_E_std` the sample standard
//! deviation. Floats use the shortest representation that reads back exactly.
//!
//! JSON report: one pretty-printed [`ProtocolReport`] document.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::splitmix64;
use crate::error::{Error, Result};
use crate::geoproto::{avg_neighbor_count, generate_rgg, head_count, verify, Area, GeoNetwork, Protocol};
use crate::meanfield::{predict_cluster_count, z_critical};
use crate::stats::{mean, std_dev};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub area: Area,
    pub radius: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            area: Area::square(600.0),
            radius: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTableConfig {
    pub protocol: Protocol,
    pub nodes: Vec<usize>,
    pub geometry: Geometry,
    pub trials: usize,
    pub seed0: u64,
    /// Give up on a node count after `trials * max_attempt_factor` deployments.
    pub max_attempt_factor: usize,
}

impl ProtocolTableConfig {
    pub fn new(protocol: Protocol, nodes: Vec<usize>) -> Self {
        Self {
            protocol,
            nodes,
            geometry: Geometry::default(),
            trials: 20,
            seed0: 0,
            max_attempt_factor: 20,
        }
    }
}

/// Outcome of one protocol run on one connected deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub n_e: usize,
    pub avg_k: f64,
    pub violations: Vec<String>,
}

/// Sign of the critical deletion rate at a row's operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZRegime {
    Positive,
    Zero,
    Negative,
}

impl ZRegime {
    pub fn classify(z: f64) -> Self {
        if z.abs() < 1e-12 {
            ZRegime::Zero
        } else if z > 0.0 {
            ZRegime::Positive
        } else {
            ZRegime::Negative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    /// Mean radio degree of the heads over the trials.
    pub k: f64,
    pub n_t: Option<u64>,
    pub n_e_mean: f64,
    pub n_e_std: f64,
    pub protocol: Protocol,
    pub trials: usize,
    pub seed0: u64,
    pub seeds: Vec<u64>,
    /// Disconnected deployments skipped while collecting `trials` instances.
    pub discarded: usize,
    pub usable: bool,
    /// Operating point `p = n_E / N` and the sign of `z_critical(k, p)` there.
    pub operating_p: Option<f64>,
    pub z_regime: Option<ZRegime>,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub config: ProtocolTableConfig,
    pub rows: Vec<ExperimentRow>,
    pub trials: Vec<Vec<TrialRecord>>,
}

impl ProtocolReport {
    pub fn all_checks_pass(&self) -> bool {
        self.rows.iter().all(|r| r.violations == 0)
    }
}

/// Deployment seed for attempt `attempt` at node count `n`.
pub fn instance_seed(seed0: u64, n: usize, attempt: usize) -> u64 {
    splitmix64(splitmix64(seed0 ^ splitmix64(n as u64)) ^ attempt as u64)
}

/// Run a protocol once with the sink nearest the area centre and check its output.
pub fn run_trial(protocol: Protocol, net: &GeoNetwork, seed: u64) -> Result<TrialRecord> {
    let sink = net
        .nearest_to_center()
        .ok_or_else(|| Error::Config("empty deployment".into()))?;
    let result = protocol.run(net, sink, splitmix64(seed))?;
    let avg_k = avg_neighbor_count(net, &result)?;
    Ok(TrialRecord {
        seed,
        n_e: head_count(&result),
        avg_k,
        violations: verify(net, &result),
    })
}

/// Aggregate trial records (sorted by seed) into a table row.
pub fn aggregate_row(
    protocol: Protocol,
    n: usize,
    seed0: u64,
    mut records: Vec<TrialRecord>,
    discarded: usize,
) -> ExperimentRow {
    records.sort_by_key(|r| r.seed);
    let heads: Vec<f64> = records.iter().map(|r| r.n_e as f64).collect();
    let ks: Vec<f64> = records.iter().map(|r| r.avg_k).collect();
    let usable = !records.is_empty();
    let k = if usable { mean(&ks) } else { f64::NAN };
    let n_e_mean = if usable { mean(&heads) } else { f64::NAN };
    let n_t = if usable {
        predict_cluster_count(n as u64, k.round()).ok()
    } else {
        None
    };
    let operating_p = (usable && n > 0).then(|| n_e_mean / n as f64);
    let z_regime = operating_p
        .and_then(|p| z_critical(k, p).ok())
        .map(ZRegime::classify);
    ExperimentRow {
        n,
        k,
        n_t,
        n_e_mean,
        n_e_std: std_dev(&heads),
        protocol,
        trials: records.len(),
        seed0,
        seeds: records.iter().map(|r| r.seed).collect(),
        discarded,
        usable,
        operating_p,
        z_regime,
        violations: records.iter().map(|r| r.violations.len()).sum(),
    }
}

fn collect_trials(cfg: &ProtocolTableConfig, n: usize) -> Result<(Vec<TrialRecord>, usize)> {
    let max_attempts = cfg.trials * cfg.max_attempt_factor.max(1);
    let mut records = Vec::with_capacity(cfg.trials);
    let mut discarded = 0;
    let mut next = 0;
    while records.len() < cfg.trials && next < max_attempts {
        let batch: Vec<usize> = (next..max_attempts.min(next + cfg.trials)).collect();
        next += batch.len();
        let outcomes: Vec<Option<TrialRecord>> = batch
            .par_iter()
            .map(|&attempt| {
                let seed = instance_seed(cfg.seed0, n, attempt);
                let net = generate_rgg(n, cfg.geometry.area, cfg.geometry.radius, seed)?;
                if !net.is_connected() {
                    return Ok(None);
                }
                run_trial(cfg.protocol, &net, seed).map(Some)
            })
            .collect::<Result<_>>()?;
        // Batches are merged in attempt order, so thread scheduling never
        // changes which instances are kept.
        for o in outcomes {
            match o {
                Some(r) if records.len() < cfg.trials => records.push(r),
                Some(_) => {}
                None => discarded += 1,
            }
        }
    }
    if records.len() < cfg.trials {
        log::warn!(
            "N = {n}: only {} connected deployments in {max_attempts} attempts",
            records.len()
        );
    }
    Ok((records, discarded))
}

pub fn run_protocol_table(cfg: &ProtocolTableConfig) -> Result<ProtocolReport> {
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(cfg.nodes.len());
    let mut trials = Vec::with_capacity(cfg.nodes.len());
    for &n in &cfg.nodes {
        let (records, discarded) = collect_trials(cfg, n)?;
        rows.push(aggregate_row(cfg.protocol, n, cfg.seed0, records.clone(), discarded));
        trials.push(records);
    }
    Ok(ProtocolReport {
        config: cfg.clone(),
        rows,
        trials,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CsvRow {
    #[serde(rename = "N")]
    n: usize,
    k: f64,
    #[serde(rename = "n_T")]
    n_t: Option<u64>,
    #[serde(rename = "n_E_mean")]
    n_e_mean: f64,
    #[serde(rename = "n_E_std")]
    n_e_std: f64,
    protocol: Protocol,
    trials: usize,
    seed0: u64,
}

/// The CSV view of a row, as read back from a report.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub n: usize,
    pub k: f64,
    pub n_t: Option<u64>,
    pub n_e_mean: f64,
    pub n_e_std: f64,
    pub protocol: Protocol,
    pub trials: usize,
    pub seed0: u64,
}

impl From<&ExperimentRow> for CsvRecord {
    fn from(r: &ExperimentRow) -> Self {
        Self {
            n: r.n,
            k: r.k,
            n_t: r.n_t,
            n_e_mean: r.n_e_mean,
            n_e_std: r.n_e_std,
            protocol: r.protocol,
            trials: r.trials,
            seed0: r.seed0,
        }
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[CsvRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow {
            n: r.n,
            k: r.k,
            n_t: r.n_t,
            n_e_mean: r.n_e_mean,
            n_e_std: r.n_e_std,
            protocol: r.protocol,
            trials: r.trials,
            seed0: r.seed0,
        })?;
    }
    if rows.is_empty() {
        w.write_record(["N", "k", "n_T", "n_E_mean", "n_E_std", "protocol", "trials", "seed0"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        let c: CsvRow = rec?;
        rows.push(CsvRecord {
            n: c.n,
            k: c.k,
            n_t: c.n_t,
            n_e_mean: c.n_e_mean,
            n_e_std: c.n_e_std,
            protocol: c.protocol,
            trials: c.trials,
            seed0: c.seed0,
        });
    }
    Ok(rows)
}

pub fn write_report_json<W: Write>(mut out: W, report: &ProtocolReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_report_json<R: Read>(input: R) -> Result<ProtocolReport> {
    Ok(serde_json::from_reader(input)?)
}
