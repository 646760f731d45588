use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wsn_cluster::evolve::{write_snapshots, EvolutionParams};
use wsn_cluster::geoproto::{Area, Protocol};
use wsn_cluster::harness::protocol::{write_csv, write_report_json, CsvRecord};
use wsn_cluster::harness::{
    analytic_grid, evolve_experiment, figure_curves, fit_polynomial, reproduce_theory_tables, run_protocol_table,
    write_curves_csv, AnalyticCurve, Geometry, ProtocolTableConfig,
};
use wsn_cluster::harness::evolve_report::write_evolve_report;
use wsn_cluster::{Error, Result};

/// Sensor-network clustering as an evolving network: analytic tables,
/// protocol sweeps and growth simulations.
#[derive(Parser)]
#[command(name = "wsn-cluster", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the published theory tables and critical deletion rates.
    Tables {
        /// Also write the rows as JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for the node-count curve CSV.
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// Run a protocol over random deployments and tabulate n(E) against n(T).
    Protocol {
        #[arg(long, value_parser = parse_protocol, default_value = "simple-tree")]
        protocol: Protocol,
        /// Comma-separated node counts.
        #[arg(long, value_delimiter = ',', default_value = "100,200,300,400,500")]
        nodes: Vec<usize>,
        /// Connected deployments per node count.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Side of the square deployment area in metres.
        #[arg(long, default_value_t = 600.0)]
        area: f64,
        /// Radio range in metres.
        #[arg(long, default_value_t = 100.0)]
        radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV table path; the full JSON report goes next to it with a `.json` extension.
        #[arg(long, default_value = "protocol.csv")]
        out: PathBuf,
    },
    /// Simulate the growth model and attach analytic overlays.
    Evolve {
        #[arg(long, default_value_t = 5)]
        m0: usize,
        /// Local-world size; 0 means the whole cluster set.
        #[arg(long, default_value_t = 4)]
        local_world: usize,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        #[arg(long, default_value_t = 20)]
        kmax: u32,
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
        #[arg(long, default_value_t = 1_000)]
        snapshot_every: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Accept p up to 1 instead of the model range below 0.5.
        #[arg(long)]
        relaxed: bool,
        /// Report path; snapshots go next to it with a `.jsonl` extension.
        #[arg(long, default_value = "evolve.json")]
        out: PathBuf,
    },
    /// Least-squares polynomial fit of `x,y` rows from a CSV file with a header.
    Fit {
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long)]
        input: PathBuf,
        /// Write the fit as JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate an analytic curve on a grid of k values and print `k,value` rows.
    Analytic {
        #[arg(long, value_enum, default_value_t = Curve::ClusterProbability)]
        curve: Curve,
        #[arg(long, default_value_t = 2.0)]
        k_min: f64,
        #[arg(long, default_value_t = 20.0)]
        k_max: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Cluster probability for the z-critical and distribution curves.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Deletion rate for the distribution curve.
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Curve {
    ClusterProbability,
    ZCritical,
    Distribution,
}

fn parse_protocol(s: &str) -> std::result::Result<Protocol, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Runs a command; `Ok(false)` means it finished but an invariant check failed.
fn execute(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Tables { out, curves } => {
            let tables = reproduce_theory_tables()?;
            print!("{}", tables.render());
            if let Some(path) = out {
                let mut w = create(&path)?;
                serde_json::to_writer_pretty(&mut w, &tables)?;
                w.write_all(b"\n")?;
            }
            if let Some(dir) = curves {
                let (points, fits) = figure_curves()?;
                write_curves_csv(create(&dir.join("curves.csv"))?, &points)?;
                let mut w = create(&dir.join("curve_fits.json"))?;
                serde_json::to_writer_pretty(&mut w, &fits)?;
                w.write_all(b"\n")?;
            }
            // The z column disagreement is a known property of the published
            // table, so it does not fail the run.
            Ok(tables.max_deviation <= 1)
        }
        Command::Protocol {
            protocol,
            nodes,
            trials,
            area,
            radius,
            seed,
            out,
        } => {
            let cfg = ProtocolTableConfig {
                geometry: Geometry {
                    area: Area::square(area),
                    radius,
                },
                trials,
                seed0: seed,
                ..ProtocolTableConfig::new(protocol, nodes)
            };
            let report = run_protocol_table(&cfg)?;
            let rows: Vec<CsvRecord> = report.rows.iter().map(CsvRecord::from).collect();
            write_csv(std::io::stdout().lock(), &rows)?;
            write_csv(create(&out)?, &rows)?;
            write_report_json(create(&out.with_extension("json"))?, &report)?;
            for row in report.rows.iter().filter(|r| !r.usable) {
                log::warn!("N = {} has no connected deployment; row unusable", row.n);
            }
            Ok(report.all_checks_pass())
        }
        Command::Evolve {
            m0,
            local_world,
            p,
            z,
            kmax,
            steps,
            snapshot_every,
            seed,
            relaxed,
            out,
        } => {
            let params = EvolutionParams {
                m0,
                local_world: if local_world == 0 { usize::MAX } else { local_world },
                p,
                z,
                k_max: kmax,
                seed,
                relaxed,
                initial_edges: m0.saturating_sub(1),
                ..EvolutionParams::default()
            };
            let (records, report) = evolve_experiment(params, steps, snapshot_every)?;
            write_snapshots(create(&out.with_extension("jsonl"))?, &records)?;
            write_evolve_report(create(&out)?, &report)?;
            println!(
                "t = {steps}: {} cluster, {} normal, {} deletions; tail slope raw {:?}, shifted {:?}, analytic {}",
                report.cluster_nodes,
                report.normal_nodes,
                report.deletions,
                report.tail.raw.map(|f| f.slope),
                report.tail.shifted.map(|f| f.slope),
                report.tail.analytic_exponent
            );
            if let Some(v) = &report.invariant_violation {
                eprintln!("invariant violated: {v}");
            }
            Ok(report.invariant_violation.is_none())
        }
        Command::Fit { degree, input, out } => {
            let mut reader = csv::Reader::from_reader(BufReader::new(File::open(&input)?));
            let mut points = Vec::new();
            for rec in reader.deserialize() {
                let (x, y): (f64, f64) = rec?;
                points.push((x, y));
            }
            let fit = fit_polynomial(&points, degree)?;
            let json = serde_json::to_string_pretty(&fit)?;
            match out {
                Some(path) => writeln!(create(&path)?, "{json}")?,
                None => println!("{json}"),
            }
            Ok(true)
        }
        Command::Analytic {
            curve,
            k_min,
            k_max,
            step,
            p,
            z,
            out,
        } => {
            let curve = match curve {
                Curve::ClusterProbability => AnalyticCurve::ClusterProbability,
                Curve::ZCritical => AnalyticCurve::ZCritical { p },
                Curve::Distribution => AnalyticCurve::Distribution { p, z },
            };
            let grid = analytic_grid(curve, k_min, k_max, step);
            let mut sink: Box<dyn Write> = match out {
                Some(path) => Box::new(create(&path)?),
                None => Box::new(std::io::stdout().lock()),
            };
            writeln!(sink, "k,value")?;
            for (k, v) in grid {
                writeln!(sink, "{k},{v}")?;
            }
            sink.flush()?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more invariant checks failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
