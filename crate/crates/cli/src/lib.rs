//! Command-line front end: curve scans, exact references, first-quantized
//! runs, cost tables and repository export.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use vqelab::ansatz::{deviations_report, CostReport};
use vqelab::first_quant::{scan_first_quant, Projection, Scheme};
use vqelab::io::{
    first_quant_records, read_config, read_repository, reference_records, scan_records, write_repository,
    ResultRecord, RunConfig,
};
use vqelab::vqe::{prepare_geometry, scan_curve, PreparedAnsatz, ReferencePoint};
use vqelab::Error;

#[derive(Parser, Debug)]
#[command(name = "vqelab", version, about = "Exact-simulation VQE scans over molecular dissociation curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Result repository root.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Record wall time per geometry (makes records non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// VQE scan over every geometry of the config.
    Scan(Common),
    /// Full CI references only.
    Fci(Common),
    /// First-quantized VQE with trimming or padding.
    Firstq {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<Scheme>,
        #[arg(long)]
        projection: Option<Projection>,
    },
    /// Gate, parameter and Pauli counts of the configured Ansatz per geometry.
    Cost {
        #[command(flatten)]
        common: Common,
        /// Also print the comparison against the published reference table.
        #[arg(long)]
        reference: bool,
    },
    /// Rewrites the records of an existing repository (normalized JSON and CSV).
    Export {
        /// Source repository root.
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Exit status: success.
pub const EXIT_OK: i32 = 0;
/// Exit status: bad arguments, config or input data.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit status: I/O or numerical failure while running.
pub const EXIT_RUNTIME: i32 = 2;

enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            EXIT_VALIDATION
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            EXIT_RUNTIME
        }
    }
}

fn load(common: &Common) -> CliResult<RunConfig> {
    // An unreadable config is a usage problem, not a runtime failure.
    let mut cfg = read_config(&common.config).map_err(|e| Failure::Validation(e.to_string()))?;
    if let Some(s) = common.seed {
        cfg.scan.seed = s;
    }
    cfg.scan.validate()?;
    Ok(cfg)
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> CliResult<T> + Send) -> CliResult<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Validation(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn write_out(records: &[ResultRecord], out: Option<&Path>) -> CliResult<()> {
    if let Some(root) = out {
        let paths = write_repository(records, root)?;
        eprintln!("wrote {} files under {}", paths.len(), root.display());
    }
    Ok(())
}

fn stamp(records: &mut [ResultRecord], timing: bool, seconds: f64) {
    if timing {
        let per = seconds / records.len().max(1) as f64;
        records.iter_mut().for_each(|r| r.wall_time = Some(per));
    }
}

fn references(cfg: &RunConfig) -> CliResult<Vec<ReferencePoint>> {
    let s = &cfg.scan;
    Ok(s.geometries
        .par_iter()
        .map(|g| prepare_geometry(g, &s.active, s.encoding).map(|(_, _, r)| r))
        .collect::<vqelab::Result<Vec<_>>>()?)
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Scan(common) => {
            let cfg = load(&common)?;
            let s = &cfg.scan;
            let start = Instant::now();
            let points = with_threads(common.threads, || Ok(scan_curve(s)?))?;
            let mut records = scan_records(&s.molecule, s.encoding, &s.ansatz, s.optimizer.method, s.seed, &points);
            stamp(&mut records, common.timing, start.elapsed().as_secs_f64());
            let refs: Vec<ReferencePoint> = points.iter().map(|p| p.reference.clone()).collect();
            records.extend(reference_records(&s.molecule, &refs));
            println!("# R E_vqe E_fci dE dN dSz dS2 n_q n_theta");
            for p in &points {
                let m = p.best_run().metrics;
                println!(
                    "{:.3} {:.10} {:.10} {:.3e} {:.3e} {:.3e} {:.3e} {} {}",
                    p.reference.r, m.energy, p.reference.e_fci, m.delta_e, m.delta_n, m.delta_sz, m.delta_s2,
                    p.cost.n_q, p.cost.n_theta
                );
            }
            write_out(&records, common.out.as_deref())
        }
        Command::Fci(common) => {
            let cfg = load(&common)?;
            let refs = with_threads(common.threads, || references(&cfg))?;
            println!("# R E_fci S2_fci E_hf n_q n_p");
            for r in &refs {
                println!(
                    "{:.3} {:.10} {:.6} {:.10} {} {}",
                    r.r, r.e_fci, r.s2_fci, r.e_hf, r.n_qubits, r.n_pauli
                );
            }
            write_out(&reference_records(&cfg.scan.molecule, &refs), common.out.as_deref())
        }
        Command::Firstq {
            common,
            scheme,
            projection,
        } => {
            let mut cfg = load(&common)?;
            if let Some(s) = scheme {
                cfg.first_quant.scheme = s;
            }
            if let Some(p) = projection {
                cfg.first_quant.projection = p;
            }
            let (s, fq) = (&cfg.scan, &cfg.first_quant);
            let start = Instant::now();
            let points = with_threads(common.threads, || Ok(scan_first_quant(s, fq)?))?;
            let mut records = first_quant_records(&s.molecule, &s.ansatz, fq.scheme, fq.projection, s.seed, &points);
            stamp(&mut records, common.timing, start.elapsed().as_secs_f64());
            println!("# R E E_exact dE physical_norm trimming_error K n_q");
            for p in &points {
                let b = &p.runs[p.best];
                println!(
                    "{:.3} {:.10} {:.10} {:.3e} {:.6} {:.3e} {} {}",
                    p.r,
                    b.energy,
                    b.exact,
                    b.energy - b.exact,
                    b.physical_norm,
                    b.trimming_error,
                    p.k,
                    b.n_qubits
                );
            }
            write_out(&records, common.out.as_deref())
        }
        Command::Cost { common, reference } => {
            let cfg = load(&common)?;
            let s = &cfg.scan;
            let rows = with_threads(common.threads, || {
                Ok(s.geometries
                    .par_iter()
                    .map(|g| {
                        let (problem, _, r) = prepare_geometry(g, &s.active, s.encoding)?;
                        Ok((r.r, PreparedAnsatz::build(&problem, &s.ansatz)?.cost(&problem)))
                    })
                    .collect::<vqelab::Result<Vec<(f64, CostReport)>>>()?)
            })?;
            println!("# R family n_q n_l depth depth_with_prep n_theta n_g1 n_g2 n_p");
            for (r, c) in &rows {
                println!(
                    "{r:.3} {} {} {} {} {} {} {} {} {}",
                    s.ansatz.family, c.n_q, c.n_l, c.depth, c.depth_with_prep, c.n_theta, c.n_g1, c.n_g2, c.n_p
                );
            }
            if reference {
                print!("{}", deviations_report());
            }
            Ok(())
        }
        Command::Export { from, out } => {
            let records = read_repository(&from)?;
            write_out(&records, Some(&out))
        }
    }
}
