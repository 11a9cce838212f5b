use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qrom_reorder::circuit::Circuit;
use qrom_reorder::cost::CostReport;
use qrom_reorder::esop::{extract_truth_tables, minimize, CoverListing};
use qrom_reorder::experiment::{self, ExperimentSpec};
use qrom_reorder::search::{Method, SearchConfig};
use qrom_reorder::{emit_circuit, Database, Error, Permutation, Result};

#[derive(Parser)]
#[command(name = "qrom-reorder", version, about = "Reorder QROM databases for smaller ESOP circuits")]
struct Cli {
    /// Seed for instance generation and search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Candidate evaluations per search (command-specific default).
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Output file or directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Allow exhaustive search beyond the permutation cap.
    #[arg(long, global = true)]
    force: bool,

    /// Worker threads for experiments (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Anneal,
    Random,
    Exhaustive,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Anneal => Method::Anneal,
            MethodArg::Random => Method::Random,
            MethodArg::Exhaustive => Method::Exhaustive,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random database.
    Gen {
        #[arg(short = 'n', long, default_value_t = 3)]
        address_bits: usize,
        #[arg(short = 'd', long, default_value_t = 6)]
        data_bits: usize,
    },
    /// Minimize one ordering and print its covers and cost.
    Minimize {
        db: PathBuf,
        #[arg(long)]
        perm: Option<PathBuf>,
    },
    /// Search for a cheap ordering.
    Search {
        db: PathBuf,
        #[arg(long, value_enum, default_value = "anneal")]
        method: MethodArg,
        #[arg(long, default_value_t = 25_000.0)]
        t_max: f64,
        #[arg(long, default_value_t = 2.5)]
        t_min: f64,
        /// Stop annealing after this many steps without improvement.
        #[arg(long)]
        patience: Option<u64>,
    },
    /// Enumerate every ordering.
    Exhaustive { db: PathBuf },
    /// Check a circuit against a (reordered) database.
    Verify {
        db: PathBuf,
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        perm: Option<PathBuf>,
    },
    /// Emit the circuit for one ordering.
    Emit {
        db: PathBuf,
        #[arg(long)]
        perm: Option<PathBuf>,
    },
    /// Batch experiments over random instances.
    Experiment {
        #[arg(value_enum)]
        which: Experiment,
        #[arg(long, default_value_t = 15)]
        instances: usize,
        /// Address width (rq1/rq3 default 3, rq5 default 6).
        #[arg(short = 'n', long)]
        address_bits: Option<usize>,
        #[arg(short = 'd', long, default_value_t = 6)]
        data_bits: usize,
        /// Address widths for rq4.
        #[arg(long, value_delimiter = ',', default_value = "4,5,6,7")]
        sizes: Vec<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    Rq1,
    Rq3,
    Rq4,
    Rq5,
}

fn load_perm(db: &Database, path: Option<&Path>) -> Result<Permutation> {
    match path {
        Some(p) => Permutation::load(p),
        None => Ok(Permutation::identity(db.len())),
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Gen {
            address_bits,
            data_bits,
        } => {
            let db = Database::random(address_bits, data_bits, cli.seed)?;
            write_or_print(out, &db.to_text())?;
        }
        Command::Minimize { db, perm } => {
            let db = Database::load(db)?;
            let perm = load_perm(&db, perm.as_deref())?;
            let reordered = db.reorder(&perm)?;
            let covers: Vec<_> = extract_truth_tables(&reordered).iter().map(minimize).collect();
            let cost = CostReport::from_covers(db.n(), &covers);
            let text = format!("{}{}\n", CoverListing(&covers), serde_json::to_string_pretty(&cost)?);
            write_or_print(out, &text)?;
        }
        Command::Search {
            db,
            method,
            t_max,
            t_min,
            patience,
        } => {
            let db = Database::load(db)?;
            let cfg = SearchConfig {
                t_max,
                t_min,
                patience,
                force: cli.force,
                ..SearchConfig::new(method.into(), cli.budget.unwrap_or(1000), cli.seed)
            };
            return search(&db, &cfg, out);
        }
        Command::Exhaustive { db } => {
            let db = Database::load(db)?;
            let cfg = SearchConfig {
                force: cli.force,
                ..SearchConfig::new(Method::Exhaustive, 0, cli.seed)
            };
            return search(&db, &cfg, out);
        }
        Command::Verify { db, circuit, perm } => {
            let db = Database::load(db)?;
            let perm = load_perm(&db, perm.as_deref())?;
            let circuit = Circuit::load_json(circuit)?;
            let v = circuit.verify(&db.reorder(&perm)?)?;
            println!("{}", serde_json::to_string_pretty(&v)?);
            return Ok(v.ok);
        }
        Command::Emit { db, perm } => {
            let db = Database::load(db)?;
            let perm = load_perm(&db, perm.as_deref())?;
            let reordered = db.reorder(&perm)?;
            let covers: Vec<_> = extract_truth_tables(&reordered).iter().map(minimize).collect();
            let circuit = emit_circuit(db.n(), &covers);
            match out {
                Some(dir) => {
                    fs::create_dir_all(dir).map_err(|e| Error::Io {
                        path: dir.to_path_buf(),
                        source: e,
                    })?;
                    write_or_print(Some(&dir.join("circuit.qasm")), &circuit.to_qasm())?;
                    write_or_print(Some(&dir.join("circuit.json")), &(circuit.to_json()? + "\n"))?;
                }
                None => print!("{}", circuit.to_qasm()),
            }
        }
        Command::Experiment {
            which,
            instances,
            address_bits,
            data_bits,
            sizes,
        } => {
            let (default_n, default_budget) = match which {
                Experiment::Rq5 => (6, 10_000),
                _ => (3, 1000),
            };
            let mut spec = ExperimentSpec::new(
                address_bits.unwrap_or(default_n),
                data_bits,
                instances,
                cli.seed,
                cli.budget.unwrap_or(default_budget),
            );
            spec.base.force = cli.force;
            let dir = out.unwrap_or(Path::new("."));
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.jobs)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            let summary = pool.install(|| -> Result<String> {
                Ok(match which {
                    Experiment::Rq1 => {
                        if spec.n != 3 && !cli.force {
                            return Err(Error::Config("rq1 runs exhaustive search; use -n 3 or --force".into()));
                        }
                        let r = experiment::run_rq1(&spec)?;
                        r.write(dir)?;
                        format!(
                            "median max/min {:.3} (IQR {:.3}-{:.3}), median min/avg {:.3}, anneal within {:.0}% of min on {}/{}",
                            r.max_over_min.median,
                            r.max_over_min.q1,
                            r.max_over_min.q3,
                            r.min_over_avg.median,
                            (experiment::windows::RQ2_SLACK - 1.0) * 100.0,
                            r.anneal_near_optimal,
                            r.instances.len()
                        )
                    }
                    Experiment::Rq3 => {
                        let r = experiment::run_rq3(&spec)?;
                        r.write(dir)?;
                        match r.rho {
                            Some(rho) => format!("spearman rho {rho:.3} (proxy ratio vs formula T-count ratio)"),
                            None => "spearman rho undefined: one side is constant".to_string(),
                        }
                    }
                    Experiment::Rq4 => {
                        let r = experiment::run_rq4(&spec, &sizes)?;
                        r.write(dir)?;
                        r.rows
                            .iter()
                            .map(|row| {
                                format!(
                                    "N={}: anneal {:.3} random {:.3}",
                                    row.size, row.anneal.median, row.random.median
                                )
                            })
                            .collect::<Vec<_>>()
                            .join("\n")
                    }
                    Experiment::Rq5 => {
                        let r = experiment::run_rq5(&spec)?;
                        r.write(dir)?;
                        format!(
                            "median best at {} steps: anneal {} random {}",
                            r.budget, r.anneal_median_best, r.random_median_best
                        )
                    }
                })
            })?;
            eprintln!("{summary}");
        }
    }
    Ok(true)
}

fn search(db: &Database, cfg: &SearchConfig, out: Option<&Path>) -> Result<bool> {
    let dir = out.unwrap_or(Path::new("."));
    let report = experiment::search_to_dir(db, cfg, dir)?;
    eprintln!(
        "{}: best {} (baseline {}), {} evaluations, verified {}",
        cfg.method, report.best_cost.proxy, report.instance.baseline_score, report.instance.methods[&cfg.method].evaluations, report.verified
    );
    Ok(report.verified)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
