mod commands;
mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use ftlab::analysis::config_digest;

use commands::{Failure, Outcome, Report};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "ftlab", version, about = "Fault-tolerant quantum error-correction laboratory")]
struct Cli {
    /// Size of the worker pool for Monte Carlo trials; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Write a JSON summary with the effective configuration and its digest.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stabilizer codes: generators, logical operators and the stabilizer conditions.
    CodeInfo {
        /// `steane`, `five-qubit`, or a code file.
        #[arg(long, default_value = "steane")]
        code: String,
    },
    /// Quantum circuits: emit a named construction in the circuit text format.
    Encode {
        /// One of: encoder, zero-encoder, verified-zero, steane-syndrome, steane-round,
        /// naive-syndrome, naive-round, shor-ancilla, cat, leak-detector, toffoli-bare,
        /// toffoli-encoded, logical-measurement, destructive-measurement.
        #[arg(long, default_value = "encoder")]
        circuit: String,
        /// Number of qubits of the `cat` circuit.
        #[arg(long, default_value_t = 4)]
        cat_size: usize,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Syndrome diagnosis: syndrome and decoded correction of a Pauli error.
    SyndromeDemo {
        #[arg(long, default_value = "steane")]
        code: String,
        /// Pauli letters on the block, e.g. `IIXIIII`. Without it every single-qubit error is listed.
        #[arg(long)]
        error: Option<String>,
    },
    /// Fault-tolerant recovery: one or more noisy recovery rounds on an encoded block.
    RecoverDemo {
        #[command(flatten)]
        run: RunArgs,
        /// Logical state to protect: `zero` or `plus`.
        #[arg(long, default_value = "zero")]
        basis: String,
        /// Pauli error on the seven block qubits applied before recovery.
        #[arg(long)]
        error: Option<String>,
    },
    /// Error suppression: Monte Carlo logical error rate of a stored encoded qubit.
    Mc {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Accuracy threshold: bisection for the pseudothreshold of one recovery round.
    Threshold {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Skip the simulation and solve c·ε² = ε for this coefficient c.
        #[arg(long, value_name = "C")]
        analytic: Option<f64>,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Concatenated coding: iterate p ↦ c·p² over levels.
    Flow {
        #[arg(long)]
        p0: f64,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, default_value_t = 21.0)]
        coefficient: f64,
    },
    /// Block-size tradeoff: optimal correctable weight t for (t^b ε)^(t+1).
    Tradeoff {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        b: f64,
    },
    /// Resources: qubits and Toffoli gates for factoring, and the block size for a long computation.
    Resources {
        #[arg(long)]
        bits: u64,
        /// Gate error rate for the block-size estimate.
        #[arg(long, requires_all = ["eps0", "horizon"])]
        eps: Option<f64>,
        /// Threshold rate.
        #[arg(long, requires = "eps")]
        eps0: Option<f64>,
        /// Number of cycles T.
        #[arg(long, requires = "eps")]
        horizon: Option<f64>,
    },
    /// Fault-tolerant Toffoli gate: measurement-based construction checked over every branch.
    ToffoliVerify {
        #[arg(long)]
        seed: Option<u64>,
        /// Random input states in addition to the 8 basis states.
        #[arg(long, default_value_t = 20)]
        random: usize,
        /// Also run the single-fault audit of the encoded protocol, every N-th case.
        #[arg(long, value_name = "N")]
        audit_stride: Option<usize>,
    },
    /// Nonabelian fluxons: the A5 pull-through NOT gate traced in cycle notation.
    FluxonDemo {
        /// A group multiplication table in CSV to summarize.
        #[arg(long, value_name = "PATH")]
        group: Option<PathBuf>,
    },
}

/// Settings shared by the simulation subcommands; each flag sets the config key of the same name.
#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file applied before the flags.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// steane, shor, naive or uncoded.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    repeat_policy: Option<String>,
    #[arg(long)]
    verify_ancilla: Option<String>,
    /// offline or inline.
    #[arg(long)]
    ancilla_prep: Option<String>,
    #[arg(long)]
    max_retries: Option<usize>,
    #[arg(long)]
    eps_store: Option<f64>,
    /// Rate for every gate kind.
    #[arg(long)]
    eps_gate: Option<f64>,
    #[arg(long)]
    eps_prep: Option<f64>,
    #[arg(long)]
    eps_meas: Option<f64>,
    #[arg(long)]
    leak_rate: Option<f64>,
    #[arg(long)]
    multiqubit_mode: Option<String>,
    #[arg(long)]
    rounds: Option<usize>,
    /// Write the effective configuration in canonical form.
    #[arg(long, value_name = "PATH")]
    dump_config: Option<PathBuf>,
    /// Any other config key, e.g. `eps_gate.cnot=0.001`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let mut put = |k: &'static str, x: Option<String>| {
            if let Some(x) = x {
                v.push((k, x));
            }
        };
        put("seed", self.seed.map(|s| s.to_string()));
        put("method", self.method.clone());
        put("repeat_policy", self.repeat_policy.clone());
        put("verify_ancilla", self.verify_ancilla.clone());
        put("ancilla_prep", self.ancilla_prep.clone());
        put("max_retries", self.max_retries.map(|s| s.to_string()));
        put("eps_store", self.eps_store.map(|s| s.to_string()));
        put("eps_gate", self.eps_gate.map(|s| s.to_string()));
        put("eps_prep", self.eps_prep.map(|s| s.to_string()));
        put("eps_meas", self.eps_meas.map(|s| s.to_string()));
        put("leak_rate", self.leak_rate.map(|s| s.to_string()));
        put("multiqubit_mode", self.multiqubit_mode.clone());
        put("rounds", self.rounds.map(|s| s.to_string()));
        v
    }

    /// Defaults, then the config file, then `--set`, then the named flags.
    fn resolve(&self, threshold: bool, extra: &[(&'static str, String)]) -> Outcome<RunConfig> {
        let mut cfg = RunConfig { threshold, ..RunConfig::default() };
        if let Some(p) = &self.config {
            let text = fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            cfg.apply_text(&text)?;
        }
        for s in &self.set {
            let (k, v) = s.split_once('=').ok_or_else(|| Failure::Config(format!("--set expects KEY=VALUE, got {s:?}")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        for (k, v) in self.pairs().iter().chain(extra) {
            cfg.set(k, v)?;
        }
        if let Some(p) = &self.dump_config {
            fs::write(p, cfg.to_text()).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    trials: Option<u64>,
    /// Comma-separated ε values.
    #[arg(long)]
    grid: Option<String>,
    /// Noise component the grid drives: eps_store, eps_gate or uniform.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// uniform, store or gate.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long)]
    min_trials: Option<u64>,
    #[arg(long)]
    max_trials: Option<u64>,
    #[arg(long)]
    rel_tol: Option<f64>,
}

fn name_of(c: &Command) -> &'static str {
    match c {
        Command::CodeInfo { .. } => "code-info",
        Command::Encode { .. } => "encode",
        Command::SyndromeDemo { .. } => "syndrome-demo",
        Command::RecoverDemo { .. } => "recover-demo",
        Command::Mc { .. } => "mc",
        Command::Threshold { .. } => "threshold",
        Command::Flow { .. } => "flow",
        Command::Tradeoff { .. } => "tradeoff",
        Command::Resources { .. } => "resources",
        Command::ToffoliVerify { .. } => "toffoli-verify",
        Command::FluxonDemo { .. } => "fluxon-demo",
    }
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::CodeInfo { code } => commands::code_info(code),
        Command::Encode { circuit, cat_size, out } => commands::encode(circuit, *cat_size, out.as_deref()),
        Command::SyndromeDemo { code, error } => commands::syndrome_demo(code, error.as_deref()),
        Command::RecoverDemo { run, basis, error } => {
            let cfg = run.resolve(false, &[])?;
            commands::recover_demo(&cfg, commands::parse_basis(basis)?, error.as_deref())
        }
        Command::Mc { run, sweep } => {
            let mut extra = Vec::new();
            if let Some(t) = sweep.trials {
                extra.push(("trials", t.to_string()));
            }
            if let Some(g) = &sweep.grid {
                extra.push(("grid", g.clone()));
            }
            if let Some(s) = &sweep.sweep {
                extra.push(("sweep", s.clone()));
            }
            let mut cfg = run.resolve(false, &extra)?;
            if let Some(p) = &sweep.csv {
                cfg.csv = Some(p.clone());
            }
            commands::mc(&cfg)
        }
        Command::Threshold { analytic: Some(c), .. } => commands::analytic(*c),
        Command::Threshold { run, search, csv, .. } => {
            let mut extra = Vec::new();
            let mut put = |k: &'static str, v: Option<String>| {
                if let Some(v) = v {
                    extra.push((k, v));
                }
            };
            put("family", search.family.clone());
            put("lo", search.lo.map(|x| x.to_string()));
            put("hi", search.hi.map(|x| x.to_string()));
            put("min_trials", search.min_trials.map(|x| x.to_string()));
            put("max_trials", search.max_trials.map(|x| x.to_string()));
            put("rel_tol", search.rel_tol.map(|x| x.to_string()));
            let mut cfg = run.resolve(true, &extra)?;
            if let Some(p) = csv {
                cfg.csv = Some(p.clone());
            }
            commands::threshold(&cfg)
        }
        Command::Flow { p0, levels, coefficient } => commands::flow(*p0, *levels, *coefficient),
        Command::Tradeoff { eps, b } => commands::tradeoff(*eps, *b),
        Command::Resources { bits, eps, eps0, horizon } => {
            let block = match (eps, eps0, horizon) {
                (Some(e), Some(e0), Some(t)) => Some((*e, *e0, *t)),
                _ => None,
            };
            commands::resources(*bits, block)
        }
        Command::ToffoliVerify { seed, random, audit_stride } => commands::toffoli_verify(*seed, *random, *audit_stride),
        Command::FluxonDemo { group } => commands::fluxon_demo(group.as_deref()),
    }
}

fn write_summary(path: &Path, subcommand: &str, report: &Report) -> Outcome<()> {
    let config: Map<String, Value> = report.entries.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    let summary = json!({
        "subcommand": subcommand,
        "config": config,
        "digest": config_digest(&report.entries),
        "results": report.results,
    });
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Failure::Internal(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn run(cli: &Cli) -> Outcome<()> {
    let name = name_of(&cli.command);
    let report = match cli.workers {
        Some(0) => return Err(Failure::Config("--workers must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Failure::Internal(e.to_string()))?;
            pool.install(|| dispatch(&cli.command))?
        }
        None => dispatch(&cli.command)?,
    };
    if let Some(p) = cli.json.as_ref().or(report.json.as_ref()) {
        write_summary(p, name, &report)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ftlab: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
