use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde_json::{json, Value};

use ftlab::analysis::{
    analytic_crossing, concatenation_flow, estimate_logical_error_rate, factoring_resources, min_block_error,
    numeric_optimum, optimal_t, pseudothreshold, required_block_size, write_csv, BlockExponent, LogicalErrorEstimate,
    MemoryConfig, MemoryProtocol,
};
use ftlab::circuit::{figures, Circuit, Machine};
use ftlab::codes::{five_qubit_code, steane_code, validate_code, StabilizerCode};
use ftlab::fluxon::{a5_not_demo, FiniteGroup};
use ftlab::noise::{trial_rng, NoisySource};
use ftlab::protocols::toffoli::{toffoli_encoded_audit, verify_toffoli_bare};
use ftlab::protocols::{encode_ideal, handle_leakage, holds_logical, Basis, Recovery, RecoveryOutcome, BLOCK};
use ftlab::sim::StabilizerTableau;
use ftlab::{Error, PauliString};

use crate::config::RunConfig;

/// Why a subcommand stopped; mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Verification(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Config(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Internal(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Config(m),
            Error::Parse(_)
            | Error::InvalidCode(_)
            | Error::Domain(_)
            | Error::AboveThreshold { .. }
            | Error::Dimension { .. }
            | Error::Io(_) => Failure::Config(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

pub type Outcome<T = Report> = std::result::Result<T, Failure>;

/// What a subcommand hands back for the JSON summary.
pub struct Report {
    pub entries: Vec<(String, String)>,
    pub results: Value,
    pub json: Option<PathBuf>,
}

impl Report {
    pub fn new(entries: Vec<(String, String)>, results: Value) -> Self {
        Report { entries, results, json: None }
    }
}

fn kv(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn require_seed(cfg: &RunConfig) -> Outcome<u64> {
    cfg.seed.ok_or_else(|| Failure::Config("this subcommand is randomized and needs --seed".into()))
}

fn open_output(path: &Path) -> Outcome<Box<dyn Write>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdout()));
    }
    let f = File::create(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Ok(Box::new(BufWriter::new(f)))
}

fn load_code(name: &str) -> Outcome<StabilizerCode> {
    match name {
        "steane" => Ok(steane_code()),
        "five-qubit" => Ok(five_qubit_code()),
        path => Ok(StabilizerCode::load(Path::new(path))?),
    }
}

fn paulis(ps: &[PauliString]) -> Vec<String> {
    ps.iter().map(|p| p.letters()).collect()
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn code_info(code: &str) -> Outcome {
    let c = load_code(code)?;
    print!("{}", c.to_text());
    println!("n={} k={} css={}", c.n, c.k, c.is_css());
    validate_code(&c).map_err(|e| Failure::Verification(e.to_string()))?;
    println!("stabilizer conditions hold");
    Ok(Report::new(
        kv(&[("code", code.to_string())]),
        json!({
            "name": c.name,
            "n": c.n,
            "k": c.k,
            "css": c.is_css(),
            "generators": paulis(&c.generators),
            "logical_z": paulis(&c.logical_z),
            "logical_x": paulis(&c.logical_x),
        }),
    ))
}

pub const CIRCUITS: [&str; 14] = [
    "encoder",
    "zero-encoder",
    "verified-zero",
    "steane-syndrome",
    "steane-round",
    "naive-syndrome",
    "naive-round",
    "shor-ancilla",
    "cat",
    "leak-detector",
    "toffoli-bare",
    "toffoli-encoded",
    "logical-measurement",
    "destructive-measurement",
];

pub fn build_circuit(name: &str, cat_size: usize) -> Outcome<Circuit> {
    Ok(match name {
        "encoder" => figures::build_encoder(),
        "zero-encoder" => figures::build_zero_encoder(),
        "verified-zero" => figures::build_verified_zero(),
        "steane-syndrome" => figures::build_steane_syndrome(),
        "steane-round" => figures::build_steane_recovery_round(),
        "naive-syndrome" => figures::build_naive_syndrome(),
        "naive-round" => figures::build_naive_recovery_round(),
        "shor-ancilla" => figures::build_shor_ancilla(),
        "cat" if cat_size < 2 => return Err(Failure::Config(format!("cat size {cat_size} must be at least 2"))),
        "cat" => figures::build_cat(cat_size),
        "leak-detector" => figures::build_leak_detector(),
        "toffoli-bare" => figures::build_toffoli_protocol(true),
        "toffoli-encoded" => figures::build_toffoli_encoded().0,
        "logical-measurement" => figures::build_logical_measurement(false),
        "destructive-measurement" => figures::build_logical_measurement(true),
        other => {
            return Err(Failure::Config(format!("unknown circuit {other:?}; expected one of {}", CIRCUITS.join(", "))))
        }
    })
}

pub fn encode(name: &str, cat_size: usize, out: Option<&Path>) -> Outcome {
    let c = build_circuit(name, cat_size)?;
    let text = c.to_text();
    match out {
        Some(p) => {
            let mut w = open_output(p)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => print!("{text}"),
    }
    Ok(Report::new(
        kv(&[("circuit", name.to_string()), ("cat_size", cat_size.to_string())]),
        json!({ "circuit": c.name(), "qubits": c.num_qubits(), "operations": c.gates().count() }),
    ))
}

struct Diagnosis {
    syndrome: Vec<bool>,
    correction: PauliString,
    residual: PauliString,
    logical: bool,
}

fn diagnose(code: &StabilizerCode, e: &PauliString) -> Outcome<Diagnosis> {
    let syndrome = code.syndrome_of(e)?;
    let correction = code.decode_syndrome(&syndrome)?;
    let mut residual = e.clone();
    residual.mul_assign_unchecked(&correction);
    let logical = code.is_logical_error(&residual);
    Ok(Diagnosis { syndrome, correction, residual, logical })
}

fn diagnosis_json(e: &PauliString, d: &Diagnosis) -> Value {
    json!({
        "error": e.letters(),
        "syndrome": bits(&d.syndrome),
        "correction": d.correction.letters(),
        "logical_error": d.logical,
    })
}

/// With an error: its syndrome and correction. Without: every single-qubit error.
pub fn syndrome_demo(code_name: &str, error: Option<&str>) -> Outcome {
    let code = load_code(code_name)?;
    let entries = kv(&[("code", code_name.to_string()), ("error", error.unwrap_or("single-qubit").to_string())]);
    if let Some(s) = error {
        let e: PauliString = s.parse()?;
        if e.len() != code.n {
            return Err(Failure::Config(format!("error {s:?} has {} letters, the code has {} qubits", e.len(), code.n)));
        }
        let d = diagnose(&code, &e)?;
        println!("error       {}", e.letters());
        println!("syndrome    {}", bits(&d.syndrome));
        println!("correction  {}", d.correction.letters());
        println!("residual    {}", d.residual.letters());
        println!("logical error: {}", if d.logical { "yes" } else { "no" });
        let report = Report::new(entries, diagnosis_json(&e, &d));
        if d.logical && e.weight() <= 1 {
            return Err(Failure::Verification(format!("single-qubit error {} not corrected", e.letters())));
        }
        return Ok(report);
    }
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for q in 0..code.n {
        for p in ftlab::Pauli1::NONTRIVIAL {
            let e = PauliString::single(code.n, q, p);
            let d = diagnose(&code, &e)?;
            println!("{}  syndrome {}  correction {}  {}", e.letters(), bits(&d.syndrome), d.correction.letters(), if d.logical { "FAIL" } else { "ok" });
            seen.insert(d.syndrome.clone());
            if d.logical {
                bad.push(e.letters());
            }
            rows.push(diagnosis_json(&e, &d));
        }
    }
    let report = Report::new(entries, Value::Array(rows));
    if !bad.is_empty() {
        return Err(Failure::Verification(format!("uncorrected single-qubit errors: {}", bad.join(" "))));
    }
    println!("all {} single-qubit errors corrected; {} distinct syndromes", 3 * code.n, seen.len());
    Ok(report)
}

fn outcome_json(round: usize, o: &RecoveryOutcome) -> Value {
    json!({
        "round": round,
        "bit_readings": o.bit.history,
        "bit_correction": o.bit.correction.letters(),
        "bit_deferred": o.bit.deferred,
        "phase_readings": o.phase.history,
        "phase_correction": o.phase.correction.letters(),
        "phase_deferred": o.phase.deferred,
        "ancillas": o.ancillas,
    })
}

/// Stream key separating measurement randomness from fault sampling.
const MEASURE_STREAM: u64 = u64::MAX;

pub fn recover_demo(cfg: &RunConfig, basis: Basis, error: Option<&str>) -> Outcome {
    let seed = require_seed(cfg)?;
    cfg.validate()?;
    let rec = Recovery::new(cfg.policy)?;
    let n = rec.num_qubits();
    let map: Vec<usize> = (0..n).collect();
    let injected: PauliString = match error {
        Some(s) => s.parse()?,
        None => PauliString::identity(BLOCK),
    };
    if injected.len() != BLOCK {
        return Err(Failure::Config(format!("error must have {BLOCK} letters, got {}", injected.len())));
    }
    let src = NoisySource::for_trial(cfg.noise.clone(), seed, 0);
    let mut m = Machine::new(StabilizerTableau::new(n), src, trial_rng(seed, MEASURE_STREAM));
    encode_ideal(&mut m, &map[..BLOCK], basis)?;
    for q in injected.support() {
        m.inject(q, injected.get(q));
    }
    println!("method {}  basis {}  injected {}", cfg.policy.method, basis_name(basis), injected.letters());
    let mut rounds = Vec::new();
    let mut prep_failed = false;
    for r in 0..cfg.rounds {
        if cfg.noise.leak_rate > 0.0 {
            let leaked = handle_leakage(&mut m, &map[..BLOCK], map[BLOCK])?;
            if !leaked.is_empty() {
                println!("round {r}: replaced leaked qubits {leaked:?}");
            }
        }
        match rec.recover(&mut m, &map) {
            Ok(o) => {
                println!(
                    "round {r}: bit readings {:?} -> {}{}  phase readings {:?} -> {}{}  ancillas {}",
                    o.bit.history,
                    o.bit.correction.letters(),
                    if o.bit.deferred { " (deferred)" } else { "" },
                    o.phase.history,
                    o.phase.correction.letters(),
                    if o.phase.deferred { " (deferred)" } else { "" },
                    o.ancillas
                );
                rounds.push(outcome_json(r, &o));
            }
            Err(Error::PreparationFailed { retries }) => {
                println!("round {r}: ancilla preparation failed after {retries} retries");
                prep_failed = true;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if cfg.noise.leak_rate > 0.0 {
        m.quietly(|m| handle_leakage(m, &map[..BLOCK], map[BLOCK]))?;
    }
    rec.recover_ideal(&mut m, &map)?;
    let held = !prep_failed && holds_logical(&m.backend, &map[..BLOCK], basis)?;
    println!("faults drawn {}", m.faults.faults);
    println!("logical state preserved: {}", if held { "yes" } else { "no" });
    let mut entries = cfg.entries();
    entries.push(("basis".into(), basis_name(basis).into()));
    entries.push(("error".into(), injected.letters()));
    let report = Report {
        results: json!({ "rounds": rounds, "faults": m.faults.faults, "preparation_failed": prep_failed, "preserved": held }),
        json: cfg.json.clone(),
        entries,
    };
    if !held && cfg.noise.is_noiseless() && injected.weight() <= 1 {
        return Err(Failure::Verification("a single-qubit error was not corrected".into()));
    }
    Ok(report)
}

pub fn basis_name(b: Basis) -> &'static str {
    match b {
        Basis::Zero => "zero",
        Basis::Plus => "plus",
    }
}

pub fn parse_basis(s: &str) -> Outcome<Basis> {
    match s {
        "zero" | "0" => Ok(Basis::Zero),
        "plus" | "+" => Ok(Basis::Plus),
        _ => Err(Failure::Config(format!("basis must be zero or plus, got {s:?}"))),
    }
}

fn estimate_json(cfg: &MemoryConfig, est: &LogicalErrorEstimate) -> Value {
    json!({
        "eps_store": cfg.noise.eps_store,
        "eps_gate": cfg.noise.eps_gate.values().copied().fold(0.0, f64::max),
        "method": cfg.protocol.to_string(),
        "trials": est.trials,
        "failures": est.failures,
        "p_hat": est.p_hat,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "seed": est.seed,
        "digest": est.digest,
    })
}

fn print_estimate(cfg: &MemoryConfig, est: &LogicalErrorEstimate) {
    let gate = cfg.noise.eps_gate.values().copied().fold(0.0, f64::max);
    println!(
        "eps_store={} eps_gate={} method={} trials={} failures={} p_hat={} ci=[{}, {}]",
        cfg.noise.eps_store, gate, cfg.protocol, est.trials, est.failures, est.p_hat, est.ci_low, est.ci_high
    );
}

fn emit_csv(path: Option<&Path>, rows: &[(MemoryConfig, LogicalErrorEstimate)]) -> Outcome<()> {
    if let Some(p) = path {
        let mut w = open_output(p)?;
        write_csv(&mut w, rows)?;
        w.flush()?;
    }
    Ok(())
}

pub fn mc(cfg: &RunConfig) -> Outcome {
    let seed = require_seed(cfg)?;
    cfg.validate()?;
    let mut rows = Vec::new();
    for point in cfg.points() {
        let est = estimate_logical_error_rate(&point, cfg.trials, seed)?;
        print_estimate(&point, &est);
        rows.push((point, est));
    }
    emit_csv(cfg.csv.as_deref(), &rows)?;
    Ok(Report {
        entries: cfg.entries(),
        results: Value::Array(rows.iter().map(|(c, e)| estimate_json(c, e)).collect()),
        json: cfg.json.clone(),
    })
}

pub fn threshold(cfg: &RunConfig) -> Outcome {
    let seed = require_seed(cfg)?;
    cfg.validate()?;
    let tc = cfg.threshold_config();
    let est = pseudothreshold(&tc, seed)?;
    let mut rows = Vec::new();
    for s in &est.steps {
        let point = MemoryConfig { protocol: MemoryProtocol::Coded(tc.policy), noise: tc.family.model(s.eps), rounds: tc.rounds };
        println!("eps={:.4e} side={:?} trials={} p_hat={}", s.eps, s.side, s.estimate.trials, s.estimate.p_hat);
        rows.push((point, s.estimate.clone()));
    }
    println!("fault locations per round {}", est.locations);
    if est.bracketed {
        println!("crossing {:.4e}  95% interval [{:.4e}, {:.4e}]  relative width {:.3}", est.crossing, est.ci_low, est.ci_high, est.relative_width());
    } else {
        println!("no crossing in [{}, {}]; bound {:.4e}", tc.lo, tc.hi, est.crossing);
    }
    emit_csv(cfg.csv.as_deref(), &rows)?;
    Ok(Report {
        entries: cfg.entries(),
        results: json!({
            "crossing": est.crossing,
            "ci_low": est.ci_low,
            "ci_high": est.ci_high,
            "relative_width": est.relative_width(),
            "bracketed": est.bracketed,
            "locations": est.locations,
            "steps": rows.iter().map(|(c, e)| estimate_json(c, e)).collect::<Vec<_>>(),
        }),
        json: cfg.json.clone(),
    })
}

pub fn analytic(coefficient: f64) -> Outcome {
    let x = analytic_crossing(coefficient)?;
    println!("crossing of c*eps^2 = eps at eps = {x}");
    Ok(Report::new(kv(&[("coefficient", coefficient.to_string())]), json!({ "crossing": x })))
}

pub fn flow(p0: f64, levels: usize, coefficient: f64) -> Outcome {
    let t = concatenation_flow(p0, levels, coefficient)?;
    for (l, p) in t.p_per_level.iter().enumerate() {
        println!("level {l}: {p}");
    }
    Ok(Report::new(
        kv(&[("p0", p0.to_string()), ("levels", levels.to_string()), ("coefficient", coefficient.to_string())]),
        json!({ "p_per_level": t.p_per_level }),
    ))
}

pub fn tradeoff(eps: f64, b: f64) -> Outcome {
    let closed_t = optimal_t(eps, b)?;
    let closed_min = min_block_error(eps, b)?;
    let (t, v) = numeric_optimum(eps, b)?;
    println!("closed form: t* = {closed_t}  minimum = {closed_min:e}");
    println!("numeric:     t* = {t}  minimum = {v:e}");
    println!("relative difference: t {:+.4}  minimum {:+.4}", closed_t / t - 1.0, closed_min / v - 1.0);
    Ok(Report::new(
        kv(&[("eps", eps.to_string()), ("b", b.to_string())]),
        json!({ "closed_t": closed_t, "closed_min": closed_min, "numeric_t": t, "numeric_min": v }),
    ))
}

pub fn resources(bits: u64, block: Option<(f64, f64, f64)>) -> Outcome {
    let r = factoring_resources(bits);
    println!("qubits={}", r.qubits);
    println!("toffolis={}", r.toffolis);
    let mut entries = kv(&[("bits", bits.to_string())]);
    let mut results = json!({ "qubits": r.qubits.to_string(), "toffolis": r.toffolis.to_string() });
    if let Some((eps, eps0, horizon)) = block {
        let size = required_block_size(eps, eps0, horizon, BlockExponent::Log2Seven)?;
        println!("block_size={size}");
        entries.extend(kv(&[("eps", eps.to_string()), ("eps0", eps0.to_string()), ("horizon", horizon.to_string())]));
        results["block_size"] = json!(size);
    }
    Ok(Report::new(entries, results))
}

const TOL: f64 = 1e-10;

pub fn toffoli_verify(seed: Option<u64>, random: usize, audit_stride: Option<usize>) -> Outcome {
    let seed = seed.ok_or_else(|| Failure::Config("toffoli-verify draws random states and needs --seed".into()))?;
    let mut inputs: Vec<(String, [C64; 8])> = (0..8)
        .map(|k| {
            let mut a = [C64::new(0.0, 0.0); 8];
            a[k] = C64::new(1.0, 0.0);
            (format!("|{k:03b}>"), a)
        })
        .collect();
    let mut rng = trial_rng(seed, 0);
    for i in 0..random {
        let mut a = [C64::new(0.0, 0.0); 8];
        for z in a.iter_mut() {
            *z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        a.iter_mut().for_each(|z| *z /= norm);
        inputs.push((format!("random {i}"), a));
    }
    let mut bad = Vec::new();
    let mut worst = 1.0f64;
    for (name, a) in &inputs {
        let c = verify_toffoli_bare(a)?;
        worst = worst.min(c.min_fidelity);
        let ok = (c.total_probability - 1.0).abs() < TOL && c.min_fidelity >= 1.0 - TOL;
        println!("{name}: branches {} total probability {:.12} min fidelity {:.12}", c.branches, c.total_probability, c.min_fidelity);
        if !ok {
            bad.push(name.clone());
        }
    }
    let mut results = json!({ "inputs": inputs.len(), "min_fidelity": worst, "failing": bad });
    let mut entries = kv(&[("seed", seed.to_string()), ("random", random.to_string())]);
    if let Some(stride) = audit_stride {
        let a = toffoli_encoded_audit(stride.max(1))?;
        println!(
            "encoded audit: {} locations, {} cases, {} branches, {} violations",
            a.locations,
            a.cases,
            a.branches,
            a.violations.len()
        );
        for v in &a.violations {
            println!("  {} step {} {:?}", v.circuit, v.location.step, v.fault);
        }
        entries.push(("audit_stride".into(), stride.to_string()));
        results["audit"] = json!({ "cases": a.cases, "branches": a.branches, "violations": a.violations.len() });
        if !a.violations.is_empty() {
            bad.push("encoded audit".into());
        }
    }
    if !bad.is_empty() {
        return Err(Failure::Verification(format!("Toffoli protocol failed on {}", bad.join(", "))));
    }
    println!("Toffoli protocol verified on {} inputs", inputs.len());
    Ok(Report::new(entries, results))
}

pub fn fluxon_demo(group: Option<&Path>) -> Outcome {
    let mut entries = Vec::new();
    let mut results = json!({});
    if let Some(p) = group {
        let f = File::open(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
        let g = Arc::new(FiniteGroup::from_csv(f)?);
        let sizes: Vec<usize> = g.classes().iter().map(Vec::len).collect();
        println!("group {}: order {} class sizes {:?}", p.display(), g.order(), sizes);
        entries.push(("group".to_string(), p.display().to_string()));
        results["group"] = json!({ "order": g.order(), "class_sizes": sizes });
    }
    let d = a5_not_demo()?;
    for line in &d.trace {
        println!("{line}");
    }
    println!("u0 = {}  u1 = {}  v = {}", d.u0, d.u1, d.v);
    println!("basis states swapped: {}", d.basis_swapped);
    println!("superposition flipped: {}", d.superposition_flipped);
    println!("NOT squared is identity: {}", d.involution);
    results["not_demo"] = json!({
        "u0": d.u0, "u1": d.u1, "v": d.v,
        "basis_swapped": d.basis_swapped,
        "superposition_flipped": d.superposition_flipped,
        "involution": d.involution,
        "trace": d.trace,
    });
    if !d.passed() {
        return Err(Failure::Verification("A5 NOT gate check failed".into()));
    }
    Ok(Report::new(entries, results))
}
