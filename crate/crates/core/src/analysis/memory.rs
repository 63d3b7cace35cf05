use std::fmt;

use rayon::prelude::*;

use super::report::config_digest;
use crate::circuit::{FaultSource, LocKind, Location, Machine};
use crate::codes::{steane_code, StabilizerCode};
use crate::error::{Error, Result};
use crate::noise::{trial_rng, NoiseModel, NoisySource};
use crate::pauli::{Pauli1, PauliString};
use crate::protocols::{handle_leakage, Recovery, RecoveryPolicy, BLOCK};
use crate::sim::{PauliFrame, StabilizerTableau};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959964;
/// Key offset separating the measurement RNG from the fault RNG of a trial.
const MEASURE_KEY: u64 = 0x6d65_6173_7572_6521;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemoryProtocol {
    /// A bare qubit exposed to storage noise, one timestep per round.
    Uncoded,
    /// A Steane block kept by recovery rounds.
    Coded(RecoveryPolicy),
}

impl fmt::Display for MemoryProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemoryProtocol::Uncoded => f.write_str("uncoded"),
            MemoryProtocol::Coded(p) => write!(f, "{}", p.method),
        }
    }
}

/// A quantum-memory experiment: encode, run `rounds` noisy recovery rounds, decode
/// ideally and compare with the encoded state.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryConfig {
    pub protocol: MemoryProtocol,
    pub noise: NoiseModel,
    pub rounds: usize,
}

impl MemoryConfig {
    pub fn new(protocol: MemoryProtocol, noise: NoiseModel) -> Self {
        MemoryConfig { protocol, noise, rounds: 1 }
    }

    /// Canonical listing used for the digest.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut v = vec![("protocol".to_string(), self.protocol.to_string()), ("rounds".to_string(), self.rounds.to_string())];
        if let MemoryProtocol::Coded(p) = &self.protocol {
            v.extend(p.entries());
        }
        v.extend(self.noise.entries());
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalErrorEstimate {
    pub trials: u64,
    pub failures: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub digest: String,
}

/// Wilson score interval at 95%.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// Run `trial(i)` for `i in 0..trials` on the current rayon pool and count failures.
pub fn estimate_with<F>(trials: u64, seed: u64, digest: String, trial: F) -> Result<LogicalErrorEstimate>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let failures = (0..trials).into_par_iter().map(|i| trial(i).map(u64::from)).try_reduce(|| 0, |a, b| Ok(a + b))?;
    let (ci_low, ci_high) = wilson_interval(failures, trials);
    Ok(LogicalErrorEstimate { trials, failures, p_hat: failures as f64 / trials as f64, ci_low, ci_high, seed, digest })
}

pub fn estimate_logical_error_rate(config: &MemoryConfig, trials: u64, seed: u64) -> Result<LogicalErrorEstimate> {
    config.noise.validate()?;
    let digest = config_digest(&config.entries());
    match config.protocol {
        MemoryProtocol::Uncoded => estimate_with(trials, seed, digest, |i| Ok(uncoded_trial(config, seed, i))),
        MemoryProtocol::Coded(policy) => {
            let rec = Recovery::new(policy)?;
            let code = steane_code();
            if config.noise.leak_rate > 0.0 {
                estimate_with(trials, seed, digest, |i| leaky_trial(&rec, config, seed, i))
            } else {
                estimate_with(trials, seed, digest, |i| frame_trial(&rec, &code, config, seed, i))
            }
        }
    }
}

fn uncoded_trial(config: &MemoryConfig, seed: u64, trial: u64) -> bool {
    let mut src = NoisySource::for_trial(config.noise.clone(), seed, trial);
    let (mut x, mut z, mut leaked) = (false, false, false);
    for t in 0..config.rounds {
        let f = src.fault(&Location::new(LocKind::Idle, &[0], t));
        let (fx, fz) = f.paulis[0].bits();
        x ^= fx;
        z ^= fz;
        leaked |= f.leak[0];
    }
    leaked || x || z
}

fn frame_trial(rec: &Recovery, code: &StabilizerCode, config: &MemoryConfig, seed: u64, trial: u64) -> Result<bool> {
    let n = rec.num_qubits();
    let map: Vec<usize> = (0..n).collect();
    let src = NoisySource::for_trial(config.noise.clone(), seed, trial);
    let mut m = Machine::new(PauliFrame::new(n), src, trial_rng(seed ^ MEASURE_KEY, trial));
    for _ in 0..config.rounds {
        match rec.recover(&mut m, &map) {
            Err(Error::PreparationFailed { .. }) => return Ok(true),
            r => {
                r?;
            }
        }
    }
    let mut e = m.backend.error_on(&map[..BLOCK]);
    let correction = code.decode_syndrome(&code.syndrome_of(&e)?)?;
    e.mul_assign_unchecked(&correction);
    Ok(code.is_logical_error(&e))
}

/// Leakage cannot be tracked by a frame: the block is simulated on a tableau,
/// entangled with a noiseless reference qubit so both logical bases are checked.
fn leaky_trial(rec: &Recovery, config: &MemoryConfig, seed: u64, trial: u64) -> Result<bool> {
    let n = rec.num_qubits();
    let map: Vec<usize> = (0..n).collect();
    let src = NoisySource::for_trial(config.noise.clone(), seed, trial);
    let mut m = Machine::new(StabilizerTableau::new(n + 1), src, trial_rng(seed ^ MEASURE_KEY, trial));
    let mut enc: Vec<usize> = (0..BLOCK).collect();
    enc.push(n);
    m.run_ideal(&crate::protocols::encoder_with_reference()?, &enc)?;
    for _ in 0..config.rounds {
        handle_leakage(&mut m, &map[..BLOCK], map[BLOCK])?;
        match rec.recover(&mut m, &map) {
            Err(Error::PreparationFailed { .. }) => return Ok(true),
            r => {
                r?;
            }
        }
    }
    m.quietly(|m| handle_leakage(m, &map[..BLOCK], map[BLOCK]))?;
    rec.recover_ideal(&mut m, &map)?;
    for p in [Pauli1::Z, Pauli1::X] {
        let mut obs = PauliString::from_support(n + 1, &map[..BLOCK], p);
        obs.set(n, p);
        if m.backend.expectation(&obs)? != Some(1) {
            return Ok(true);
        }
    }
    Ok(false)
}
