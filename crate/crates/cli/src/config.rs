use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ftlab::analysis::{MemoryConfig, MemoryProtocol, NoiseFamily, ThresholdConfig};
use ftlab::noise::NoiseModel;
use ftlab::protocols::RecoveryPolicy;
use ftlab::{Error, Result};

/// Which noise component a sweep grid drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SweepAxis {
    #[default]
    EpsStore,
    EpsGate,
    /// Every rate, as in the uniform threshold family.
    Uniform,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::EpsStore => "eps_store",
            SweepAxis::EpsGate => "eps_gate",
            SweepAxis::Uniform => "uniform",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps_store" => Ok(SweepAxis::EpsStore),
            "eps_gate" => Ok(SweepAxis::EpsGate),
            "uniform" => Ok(SweepAxis::Uniform),
            _ => Err(Error::Config(format!("unknown sweep axis {s:?}"))),
        }
    }
}

/// Everything a Monte Carlo run depends on. Flags override the config file, which
/// overrides the defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub noise: NoiseModel,
    pub policy: RecoveryPolicy,
    pub uncoded: bool,
    pub rounds: usize,
    pub trials: u64,
    pub seed: Option<u64>,
    pub grid: Vec<f64>,
    pub sweep: SweepAxis,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    /// Search settings; only listed for the `threshold` subcommand.
    pub threshold: bool,
    pub family: NoiseFamily,
    pub lo: f64,
    pub hi: f64,
    pub min_trials: u64,
    pub max_trials: u64,
    pub rel_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = ThresholdConfig::default();
        RunConfig {
            noise: NoiseModel::noiseless(),
            policy: RecoveryPolicy::default(),
            uncoded: false,
            rounds: 1,
            trials: 10_000,
            seed: None,
            grid: Vec::new(),
            sweep: SweepAxis::EpsStore,
            csv: None,
            json: None,
            threshold: false,
            family: NoiseFamily::Uniform,
            lo: t.lo,
            hi: t.hi,
            min_trials: t.min_trials,
            max_trials: t.max_trials,
            rel_tol: t.rel_tol,
        }
    }
}

const POLICY_KEYS: [&str; 4] = ["repeat_policy", "verify_ancilla", "ancilla_prep", "max_retries"];

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let float = |what: &str| v.parse::<f64>().map_err(|_| Error::Config(format!("{what}: bad number {v:?}")));
        let int = |what: &str| v.parse::<u64>().map_err(|_| Error::Config(format!("{what}: bad integer {v:?}")));
        match key {
            "method" if v == "uncoded" => self.uncoded = true,
            "method" => {
                self.policy.set(key, v)?;
                self.uncoded = false;
            }
            k if POLICY_KEYS.contains(&k) => self.policy.set(k, v)?,
            "rounds" => self.rounds = int("rounds")? as usize,
            "trials" => self.trials = int("trials")?,
            "seed" => self.seed = Some(int("seed")?),
            "grid" => {
                self.grid = v
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("grid: bad number {s:?}"))))
                    .collect::<Result<_>>()?
            }
            "sweep" => self.sweep = v.parse()?,
            "family" => self.family = v.parse()?,
            "lo" => self.lo = float("lo")?,
            "hi" => self.hi = float("hi")?,
            "min_trials" => self.min_trials = int("min_trials")?,
            "max_trials" => self.max_trials = int("max_trials")?,
            "rel_tol" => self.rel_tol = float("rel_tol")?,
            "csv" => self.csv = Some(PathBuf::from(v)),
            "json" => self.json = Some(PathBuf::from(v)),
            k if k.starts_with("eps_") || k == "leak_rate" || k == "multiqubit_mode" => self.noise.set(k, v)?,
            _ => return Err(Error::Config(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Flat `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn protocol(&self) -> MemoryProtocol {
        if self.uncoded {
            MemoryProtocol::Uncoded
        } else {
            MemoryProtocol::Coded(self.policy)
        }
    }

    /// Canonical listing in a fixed order; output paths are not part of it.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut v = vec![("method".to_string(), if self.uncoded { "uncoded".to_string() } else { self.policy.method.to_string() })];
        v.extend(self.policy.entries().into_iter().filter(|(k, _)| k != "method"));
        if !self.threshold {
            v.extend(self.noise.entries());
        }
        v.push(("rounds".into(), self.rounds.to_string()));
        if self.threshold {
            v.push(("family".into(), self.family.to_string()));
            v.push(("lo".into(), self.lo.to_string()));
            v.push(("hi".into(), self.hi.to_string()));
            v.push(("min_trials".into(), self.min_trials.to_string()));
            v.push(("max_trials".into(), self.max_trials.to_string()));
            v.push(("rel_tol".into(), self.rel_tol.to_string()));
        } else {
            v.push(("trials".into(), self.trials.to_string()));
        }
        if let Some(s) = self.seed {
            v.push(("seed".into(), s.to_string()));
        }
        if !self.grid.is_empty() {
            v.push(("grid".into(), self.grid.iter().map(f64::to_string).collect::<Vec<_>>().join(",")));
            v.push(("sweep".into(), self.sweep.to_string()));
        }
        v
    }

    pub fn to_text(&self) -> String {
        self.entries().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// One memory experiment per grid point, or a single one without a grid.
    pub fn points(&self) -> Vec<MemoryConfig> {
        let at = |noise: NoiseModel| MemoryConfig { protocol: self.protocol(), noise, rounds: self.rounds };
        if self.grid.is_empty() {
            return vec![at(self.noise.clone())];
        }
        self.grid
            .iter()
            .map(|&e| {
                let mut n = self.noise.clone();
                match self.sweep {
                    SweepAxis::EpsStore => n.eps_store = e,
                    SweepAxis::EpsGate => {
                        let m = NoiseModel::gates(e);
                        n.eps_gate = m.eps_gate;
                    }
                    SweepAxis::Uniform => {
                        let u = NoiseModel::uniform(e);
                        n = NoiseModel { leak_rate: n.leak_rate, multiqubit_mode: n.multiqubit_mode, ..u };
                    }
                }
                at(n)
            })
            .collect()
    }

    pub fn threshold_config(&self) -> ThresholdConfig {
        ThresholdConfig {
            policy: self.policy,
            family: self.family,
            lo: self.lo,
            hi: self.hi,
            min_trials: self.min_trials,
            max_trials: self.max_trials,
            rounds: self.rounds,
            rel_tol: self.rel_tol,
            ..ThresholdConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        self.policy.validate()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.rounds == 0 {
            return Err(Error::Config("rounds must be at least 1".into()));
        }
        if let Some(e) = self.grid.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::Config(format!("grid value {e} is not a probability")));
        }
        if self.threshold {
            if self.noise != NoiseModel::noiseless() {
                return Err(Error::Config("threshold noise comes from `family`; noise keys are not accepted".into()));
            }
            if !(0.0 < self.lo && self.lo < self.hi && self.hi <= 1.0) {
                return Err(Error::Config(format!("need 0 < lo < hi <= 1, got lo = {} hi = {}", self.lo, self.hi)));
            }
            if self.min_trials == 0 || self.max_trials < self.min_trials {
                return Err(Error::Config("need 0 < min_trials <= max_trials".into()));
            }
            if !(self.rel_tol > 0.0) {
                return Err(Error::Config("rel_tol must be positive".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let mut c = RunConfig::default();
        c.apply_text("method = shor\neps_store = 0.001 # storage\neps_gate.cnot = 0.002\ngrid = 1e-3, 2e-3\nseed=5\n").unwrap();
        let mut d = RunConfig::default();
        d.apply_text(&c.to_text()).unwrap();
        assert_eq!(c.entries(), d.entries());
        assert_eq!(c.to_text(), d.to_text());
    }

    #[test]
    fn unknown_key_is_an_error() {
        let mut c = RunConfig::default();
        assert!(matches!(c.apply_text("eps_stor = 0.1"), Err(Error::Config(_))));
        assert!(matches!(c.apply_text("trials 5"), Err(Error::Config(_))));
    }

    #[test]
    fn uncoded_method() {
        let mut c = RunConfig::default();
        c.set("method", "uncoded").unwrap();
        assert_eq!(c.protocol(), MemoryProtocol::Uncoded);
        assert_eq!(c.entries()[0].1, "uncoded");
    }
}
