//! Stochastic Pauli noise: storage, gate, preparation, measurement and leakage faults.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Fault, FaultSource, GateKind, LocKind, Location};
use crate::error::{Error, Result};
use crate::pauli::Pauli1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MultiQubitMode {
    /// Every operand of a faulty gate gets an independent uniform non-identity Pauli.
    #[default]
    AllOperands,
    /// A faulty k-qubit gate applies one of the 4^k - 1 non-identity Paulis uniformly.
    UniformNontrivial,
}

impl fmt::Display for MultiQubitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MultiQubitMode::AllOperands => "all-operands",
            MultiQubitMode::UniformNontrivial => "uniform-nontrivial",
        })
    }
}

impl FromStr for MultiQubitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-operands" => Ok(MultiQubitMode::AllOperands),
            "uniform-nontrivial" => Ok(MultiQubitMode::UniformNontrivial),
            _ => Err(Error::Config(format!("unknown multiqubit_mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct NoiseModel {
    /// Per qubit per timestep while idle.
    pub eps_store: f64,
    /// Per gate execution; missing kinds are noiseless.
    pub eps_gate: BTreeMap<GateKind, f64>,
    pub eps_prep: f64,
    pub eps_meas: f64,
    /// Per qubit per timestep.
    pub leak_rate: f64,
    pub multiqubit_mode: MultiQubitMode,
}

fn uniform_pauli<R: Rng + ?Sized>(rng: &mut R) -> Pauli1 {
    Pauli1::NONTRIVIAL[rng.gen_range(0..3)]
}

fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    p > 0.0 && rng.gen::<f64>() < p
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    /// Storage errors only.
    pub fn storage(eps: f64) -> Self {
        NoiseModel { eps_store: eps, ..Self::default() }
    }

    /// The same rate for every gate kind.
    pub fn gates(eps: f64) -> Self {
        NoiseModel { eps_gate: GateKind::ALL.iter().map(|&k| (k, eps)).collect(), ..Self::default() }
    }

    /// Every location fails with probability `eps`.
    pub fn uniform(eps: f64) -> Self {
        NoiseModel { eps_store: eps, eps_prep: eps, eps_meas: eps, ..Self::gates(eps) }
    }

    pub fn gate_rate(&self, kind: GateKind) -> f64 {
        self.eps_gate.get(&kind).copied().unwrap_or(0.0)
    }

    pub fn is_noiseless(&self) -> bool {
        self.eps_store == 0.0
            && self.eps_prep == 0.0
            && self.eps_meas == 0.0
            && self.leak_rate == 0.0
            && self.eps_gate.values().all(|&e| e == 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {p} is not a probability")))
            }
        };
        check("eps_store", self.eps_store)?;
        check("eps_prep", self.eps_prep)?;
        check("eps_meas", self.eps_meas)?;
        check("leak_rate", self.leak_rate)?;
        for (k, &p) in &self.eps_gate {
            check(&format!("eps_gate.{}", k.name()), p)?;
        }
        Ok(())
    }

    /// Set one configuration key. `eps_gate` without a suffix sets every gate kind.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || value.trim().parse::<f64>().map_err(|_| Error::Config(format!("{key}: bad number {value:?}")));
        match key {
            "eps_store" => self.eps_store = num()?,
            "eps_prep" => self.eps_prep = num()?,
            "eps_meas" => self.eps_meas = num()?,
            "leak_rate" => self.leak_rate = num()?,
            "multiqubit_mode" => self.multiqubit_mode = value.trim().parse()?,
            "eps_gate" => {
                let v = num()?;
                for k in GateKind::ALL {
                    self.eps_gate.insert(k, v);
                }
            }
            _ => {
                let kind = key
                    .strip_prefix("eps_gate.")
                    .and_then(GateKind::from_name)
                    .ok_or_else(|| Error::Config(format!("unknown noise key {key:?}")))?;
                self.eps_gate.insert(kind, num()?);
            }
        }
        self.validate()
    }

    /// Canonical `(key, value)` listing; only nonzero gate rates are listed.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("eps_store".to_string(), self.eps_store.to_string()),
            ("eps_prep".to_string(), self.eps_prep.to_string()),
            ("eps_meas".to_string(), self.eps_meas.to_string()),
            ("leak_rate".to_string(), self.leak_rate.to_string()),
            ("multiqubit_mode".to_string(), self.multiqubit_mode.to_string()),
        ];
        for (k, p) in &self.eps_gate {
            if *p != 0.0 {
                v.push((format!("eps_gate.{}", k.name()), p.to_string()));
            }
        }
        v
    }

    pub fn measurement_flip<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        bernoulli(self.eps_meas, rng)
    }

    /// A faulty preparation leaves `|1⟩` instead of `|0⟩`.
    pub fn prep_fault<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Pauli1> {
        bernoulli(self.eps_prep, rng).then_some(Pauli1::X)
    }

    /// Draw the fault at `loc`. The number of draws depends only on the location and
    /// the model, never on the state being simulated.
    pub fn sample_fault<R: Rng + ?Sized>(&self, loc: &Location, rng: &mut R) -> Fault {
        let mut f = Fault::NONE;
        let k = loc.qubits().len();
        match loc.kind {
            LocKind::Idle => {
                if bernoulli(self.eps_store, rng) {
                    f.paulis[0] = uniform_pauli(rng);
                }
            }
            LocKind::Prep => {
                if let Some(p) = self.prep_fault(rng) {
                    f.paulis[0] = p;
                }
            }
            LocKind::Measure => f.flip = self.measurement_flip(rng),
            LocKind::Gate(kind) => {
                if bernoulli(self.gate_rate(kind), rng) {
                    if k == 1 {
                        f.paulis[0] = uniform_pauli(rng);
                    } else {
                        match self.multiqubit_mode {
                            MultiQubitMode::AllOperands => {
                                for p in f.paulis.iter_mut().take(k) {
                                    *p = uniform_pauli(rng);
                                }
                            }
                            MultiQubitMode::UniformNontrivial => {
                                let choice = rng.gen_range(0..(1usize << (2 * k)) - 1);
                                f = Fault::enumerate(loc, choice);
                            }
                        }
                    }
                }
            }
        }
        if self.leak_rate > 0.0 {
            for i in 0..k {
                if bernoulli(self.leak_rate, rng) {
                    f.leak[i] = true;
                    // the qubit's content is lost: replace it by a random Pauli of itself
                    f.paulis[i] = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z][rng.gen_range(0..4)];
                }
            }
        }
        f
    }
}

/// Per-trial RNG: the master seed selects the key, the trial index the stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial);
    r
}

/// Fault source that samples from a noise model.
#[derive(Clone, Debug)]
pub struct NoisySource {
    pub model: NoiseModel,
    rng: ChaCha8Rng,
    /// Number of nontrivial faults drawn so far.
    pub faults: usize,
}

impl NoisySource {
    pub fn new(model: NoiseModel, rng: ChaCha8Rng) -> Self {
        NoisySource { model, rng, faults: 0 }
    }

    pub fn for_trial(model: NoiseModel, seed: u64, trial: u64) -> Self {
        Self::new(model, trial_rng(seed, trial))
    }
}

impl FaultSource for NoisySource {
    fn fault(&mut self, loc: &Location) -> Fault {
        let f = self.model.sample_fault(loc, &mut self.rng);
        if !f.is_none() {
            self.faults += 1;
        }
        f
    }
}
