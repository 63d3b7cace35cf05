use std::fmt;
use std::str::FromStr;

use crate::circuit::figures::{emit_cat, emit_naive_pass, emit_shor_state, emit_steane_bit_pass, emit_steane_phase_pass};
use crate::circuit::{definite, Circuit, CircuitBuilder, FaultSource, Machine};
use crate::codes::{hamming_syndrome_index, steane_code};
use crate::error::{Error, Result};
use crate::pauli::{Pauli1, PauliString};
use crate::sim::Backend;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Steane,
    Shor,
    /// One ancilla per check row. Not fault tolerant; for demonstrations only.
    Naive,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Steane => "steane",
            Method::Shor => "shor",
            Method::Naive => "naive",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "steane" => Ok(Method::Steane),
            "shor" => Ok(Method::Shor),
            "naive" => Ok(Method::Naive),
            _ => Err(Error::Config(format!("unknown method {s:?}"))),
        }
    }
}

/// When a measured syndrome half is trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepeatPolicy {
    /// Act on the first measurement, trivial or not.
    AcceptTrivialOnce,
    /// A nontrivial syndrome is remeasured until two consecutive readings agree,
    /// at most `max` measurements in all; otherwise nothing is done.
    RepeatUntilAgree { max: usize },
    /// A nontrivial syndrome is measured once more: agreement is acted on,
    /// disagreement defers to the next round.
    DeferOnDisagree,
}

impl fmt::Display for RepeatPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepeatPolicy::AcceptTrivialOnce => f.write_str("accept-trivial-once"),
            RepeatPolicy::RepeatUntilAgree { max } => write!(f, "repeat-nontrivial-until-agree({max})"),
            RepeatPolicy::DeferOnDisagree => f.write_str("defer-on-disagree"),
        }
    }
}

impl FromStr for RepeatPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "accept-trivial-once" => return Ok(RepeatPolicy::AcceptTrivialOnce),
            "defer-on-disagree" => return Ok(RepeatPolicy::DeferOnDisagree),
            "repeat-nontrivial-until-agree" => return Ok(RepeatPolicy::RepeatUntilAgree { max: 4 }),
            _ => {}
        }
        let max = s
            .strip_prefix("repeat-nontrivial-until-agree(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| Error::Config(format!("unknown repeat_policy {s:?}")))?;
        Ok(RepeatPolicy::RepeatUntilAgree { max })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecoveryPolicy {
    pub method: Method,
    pub repeats: RepeatPolicy,
    pub verify_ancilla: bool,
    pub max_retries: usize,
    /// Ancillas are prepared and verified ahead of use, so the data block only
    /// rests while it is coupled and read out. Otherwise the data collects storage
    /// faults for the whole preparation.
    pub offline_ancilla: bool,
    /// Allows the naive method.
    pub demonstration: bool,
}

impl Default for RecoveryPolicy {
    fn default() -> Self {
        RecoveryPolicy {
            method: Method::Steane,
            repeats: RepeatPolicy::DeferOnDisagree,
            verify_ancilla: true,
            max_retries: 8,
            offline_ancilla: true,
            demonstration: false,
        }
    }
}

impl RecoveryPolicy {
    pub fn with_method(method: Method) -> Self {
        RecoveryPolicy { method, demonstration: method == Method::Naive, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_retries == 0 {
            return Err(Error::Config("max_retries must be positive".into()));
        }
        if let RepeatPolicy::RepeatUntilAgree { max } = self.repeats {
            if max < 2 {
                return Err(Error::Config("repeat-nontrivial-until-agree needs at least 2 measurements".into()));
            }
        }
        if self.method == Method::Naive && !self.demonstration {
            return Err(Error::Config("the naive method is only available in demonstration mode".into()));
        }
        Ok(())
    }

    /// Set one of the config keys `method`, `repeat_policy`, `verify_ancilla`,
    /// `ancilla_prep`, `max_retries`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "method" => {
                self.method = v.parse()?;
                if self.method == Method::Naive {
                    self.demonstration = true;
                }
            }
            "repeat_policy" => self.repeats = v.parse()?,
            "verify_ancilla" => {
                self.verify_ancilla = match v {
                    "true" | "on" | "1" => true,
                    "false" | "off" | "0" => false,
                    _ => return Err(Error::Config(format!("verify_ancilla: expected on/off, got {v:?}"))),
                }
            }
            "ancilla_prep" => {
                self.offline_ancilla = match v {
                    "offline" => true,
                    "inline" => false,
                    _ => return Err(Error::Config(format!("ancilla_prep: expected offline/inline, got {v:?}"))),
                }
            }
            "max_retries" => {
                self.max_retries = v.parse().map_err(|_| Error::Config(format!("max_retries: bad integer {v:?}")))?
            }
            _ => return Err(Error::Config(format!("unknown protocol key {key:?}"))),
        }
        self.validate()
    }

    pub fn entries(&self) -> Vec<(String, String)> {
        vec![
            ("method".into(), self.method.to_string()),
            ("repeat_policy".into(), self.repeats.to_string()),
            ("verify_ancilla".into(), if self.verify_ancilla { "on" } else { "off" }.into()),
            ("ancilla_prep".into(), if self.offline_ancilla { "offline" } else { "inline" }.into()),
            ("max_retries".into(), self.max_retries.to_string()),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Half {
    /// Z-type checks, locating bit flips.
    Bit,
    /// X-type checks, locating phase flips.
    Phase,
}

/// Result for one syndrome half.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfOutcome {
    /// Applied correction on the seven block qubits; identity when deferred.
    pub correction: PauliString,
    /// Every reading, as the 1-based position it names (0 = trivial).
    pub history: Vec<usize>,
    pub deferred: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryOutcome {
    pub bit: HalfOutcome,
    pub phase: HalfOutcome,
    /// Fresh ancilla qubits prepared, including rejected ones.
    pub ancillas: usize,
}

impl RecoveryOutcome {
    pub fn correction(&self) -> PauliString {
        let mut c = self.bit.correction.clone();
        c.mul_assign_unchecked(&self.phase.correction);
        c.with_phase(0)
    }

    pub fn deferred(&self) -> bool {
        self.bit.deferred || self.phase.deferred
    }

    pub fn history(&self) -> Vec<(Half, usize)> {
        let b = self.bit.history.iter().map(|&s| (Half::Bit, s));
        b.chain(self.phase.history.iter().map(|&s| (Half::Phase, s))).collect()
    }
}

#[derive(Clone, Debug)]
enum Extract {
    Steane { passes: [Circuit; 2], syndrome: [Vec<usize>; 2], ancillas: usize },
    Naive { passes: [Circuit; 2] },
    Shor { prep: [Circuit; 2], couple: Vec<Circuit>, ancillas: usize },
}

/// Syndrome extraction and correction for one seven-qubit block.
///
/// The machine region handed to [`Recovery::recover`] lists the block's seven
/// qubits first, then the scratch qubits. With inline preparation the data qubits
/// are inputs of every sub-circuit and collect storage faults while ancillas are
/// prepared; offline, they become live at the coupling step.
#[derive(Clone, Debug)]
pub struct Recovery {
    pub policy: RecoveryPolicy,
    extract: Extract,
    num_qubits: usize,
}

pub const BLOCK: usize = 7;

fn data() -> Vec<usize> {
    (0..BLOCK).collect()
}

impl Recovery {
    pub fn new(policy: RecoveryPolicy) -> Result<Self> {
        policy.validate()?;
        let checks = if policy.verify_ancilla { 2 } else { 0 };
        let d = data();
        let (extract, num_qubits) = match policy.method {
            Method::Steane => {
                let anc: Vec<usize> = (7..14).collect();
                let n = if policy.offline_ancilla { 14 + 7 * checks.max(1) } else { 21 };
                let chk: Vec<usize> = (14..n).collect();
                let data_in: &[usize] = if policy.offline_ancilla { &[] } else { &d };
                let mut b = CircuitBuilder::new("steane_bit_pass", n);
                b.inputs(data_in);
                let pb = emit_steane_bit_pass(&mut b, &d, &anc, &chk, checks);
                let bit = b.build()?;
                let mut b = CircuitBuilder::new("steane_phase_pass", n);
                b.inputs(data_in);
                let pp = emit_steane_phase_pass(&mut b, &d, &anc, &chk, checks);
                let phase = b.build()?;
                let ancillas = 7 + 7 * checks;
                (Extract::Steane { passes: [bit, phase], syndrome: [pb.syndrome, pp.syndrome], ancillas }, n)
            }
            Method::Naive => {
                let mut passes = Vec::new();
                for (name, ph) in [("naive_bit_pass", false), ("naive_phase_pass", true)] {
                    let mut b = CircuitBuilder::new(name, 10);
                    b.inputs(&d).fault_tolerant(false);
                    emit_naive_pass(&mut b, &d, &[7, 8, 9], ph);
                    passes.push(b.build()?);
                }
                let [bit, phase]: [Circuit; 2] = passes.try_into().expect("two passes");
                (Extract::Naive { passes: [bit, phase] }, 10)
            }
            Method::Shor => {
                let cat: Vec<usize> = (7..11).collect();
                let verify = policy.verify_ancilla;
                let prep = |shor: bool| -> Result<Circuit> {
                    let mut b = CircuitBuilder::new(if shor { "shor_state" } else { "cat_state" }, 12);
                    if !policy.offline_ancilla {
                        b.inputs(&d);
                    }
                    if verify {
                        if shor {
                            emit_shor_state(&mut b, &cat, 11);
                        } else {
                            emit_cat(&mut b, &cat, 11);
                        }
                    } else {
                        for &q in &cat {
                            b.prep(q);
                        }
                        b.h(cat[0]);
                        for w in cat.windows(2) {
                            b.cnot(w[0], w[1]);
                        }
                        if shor {
                            for &q in &cat {
                                b.h(q);
                            }
                        }
                    }
                    b.build()
                };
                let code = steane_code();
                let mut couple = Vec::new();
                for (i, g) in code.generators.iter().enumerate() {
                    let z_type = i < 3;
                    let mut b = CircuitBuilder::new(&format!("shor_generator_{}", i + 1), 12);
                    let mut inputs = d.clone();
                    inputs.extend(&cat);
                    b.inputs(&inputs);
                    for (k, j) in g.support().into_iter().enumerate() {
                        if z_type {
                            b.cnot(d[j], cat[k]);
                        } else {
                            b.cnot(cat[k], d[j]);
                        }
                    }
                    for &c in &cat {
                        if !z_type {
                            b.h(c);
                        }
                        b.measure(c);
                    }
                    couple.push(b.build()?);
                }
                let ancillas = 4 + verify as usize;
                (Extract::Shor { prep: [prep(true)?, prep(false)?], couple, ancillas }, 12)
            }
        };
        Ok(Recovery { policy, extract, num_qubits })
    }

    /// Qubits in the region: the block plus scratch.
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// One reading of a syndrome half, as the 1-based position it names.
    fn measure_half<B: Backend, F: FaultSource>(
        &self,
        m: &mut Machine<B, F>,
        map: &[usize],
        half: Half,
        ancillas: &mut usize,
    ) -> Result<usize> {
        let h = half as usize;
        match &self.extract {
            Extract::Steane { passes, syndrome, ancillas: a } => {
                let rec = definite(&m.run(&passes[h], map)?)?;
                *ancillas += a;
                let word: Vec<bool> = syndrome[h].iter().map(|&b| rec[b]).collect();
                hamming_syndrome_index(&word)
            }
            Extract::Naive { passes } => {
                let rec = definite(&m.run(&passes[h], map)?)?;
                *ancillas += 3;
                Ok(rec.iter().fold(0, |a, &b| (a << 1) | b as usize))
            }
            Extract::Shor { prep, couple, ancillas: a } => {
                let mut s = 0;
                for g in 0..3 {
                    let mut retries = 0;
                    loop {
                        let rec = definite(&m.run(&prep[h], map)?)?;
                        *ancillas += a;
                        if !self.policy.verify_ancilla || !rec[0] {
                            break;
                        }
                        retries += 1;
                        if retries > self.policy.max_retries {
                            return Err(Error::PreparationFailed { retries: self.policy.max_retries });
                        }
                    }
                    let rec = definite(&m.run(&couple[3 * h + g], map)?)?;
                    let parity = rec.iter().fold(false, |a, &b| a ^ b);
                    s = (s << 1) | parity as usize;
                }
                Ok(s)
            }
        }
    }

    fn half<B: Backend, F: FaultSource>(
        &self,
        m: &mut Machine<B, F>,
        map: &[usize],
        half: Half,
        ancillas: &mut usize,
    ) -> Result<HalfOutcome> {
        let mut history = vec![self.measure_half(m, map, half, ancillas)?];
        let accepted = if history[0] == 0 {
            Some(0)
        } else {
            match self.policy.repeats {
                RepeatPolicy::AcceptTrivialOnce => Some(history[0]),
                RepeatPolicy::DeferOnDisagree => {
                    history.push(self.measure_half(m, map, half, ancillas)?);
                    (history[1] == history[0]).then_some(history[0])
                }
                RepeatPolicy::RepeatUntilAgree { max } => {
                    let mut agreed = None;
                    while history.len() < max {
                        let s = self.measure_half(m, map, half, ancillas)?;
                        history.push(s);
                        if s == history[history.len() - 2] {
                            agreed = Some(s);
                            break;
                        }
                    }
                    agreed
                }
            }
        };
        let mut correction = PauliString::identity(BLOCK);
        if let Some(j) = accepted.filter(|&j| j > 0) {
            let p = match half {
                Half::Bit => Pauli1::X,
                Half::Phase => Pauli1::Z,
            };
            m.correct(map[j - 1], p);
            correction.set(j - 1, p);
        }
        Ok(HalfOutcome { correction, history, deferred: accepted.is_none() })
    }

    /// One recovery round on the region `map` (block first, then scratch).
    pub fn recover<B: Backend, F: FaultSource>(&self, m: &mut Machine<B, F>, map: &[usize]) -> Result<RecoveryOutcome> {
        if map.len() != self.num_qubits {
            return Err(Error::Dimension { expected: self.num_qubits, found: map.len() });
        }
        let mut ancillas = 0;
        let bit = self.half(m, map, Half::Bit, &mut ancillas)?;
        let phase = self.half(m, map, Half::Phase, &mut ancillas)?;
        Ok(RecoveryOutcome { bit, phase, ancillas })
    }

    /// A round with the fault source switched off.
    pub fn recover_ideal<B: Backend, F: FaultSource>(
        &self,
        m: &mut Machine<B, F>,
        map: &[usize],
    ) -> Result<RecoveryOutcome> {
        m.quietly(|m| self.recover(m, map))
    }
}
