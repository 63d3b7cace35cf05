//! Timestep-ordered circuit representation with classical feedback.
//!
//! Qubits and classical bits are 0-based in memory. The text form is 1-based to match
//! the figure labels:
//!
//! ```text
//! .name naive_syndrome
//! .qubits 10
//! .bits 3
//! .data 1 2 3 4 5 6 7
//! .ft false
//! PREP 8; PREP 9; PREP 10
//! CNOT 4 8; CNOT 2 9; CNOT 1 10
//! MEAS 8 -> c1
//! COND c1 X 7
//! ```

mod builder;
mod condition;
pub mod figures;
mod runner;

pub use builder::CircuitBuilder;
pub use condition::Condition;
pub use runner::{definite, Census, Fault, FaultAt, FaultSource, GateKind, LocKind, Location, Machine, NoFaults, SingleFault};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::Clifford;
use crate::sim::Unitary;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    Prep0(usize),
    H(usize),
    P(usize),
    Pinv(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    /// Controls first, target last.
    Toffoli(usize, usize, usize),
    MeasureZ { qubit: usize, bit: usize },
    Discard(usize),
    /// Unitary applied when the condition on earlier classical bits holds.
    Cond { cond: Condition, gate: Box<Gate> },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Prep0(q) | Gate::H(q) | Gate::P(q) | Gate::Pinv(q) | Gate::X(q) | Gate::Z(q) | Gate::Discard(q) => {
                vec![*q]
            }
            Gate::MeasureZ { qubit, .. } => vec![*qubit],
            Gate::Cnot(a, b) | Gate::Cz(a, b) => vec![*a, *b],
            Gate::Toffoli(a, b, c) => vec![*a, *b, *c],
            Gate::Cond { gate, .. } => gate.qubits(),
        }
    }

    pub fn unitary(&self) -> Option<Unitary> {
        Some(match *self {
            Gate::H(q) => Unitary::Clifford(Clifford::H(q)),
            Gate::P(q) => Unitary::Clifford(Clifford::P(q)),
            Gate::Pinv(q) => Unitary::Clifford(Clifford::Pinv(q)),
            Gate::X(q) => Unitary::Clifford(Clifford::X(q)),
            Gate::Z(q) => Unitary::Clifford(Clifford::Z(q)),
            Gate::Cnot(a, b) => Unitary::Clifford(Clifford::Cnot(a, b)),
            Gate::Cz(a, b) => Unitary::Clifford(Clifford::Cz(a, b)),
            Gate::Toffoli(a, b, c) => Unitary::Toffoli(a, b, c),
            _ => return None,
        })
    }

    pub fn is_clifford(&self) -> bool {
        match self {
            Gate::Toffoli(..) => false,
            Gate::Cond { gate, .. } => gate.is_clifford(),
            _ => true,
        }
    }

    /// Same gate with every qubit index passed through `f`.
    pub fn map_qubits(&self, f: &impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::Prep0(q) => Gate::Prep0(f(*q)),
            Gate::H(q) => Gate::H(f(*q)),
            Gate::P(q) => Gate::P(f(*q)),
            Gate::Pinv(q) => Gate::Pinv(f(*q)),
            Gate::X(q) => Gate::X(f(*q)),
            Gate::Z(q) => Gate::Z(f(*q)),
            Gate::Cnot(a, b) => Gate::Cnot(f(*a), f(*b)),
            Gate::Cz(a, b) => Gate::Cz(f(*a), f(*b)),
            Gate::Toffoli(a, b, c) => Gate::Toffoli(f(*a), f(*b), f(*c)),
            Gate::MeasureZ { qubit, bit } => Gate::MeasureZ { qubit: f(*qubit), bit: *bit },
            Gate::Discard(q) => Gate::Discard(f(*q)),
            Gate::Cond { cond, gate } => Gate::Cond { cond: cond.clone(), gate: Box::new(gate.map_qubits(f)) },
        }
    }

    /// Same gate with classical bit indices shifted by `offset`.
    pub fn shift_bits(&self, offset: usize) -> Gate {
        match self {
            Gate::MeasureZ { qubit, bit } => Gate::MeasureZ { qubit: *qubit, bit: bit + offset },
            Gate::Cond { cond, gate } => Gate::Cond { cond: cond.shift_bits(offset), gate: gate.clone() },
            g => g.clone(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Prep0(q) => write!(f, "PREP {}", q + 1),
            Gate::H(q) => write!(f, "H {}", q + 1),
            Gate::P(q) => write!(f, "P {}", q + 1),
            Gate::Pinv(q) => write!(f, "PINV {}", q + 1),
            Gate::X(q) => write!(f, "X {}", q + 1),
            Gate::Z(q) => write!(f, "Z {}", q + 1),
            Gate::Cnot(a, b) => write!(f, "CNOT {} {}", a + 1, b + 1),
            Gate::Cz(a, b) => write!(f, "CZ {} {}", a + 1, b + 1),
            Gate::Toffoli(a, b, c) => write!(f, "TOFF {} {} {}", a + 1, b + 1, c + 1),
            Gate::MeasureZ { qubit, bit } => write!(f, "MEAS {} -> c{}", qubit + 1, bit + 1),
            Gate::Discard(q) => write!(f, "DISCARD {}", q + 1),
            Gate::Cond { cond, gate } => write!(f, "COND {cond} {gate}"),
        }
    }
}

fn parse_index(tok: &str) -> Result<usize> {
    let v: usize = tok.parse().map_err(|_| Error::Parse(format!("bad index {tok:?}")))?;
    if v == 0 {
        return Err(Error::Parse("indices are 1-based".into()));
    }
    Ok(v - 1)
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        let Some((&head, args)) = toks.split_first() else {
            return Err(Error::Parse("empty op".into()));
        };
        let q = |i: usize| -> Result<usize> {
            args.get(i).ok_or_else(|| Error::Parse(format!("missing operand in {s:?}"))).and_then(|t| parse_index(t))
        };
        let arity = |k: usize| -> Result<()> {
            if args.len() != k {
                return Err(Error::Parse(format!("{head} takes {k} operands: {s:?}")));
            }
            Ok(())
        };
        let g = match head {
            "PREP" => {
                arity(1)?;
                Gate::Prep0(q(0)?)
            }
            "H" => {
                arity(1)?;
                Gate::H(q(0)?)
            }
            "P" => {
                arity(1)?;
                Gate::P(q(0)?)
            }
            "PINV" => {
                arity(1)?;
                Gate::Pinv(q(0)?)
            }
            "X" => {
                arity(1)?;
                Gate::X(q(0)?)
            }
            "Z" => {
                arity(1)?;
                Gate::Z(q(0)?)
            }
            "CNOT" => {
                arity(2)?;
                Gate::Cnot(q(0)?, q(1)?)
            }
            "CZ" => {
                arity(2)?;
                Gate::Cz(q(0)?, q(1)?)
            }
            "TOFF" => {
                arity(3)?;
                Gate::Toffoli(q(0)?, q(1)?, q(2)?)
            }
            "DISCARD" => {
                arity(1)?;
                Gate::Discard(q(0)?)
            }
            "MEAS" => {
                arity(3)?;
                if args[1] != "->" {
                    return Err(Error::Parse(format!("expected '->' in {s:?}")));
                }
                let bit = args[2]
                    .strip_prefix('c')
                    .ok_or_else(|| Error::Parse(format!("bad bit {:?}", args[2])))
                    .and_then(parse_index)?;
                Gate::MeasureZ { qubit: q(0)?, bit }
            }
            "COND" => {
                if args.len() < 2 {
                    return Err(Error::Parse(format!("COND needs a condition and a gate: {s:?}")));
                }
                let cond: Condition = args[0].parse()?;
                let gate: Gate = args[1..].join(" ").parse()?;
                if gate.unitary().is_none() {
                    return Err(Error::Parse(format!("COND applies only unitary gates: {s:?}")));
                }
                Gate::Cond { cond, gate: Box::new(gate) }
            }
            other => return Err(Error::Parse(format!("unknown op {other:?}"))),
        };
        Ok(g)
    }
}

/// An immutable, validated circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    num_qubits: usize,
    num_bits: usize,
    inputs: Vec<usize>,
    fault_tolerant: bool,
    steps: Vec<Vec<Gate>>,
    idle: Vec<Vec<usize>>,
}

impl Circuit {
    pub fn new(
        name: &str,
        num_qubits: usize,
        num_bits: usize,
        inputs: Vec<usize>,
        fault_tolerant: bool,
        steps: Vec<Vec<Gate>>,
    ) -> Result<Self> {
        let mut c = Circuit {
            name: name.to_string(),
            num_qubits,
            num_bits,
            inputs,
            fault_tolerant,
            steps,
            idle: Vec::new(),
        };
        c.validate()?;
        c.idle = c.compute_idle();
        Ok(c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    /// Qubits that carry state into the circuit (live from the first timestep).
    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn is_fault_tolerant(&self) -> bool {
        self.fault_tolerant
    }

    pub fn steps(&self) -> &[Vec<Gate>] {
        &self.steps
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// Qubits idle (live but untouched) during step `t`.
    pub fn idle_at(&self, t: usize) -> &[usize] {
        &self.idle[t]
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.steps.iter().flatten()
    }

    pub fn count(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.gates().filter(|g| pred(g)).count()
    }

    pub fn is_clifford(&self) -> bool {
        self.gates().all(|g| g.is_clifford())
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Circuit(format!("{}: {m}", self.name)));
        for &q in &self.inputs {
            if q >= self.num_qubits {
                return bad(format!("input qubit {} out of range", q + 1));
            }
        }
        let mut written_at: Vec<Option<usize>> = vec![None; self.num_bits];
        for (t, step) in self.steps.iter().enumerate() {
            let mut used = vec![false; self.num_qubits];
            for g in step {
                let qs = g.qubits();
                for (i, &q) in qs.iter().enumerate() {
                    if q >= self.num_qubits {
                        return bad(format!("qubit {} out of range in step {}", q + 1, t + 1));
                    }
                    if qs[..i].contains(&q) {
                        return bad(format!("repeated operand in `{g}`"));
                    }
                    if used[q] {
                        return bad(format!("qubit {} touched twice in step {}", q + 1, t + 1));
                    }
                    used[q] = true;
                }
                match g {
                    Gate::MeasureZ { bit, .. } => {
                        if *bit >= self.num_bits {
                            return bad(format!("bit c{} out of range", bit + 1));
                        }
                        written_at[*bit] = Some(t);
                    }
                    Gate::Cond { cond, gate } => {
                        if gate.unitary().is_none() {
                            return bad(format!("conditional non-unitary `{gate}`"));
                        }
                        for b in cond.bits() {
                            match written_at.get(b) {
                                Some(Some(w)) if *w < t => {}
                                _ => return bad(format!("c{} read in step {} before it is written", b + 1, t + 1)),
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn compute_idle(&self) -> Vec<Vec<usize>> {
        let mut live = vec![false; self.num_qubits];
        for &q in &self.inputs {
            live[q] = true;
        }
        let mut out = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let mut touched = vec![false; self.num_qubits];
            for g in step {
                for q in g.qubits() {
                    touched[q] = true;
                    live[q] = true;
                }
            }
            out.push((0..self.num_qubits).filter(|&q| live[q] && !touched[q]).collect());
            for g in step {
                match g {
                    Gate::MeasureZ { qubit, .. } | Gate::Discard(qubit) => live[*qubit] = false,
                    _ => {}
                }
            }
        }
        out
    }

    /// Serialize to the line-oriented text form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(".name {}\n.qubits {}\n.bits {}\n", self.name, self.num_qubits, self.num_bits));
        if !self.inputs.is_empty() {
            let ins: Vec<String> = self.inputs.iter().map(|q| (q + 1).to_string()).collect();
            s.push_str(&format!(".data {}\n", ins.join(" ")));
        }
        s.push_str(&format!(".ft {}\n", self.fault_tolerant));
        for step in &self.steps {
            if step.is_empty() {
                s.push_str("-\n");
            } else {
                let ops: Vec<String> = step.iter().map(|g| g.to_string()).collect();
                s.push_str(&ops.join("; "));
                s.push('\n');
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut name = String::from("circuit");
        let (mut nq, mut nb) = (None, 0usize);
        let mut inputs = Vec::new();
        let mut ft = true;
        let mut steps = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| Error::Parse(format!("line {}: {m}", lineno + 1));
            if let Some(d) = line.strip_prefix('.') {
                let (key, val) = d.split_once(char::is_whitespace).unwrap_or((d, ""));
                let val = val.trim();
                match key {
                    "name" => name = val.to_string(),
                    "qubits" => nq = Some(val.parse().map_err(|_| err(format!("bad qubit count {val:?}")))?),
                    "bits" => nb = val.parse().map_err(|_| err(format!("bad bit count {val:?}")))?,
                    "data" => {
                        inputs = val.split_whitespace().map(parse_index).collect::<Result<_>>().map_err(|e| err(e.to_string()))?
                    }
                    "ft" => ft = val.parse().map_err(|_| err(format!("bad flag {val:?}")))?,
                    other => return Err(err(format!("unknown directive .{other}"))),
                }
                continue;
            }
            if line == "-" {
                steps.push(Vec::new());
                continue;
            }
            let ops = line.split(';').map(|op| op.trim().parse::<Gate>()).collect::<Result<Vec<_>>>();
            steps.push(ops.map_err(|e| err(e.to_string()))?);
        }
        let nq = nq.ok_or_else(|| Error::Parse("missing .qubits".into()))?;
        Circuit::new(&name, nq, nb, inputs, ft, steps)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
