use super::{Circuit, Condition, Gate};
use crate::error::Result;

/// Builds circuits with as-soon-as-possible scheduling. Preparations are deferred to
/// the step right before the qubit's next use, so fresh ancillas do not sit idle.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    name: String,
    num_qubits: usize,
    num_bits: usize,
    inputs: Vec<usize>,
    fault_tolerant: bool,
    steps: Vec<Vec<Gate>>,
    ready: Vec<usize>,
    pending_prep: Vec<bool>,
    bit_ready: Vec<usize>,
    floor: usize,
}

impl CircuitBuilder {
    pub fn new(name: &str, num_qubits: usize) -> Self {
        CircuitBuilder {
            name: name.to_string(),
            num_qubits,
            num_bits: 0,
            inputs: Vec::new(),
            fault_tolerant: true,
            steps: Vec::new(),
            ready: vec![0; num_qubits],
            pending_prep: vec![false; num_qubits],
            bit_ready: Vec::new(),
            floor: 0,
        }
    }

    pub fn inputs(&mut self, qs: &[usize]) -> &mut Self {
        self.inputs = qs.to_vec();
        self
    }

    pub fn fault_tolerant(&mut self, ft: bool) -> &mut Self {
        self.fault_tolerant = ft;
        self
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Nothing after the barrier starts before everything placed so far has finished.
    pub fn barrier(&mut self) -> &mut Self {
        self.flush_preps();
        self.floor = self.steps.len();
        self
    }

    pub fn alloc_bit(&mut self) -> usize {
        self.num_bits += 1;
        self.bit_ready.push(usize::MAX);
        self.num_bits - 1
    }

    fn slot(&mut self, t: usize) -> &mut Vec<Gate> {
        while self.steps.len() <= t {
            self.steps.push(Vec::new());
        }
        &mut self.steps[t]
    }

    fn flush_preps(&mut self) {
        for q in 0..self.num_qubits {
            if self.pending_prep[q] {
                let t = self.ready[q].max(self.floor);
                self.pending_prep[q] = false;
                self.slot(t).push(Gate::Prep0(q));
                self.ready[q] = t + 1;
            }
        }
    }

    /// Place any gate and return its step.
    pub fn gate(&mut self, g: Gate) -> usize {
        if let Gate::Prep0(q) = g {
            if self.pending_prep[q] {
                // a second prep with nothing in between is a no-op
                return self.ready[q];
            }
            self.pending_prep[q] = true;
            return self.ready[q].max(self.floor);
        }
        let qs = g.qubits();
        let mut t = self.floor;
        for &q in &qs {
            let need = if self.pending_prep[q] { self.ready[q].max(self.floor) + 1 } else { self.ready[q] };
            t = t.max(need);
        }
        if let Gate::Cond { cond, .. } = &g {
            for b in cond.bits() {
                assert!(self.bit_ready[b] != usize::MAX, "condition reads unwritten bit c{}", b + 1);
                t = t.max(self.bit_ready[b]);
            }
        }
        for &q in &qs {
            if self.pending_prep[q] {
                self.pending_prep[q] = false;
                self.slot(t - 1).push(Gate::Prep0(q));
            }
            self.ready[q] = t + 1;
        }
        if let Gate::MeasureZ { bit, .. } = g {
            self.bit_ready[bit] = t + 1;
        }
        self.slot(t).push(g);
        t
    }

    pub fn prep(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::Prep0(q));
        self
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::H(q));
        self
    }

    pub fn p(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::P(q));
        self
    }

    pub fn pinv(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::Pinv(q));
        self
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::X(q));
        self
    }

    pub fn z(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::Z(q));
        self
    }

    pub fn cnot(&mut self, c: usize, t: usize) -> &mut Self {
        self.gate(Gate::Cnot(c, t));
        self
    }

    pub fn cz(&mut self, a: usize, b: usize) -> &mut Self {
        self.gate(Gate::Cz(a, b));
        self
    }

    pub fn toffoli(&mut self, a: usize, b: usize, c: usize) -> &mut Self {
        self.gate(Gate::Toffoli(a, b, c));
        self
    }

    pub fn discard(&mut self, q: usize) -> &mut Self {
        self.gate(Gate::Discard(q));
        self
    }

    /// Measure into a fresh bit and return it.
    pub fn measure(&mut self, q: usize) -> usize {
        let bit = self.alloc_bit();
        self.gate(Gate::MeasureZ { qubit: q, bit });
        bit
    }

    pub fn cond(&mut self, cond: Condition, g: Gate) -> &mut Self {
        self.gate(Gate::Cond { cond, gate: Box::new(g) });
        self
    }

    /// Append `c` with its qubit `i` acting on `map[i]`. Its classical bits get fresh
    /// indices starting at the returned offset.
    pub fn append(&mut self, c: &Circuit, map: &[usize]) -> usize {
        assert_eq!(map.len(), c.num_qubits());
        let offset = self.num_bits;
        for _ in 0..c.num_bits() {
            self.alloc_bit();
        }
        for step in c.steps() {
            for g in step {
                self.gate(g.map_qubits(&|q| map[q]).shift_bits(offset));
            }
        }
        offset
    }

    pub fn build(&mut self) -> Result<Circuit> {
        self.flush_preps();
        Circuit::new(&self.name, self.num_qubits, self.num_bits, self.inputs.clone(), self.fault_tolerant, self.steps.clone())
    }
}
