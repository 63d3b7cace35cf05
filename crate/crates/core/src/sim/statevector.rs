use std::collections::VecDeque;

use num_complex::Complex64 as C64;
use rand::{Rng, RngCore};

use super::{check_qubits, Backend, Outcome, Unitary};
use crate::error::{Error, Result};
use crate::pauli::{Clifford, Pauli1, PauliString};

pub const DEFAULT_QUBIT_CAP: usize = 22;

/// Dense state. Qubit `q` is bit `n-1-q` of the basis index, so a basis label
/// reads left to right in qubit order.
#[derive(Clone, Debug)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
    forced: VecDeque<bool>,
    branch_prob: f64,
}

impl StateVector {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_cap(n, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(n: usize, cap: usize) -> Result<Self> {
        if n > cap {
            return Err(Error::QubitCap { requested: n, cap });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Ok(StateVector { n, amps, forced: VecDeque::new(), branch_prob: 1.0 })
    }

    /// Computational basis state from a bit string in qubit order.
    pub fn basis(bits: &[bool]) -> Result<Self> {
        let mut s = Self::new(bits.len())?;
        s.amps[0] = C64::new(0.0, 0.0);
        s.amps[Self::index_of(bits)] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn index_of(bits: &[bool]) -> usize {
        bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(Error::Dimension { expected: 1 << n, found: amps.len() });
        }
        let mut s = Self::new(n)?;
        s.amps = amps;
        s.normalize();
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, bits: &[bool]) -> C64 {
        self.amps[Self::index_of(bits)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    #[inline]
    fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn apply_1q(&mut self, q: usize, m: [[C64; 2]; 2]) {
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | b] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_pauli_string(&mut self, p: &PauliString) {
        let (mut xm, mut zm) = (0usize, 0usize);
        for q in 0..self.n {
            if p.x(q) {
                xm |= self.bit(q);
            }
            if p.z(q) {
                zm |= self.bit(q);
            }
        }
        let ph = match p.phase() {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let s = if (i & zm).count_ones() % 2 == 1 { -ph } else { ph };
            out[i ^ xm] = s * a;
        }
        self.amps = out;
    }

    /// `<psi|P|psi>`.
    pub fn expectation(&self, p: &PauliString) -> C64 {
        let mut t = self.clone();
        t.apply_pauli_string(p);
        self.inner(&t)
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        let b = self.bit(q);
        self.amps.iter().enumerate().filter(|(i, _)| i & b != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Project qubit `q` onto `outcome`; returns the probability of that outcome
    /// before projection. A zero-probability projection leaves the zero vector.
    pub fn project(&mut self, q: usize, outcome: bool) -> f64 {
        let b = self.bit(q);
        let p1 = self.prob_one(q);
        let p = if outcome { p1 } else { 1.0 - p1 };
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & b != 0) != outcome {
                *a = C64::new(0.0, 0.0);
            }
        }
        if p > 1e-300 {
            let s = p.sqrt();
            for a in &mut self.amps {
                *a /= s;
            }
        }
        p.max(0.0)
    }

    /// Queue outcomes to be used by the next measurements instead of sampling.
    /// The running product of their probabilities is available from [`Self::branch_probability`].
    pub fn force_outcomes(&mut self, outcomes: &[bool]) {
        self.forced.extend(outcomes.iter().copied());
        self.branch_prob = 1.0;
    }

    pub fn branch_probability(&self) -> f64 {
        self.branch_prob
    }

    pub fn measure<R: RngCore + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<bool> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        let outcome = match self.forced.pop_front() {
            Some(o) => o,
            None => rng.gen::<f64>() < self.prob_one(q),
        };
        let p = self.project(q, outcome);
        self.branch_prob *= p;
        Ok(outcome)
    }

    fn apply_clifford(&mut self, g: Clifford) {
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let i = C64::new(0.0, 1.0);
        match g {
            Clifford::H(q) => self.apply_1q(q, [[s, s], [s, -s]]),
            Clifford::P(q) => self.apply_1q(q, [[l, o], [o, i]]),
            Clifford::Pinv(q) => self.apply_1q(q, [[l, o], [o, -i]]),
            Clifford::X(q) => self.apply_1q(q, [[o, l], [l, o]]),
            Clifford::Z(q) => self.apply_1q(q, [[l, o], [o, -l]]),
            Clifford::Cnot(c, t) => {
                let (bc, bt) = (self.bit(c), self.bit(t));
                for k in 0..self.amps.len() {
                    if k & bc != 0 && k & bt == 0 {
                        self.amps.swap(k, k | bt);
                    }
                }
            }
            Clifford::Cz(a, b) => {
                let m = self.bit(a) | self.bit(b);
                for (k, amp) in self.amps.iter_mut().enumerate() {
                    if k & m == m {
                        *amp = -*amp;
                    }
                }
            }
        }
    }

    pub fn apply_toffoli(&mut self, a: usize, b: usize, c: usize) {
        let m = self.bit(a) | self.bit(b);
        let bt = self.bit(c);
        for k in 0..self.amps.len() {
            if k & m == m && k & bt == 0 {
                self.amps.swap(k, k | bt);
            }
        }
    }

    /// Reduced amplitudes of `qubits` (in the given order) when every other qubit is
    /// in a definite basis state. Returns `None` if the remaining qubits are entangled
    /// with or in superposition over the listed ones.
    pub fn factor_out(&self, qubits: &[usize]) -> Option<Vec<C64>> {
        let mask: usize = qubits.iter().map(|&q| self.bit(q)).sum();
        let mut rest: Option<usize> = None;
        for (k, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > 1e-20 {
                match rest {
                    None => rest = Some(k & !mask),
                    Some(r) if r != k & !mask => return None,
                    _ => {}
                }
            }
        }
        let rest = rest?;
        let mut out = vec![C64::new(0.0, 0.0); 1 << qubits.len()];
        for (j, o) in out.iter_mut().enumerate() {
            let mut k = rest;
            for (pos, &q) in qubits.iter().enumerate() {
                if (j >> (qubits.len() - 1 - pos)) & 1 == 1 {
                    k |= self.bit(q);
                }
            }
            *o = self.amps[k];
        }
        Some(out)
    }

    /// Build the stabilizer state fixed by `gens` (n independent commuting Hermitian
    /// Paulis) by projecting a generic vector with `prod (I + S)/2`.
    pub fn from_stabilizers<R: RngCore + ?Sized>(gens: &[PauliString], rng: &mut R) -> Result<Self> {
        let n = gens.first().map(|g| g.len()).unwrap_or(0);
        let mut s = Self::new(n)?;
        for _ in 0..8 {
            for a in &mut s.amps {
                *a = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
            for g in gens {
                let mut t = s.clone();
                t.apply_pauli_string(g);
                for (a, b) in s.amps.iter_mut().zip(&t.amps) {
                    *a = (*a + b) * 0.5;
                }
            }
            if s.norm_sqr() > 1e-12 {
                s.normalize();
                return Ok(s);
            }
        }
        Err(Error::Domain("stabilizer projection vanished".into()))
    }
}

impl Backend for StateVector {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply(&mut self, u: Unitary) -> Result<()> {
        check_qubits(&u, self.n)?;
        match u {
            Unitary::Clifford(g) => self.apply_clifford(g),
            Unitary::Toffoli(a, b, c) => self.apply_toffoli(a, b, c),
        }
        Ok(())
    }

    fn apply_pauli(&mut self, q: usize, p: Pauli1) {
        let (x, z) = p.bits();
        if z {
            self.apply_clifford(Clifford::Z(q));
        }
        if x {
            self.apply_clifford(Clifford::X(q));
        }
    }

    fn measure_z<R: RngCore + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<Outcome> {
        self.measure(q, rng).map(Some)
    }

    fn reset<R: RngCore + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<()> {
        // Reset is not a measurement event: it never consumes forced outcomes.
        let outcome = rng.gen::<f64>() < self.prob_one(q);
        self.project(q, outcome);
        if outcome {
            self.apply_clifford(Clifford::X(q));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cap_enforced() {
        assert!(matches!(StateVector::new(23), Err(Error::QubitCap { .. })));
        assert!(StateVector::with_cap(23, 23).is_ok());
    }

    #[test]
    fn toffoli_on_110() {
        let mut s = StateVector::basis(&[true, true, false]).unwrap();
        s.apply(Unitary::Toffoli(0, 1, 2)).unwrap();
        assert!((s.amplitude(&[true, true, true]).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_involution() {
        let mut s = StateVector::basis(&[true, false]).unwrap();
        let before = s.clone();
        s.apply(Unitary::Clifford(Clifford::H(0))).unwrap();
        s.apply(Unitary::Clifford(Clifford::H(0))).unwrap();
        assert!((s.fidelity(&before) - 1.0).abs() < 1e-12);
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn forced_branch_probability() {
        let mut s = StateVector::new(1).unwrap();
        s.apply(Unitary::Clifford(Clifford::H(0))).unwrap();
        s.force_outcomes(&[true]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(s.measure(0, &mut rng).unwrap());
        assert!((s.branch_probability() - 0.5).abs() < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reset_returns_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = StateVector::new(2).unwrap();
        s.apply(Unitary::Clifford(Clifford::H(0))).unwrap();
        s.apply(Unitary::Clifford(Clifford::Cnot(0, 1))).unwrap();
        s.reset(1, &mut rng).unwrap();
        assert!(s.prob_one(1) < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }
}
