use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, RngCore};

use super::{check_qubits, Backend, Outcome, Unitary};
use crate::error::{Error, Result};
use crate::pauli::{Clifford, Pauli1, PauliString};

/// Stabilizer state with destabilizers. Rows `0..n` are destabilizers,
/// rows `n..2n` stabilizers; each row keeps its exact phase.
#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    rows: Vec<PauliString>,
    forced: VecDeque<bool>,
}

impl StabilizerTableau {
    /// `|0...0>`.
    pub fn new(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            rows.push(PauliString::single(n, q, Pauli1::X));
        }
        for q in 0..n {
            rows.push(PauliString::single(n, q, Pauli1::Z));
        }
        StabilizerTableau { n, rows, forced: VecDeque::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.rows[self.n..]
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.rows[..self.n]
    }

    pub fn apply_clifford(&mut self, g: Clifford) -> Result<()> {
        check_qubits(&Unitary::Clifford(g), self.n)?;
        for r in &mut self.rows {
            r.conjugate_in_place(g);
        }
        Ok(())
    }

    fn check_obs(&self, obs: &PauliString) -> Result<()> {
        if obs.len() != self.n {
            return Err(Error::Dimension { expected: self.n, found: obs.len() });
        }
        if obs.square_sign() != 1 || obs.is_trivial() {
            return Err(Error::Domain(format!("{obs} is not a non-trivial Hermitian Pauli")));
        }
        Ok(())
    }

    /// Product of the stabilizer rows that reproduce `obs` if it lies in
    /// `±` the stabilizer group; `None` if it anticommutes with some stabilizer.
    fn stabilizer_product(&self, obs: &PauliString) -> Option<PauliString> {
        let n = self.n;
        if self.rows[n..].iter().any(|s| !s.commutes_unchecked(obs)) {
            return None;
        }
        let mut acc = PauliString::identity(n);
        for i in 0..n {
            if !self.rows[i].commutes_unchecked(obs) {
                acc.mul_assign_unchecked(&self.rows[n + i]);
            }
        }
        Some(acc)
    }

    /// `Some(+1 / -1)` if `±obs` is in the stabilizer group, `None` if the outcome would be random.
    pub fn expectation(&self, obs: &PauliString) -> Result<Option<i8>> {
        self.check_obs(obs)?;
        Ok(self.stabilizer_product(obs).map(|acc| {
            debug_assert_eq!(acc.x_bits(), obs.x_bits());
            if (acc.phase() + 4 - obs.phase()) % 4 == 0 {
                1
            } else {
                -1
            }
        }))
    }

    /// Measure a Hermitian Pauli observable. Returns `(outcome, deterministic)` where
    /// `outcome == true` means eigenvalue -1.
    pub fn measure<R: RngCore + ?Sized>(&mut self, obs: &PauliString, rng: &mut R) -> Result<(bool, bool)> {
        self.measure_with(obs, None, rng)
    }

    /// Queue outcomes for the next `measure_z` calls (resets are not affected). A
    /// forced outcome that contradicts a deterministic one is an error.
    pub fn force_outcomes(&mut self, outcomes: &[bool]) {
        self.forced.extend(outcomes.iter().copied());
    }

    fn measure_with<R: RngCore + ?Sized>(&mut self, obs: &PauliString, forced: Option<bool>, rng: &mut R) -> Result<(bool, bool)> {
        self.check_obs(obs)?;
        let n = self.n;
        let p = (n..2 * n).find(|&i| !self.rows[i].commutes_unchecked(obs));
        match p {
            None => {
                let e = self.expectation(obs)?.expect("commuting observable");
                if forced.is_some_and(|f| f != (e == -1)) {
                    return Err(Error::Domain("forced outcome contradicts a deterministic measurement".into()));
                }
                Ok((e == -1, true))
            }
            Some(p) => {
                let pivot = self.rows[p].clone();
                for i in 0..2 * n {
                    if i != p && i != p - n && !self.rows[i].commutes_unchecked(obs) {
                        self.rows[i].mul_assign_unchecked(&pivot);
                    }
                }
                let outcome: bool = forced.unwrap_or_else(|| rng.gen());
                self.rows[p - n] = pivot;
                let phase = obs.phase() + if outcome { 2 } else { 0 };
                self.rows[p] = obs.clone().with_phase(phase);
                Ok((outcome, false))
            }
        }
    }

    pub fn measure_qubit<R: RngCore + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<bool> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { qubit: q, n: self.n });
        }
        let obs = PauliString::single(self.n, q, Pauli1::Z);
        Ok(self.measure(&obs, rng)?.0)
    }

    /// Same stabilizer state: every stabilizer of `self` is a stabilizer of `other`.
    pub fn same_state(&self, other: &StabilizerTableau) -> bool {
        self.n == other.n && self.stabilizers().iter().all(|s| matches!(other.expectation(s), Ok(Some(1))))
    }

    /// Check the structural invariants: stabilizers commute, destabilizer i
    /// anticommutes only with stabilizer i, and destabilizers commute among themselves.
    pub fn is_consistent(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let d = &self.rows[i];
                let s = &self.rows[n + j];
                if d.commutes_unchecked(s) != (i != j) {
                    return false;
                }
                if !self.rows[n + i].commutes_unchecked(s) || !d.commutes_unchecked(&self.rows[j]) {
                    return false;
                }
            }
            if self.rows[i].square_sign() != 1 || self.rows[n + i].square_sign() != 1 {
                return false;
            }
        }
        true
    }

    /// One generator per line in the signed text form, stabilizers only.
    pub fn dump(&self) -> String {
        self.stabilizers().iter().map(|s| format!("{s}\n")).collect()
    }

    /// One line per row, destabilizers first.
    pub fn dump_full(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.rows.iter().enumerate() {
            let tag = if i < self.n { 'D' } else { 'S' };
            out.push_str(&format!("{tag} {r}\n"));
        }
        out
    }
}

impl fmt::Debug for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StabilizerTableau(n={})\n{}", self.n, self.dump_full())
    }
}

impl Backend for StabilizerTableau {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply(&mut self, u: Unitary) -> Result<()> {
        match u {
            Unitary::Clifford(g) => self.apply_clifford(g),
            Unitary::Toffoli(..) => Err(Error::UnsupportedGate("Toffoli on stabilizer tableau".into())),
        }
    }

    fn apply_pauli(&mut self, q: usize, p: Pauli1) {
        let (x, z) = p.bits();
        // Conjugating by Y = X·Z flips rows that anticommute with it, same as X then Z.
        for r in &mut self.rows {
            if x {
                r.conjugate_in_place(Clifford::X(q));
            }
            if z {
                r.conjugate_in_place(Clifford::Z(q));
            }
        }
    }

    fn measure_z<R: RngCore + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<Outcome> {
        check_qubits(&Unitary::Clifford(Clifford::X(q)), self.n)?;
        let obs = PauliString::single(self.n, q, Pauli1::Z);
        let forced = self.forced.pop_front();
        Ok(Some(self.measure_with(&obs, forced, rng)?.0))
    }

    fn reset<R: RngCore + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<()> {
        if self.measure_qubit(q, rng)? {
            self.apply_pauli(q, Pauli1::X);
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
    fn zero_state_z_is_deterministic() {
        let mut t = StabilizerTableau::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (o, det) = t.measure(&"Z".parse().unwrap(), &mut rng).unwrap();
        assert!(!o && det);
    }

    #[test]
    fn hadamard_gives_x_stabilizer() {
        let mut t = StabilizerTableau::new(1);
        t.apply_clifford(Clifford::H(0)).unwrap();
        assert_eq!(t.stabilizers()[0], "X".parse().unwrap());
        assert!(t.is_consistent());
    }

    #[test]
    fn toffoli_rejected() {
        let mut t = StabilizerTableau::new(3);
        assert!(matches!(t.apply(Unitary::Toffoli(0, 1, 2)), Err(Error::UnsupportedGate(_))));
    }

    #[test]
    fn bell_pair_correlations() {
        let mut t = StabilizerTableau::new(2);
        t.apply_clifford(Clifford::H(0)).unwrap();
        t.apply_clifford(Clifford::Cnot(0, 1)).unwrap();
        assert_eq!(t.expectation(&"XX".parse().unwrap()).unwrap(), Some(1));
        assert_eq!(t.expectation(&"ZZ".parse().unwrap()).unwrap(), Some(1));
        // sigma_y ⊗ sigma_y = (iXZ)(iXZ) = -XZ⊗XZ; on the Bell state it has eigenvalue -1
        assert_eq!(t.expectation(&"-YY".parse().unwrap()).unwrap(), Some(-1));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = t.measure_qubit(0, &mut rng).unwrap();
        let b = t.measure_qubit(1, &mut rng).unwrap();
        assert_eq!(a, b);
        assert!(t.is_consistent());
    }

    #[test]
    fn repeated_measurement_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let mut t = StabilizerTableau::new(3);
            t.apply_clifford(Clifford::H(0)).unwrap();
            t.apply_clifford(Clifford::Cnot(0, 2)).unwrap();
            t.apply_clifford(Clifford::P(2)).unwrap();
            let obs: PauliString = "XIY".parse::<PauliString>().unwrap().hermitian();
            let (a, _) = t.measure(&obs, &mut rng).unwrap();
            let (b, det) = t.measure(&obs, &mut rng).unwrap();
            assert_eq!(a, b);
            assert!(det);
        }
    }

    #[test]
    fn non_hermitian_observable_rejected() {
        let mut t = StabilizerTableau::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(t.measure(&"Y".parse().unwrap(), &mut rng).is_err());
        assert!(t.measure(&"ZZ".parse().unwrap(), &mut rng).is_err());
    }
}
