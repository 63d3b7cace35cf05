use rand::RngCore;

use super::{check_qubits, Backend, Outcome, Unitary};
use crate::error::{Error, Result};
use crate::pauli::{Bits, Clifford, Pauli1, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameMode {
    /// Clifford circuits only; propagation is exact.
    Exact,
    /// Toffoli gates and undetermined conditions are allowed. Components that may or
    /// may not be present are tracked in separate "uncertain" bits, giving an
    /// over-approximation of the error support.
    Conservative,
}

/// Pauli error relative to a noiseless reference run whose measurement record is
/// all zeros. Measurements report the flip relative to that reference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliFrame {
    n: usize,
    mode: FrameMode,
    x: Bits,
    z: Bits,
    ux: Bits,
    uz: Bits,
}

impl PauliFrame {
    pub fn new(n: usize) -> Self {
        Self::with_mode(n, FrameMode::Exact)
    }

    pub fn with_mode(n: usize, mode: FrameMode) -> Self {
        PauliFrame { n, mode, x: Bits::zeros(n), z: Bits::zeros(n), ux: Bits::zeros(n), uz: Bits::zeros(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> FrameMode {
        self.mode
    }

    /// The definite part of the frame as a Pauli (phase dropped).
    pub fn error(&self) -> PauliString {
        PauliString::from_bits(self.x.clone(), self.z.clone(), self.n, 0)
    }

    /// Definite part restricted to `qubits`.
    pub fn error_on(&self, qubits: &[usize]) -> PauliString {
        self.error().restrict(qubits)
    }

    /// Uncertain components restricted to `qubits`, as a Pauli whose letters mark
    /// which components may be present.
    pub fn uncertain_on(&self, qubits: &[usize]) -> PauliString {
        let mut p = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            p.set(i, Pauli1::from_bits(self.ux.get(q), self.uz.get(q)));
        }
        p
    }

    pub fn has_uncertainty(&self) -> bool {
        !self.ux.is_zero() || !self.uz.is_zero()
    }

    pub fn set_error(&mut self, e: &PauliString) -> Result<()> {
        if e.len() != self.n {
            return Err(Error::Dimension { expected: self.n, found: e.len() });
        }
        self.x = e.x_bits().clone();
        self.z = e.z_bits().clone();
        Ok(())
    }

    /// Overwrite the definite frame on `qubits` with `e` (indexed like `qubits`).
    pub fn set_error_on(&mut self, qubits: &[usize], e: &PauliString) {
        for (i, &q) in qubits.iter().enumerate() {
            self.x.set(q, e.x(i));
            self.z.set(q, e.z(i));
        }
    }

    pub fn clear(&mut self) {
        *self = Self::with_mode(self.n, self.mode);
    }

    fn conj_clifford(&mut self, g: Clifford) {
        let (x, z, ux, uz) = (&mut self.x, &mut self.z, &mut self.ux, &mut self.uz);
        match g {
            Clifford::H(q) => {
                let (a, b) = (x.get(q), z.get(q));
                x.set(q, b);
                z.set(q, a);
                let (a, b) = (ux.get(q), uz.get(q));
                ux.set(q, b);
                uz.set(q, a);
            }
            Clifford::P(q) | Clifford::Pinv(q) => {
                if x.get(q) {
                    z.flip(q);
                }
                if ux.get(q) {
                    uz.set(q, true);
                }
            }
            Clifford::X(_) | Clifford::Z(_) => {}
            Clifford::Cnot(c, t) => {
                if x.get(c) {
                    x.flip(t);
                }
                if z.get(t) {
                    z.flip(c);
                }
                if ux.get(c) {
                    ux.set(t, true);
                }
                if uz.get(t) {
                    uz.set(c, true);
                }
            }
            Clifford::Cz(a, b) => {
                let (xa, xb) = (x.get(a), x.get(b));
                if xa {
                    z.flip(b);
                }
                if xb {
                    z.flip(a);
                }
                let (ua, ub) = (ux.get(a), ux.get(b));
                if ua {
                    uz.set(b, true);
                }
                if ub {
                    uz.set(a, true);
                }
            }
        }
    }

    fn toffoli(&mut self, a: usize, b: usize, c: usize) {
        let xa = self.x.get(a) || self.ux.get(a);
        let xb = self.x.get(b) || self.ux.get(b);
        let zc = self.z.get(c) || self.uz.get(c);
        // X on a control turns into X_a times a CNOT from the other control, and a Z on
        // the target into Z_c times a CZ on the controls; those factors are bounded by
        // their Pauli supports.
        if xa {
            self.uz.set(b, true);
            self.ux.set(c, true);
        }
        if xb {
            self.uz.set(a, true);
            self.ux.set(c, true);
        }
        if zc {
            self.uz.set(a, true);
            self.uz.set(b, true);
        }
    }

    /// Add the support of `u` itself as possible error components.
    fn mark_gate_support(&mut self, u: Unitary) {
        match u {
            Unitary::Clifford(Clifford::Cz(a, b)) => {
                self.uz.set(a, true);
                self.uz.set(b, true);
            }
            Unitary::Clifford(Clifford::Cnot(c, t)) => {
                self.uz.set(c, true);
                self.ux.set(t, true);
            }
            Unitary::Clifford(Clifford::X(q)) => self.ux.set(q, true),
            Unitary::Clifford(Clifford::Z(q)) => self.uz.set(q, true),
            Unitary::Clifford(Clifford::P(q)) | Unitary::Clifford(Clifford::Pinv(q)) => self.uz.set(q, true),
            Unitary::Clifford(Clifford::H(q)) => {
                self.ux.set(q, true);
                self.uz.set(q, true);
            }
            Unitary::Toffoli(a, b, c) => {
                self.uz.set(a, true);
                self.uz.set(b, true);
                self.ux.set(c, true);
            }
        }
    }

    /// Propagate through a gate that may or may not have been applied in the reference.
    fn union_propagate(&mut self, u: Unitary) -> Result<()> {
        let before = self.clone();
        self.apply(u)?;
        for q in u.qubits() {
            if before.x.get(q) != self.x.get(q) {
                self.x.set(q, false);
                self.ux.set(q, true);
            }
            if before.z.get(q) != self.z.get(q) {
                self.z.set(q, false);
                self.uz.set(q, true);
            }
            if before.ux.get(q) {
                self.ux.set(q, true);
            }
            if before.uz.get(q) {
                self.uz.set(q, true);
            }
        }
        Ok(())
    }
}

impl Backend for PauliFrame {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn apply(&mut self, u: Unitary) -> Result<()> {
        check_qubits(&u, self.n)?;
        match u {
            Unitary::Clifford(g) => {
                self.conj_clifford(g);
                Ok(())
            }
            Unitary::Toffoli(a, b, c) => match self.mode {
                FrameMode::Exact => Err(Error::UnsupportedGate("Toffoli in exact Pauli frame".into())),
                FrameMode::Conservative => {
                    self.toffoli(a, b, c);
                    Ok(())
                }
            },
        }
    }

    fn apply_pauli(&mut self, q: usize, p: Pauli1) {
        let (x, z) = p.bits();
        if x {
            self.x.flip(q);
        }
        if z {
            self.z.flip(q);
        }
    }

    fn measure_z<R: RngCore + ?Sized>(&mut self, q: usize, _rng: &mut R) -> Result<Outcome> {
        self.z.set(q, false);
        self.uz.set(q, false);
        if self.ux.get(q) {
            Ok(None)
        } else {
            Ok(Some(self.x.get(q)))
        }
    }

    fn reset<R: RngCore + ?Sized>(&mut self, q: usize, _rng: &mut R) -> Result<()> {
        self.x.set(q, false);
        self.z.set(q, false);
        self.ux.set(q, false);
        self.uz.set(q, false);
        Ok(())
    }

    fn conditional(&mut self, u: Unitary, actual: Outcome, reference: bool) -> Result<()> {
        if let Some((q, p)) = u.as_pauli() {
            // A Pauli applied in both runs leaves the frame alone; only a difference counts.
            match actual {
                Some(a) if a != reference => self.apply_pauli(q, p),
                Some(_) => {}
                None => match self.mode {
                    FrameMode::Conservative => self.mark_uncertain(q, p),
                    FrameMode::Exact => return Err(Error::Unsupported("undetermined condition in exact frame".into())),
                },
            }
            return Ok(());
        }
        match self.mode {
            FrameMode::Exact => match actual {
                Some(a) if a == reference => {
                    if a {
                        self.apply(u)?;
                    }
                    Ok(())
                }
                _ => Err(Error::Unsupported(format!(
                    "conditional {u:?} differs from the reference run; not a Pauli frame update"
                ))),
            },
            FrameMode::Conservative => {
                // The reference branch is not tracked, so cover both possibilities.
                self.union_propagate(u)?;
                if actual != Some(reference) {
                    self.mark_gate_support(u);
                }
                Ok(())
            }
        }
    }

    fn reports_flips(&self) -> bool {
        true
    }

    fn mark_uncertain(&mut self, q: usize, p: Pauli1) {
        let (x, z) = p.bits();
        if x {
            self.ux.set(q, true);
        }
        if z {
            self.uz.set(q, true);
        }
    }
}
