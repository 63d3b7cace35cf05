//! Execution engines: a stabilizer tableau, a dense statevector and Pauli frames.
//! All three implement [`Backend`] so circuits and protocols run unchanged on each.

mod branching;
mod frame;
mod statevector;
mod tableau;

pub use branching::{for_each_branch, next_script, BranchingFrame};
pub use frame::{FrameMode, PauliFrame};
pub use statevector::{StateVector, DEFAULT_QUBIT_CAP};
pub use tableau::StabilizerTableau;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::pauli::{Clifford, Pauli1};

/// A unitary gate as seen by a backend. Qubits are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Unitary {
    Clifford(Clifford),
    /// Controls first, target last.
    Toffoli(usize, usize, usize),
}

impl Unitary {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Unitary::Clifford(Clifford::H(q))
            | Unitary::Clifford(Clifford::P(q))
            | Unitary::Clifford(Clifford::Pinv(q))
            | Unitary::Clifford(Clifford::X(q))
            | Unitary::Clifford(Clifford::Z(q)) => vec![q],
            Unitary::Clifford(Clifford::Cnot(a, b)) | Unitary::Clifford(Clifford::Cz(a, b)) => vec![a, b],
            Unitary::Toffoli(a, b, c) => vec![a, b, c],
        }
    }

    /// The single-qubit Pauli this gate equals, if any.
    pub fn as_pauli(&self) -> Option<(usize, Pauli1)> {
        match *self {
            Unitary::Clifford(Clifford::X(q)) => Some((q, Pauli1::X)),
            Unitary::Clifford(Clifford::Z(q)) => Some((q, Pauli1::Z)),
            _ => None,
        }
    }

    pub fn max_qubit(&self) -> usize {
        self.qubits().into_iter().max().unwrap_or(0)
    }
}

/// Measurement result. `None` only arises in the conservative frame, where an
/// outcome flip relative to the reference run cannot be bounded to one value.
pub type Outcome = Option<bool>;

pub trait Backend {
    fn num_qubits(&self) -> usize;

    fn apply(&mut self, u: Unitary) -> Result<()>;

    fn apply_pauli(&mut self, q: usize, p: Pauli1);

    fn measure_z<R: RngCore + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<Outcome>;

    fn reset<R: RngCore + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<()>;

    /// Apply `u` under classical control. `actual` is the condition evaluated on this
    /// run's record; `reference` is its value on an all-zero record. State backends
    /// only look at `actual`; the frame uses both.
    fn conditional(&mut self, u: Unitary, actual: Outcome, reference: bool) -> Result<()> {
        let _ = reference;
        match actual {
            Some(true) => self.apply(u),
            Some(false) => Ok(()),
            None => Err(Error::Unsupported("undetermined classical condition".into())),
        }
    }

    /// Mark a possible (not certain) Pauli component. Only meaningful for the
    /// conservative frame; state backends ignore it.
    fn mark_uncertain(&mut self, _q: usize, _p: Pauli1) {}

    /// Whether measurement results are flips relative to the all-zero reference
    /// rather than actual outcomes.
    fn reports_flips(&self) -> bool {
        false
    }
}

pub(crate) fn check_qubits(u: &Unitary, n: usize) -> Result<()> {
    let qs = u.qubits();
    for (i, &q) in qs.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
        if qs[..i].contains(&q) {
            return Err(Error::Circuit(format!("repeated operand {q} in {u:?}")));
        }
    }
    Ok(())
}
