//! Fault-tolerant procedures run as controllers over a [`Machine`]: verified
//! ancillas, syndrome repetition and recovery, transversal gates, the Toffoli
//! construction and leakage handling. Classical decisions are taken between
//! sub-circuit runs from the measurement record.

mod ancilla;
mod recovery;
pub mod sweep;
pub mod toffoli;
mod transversal;

pub use ancilla::{
    prepare_verified_logical_zero, prepare_verified_shor_state, verify_logical_zero, ZeroCheckRule, ZeroReport,
    ZeroVerdict,
};
pub use recovery::{Half, HalfOutcome, Method, Recovery, RecoveryOutcome, RecoveryPolicy, RepeatPolicy, BLOCK};
pub use transversal::{handle_leakage, transversal_circuit, transversal_gate};
pub(crate) use transversal::encoder_with_reference;

use crate::circuit::figures::emit_encoder;
use crate::circuit::{CircuitBuilder, FaultSource, Machine};
use crate::codes::steane_code;
use crate::error::Result;
use crate::pauli::{Pauli1, PauliString};
use crate::sim::{Backend, StabilizerTableau};

/// Logical basis state used by experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Zero,
    Plus,
}

/// Noiselessly encode `|0̄⟩` or `|+̄⟩` on `block`.
pub fn encode_ideal<B: Backend, F: FaultSource>(m: &mut Machine<B, F>, block: &[usize], basis: Basis) -> Result<()> {
    let mut b = CircuitBuilder::new("encode", 7);
    let q: Vec<usize> = (0..7).collect();
    emit_encoder(&mut b, &q, false);
    if basis == Basis::Plus {
        for &j in &q {
            b.h(j);
        }
    }
    m.run_ideal(&b.build()?, block)?;
    Ok(())
}

/// The logical observable fixed by `basis` on `block` of an `n`-qubit register.
pub fn logical_observable(n: usize, block: &[usize], basis: Basis) -> PauliString {
    let p = match basis {
        Basis::Zero => Pauli1::Z,
        Basis::Plus => Pauli1::X,
    };
    PauliString::from_support(n, block, p)
}

/// Whether the tableau holds the encoded basis state on `block`, i.e. the logical
/// observable has expectation +1.
pub fn holds_logical(t: &StabilizerTableau, block: &[usize], basis: Basis) -> Result<bool> {
    Ok(t.expectation(&logical_observable(t.n(), block, basis))? == Some(1))
}

/// Whether every code stabilizer on `block` has expectation +1.
pub fn in_code_space(t: &StabilizerTableau, block: &[usize]) -> Result<bool> {
    for g in &steane_code().generators {
        let mut p = PauliString::identity(t.n());
        for (i, &q) in block.iter().enumerate() {
            p.set(q, g.get(i));
        }
        if t.expectation(&p)? != Some(1) {
            return Ok(false);
        }
    }
    Ok(true)
}
