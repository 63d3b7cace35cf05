use crate::circuit::figures::{emit_leak_detector, ENCODER_INPUT};
use crate::circuit::{definite, Circuit, CircuitBuilder, FaultSource, GateKind, Machine};
use crate::error::{Error, Result};
use crate::sim::Backend;

/// The bitwise circuit implementing encoded `kind` on `blocks.len()` seven-qubit
/// blocks laid out consecutively. Encoded P is bitwise P⁻¹.
pub fn transversal_circuit(kind: GateKind, blocks: usize) -> Result<Circuit> {
    let arity = match kind {
        GateKind::X | GateKind::Z | GateKind::H | GateKind::P => 1,
        GateKind::Cnot => 2,
        other => return Err(Error::UnsupportedGate(format!("{} is not transversal on the seven-qubit code", other.name()))),
    };
    if blocks != arity {
        return Err(Error::Dimension { expected: arity, found: blocks });
    }
    let mut b = CircuitBuilder::new(&format!("transversal_{}", kind.name()), 7 * blocks);
    b.inputs(&(0..7 * blocks).collect::<Vec<_>>());
    for j in 0..7 {
        match kind {
            GateKind::X => b.x(j),
            GateKind::Z => b.z(j),
            GateKind::H => b.h(j),
            GateKind::P => b.pinv(j),
            _ => b.cnot(j, 7 + j),
        };
    }
    b.build()
}

/// Apply encoded `kind` to `blocks` (one block, or control then target for CNOT).
pub fn transversal_gate<B: Backend, F: FaultSource>(m: &mut Machine<B, F>, kind: GateKind, blocks: &[&[usize]]) -> Result<()> {
    let c = transversal_circuit(kind, blocks.len())?;
    let map: Vec<usize> = blocks.iter().flat_map(|b| b.iter().copied()).collect();
    m.run(&c, &map)?;
    Ok(())
}

/// Check every qubit of `data` for leakage with the detection circuit on `anc`,
/// replacing leaked qubits by fresh `|0⟩`. Returns the replaced positions (indices
/// into `data`). Requires a backend that simulates states, since skipped gates
/// cannot be expressed as a Pauli frame.
pub fn handle_leakage<B: Backend, F: FaultSource>(m: &mut Machine<B, F>, data: &[usize], anc: usize) -> Result<Vec<usize>> {
    if m.backend.reports_flips() {
        return Err(Error::Unsupported("leakage handling needs a state backend".into()));
    }
    let mut b = CircuitBuilder::new("leak_detector", 2);
    b.inputs(&[0]);
    emit_leak_detector(&mut b, 0, 1);
    let detect = b.build()?;
    let mut b = CircuitBuilder::new("replace", 1);
    b.inputs(&[0]);
    b.discard(0).prep(0);
    let replace = b.build()?;
    let mut replaced = Vec::new();
    for (i, &q) in data.iter().enumerate() {
        let present = definite(&m.run(&detect, &[q, anc])?)?[0];
        if !present {
            m.run(&replace, &[q])?;
            replaced.push(i);
        }
    }
    Ok(replaced)
}

/// Noiseless encoding helpers for experiments.
pub(crate) fn encoder_with_reference() -> Result<Circuit> {
    // block on 0..7, reference qubit 7, maximally entangled with the logical qubit
    let mut b = CircuitBuilder::new("encode_bell", 8);
    b.prep(ENCODER_INPUT).prep(7).h(ENCODER_INPUT).cnot(ENCODER_INPUT, 7);
    crate::circuit::figures::emit_encoder(&mut b, &(0..7).collect::<Vec<_>>(), true);
    b.build()
}
