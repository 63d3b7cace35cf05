use crate::circuit::figures::{emit_encoder, emit_shor_state, emit_zero_check};
use crate::circuit::{definite, Circuit, CircuitBuilder, FaultSource, Machine};
use crate::codes::hamming_decoded_parity;
use crate::error::{Error, Result};
use crate::pauli::Pauli1;
use crate::sim::Backend;

/// Prepare the four-qubit Shor state on `cat`, checked on `check`, until the check
/// passes. Returns the number of rejected attempts.
pub fn prepare_verified_shor_state<B: Backend, F: FaultSource>(
    m: &mut Machine<B, F>,
    cat: &[usize; 4],
    check: usize,
    max_retries: usize,
) -> Result<usize> {
    let mut b = CircuitBuilder::new("shor_ancilla", 5);
    emit_shor_state(&mut b, &[0, 1, 2, 3], 4);
    let c = b.build()?;
    let map = [cat[0], cat[1], cat[2], cat[3], check];
    for retries in 0..=max_retries {
        let rec = definite(&m.run(&c, &map)?)?;
        if !rec[0] {
            return Ok(retries);
        }
    }
    Err(Error::PreparationFailed { retries: max_retries })
}

/// How conflicting verification checks are handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroCheckRule {
    /// Two checks: both 1 flips the block, both 0 trusts it, a conflict leaves it alone.
    Twice,
    /// Check until two consecutive results agree, at most `max` checks.
    RepeatUntilAgree { max: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroVerdict {
    Trusted,
    Flipped,
    /// The checks disagreed; the block was accepted unchanged.
    Conflict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroReport {
    pub verdict: ZeroVerdict,
    /// Logical value read by each check.
    pub checks: Vec<bool>,
}

fn check_circuit() -> Result<Circuit> {
    let mut b = CircuitBuilder::new("zero_check", 14);
    b.inputs(&(0..7).collect::<Vec<_>>());
    emit_zero_check(&mut b, &(0..7).collect::<Vec<_>>(), &(7..14).collect::<Vec<_>>());
    b.build()
}

/// Verify that `block` holds `|0̄⟩` by copying it transversally into freshly encoded
/// checker blocks on `checker` and reading those destructively with Hamming
/// correction.
pub fn verify_logical_zero<B: Backend, F: FaultSource>(
    m: &mut Machine<B, F>,
    block: &[usize],
    checker: &[usize],
    rule: ZeroCheckRule,
) -> Result<ZeroReport> {
    if block.len() != 7 || checker.len() != 7 {
        return Err(Error::Dimension { expected: 7, found: block.len().min(checker.len()) });
    }
    let c = check_circuit()?;
    let map: Vec<usize> = block.iter().chain(checker).copied().collect();
    let read = |m: &mut Machine<B, F>| -> Result<bool> {
        let rec = definite(&m.run(&c, &map)?)?;
        hamming_decoded_parity(&rec)
    };
    let mut checks = vec![read(m)?, read(m)?];
    let agreed = match rule {
        ZeroCheckRule::Twice => (checks[0] == checks[1]).then_some(checks[0]),
        ZeroCheckRule::RepeatUntilAgree { max } => loop {
            let n = checks.len();
            if checks[n - 1] == checks[n - 2] {
                break Some(checks[n - 1]);
            }
            if n >= max {
                return Err(Error::PreparationFailed { retries: max });
            }
            checks.push(read(m)?);
        },
    };
    let verdict = match agreed {
        Some(true) => {
            for &q in block {
                m.correct(q, Pauli1::X);
            }
            ZeroVerdict::Flipped
        }
        Some(false) => ZeroVerdict::Trusted,
        None => ZeroVerdict::Conflict,
    };
    Ok(ZeroReport { verdict, checks })
}

/// Encode `|0̄⟩` on `block` and verify it.
pub fn prepare_verified_logical_zero<B: Backend, F: FaultSource>(
    m: &mut Machine<B, F>,
    block: &[usize],
    checker: &[usize],
    rule: ZeroCheckRule,
) -> Result<ZeroReport> {
    let mut b = CircuitBuilder::new("zero_encoder", 7);
    emit_encoder(&mut b, &(0..7).collect::<Vec<_>>(), false);
    m.run(&b.build()?, block)?;
    verify_logical_zero(m, block, checker, rule)
}
