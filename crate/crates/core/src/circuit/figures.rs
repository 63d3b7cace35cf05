//! Builders for the circuits drawn in the figures, plus the emitters they are made of.
//!
//! Emitters append to a [`CircuitBuilder`] on caller-chosen qubits and return the
//! classical bits they wrote, so protocols can compose them on larger registers.

use super::{Circuit, CircuitBuilder, Condition, Gate};
use crate::codes::{StabilizerCode, EQ16_TO_EQ1, HAMMING_H};
use crate::error::{Error, Result};
use crate::pauli::Pauli1;

/// Encoder input position (canonical qubit 3).
pub const ENCODER_INPUT: usize = EQ16_TO_EQ1[6] - 1;

/// Canonical positions (0-based) of a weight-3 logical Z, read nondestructively.
pub const PARITY_TRIPLE: [usize; 3] = [2, 4, 5];

fn sys(k: usize) -> usize {
    EQ16_TO_EQ1[k - 1] - 1
}

/// Encoder drawn against the systematic check matrix, relabeled to canonical order.
/// With `input` the state of `block[ENCODER_INPUT]` is encoded; otherwise `|0̄⟩`.
pub fn emit_encoder(b: &mut CircuitBuilder, block: &[usize], input: bool) {
    let q = |k: usize| block[sys(k)];
    for k in 1..=7 {
        if !(input && k == 7) {
            b.prep(q(k));
        }
    }
    if input {
        b.cnot(q(7), q(6)).cnot(q(7), q(5));
    }
    for k in 1..=3 {
        b.h(q(k));
    }
    for (c, ts) in [(1, [7, 6, 4]), (2, [7, 5, 4]), (3, [6, 5, 4])] {
        for t in ts {
            b.cnot(q(c), q(t));
        }
    }
}

pub fn build_encoder() -> Circuit {
    let mut b = CircuitBuilder::new("encoder", 7);
    b.inputs(&[ENCODER_INPUT]);
    let block: Vec<usize> = (0..7).collect();
    emit_encoder(&mut b, &block, true);
    b.build().expect("encoder is well formed")
}

pub fn build_zero_encoder() -> Circuit {
    let mut b = CircuitBuilder::new("zero_encoder", 7);
    let block: Vec<usize> = (0..7).collect();
    emit_encoder(&mut b, &block, false);
    b.build().expect("encoder is well formed")
}

/// Support (0-based) of Hamming check row `r`.
pub fn hamming_row(r: usize) -> Vec<usize> {
    (0..7).filter(|&j| HAMMING_H[r][j] == 1).collect()
}

/// Condition "the three bits `bits` read as a binary number equal `j`".
pub fn syndrome3_is(bits: &[usize], j: usize) -> Condition {
    Condition::All(
        bits.iter()
            .enumerate()
            .map(|(i, &bit)| {
                if (j >> (2 - i)) & 1 == 1 {
                    Condition::Bit(bit)
                } else {
                    Condition::Not(Box::new(Condition::Bit(bit)))
                }
            })
            .collect(),
    )
}

/// Fig. 2 style syndrome: one ancilla per check row, each touched by four XORs.
/// With `phase` the data is rotated so the same layout reads the X-type checks.
pub fn emit_naive_pass(b: &mut CircuitBuilder, data: &[usize], anc: &[usize], phase: bool) -> Vec<usize> {
    if phase {
        data.iter().for_each(|&q| {
            b.h(q);
        });
    }
    for &a in anc {
        b.prep(a);
    }
    for (r, &a) in anc.iter().enumerate() {
        for j in hamming_row(r) {
            b.cnot(data[j], a);
        }
    }
    let bits = anc.iter().map(|&a| b.measure(a)).collect();
    if phase {
        data.iter().for_each(|&q| {
            b.h(q);
        });
    }
    bits
}

pub fn build_naive_syndrome() -> Circuit {
    let mut b = CircuitBuilder::new("naive_syndrome", 10);
    b.inputs(&(0..7).collect::<Vec<_>>()).fault_tolerant(false);
    emit_naive_pass(&mut b, &(0..7).collect::<Vec<_>>(), &[7, 8, 9], false);
    b.build().expect("well formed")
}

pub fn build_naive_phase_syndrome() -> Circuit {
    let mut b = CircuitBuilder::new("naive_phase_syndrome", 10);
    b.inputs(&(0..7).collect::<Vec<_>>()).fault_tolerant(false);
    emit_naive_pass(&mut b, &(0..7).collect::<Vec<_>>(), &[7, 8, 9], true);
    b.build().expect("well formed")
}

/// Both naive passes with single-shot corrections.
pub fn build_naive_recovery_round() -> Circuit {
    let mut b = CircuitBuilder::new("naive_recovery", 10);
    let data: Vec<usize> = (0..7).collect();
    b.inputs(&data).fault_tolerant(false);
    let s = emit_naive_pass(&mut b, &data, &[7, 8, 9], false);
    for j in 1..=7 {
        b.cond(syndrome3_is(&s, j), Gate::X(data[j - 1]));
    }
    let s = emit_naive_pass(&mut b, &data, &[7, 8, 9], true);
    for j in 1..=7 {
        b.cond(syndrome3_is(&s, j), Gate::Z(data[j - 1]));
    }
    b.build().expect("well formed")
}

/// Cat state on `qs` checked by comparing the first and last qubit on `check`.
/// Returns the check bit (1 means reject).
pub fn emit_cat(b: &mut CircuitBuilder, qs: &[usize], check: usize) -> usize {
    for &q in qs {
        b.prep(q);
    }
    b.prep(check);
    b.h(qs[0]);
    for w in qs.windows(2) {
        b.cnot(w[0], w[1]);
    }
    b.cnot(qs[0], check).cnot(qs[qs.len() - 1], check);
    b.measure(check)
}

/// Verified cat followed by Hadamards: the even-weight Shor state.
pub fn emit_shor_state(b: &mut CircuitBuilder, qs: &[usize], check: usize) -> usize {
    let bit = emit_cat(b, qs, check);
    for &q in qs {
        b.h(q);
    }
    bit
}

/// Fig. "Construction and verification of the Shor state": qubits 1-4 carry the
/// state, qubit 5 is the check.
pub fn build_shor_ancilla() -> Circuit {
    let mut b = CircuitBuilder::new("shor_ancilla", 5);
    emit_shor_state(&mut b, &[0, 1, 2, 3], 4);
    b.build().expect("well formed")
}

pub fn build_cat(m: usize) -> Circuit {
    assert!(m >= 2);
    let mut b = CircuitBuilder::new(&format!("cat{m}"), m + 1);
    emit_cat(&mut b, &(0..m).collect::<Vec<_>>(), m);
    b.build().expect("well formed")
}

/// Bits written by one Shor-style generator measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShorBits {
    pub check: usize,
    pub measured: Vec<usize>,
    /// The syndrome bit is the parity of `measured`, inverted when set.
    pub invert: bool,
}

impl ShorBits {
    pub fn syndrome(&self) -> Condition {
        let p = Condition::parity(self.measured.clone());
        if self.invert {
            Condition::Not(Box::new(p))
        } else {
            p
        }
    }
}

/// Measure one generator with a verified cat on `cat` (one qubit per support site).
/// Z-type sites use data-controlled XORs into the Shor state; X-type sites use the
/// cat as control and read it in the X basis. Other sites are rotated first.
pub fn emit_shor_generator(
    b: &mut CircuitBuilder,
    data: &[usize],
    gen: &crate::pauli::PauliString,
    cat: &[usize],
    check: usize,
) -> Result<ShorBits> {
    let support = gen.support();
    if cat.len() < support.len() {
        return Err(Error::Dimension { expected: support.len(), found: cat.len() });
    }
    let cat = &cat[..support.len()];
    let letters: Vec<Pauli1> = support.iter().map(|&j| gen.get(j)).collect();
    // sign of the Hermitian operator: Y sites contribute a factor i each
    let ny = letters.iter().filter(|&&p| p == Pauli1::Y).count();
    let herm_phase = (gen.phase() as usize + 3 * ny) % 4;
    if herm_phase % 2 == 1 {
        return Err(Error::InvalidCode(format!("generator {gen} is not Hermitian")));
    }
    let z_type = letters.iter().all(|&p| p == Pauli1::Z);
    let x_type = letters.iter().all(|&p| p == Pauli1::X);
    if x_type {
        let check_bit = emit_cat(b, cat, check);
        for (k, &j) in support.iter().enumerate() {
            b.cnot(cat[k], data[j]);
        }
        for &c in cat {
            b.h(c);
        }
        let measured = cat.iter().map(|&c| b.measure(c)).collect();
        return Ok(ShorBits { check: check_bit, measured, invert: herm_phase == 2 });
    }
    // rotate every site to Z: X by H, Y by P⁻¹ then H
    if !z_type {
        for (k, &j) in support.iter().enumerate() {
            match letters[k] {
                Pauli1::X => {
                    b.h(data[j]);
                }
                Pauli1::Y => {
                    b.pinv(data[j]).h(data[j]);
                }
                _ => {}
            }
        }
    }
    let check_bit = emit_shor_state(b, cat, check);
    for (k, &j) in support.iter().enumerate() {
        b.cnot(data[j], cat[k]);
    }
    let measured = cat.iter().map(|&c| b.measure(c)).collect();
    if !z_type {
        for (k, &j) in support.iter().enumerate() {
            match letters[k] {
                Pauli1::X => {
                    b.h(data[j]);
                }
                Pauli1::Y => {
                    b.h(data[j]).p(data[j]);
                }
                _ => {}
            }
        }
    }
    Ok(ShorBits { check: check_bit, measured, invert: herm_phase == 2 })
}

/// One generator of `code` measured Shor-style. Data occupies qubits `0..n`, the cat
/// the next `weight` qubits and the check the last one. Bit 1 is the cat check.
pub fn build_shor_syndrome(code: &StabilizerCode, generator: usize) -> Result<Circuit> {
    let g = code
        .generators
        .get(generator)
        .ok_or_else(|| Error::InvalidCode(format!("no generator {}", generator + 1)))?;
    let n = code.n;
    let w = g.weight();
    let mut b = CircuitBuilder::new(&format!("shor_syndrome_{}", generator + 1), n + w + 1);
    let data: Vec<usize> = (0..n).collect();
    b.inputs(&data);
    let cat: Vec<usize> = (n..n + w).collect();
    emit_shor_generator(&mut b, &data, g, &cat, n + w)?;
    b.build()
}

/// Bits written by a verified `|0̄⟩` preparation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyBits {
    /// One seven-bit checker readout per check.
    pub checks: Vec<Vec<usize>>,
}

impl VerifyBits {
    pub fn check(&self, i: usize) -> Condition {
        Condition::hamming_parity(self.checks[i].clone())
    }

    /// Every check read logical 1.
    pub fn all_flipped(&self) -> Condition {
        Condition::All((0..self.checks.len()).map(|i| self.check(i)).collect())
    }
}

/// One verification check: encode `|0̄⟩` on the checker, copy the block's bit values
/// into it transversally and read it destructively.
pub fn emit_zero_check(b: &mut CircuitBuilder, block: &[usize], checker: &[usize]) -> Vec<usize> {
    emit_encoder(b, checker, false);
    for j in 0..7 {
        b.cnot(block[j], checker[j]);
    }
    checker.iter().map(|&q| b.measure(q)).collect()
}

/// Encode `|0̄⟩` on `block` and verify it `checks` times against freshly encoded
/// checker blocks. `checker` holds one or more seven-qubit blocks; check `i` uses
/// block `i mod k`, so with one block per check all checkers are encoded in
/// parallel. When `flip` is set, a block whose checks all read 1 is flipped by
/// transversal NOT; conflicting checks leave it alone.
pub fn emit_verified_zero(
    b: &mut CircuitBuilder,
    block: &[usize],
    checker: &[usize],
    checks: usize,
    flip: bool,
) -> VerifyBits {
    emit_encoder(b, block, false);
    let blocks: Vec<&[usize]> = checker.chunks(7).collect();
    let bits = VerifyBits { checks: (0..checks).map(|i| emit_zero_check(b, block, blocks[i % blocks.len()])).collect() };
    if flip && checks > 0 {
        for &q in block {
            b.cond(bits.all_flipped(), Gate::X(q));
        }
    }
    bits
}

pub fn build_verified_zero() -> Circuit {
    let mut b = CircuitBuilder::new("verified_zero", 14);
    emit_verified_zero(&mut b, &(0..7).collect::<Vec<_>>(), &(7..14).collect::<Vec<_>>(), 2, true);
    b.build().expect("well formed")
}

/// Bits of one Steane syndrome pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassBits {
    pub verify: VerifyBits,
    pub syndrome: Vec<usize>,
}

impl PassBits {
    pub fn syndrome_is(&self, j: usize) -> Condition {
        Condition::syndrome_is(self.syndrome.clone(), j)
    }
}

/// Bit-flip syndrome: ancilla `H^⊗7|0̄⟩`, XORs data→ancilla, destructive readout.
pub fn emit_steane_bit_pass(b: &mut CircuitBuilder, data: &[usize], anc: &[usize], checker: &[usize], checks: usize) -> PassBits {
    let verify = emit_verified_zero(b, anc, checker, checks, true);
    for &q in anc {
        b.h(q);
    }
    for j in 0..7 {
        b.cnot(data[j], anc[j]);
    }
    PassBits { verify, syndrome: anc.iter().map(|&q| b.measure(q)).collect() }
}

/// Phase syndrome: ancilla `|0̄⟩`, XORs ancilla→data, Hadamards, destructive readout.
pub fn emit_steane_phase_pass(b: &mut CircuitBuilder, data: &[usize], anc: &[usize], checker: &[usize], checks: usize) -> PassBits {
    let verify = emit_verified_zero(b, anc, checker, checks, true);
    for j in 0..7 {
        b.cnot(anc[j], data[j]);
    }
    for &q in anc {
        b.h(q);
    }
    PassBits { verify, syndrome: anc.iter().map(|&q| b.measure(q)).collect() }
}

fn steane_layout() -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    ((0..7).collect(), (7..14).collect(), (14..21).collect())
}

/// One bit-flip and one phase pass. Data on qubits 1-7, ancilla 8-14, checker 15-21.
pub fn build_steane_syndrome() -> Circuit {
    let (d, a, c) = steane_layout();
    let mut b = CircuitBuilder::new("steane_syndrome", 21);
    b.inputs(&d);
    emit_steane_bit_pass(&mut b, &d, &a, &c, 2);
    emit_steane_phase_pass(&mut b, &d, &a, &c, 2);
    b.build().expect("well formed")
}

/// Static recovery round: each syndrome half measured twice, and a correction applied
/// only where both passes name the same position.
pub fn emit_steane_recovery_round(b: &mut CircuitBuilder, data: &[usize], anc: &[usize], checker: &[usize]) -> [PassBits; 4] {
    let b1 = emit_steane_bit_pass(b, data, anc, checker, 2);
    let b2 = emit_steane_bit_pass(b, data, anc, checker, 2);
    for j in 1..=7 {
        b.cond(Condition::All(vec![b1.syndrome_is(j), b2.syndrome_is(j)]), Gate::X(data[j - 1]));
    }
    let p1 = emit_steane_phase_pass(b, data, anc, checker, 2);
    let p2 = emit_steane_phase_pass(b, data, anc, checker, 2);
    for j in 1..=7 {
        b.cond(Condition::All(vec![p1.syndrome_is(j), p2.syndrome_is(j)]), Gate::Z(data[j - 1]));
    }
    [b1, b2, p1, p2]
}

pub fn build_steane_recovery_round() -> Circuit {
    let (d, a, c) = steane_layout();
    let mut b = CircuitBuilder::new("steane_recovery", 21);
    b.inputs(&d);
    emit_steane_recovery_round(&mut b, &d, &a, &c);
    b.build().expect("well formed")
}

/// Qubit roles of the bare Toffoli protocol.
pub mod toffoli_bare {
    pub const A1: usize = 0;
    pub const A2: usize = 1;
    pub const A3: usize = 2;
    /// Cat qubits in the order they are used.
    pub const CATS: [usize; 3] = [5, 4, 3];
    pub const X: usize = 6;
    pub const Y: usize = 7;
    pub const Z: usize = 8;
    pub const INPUTS: [usize; 3] = [X, Y, Z];
    pub const OUTPUTS: [usize; 3] = [A1, A2, A3];
    pub const QUBITS: usize = 9;
}

/// Block layout of the encoded Toffoli protocol.
#[derive(Clone, Debug)]
pub struct ToffoliLayout {
    pub a: [Vec<usize>; 3],
    pub data: [Vec<usize>; 3],
    pub cat: Vec<usize>,
    pub cat_check: usize,
    pub checker: Vec<usize>,
    pub anc: Vec<usize>,
    pub num_qubits: usize,
}

impl ToffoliLayout {
    pub fn encoded() -> Self {
        let blk = |i: usize| (7 * i..7 * i + 7).collect::<Vec<_>>();
        ToffoliLayout {
            a: [blk(0), blk(1), blk(2)],
            data: [blk(3), blk(4), blk(5)],
            cat: blk(6),
            cat_check: 49,
            checker: (50..57).collect(),
            anc: (57..64).collect(),
            num_qubits: 64,
        }
    }
}

/// Bits of the Toffoli protocol that drive its classical decisions.
#[derive(Clone, Debug, Default)]
pub struct ToffoliBits {
    pub cat_checks: Vec<usize>,
    pub reps: Vec<Vec<usize>>,
    pub data: [Vec<usize>; 3],
}

fn transversal(b: &mut CircuitBuilder, blocks: &[&[usize]], f: impl Fn(&[usize]) -> Gate) {
    for j in 0..blocks[0].len() {
        let qs: Vec<usize> = blocks.iter().map(|blk| blk[j]).collect();
        b.gate(f(&qs));
    }
}

fn cond_transversal(b: &mut CircuitBuilder, c: &Condition, blocks: &[&[usize]], f: impl Fn(&[usize]) -> Gate) {
    for j in 0..blocks[0].len() {
        let qs: Vec<usize> = blocks.iter().map(|blk| blk[j]).collect();
        b.cond(c.clone(), f(&qs));
    }
}

/// The two-stage protocol of Fig. "The fault-tolerant Toffoli gate".
///
/// The bare version uses one qubit per block and per cat (a one-qubit cat is `|+⟩`),
/// so it can be checked on the dense engine. The encoded version replaces every
/// qubit by a seven-qubit block, verifies `|0̄⟩` for the ancilla blocks, uses checked
/// seven-qubit cats, and runs a recovery round on the ancilla blocks between the
/// repeated measurements.
pub fn build_toffoli_protocol(bare: bool) -> Circuit {
    if bare {
        build_toffoli_bare()
    } else {
        build_toffoli_encoded().0
    }
}

fn build_toffoli_bare() -> Circuit {
    use toffoli_bare::*;
    let mut b = CircuitBuilder::new("toffoli_bare", QUBITS);
    b.inputs(&INPUTS);
    for q in [A1, A2, A3] {
        b.prep(q).h(q);
    }
    let mut reps = Vec::new();
    for cat in CATS {
        b.prep(cat).h(cat);
        b.cz(A3, cat).h(cat).toffoli(A1, A2, cat);
        reps.push(b.measure(cat));
    }
    let maj = Condition::Majority(reps.iter().map(|&r| Condition::Bit(r)).collect());
    b.cond(maj, Gate::X(A3));
    b.cnot(A1, X).cnot(A2, Y).cnot(Z, A3).h(Z);
    let mx = b.measure(X);
    let my = b.measure(Y);
    let w = b.measure(Z);
    b.cond(Condition::Bit(w), Gate::Cz(A1, A2)).cond(Condition::Bit(w), Gate::Z(A3));
    b.cond(Condition::Bit(my), Gate::X(A2)).cond(Condition::Bit(my), Gate::Cnot(A1, A3));
    b.cond(Condition::Bit(mx), Gate::X(A1)).cond(Condition::Bit(mx), Gate::Cnot(A2, A3));
    b.build().expect("well formed")
}

/// Encoded protocol plus the bits that drive it.
pub fn build_toffoli_encoded() -> (Circuit, ToffoliLayout, ToffoliBits) {
    let l = ToffoliLayout::encoded();
    let mut b = CircuitBuilder::new("toffoli_encoded", l.num_qubits);
    let inputs: Vec<usize> = l.data.iter().flatten().copied().collect();
    b.inputs(&inputs);
    let mut bits = ToffoliBits::default();
    for blk in &l.a {
        emit_verified_zero(&mut b, blk, &l.checker, 2, true);
        for &q in blk {
            b.h(q);
        }
    }
    let [a1, a2, a3] = [&l.a[0][..], &l.a[1][..], &l.a[2][..]];
    for rep in 0..3 {
        b.barrier();
        bits.cat_checks.push(emit_cat(&mut b, &l.cat, l.cat_check));
        transversal(&mut b, &[a3, &l.cat], |q| Gate::Cz(q[0], q[1]));
        for &q in &l.cat {
            b.h(q);
        }
        transversal(&mut b, &[a1, a2, &l.cat], |q| Gate::Toffoli(q[0], q[1], q[2]));
        bits.reps.push(l.cat.iter().map(|&q| b.measure(q)).collect());
        if rep < 2 {
            for blk in &l.a {
                emit_steane_recovery_round(&mut b, blk, &l.anc, &l.checker);
            }
        }
    }
    let maj = Condition::Majority(bits.reps.iter().map(|r| Condition::parity(r.clone())).collect());
    cond_transversal(&mut b, &maj, &[a3], |q| Gate::X(q[0]));
    let [x, y, z] = [&l.data[0][..], &l.data[1][..], &l.data[2][..]];
    transversal(&mut b, &[a1, x], |q| Gate::Cnot(q[0], q[1]));
    transversal(&mut b, &[a2, y], |q| Gate::Cnot(q[0], q[1]));
    transversal(&mut b, &[z, a3], |q| Gate::Cnot(q[0], q[1]));
    for &q in z {
        b.h(q);
    }
    for (k, blk) in [x, y, z].into_iter().enumerate() {
        bits.data[k] = blk.iter().map(|&q| b.measure(q)).collect();
    }
    let mx = Condition::hamming_parity(bits.data[0].clone());
    let my = Condition::hamming_parity(bits.data[1].clone());
    let w = Condition::hamming_parity(bits.data[2].clone());
    cond_transversal(&mut b, &w, &[a1, a2], |q| Gate::Cz(q[0], q[1]));
    cond_transversal(&mut b, &w, &[a3], |q| Gate::Z(q[0]));
    cond_transversal(&mut b, &my, &[a2], |q| Gate::X(q[0]));
    cond_transversal(&mut b, &my, &[a1, a3], |q| Gate::Cnot(q[0], q[1]));
    cond_transversal(&mut b, &mx, &[a1], |q| Gate::X(q[0]));
    cond_transversal(&mut b, &mx, &[a2, a3], |q| Gate::Cnot(q[0], q[1]));
    (b.build().expect("well formed"), l, bits)
}

/// Fig. 14: data on qubit 1, ancilla on qubit 2. Outcome 1 means the data is present.
pub fn emit_leak_detector(b: &mut CircuitBuilder, data: usize, anc: usize) -> usize {
    b.prep(anc);
    b.x(data).cnot(data, anc).x(data).cnot(data, anc);
    b.measure(anc)
}

pub fn build_leak_detector() -> Circuit {
    let mut b = CircuitBuilder::new("leak_detector", 2);
    b.inputs(&[0]);
    emit_leak_detector(&mut b, 0, 1);
    b.build().expect("well formed")
}

/// Nondestructive readout of the weight-3 logical Z into one reused ancilla,
/// repeated `reps` times. Returns the readout bits; the result is their majority.
pub fn emit_nondestructive_measurement(b: &mut CircuitBuilder, data: &[usize], anc: usize, reps: usize) -> Vec<usize> {
    (0..reps)
        .map(|_| {
            b.prep(anc);
            for j in PARITY_TRIPLE {
                b.cnot(data[j], anc);
            }
            b.measure(anc)
        })
        .collect()
}

/// Fig. 4. Destructive: seven measurements whose Hamming-corrected parity is the
/// logical value. Nondestructive: three repetitions of the parity-triple readout
/// into ancilla qubit 8, decided by majority.
pub fn build_logical_measurement(destructive: bool) -> Circuit {
    let data: Vec<usize> = (0..7).collect();
    if destructive {
        let mut b = CircuitBuilder::new("measure_destructive", 7);
        b.inputs(&data);
        for &q in &data {
            b.measure(q);
        }
        b.build().expect("well formed")
    } else {
        let mut b = CircuitBuilder::new("measure_nondestructive", 8);
        b.inputs(&data);
        emit_nondestructive_measurement(&mut b, &data, 7, 3);
        b.build().expect("well formed")
    }
}

/// How to read the logical value from the record of [`build_logical_measurement`].
pub fn logical_readout(destructive: bool) -> Condition {
    if destructive {
        Condition::hamming_parity(0..7)
    } else {
        Condition::Majority((0..3).map(Condition::Bit).collect())
    }
}
