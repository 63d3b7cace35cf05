//! The measurement-based Toffoli construction: dense verification of the bare
//! protocol, the encoded protocol as a controller with cat retries, and a
//! single-fault audit of the encoded protocol on the branching frame.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64 as C64;

use crate::circuit::figures::{
    build_toffoli_protocol, emit_cat, emit_steane_recovery_round, emit_verified_zero, toffoli_bare, ToffoliLayout,
};
use crate::circuit::{
    definite, Census, Circuit, CircuitBuilder, Condition, Fault, FaultAt, FaultSource, Gate, LocKind, Location, Machine,
    NoFaults,
};
use crate::codes::{steane_code, StabilizerCode};
use crate::error::{Error, Result};
use crate::pauli::{Bits, Pauli1, PauliString};
use crate::sim::{for_each_branch, Backend, BranchingFrame, StateVector};

/// Outcome of running the bare protocol on one input over every measurement branch.
#[derive(Clone, Debug)]
pub struct BareCheck {
    /// Branches with nonzero probability.
    pub branches: usize,
    pub total_probability: f64,
    /// Smallest fidelity of the output with `Toffoli|input⟩` over the branches.
    pub min_fidelity: f64,
}

/// `Toffoli|input⟩` on three qubits (first two control the third).
pub fn toffoli_image(input: &[C64; 8]) -> [C64; 8] {
    let mut out = *input;
    out.swap(6, 7);
    out
}

/// Run the bare protocol with the three-qubit `input` on its data qubits, forcing
/// each of the 2⁶ measurement records in turn.
pub fn verify_toffoli_bare(input: &[C64; 8]) -> Result<BareCheck> {
    use toffoli_bare::*;
    let c = build_toffoli_protocol(true);
    let meas = c.count(|g| matches!(g, Gate::MeasureZ { .. }));
    let want = toffoli_image(input);
    let mut amps = vec![C64::new(0.0, 0.0); 1 << QUBITS];
    // data qubits 7-9 are the three lowest bits, in order
    amps[..8].copy_from_slice(input);
    let start = StateVector::from_amplitudes(QUBITS, amps)?;
    let mut check = BareCheck { branches: 0, total_probability: 0.0, min_fidelity: 1.0 };
    for branch in 0..1usize << meas {
        let forced: Vec<bool> = (0..meas).map(|i| (branch >> (meas - 1 - i)) & 1 == 1).collect();
        let mut sv = start.clone();
        sv.force_outcomes(&forced);
        let mut m = Machine::with_seed(sv, NoFaults, branch as u64);
        m.run_direct(&c)?;
        let p = m.backend.branch_probability();
        if p < 1e-12 {
            continue;
        }
        check.branches += 1;
        check.total_probability += p;
        let out = m
            .backend
            .factor_out(&OUTPUTS)
            .ok_or_else(|| Error::Domain(format!("branch {branch:06b}: outputs entangled with the rest")))?;
        let norm: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        let overlap: C64 = want.iter().zip(&out).map(|(w, o)| w.conj() * o).sum();
        let wn: f64 = want.iter().map(|a| a.norm_sqr()).sum();
        check.min_fidelity = check.min_fidelity.min(overlap.norm_sqr() / (norm * wn));
    }
    Ok(check)
}

/// Sub-circuits of the encoded protocol, all on the same 64-qubit layout.
#[derive(Clone, Debug)]
pub struct EncodedToffoli {
    pub layout: ToffoliLayout,
    prep: Circuit,
    cats: Vec<Circuit>,
    reps: Vec<Circuit>,
    finish: Circuit,
}

/// Where a run starts: segment index and step within it. Earlier segments are
/// assumed to have run noiselessly, which on a frame leaves nothing behind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Start {
    pub segment: usize,
    pub step: usize,
}

/// Counts of what happened during one encoded run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ToffoliRun {
    pub cat_retries: usize,
    pub majority_flip: bool,
}

impl EncodedToffoli {
    pub fn new() -> Result<Self> {
        let l = ToffoliLayout::encoded();
        let n = l.num_qubits;
        let a_and_data: Vec<usize> = l.a.iter().chain(&l.data).flatten().copied().collect();
        let data: Vec<usize> = l.data.iter().flatten().copied().collect();

        let mut b = CircuitBuilder::new("toffoli_prep", n);
        b.inputs(&data);
        for blk in &l.a {
            emit_verified_zero(&mut b, blk, &l.checker, 2, true);
            for &q in blk {
                b.h(q);
            }
        }
        let prep = b.build()?;

        let mut cats = Vec::new();
        let mut reps = Vec::new();
        for r in 0..3 {
            let mut b = CircuitBuilder::new(&format!("toffoli_cat{}", r + 1), n);
            b.inputs(&a_and_data);
            emit_cat(&mut b, &l.cat, l.cat_check);
            cats.push(b.build()?);

            let mut b = CircuitBuilder::new(&format!("toffoli_rep{}", r + 1), n);
            let mut inputs = a_and_data.clone();
            inputs.extend(&l.cat);
            b.inputs(&inputs);
            for j in 0..7 {
                b.cz(l.a[2][j], l.cat[j]);
            }
            for &q in &l.cat {
                b.h(q);
            }
            for j in 0..7 {
                b.toffoli(l.a[0][j], l.a[1][j], l.cat[j]);
            }
            for &q in &l.cat {
                b.measure(q);
            }
            if r < 2 {
                for blk in &l.a {
                    emit_steane_recovery_round(&mut b, blk, &l.anc, &l.checker);
                }
            }
            reps.push(b.build()?);
        }

        let mut b = CircuitBuilder::new("toffoli_finish", n);
        b.inputs(&a_and_data);
        let [a1, a2, a3] = [&l.a[0], &l.a[1], &l.a[2]];
        let [x, y, z] = [&l.data[0], &l.data[1], &l.data[2]];
        for j in 0..7 {
            b.cnot(a1[j], x[j]).cnot(a2[j], y[j]).cnot(z[j], a3[j]);
        }
        for &q in z {
            b.h(q);
        }
        let mut read = |blk: &Vec<usize>| -> Condition {
            let bits: Vec<usize> = blk.iter().map(|&q| b.measure(q)).collect();
            Condition::hamming_parity(bits)
        };
        let (mx, my, w) = (read(x), read(y), read(z));
        for j in 0..7 {
            b.cond(w.clone(), Gate::Cz(a1[j], a2[j])).cond(w.clone(), Gate::Z(a3[j]));
            b.cond(my.clone(), Gate::X(a2[j])).cond(my.clone(), Gate::Cnot(a1[j], a3[j]));
            b.cond(mx.clone(), Gate::X(a1[j])).cond(mx.clone(), Gate::Cnot(a2[j], a3[j]));
        }
        let finish = b.build()?;
        Ok(EncodedToffoli { layout: l, prep, cats, reps, finish })
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits
    }

    /// Segments in the order of a run without retries.
    pub fn segments(&self) -> Vec<&Circuit> {
        let mut v = vec![&self.prep];
        for r in 0..3 {
            v.push(&self.cats[r]);
            v.push(&self.reps[r]);
        }
        v.push(&self.finish);
        v
    }

    /// Run the protocol. Rejected cats are discarded and rebuilt, up to
    /// `max_retries` times per repetition; the three cat parities decide by majority
    /// whether the third ancilla block is flipped.
    pub fn run<B: Backend, F: FaultSource>(&self, m: &mut Machine<B, F>, max_retries: usize, start: Start) -> Result<ToffoliRun> {
        self.run_with(m, max_retries, start, |_, _| {})
    }

    /// As [`Self::run`], calling `boundary` with the backend and the segment index
    /// before each segment that applies Toffoli gates or the final fix-ups.
    pub fn run_with<B: Backend, F: FaultSource>(
        &self,
        m: &mut Machine<B, F>,
        max_retries: usize,
        start: Start,
        mut boundary: impl FnMut(&mut B, usize),
    ) -> Result<ToffoliRun> {
        let map: Vec<usize> = (0..self.num_qubits()).collect();
        // `first` is false for cat retries, which always start from the top
        let exec = |m: &mut Machine<B, F>, c: &Circuit, seg: usize, first: bool| -> Result<Option<Vec<bool>>> {
            if seg < start.segment {
                return Ok(None);
            }
            let from = if seg == start.segment && first { start.step } else { 0 };
            Ok(Some(definite(&m.run_from(c, &map, from)?)?))
        };
        let mut out = ToffoliRun::default();
        exec(m, &self.prep, 0, true)?;
        let mut votes = 0;
        for r in 0..3 {
            let mut tries = 0;
            let mut first = true;
            while let Some(rec) = exec(m, &self.cats[r], 1 + 2 * r, first)? {
                if !rec[0] {
                    break;
                }
                tries += 1;
                if tries > max_retries {
                    return Err(Error::PreparationFailed { retries: max_retries });
                }
                first = false;
            }
            out.cat_retries += tries;
            if 2 + 2 * r > start.segment {
                boundary(&mut m.backend, 2 + 2 * r);
            }
            if let Some(rec) = exec(m, &self.reps[r], 2 + 2 * r, true)? {
                votes += rec[..7].iter().fold(false, |a, &b| a ^ b) as usize;
            }
        }
        if votes >= 2 {
            out.majority_flip = true;
            for &q in &self.layout.a[2] {
                m.correct(q, Pauli1::X);
            }
        }
        boundary(&mut m.backend, 7);
        exec(m, &self.finish, 7, true)?;
        Ok(out)
    }
}

/// Bit-flip and phase-flip parts of a block error, each reduced to minimum weight
/// modulo the stabilizers of its type. With `plus`, the block is known to hold
/// `|+̄⟩` and X̄ is divided out too.
fn reduce_css(code: &StabilizerCode, e: &PauliString, plus: bool) -> PauliString {
    let n = e.len();
    let x = PauliString::from_bits(e.x_bits().clone(), Bits::zeros(n), n, 0);
    let z = PauliString::from_bits(Bits::zeros(n), e.z_bits().clone(), n, 0);
    let mut rx = code.min_weight_representative(&x);
    if plus {
        let mut flipped = x;
        flipped.mul_assign_unchecked(&PauliString::from_support(n, &(0..n).collect::<Vec<_>>(), Pauli1::X));
        let alt = code.min_weight_representative(&flipped);
        if alt.weight() < rx.weight() {
            rx = alt;
        }
    }
    let mut out = rx;
    out.mul_assign_unchecked(&code.min_weight_representative(&z));
    out.with_phase(0)
}

/// Smallest error equivalent to `e` on a cat state, whose stabilizers are the
/// all-X operator and every ZZ pair.
fn reduce_cat(e: &PauliString) -> PauliString {
    let n = e.len();
    let xs: Vec<usize> = (0..n).filter(|&q| e.x(q)).collect();
    let mut out = if 2 * xs.len() > n {
        PauliString::from_support(n, &(0..n).filter(|q| !xs.contains(q)).collect::<Vec<_>>(), Pauli1::X)
    } else {
        PauliString::from_support(n, &xs, Pauli1::X)
    };
    if (0..n).filter(|&q| e.z(q)).count() % 2 == 1 {
        out.mul_assign_unchecked(&PauliString::single(n, 0, Pauli1::Z));
    }
    out.with_phase(0)
}

/// A single fault that left some ancilla block with more than one bit flip or
/// more than one phase flip.
#[derive(Clone, Debug)]
pub struct AuditViolation {
    pub circuit: String,
    pub location: Location,
    pub fault: Fault,
    /// Minimum-weight residual on each ancilla block at exit, in that branch.
    pub residual: [PauliString; 3],
}

#[derive(Clone, Debug, Default)]
pub struct ToffoliAudit {
    /// Locations on the noiseless path.
    pub locations: usize,
    /// Idle locations skipped because an earlier idle step on the same qubit is
    /// equivalent.
    pub merged_idle: usize,
    pub cases: usize,
    pub branches: usize,
    pub violations: Vec<AuditViolation>,
}

/// Sites worth injecting at: an idle step directly after another idle step of the
/// same qubit in the same sub-circuit is equivalent to it.
fn distinct_sites(sites: &[(String, Location)]) -> (Vec<(String, Location)>, usize) {
    let idle: HashSet<(&str, usize, usize)> = sites
        .iter()
        .filter(|(_, l)| l.kind == LocKind::Idle)
        .map(|(n, l)| (n.as_str(), l.step, l.qubits()[0]))
        .collect();
    let mut keep = Vec::new();
    let mut merged = 0;
    for (n, l) in sites {
        if l.kind == LocKind::Idle && l.step > 0 && idle.contains(&(n.as_str(), l.step - 1, l.qubits()[0])) {
            merged += 1;
        } else {
            keep.push((n.clone(), *l));
        }
    }
    (keep, merged)
}

/// Inject every single fault into the encoded protocol and follow every Pauli
/// branch of its propagation through the Toffoli gates. Each ancilla block must
/// leave with at most one bit flip and at most one phase flip, which the code
/// corrects.
///
/// Before each segment that contains Toffoli gates the error on every ancilla
/// block is reduced modulo the code stabilizers. Those blocks hold code states,
/// so this is exact, while expanding a stabilizer through a Toffoli term by term
/// is not. Before the first repetition the blocks hold `|+̄⟩`, so X̄ is divided
/// out as well. The freshly verified cat is reduced the same way. `stride` > 1 keeps only every `stride`-th case, for quick runs.
pub fn toffoli_encoded_audit(stride: usize) -> Result<ToffoliAudit> {
    let proto = EncodedToffoli::new()?;
    let n = proto.num_qubits();
    let mut m = Machine::with_seed(BranchingFrame::new(n, vec![]), Census::new(), 0);
    proto.run(&mut m, 1, Start::default())?;
    let sites = m.faults.sites;
    let seg_of: HashMap<String, usize> =
        proto.segments().iter().enumerate().map(|(i, c)| (c.name().to_string(), i)).collect();
    let (kept, merged_idle) = distinct_sites(&sites);
    let code = steane_code();
    let mut audit = ToffoliAudit { locations: sites.len(), merged_idle, ..Default::default() };
    let mut k = 0usize;
    for (name, loc) in &kept {
        let segment = *seg_of.get(name).ok_or_else(|| Error::Domain(format!("unknown segment {name}")))?;
        let step = loc.step;
        for choice in 0..loc.choices() {
            k += 1;
            if (k - 1) % stride != 0 {
                continue;
            }
            audit.cases += 1;
            let fault = Fault::enumerate(loc, choice);
            let mut bad: Option<[PauliString; 3]> = None;
            let branches = for_each_branch(|script| {
                let mut m = Machine::with_seed(BranchingFrame::new(n, script), FaultAt::in_circuit(name, *loc, fault), 0);
                proto.run_with(&mut m, 1, Start { segment, step }, |f: &mut BranchingFrame, seg| {
                    for blk in &proto.layout.a {
                        let e = reduce_css(&code, &f.error().restrict(blk), seg == 2);
                        f.set_error_on(blk, &e);
                    }
                    if seg < 7 {
                        let cat = &proto.layout.cat;
                        f.set_error_on(cat, &reduce_cat(&f.error().restrict(cat)));
                    }
                })?;
                if bad.is_none() {
                    let res = [0, 1, 2].map(|i| reduce_css(&code, &m.backend.error().restrict(&proto.layout.a[i]), false));
                    let heavy = |p: &PauliString| p.x_bits().count_ones() > 1 || p.z_bits().count_ones() > 1;
                    if res.iter().any(heavy) {
                        bad = Some(res);
                    }
                }
                Ok(m.backend.trail().to_vec())
            })?;
            audit.branches += branches;
            if let Some(residual) = bad {
                audit.violations.push(AuditViolation { circuit: name.clone(), location: *loc, fault, residual });
            }
        }
    }
    Ok(audit)
}
