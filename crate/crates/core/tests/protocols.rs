use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ftlab::circuit::{Census, Circuit, Fault, FaultSource, GateKind, LocKind, Location, Machine, NoFaults, SingleFault};
use ftlab::protocols::toffoli::{toffoli_encoded_audit, toffoli_image, verify_toffoli_bare, EncodedToffoli, Start};
use ftlab::protocols::{
    encode_ideal, handle_leakage, holds_logical, in_code_space, logical_observable, prepare_verified_shor_state,
    sweep::single_fault_sweep, transversal_circuit, transversal_gate, verify_logical_zero, Basis, Half, Method,
    Recovery, RecoveryPolicy, RepeatPolicy, ZeroCheckRule, ZeroVerdict,
};
use ftlab::sim::{BranchingFrame, PauliFrame, StabilizerTableau, StateVector};
use ftlab::{Error, Pauli1, PauliString};

fn block(i: usize) -> Vec<usize> {
    (7 * i..7 * i + 7).collect()
}

fn y_bar(n: usize, blk: &[usize]) -> PauliString {
    PauliString::from_support(n, blk, Pauli1::Y).with_phase(1)
}

/// Flips the outcome of the first `n` measurements.
struct FlipFirst {
    left: usize,
}

impl FaultSource for FlipFirst {
    fn fault(&mut self, loc: &Location) -> Fault {
        if loc.kind == LocKind::Measure && self.left > 0 {
            self.left -= 1;
            Fault { flip: true, ..Fault::NONE }
        } else {
            Fault::NONE
        }
    }
}

#[test]
fn shor_state_noiseless_accepts_first_try() {
    let mut m = Machine::with_seed(StabilizerTableau::new(5), NoFaults, 1);
    assert_eq!(prepare_verified_shor_state(&mut m, &[0, 1, 2, 3], 4, 3).unwrap(), 0);
}

#[test]
fn verified_zero_noiseless_is_trusted() {
    let mut m = Machine::with_seed(StabilizerTableau::new(14), NoFaults, 2);
    encode_ideal(&mut m, &block(0), Basis::Zero).unwrap();
    let r = verify_logical_zero(&mut m, &block(0), &block(1), ZeroCheckRule::Twice).unwrap();
    assert_eq!(r.verdict, ZeroVerdict::Trusted);
    assert_eq!(r.checks, vec![false, false]);
}

#[test]
fn verified_zero_flips_logical_one() {
    let mut m = Machine::with_seed(StabilizerTableau::new(14), NoFaults, 3);
    encode_ideal(&mut m, &block(0), Basis::Zero).unwrap();
    for q in 0..7 {
        m.inject(q, Pauli1::X);
    }
    let r = verify_logical_zero(&mut m, &block(0), &block(1), ZeroCheckRule::Twice).unwrap();
    assert_eq!(r.verdict, ZeroVerdict::Flipped);
    assert_eq!(r.checks, vec![true, true]);
    assert!(holds_logical(&m.backend, &block(0), Basis::Zero).unwrap());
}

#[test]
fn verified_zero_conflict_leaves_block_alone() {
    // a corrupted first checker reads logical 1 once
    let mut m = Machine::with_seed(PauliFrame::new(14), FlipFirst { left: 7 }, 4);
    let r = verify_logical_zero(&mut m, &block(0), &block(1), ZeroCheckRule::Twice).unwrap();
    assert_eq!(r.verdict, ZeroVerdict::Conflict);
    assert_eq!(r.checks, vec![true, false]);
    assert!(m.backend.error_on(&block(0)).is_identity());
}

#[test]
fn verified_zero_repeat_until_agree() {
    let mut m = Machine::with_seed(PauliFrame::new(14), FlipFirst { left: 7 }, 5);
    let r = verify_logical_zero(&mut m, &block(0), &block(1), ZeroCheckRule::RepeatUntilAgree { max: 4 }).unwrap();
    assert_eq!(r.verdict, ZeroVerdict::Trusted);
    assert_eq!(r.checks, vec![true, false, false]);
}

fn recover_with_injection(policy: RecoveryPolicy, inject: Option<(usize, Pauli1)>, basis: Basis, seed: u64) -> (StabilizerTableau, ftlab::protocols::RecoveryOutcome) {
    let rec = Recovery::new(policy).unwrap();
    let n = rec.num_qubits();
    let map: Vec<usize> = (0..n).collect();
    let mut m = Machine::with_seed(StabilizerTableau::new(n), NoFaults, seed);
    encode_ideal(&mut m, &map[..7], basis).unwrap();
    if let Some((q, p)) = inject {
        m.inject(q, p);
    }
    let out = rec.recover(&mut m, &map).unwrap();
    (m.backend, out)
}

#[test]
fn recover_corrects_injected_x5() {
    for method in [Method::Steane, Method::Shor] {
        let policy = RecoveryPolicy::with_method(method);
        let (t, out) = recover_with_injection(policy, Some((4, Pauli1::X)), Basis::Zero, 6);
        assert_eq!(out.correction(), PauliString::single(7, 4, Pauli1::X));
        assert!(!out.deferred());
        assert!(in_code_space(&t, &block(0)).unwrap());
        assert!(holds_logical(&t, &block(0), Basis::Zero).unwrap());
        // same stabilizer group on the block as a clean encoding
        let mut clean = Machine::with_seed(StabilizerTableau::new(7), NoFaults, 0);
        encode_ideal(&mut clean, &block(0), Basis::Zero).unwrap();
        for g in clean.backend.stabilizers() {
            let mut p = PauliString::identity(t.n());
            for q in 0..7 {
                p.set(q, g.get(q));
            }
            assert_eq!(t.expectation(&p.with_phase(g.phase())).unwrap(), Some(1));
        }
    }
}

#[test]
fn recover_corrects_every_single_qubit_error() {
    for method in [Method::Steane, Method::Shor] {
        for q in 0..7 {
            for p in [Pauli1::X, Pauli1::Y, Pauli1::Z] {
                for basis in [Basis::Zero, Basis::Plus] {
                    let policy = RecoveryPolicy::with_method(method);
                    let (t, out) = recover_with_injection(policy, Some((q, p)), basis, q as u64);
                    assert_eq!(out.correction(), PauliString::single(7, q, p), "{method} {q} {p:?}");
                    assert!(holds_logical(&t, &block(0), basis).unwrap());
                    assert!(in_code_space(&t, &block(0)).unwrap());
                }
            }
        }
    }
}

#[test]
fn recover_noiseless_measures_each_half_once() {
    for method in [Method::Steane, Method::Shor] {
        let (_, out) = recover_with_injection(RecoveryPolicy::with_method(method), None, Basis::Plus, 7);
        assert_eq!(out.history(), vec![(Half::Bit, 0), (Half::Phase, 0)]);
        assert!(out.correction().is_identity());
        assert!(!out.deferred());
    }
}

#[test]
fn recover_defers_on_disagreement() {
    // one flipped ancilla readout in the first bit pass names a position; the
    // second pass reads trivial
    let rec = Recovery::new(RecoveryPolicy::default()).unwrap();
    let n = rec.num_qubits();
    let map: Vec<usize> = (0..n).collect();
    let mut census = Machine::with_seed(PauliFrame::new(n), Census::new(), 8);
    rec.recover(&mut census, &map).unwrap();
    let measures = census.faults.sites.iter().enumerate().filter(|(_, (_, l))| l.kind == LocKind::Measure);
    let mut found = false;
    for (target, _) in measures {
        let mut m = Machine::with_seed(PauliFrame::new(n), SingleFault::new(target, 0), 8);
        let out = rec.recover(&mut m, &map).unwrap();
        if out.bit.history.len() == 2 && out.bit.history[0] != 0 {
            assert_eq!(out.bit.history[1], 0);
            assert!(out.bit.deferred);
            assert!(out.bit.correction.is_identity());
            assert!(out.deferred());
            assert!(m.backend.error_on(&block(0)).is_identity());
            found = true;
            break;
        }
    }
    assert!(found);
}

#[test]
fn accept_trivial_once_acts_on_first_reading() {
    let policy = RecoveryPolicy { repeats: RepeatPolicy::AcceptTrivialOnce, ..RecoveryPolicy::default() };
    let (_, out) = recover_with_injection(policy, Some((2, Pauli1::Z)), Basis::Plus, 9);
    assert_eq!(out.phase.history, vec![3]);
    assert_eq!(out.correction(), PauliString::single(7, 2, Pauli1::Z));
}

#[test]
fn repeat_until_agree_stops_at_agreement() {
    let policy = RecoveryPolicy { repeats: RepeatPolicy::RepeatUntilAgree { max: 4 }, ..RecoveryPolicy::default() };
    let (_, out) = recover_with_injection(policy, Some((6, Pauli1::X)), Basis::Zero, 10);
    assert_eq!(out.bit.history, vec![7, 7]);
    assert!(!out.deferred());
}

#[test]
fn naive_method_needs_demonstration_mode() {
    let policy = RecoveryPolicy { method: Method::Naive, ..RecoveryPolicy::default() };
    assert!(matches!(Recovery::new(policy), Err(Error::Config(_))));
    assert!(Recovery::new(RecoveryPolicy { demonstration: true, ..policy }).is_ok());
}

#[test]
fn transversal_h_on_zero_gives_plus() {
    let mut m = Machine::with_seed(StabilizerTableau::new(7), NoFaults, 11);
    encode_ideal(&mut m, &block(0), Basis::Zero).unwrap();
    transversal_gate(&mut m, GateKind::H, &[&block(0)]).unwrap();
    assert!(holds_logical(&m.backend, &block(0), Basis::Plus).unwrap());
    assert!(in_code_space(&m.backend, &block(0)).unwrap());
}

#[test]
fn transversal_cnot_on_one_zero() {
    let mut m = Machine::with_seed(StabilizerTableau::new(14), NoFaults, 12);
    encode_ideal(&mut m, &block(0), Basis::Zero).unwrap();
    encode_ideal(&mut m, &block(1), Basis::Zero).unwrap();
    transversal_gate(&mut m, GateKind::X, &[&block(0)]).unwrap();
    transversal_gate(&mut m, GateKind::Cnot, &[&block(0), &block(1)]).unwrap();
    for b in [block(0), block(1)] {
        assert_eq!(m.backend.expectation(&logical_observable(14, &b, Basis::Zero)).unwrap(), Some(-1));
        assert!(in_code_space(&m.backend, &b).unwrap());
    }
}

#[test]
fn transversal_p_acts_as_logical_phase() {
    let mut m = Machine::with_seed(StabilizerTableau::new(7), NoFaults, 13);
    encode_ideal(&mut m, &block(0), Basis::Plus).unwrap();
    transversal_gate(&mut m, GateKind::P, &[&block(0)]).unwrap();
    assert_eq!(m.backend.expectation(&y_bar(7, &block(0))).unwrap(), Some(1));
    // |1̄⟩ picks up i: P̄ leaves Z̄ alone and the state stays in the code space
    let mut m = Machine::with_seed(StabilizerTableau::new(7), NoFaults, 14);
    encode_ideal(&mut m, &block(0), Basis::Zero).unwrap();
    transversal_gate(&mut m, GateKind::P, &[&block(0)]).unwrap();
    assert!(holds_logical(&m.backend, &block(0), Basis::Zero).unwrap());
    assert!(in_code_space(&m.backend, &block(0)).unwrap());
}

#[test]
fn transversal_gates_touch_each_qubit_once() {
    for (kind, blocks) in [(GateKind::X, 1), (GateKind::Z, 1), (GateKind::H, 1), (GateKind::P, 1), (GateKind::Cnot, 2)] {
        let c: Circuit = transversal_circuit(kind, blocks).unwrap();
        let mut seen = vec![0; 7 * blocks];
        for g in c.gates() {
            for q in g.qubits() {
                seen[q] += 1;
            }
        }
        assert!(seen.iter().all(|&k| k == 1), "{kind:?}");
    }
    assert!(matches!(transversal_circuit(GateKind::Toffoli, 3), Err(Error::UnsupportedGate(_))));
}

fn leak_then(k: usize, replace: bool, extra: Option<(usize, Pauli1)>, basis: Basis) -> bool {
    let rec = Recovery::new(RecoveryPolicy::default()).unwrap();
    let map: Vec<usize> = (0..rec.num_qubits()).collect();
    let mut m = Machine::with_seed(StabilizerTableau::new(map.len()), NoFaults, 100 + k as u64);
    encode_ideal(&mut m, &block(0), basis).unwrap();
    m.leak(k);
    if replace {
        let replaced = handle_leakage(&mut m, &block(0), 7).unwrap();
        assert_eq!(replaced, vec![k]);
        assert!(!m.is_leaked(k));
    }
    rec.recover(&mut m, &map).unwrap();
    if let Some((q, p)) = extra {
        m.inject(q, p);
        rec.recover(&mut m, &map).unwrap();
    }
    holds_logical(&m.backend, &block(0), basis).unwrap() && in_code_space(&m.backend, &block(0)).unwrap()
}

#[test]
fn no_leakage_leaves_block_unchanged() {
    let mut m = Machine::with_seed(StabilizerTableau::new(8), NoFaults, 15);
    encode_ideal(&mut m, &block(0), Basis::Plus).unwrap();
    assert!(handle_leakage(&mut m, &block(0), 7).unwrap().is_empty());
    assert!(holds_logical(&m.backend, &block(0), Basis::Plus).unwrap());
    assert!(in_code_space(&m.backend, &block(0)).unwrap());
}

#[test]
fn leaked_qubit_replaced_and_recovered() {
    for k in 0..7 {
        for basis in [Basis::Zero, Basis::Plus] {
            assert!(leak_then(k, true, None, basis), "position {k}");
            // the restored block still corrects a later single error
            for j in (0..7).filter(|&j| j != k) {
                assert!(leak_then(k, true, Some((j, Pauli1::Y)), basis), "position {k}, then Y{j}");
            }
        }
    }
}

#[test]
fn unreplaced_leak_can_cause_failure() {
    let mut failures = 0;
    for k in 0..7 {
        for j in (0..7).filter(|&j| j != k) {
            for basis in [Basis::Zero, Basis::Plus] {
                if !leak_then(k, false, Some((j, Pauli1::Y)), basis) {
                    failures += 1;
                }
            }
        }
    }
    assert!(failures > 0);
}

#[test]
fn leakage_needs_state_backend() {
    let mut m = Machine::with_seed(PauliFrame::new(8), NoFaults, 0);
    assert!(matches!(handle_leakage(&mut m, &block(0), 7), Err(Error::Unsupported(_))));
}

#[test]
fn single_fault_sweep_steane_and_shor_pass() {
    for method in [Method::Steane, Method::Shor] {
        let report = single_fault_sweep(&RecoveryPolicy::with_method(method)).unwrap();
        assert!(report.locations > 100);
        assert!(report.passed(), "{method}: {:?}", &report.failures[..report.failures.len().min(5)]);
    }
}

#[test]
fn single_fault_sweep_naive_fails() {
    let policy = RecoveryPolicy { demonstration: true, ..RecoveryPolicy::with_method(Method::Naive) };
    let report = single_fault_sweep(&policy).unwrap();
    assert!(!report.failures.is_empty());
}

fn basis_state(k: usize) -> [C64; 8] {
    let mut a = [C64::new(0.0, 0.0); 8];
    a[k] = C64::new(1.0, 0.0);
    a
}

#[test]
fn toffoli_truth_table_examples() {
    assert_eq!(toffoli_image(&basis_state(0b101)), basis_state(0b101));
    assert_eq!(toffoli_image(&basis_state(0b111)), basis_state(0b110));
}

#[test]
fn bare_toffoli_on_basis_states() {
    for k in 0..8 {
        let c = verify_toffoli_bare(&basis_state(k)).unwrap();
        assert!(c.branches > 0);
        assert!((c.total_probability - 1.0).abs() < 1e-10, "{k}: {}", c.total_probability);
        assert!(c.min_fidelity > 1.0 - 1e-10, "{k}: {}", c.min_fidelity);
    }
}

#[test]
fn bare_toffoli_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..5 {
        let mut a = [C64::new(0.0, 0.0); 8];
        for z in a.iter_mut() {
            *z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        a.iter_mut().for_each(|z| *z /= norm);
        let c = verify_toffoli_bare(&a).unwrap();
        assert!((c.total_probability - 1.0).abs() < 1e-10);
        assert!(c.min_fidelity > 1.0 - 1e-10);
    }
}

#[test]
fn encoded_toffoli_noiseless_leaves_no_error() {
    let proto = EncodedToffoli::new().unwrap();
    let mut m = Machine::with_seed(BranchingFrame::new(proto.num_qubits(), vec![]), NoFaults, 0);
    let run = proto.run(&mut m, 2, Start::default()).unwrap();
    assert_eq!(run.cat_retries, 0);
    assert!(!run.majority_flip);
    assert!(m.backend.error().is_identity());
}

#[test]
fn encoded_toffoli_exceeds_dense_cap() {
    let proto = EncodedToffoli::new().unwrap();
    assert!(StateVector::new(proto.num_qubits()).is_err());
}

#[test]
fn encoded_toffoli_single_fault_audit() {
    let audit = toffoli_encoded_audit(1).unwrap();
    assert!(audit.cases > 0);
    assert!(audit.branches >= audit.cases);
    assert!(audit.violations.is_empty(), "{:?}", &audit.violations[..audit.violations.len().min(3)]);
}
