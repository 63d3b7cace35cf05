use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ftlab::circuit::figures::*;
use ftlab::circuit::{definite, Census, Circuit, Condition, Gate, LocKind, Machine, NoFaults, SingleFault};
use ftlab::codes::{hamming_codewords_with_parity, steane_code};
use ftlab::dense::{clifford_matrix, mat_eq, mat_mul};
use ftlab::sim::{Backend, PauliFrame, StabilizerTableau, StateVector};
use ftlab::{Clifford, Pauli1, PauliString};

fn logical_state(a: C64, b: C64) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 128];
    let s = 1.0 / 8f64.sqrt();
    for (odd, amp) in [(false, a), (true, b)] {
        for w in hamming_codewords_with_parity(odd) {
            v[StateVector::index_of(&w)] += amp * s;
        }
    }
    v
}

fn encode_dense(a: C64, b: C64) -> StateVector {
    let mut amps = vec![C64::new(0.0, 0.0); 128];
    let mut bits = [false; 7];
    amps[StateVector::index_of(&bits)] = a;
    bits[ENCODER_INPUT] = true;
    amps[StateVector::index_of(&bits)] = b;
    let sv = StateVector::from_amplitudes(7, amps).unwrap();
    let mut m = Machine::with_seed(sv, NoFaults, 0);
    m.run_direct(&build_encoder()).unwrap();
    m.backend
}

#[test]
fn encoder_maps_basis_inputs_to_codeword_superpositions() {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let s0 = encode_dense(one, zero);
    let s1 = encode_dense(zero, one);
    let even = hamming_codewords_with_parity(false);
    let odd = hamming_codewords_with_parity(true);
    for (s, words) in [(&s0, &even), (&s1, &odd)] {
        for w in words {
            assert!((s.amplitude(w) - C64::new(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-12);
        }
        let total: f64 = words.iter().map(|w| s.amplitude(w).norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn encoder_on_general_input() {
    let (a, b) = (C64::new(0.6, 0.0), C64::new(0.8, 0.0));
    let s = encode_dense(a, b);
    let target = StateVector::from_amplitudes(7, logical_state(a, b)).unwrap();
    assert!(s.fidelity(&target) > 1.0 - 1e-10);
}

#[test]
fn zero_encoder_stabilized_by_generators() {
    let mut m = Machine::with_seed(StabilizerTableau::new(7), NoFaults, 0);
    m.run_direct(&build_zero_encoder()).unwrap();
    let code = steane_code();
    for g in &code.generators {
        assert_eq!(m.backend.expectation(g).unwrap(), Some(1), "{g}");
    }
    assert_eq!(m.backend.expectation(&code.logical_z[0]).unwrap(), Some(1));
}

fn tableau_with_zero(n: usize) -> StabilizerTableau {
    let mut m = Machine::with_seed(StabilizerTableau::new(n), NoFaults, 0);
    let map: Vec<usize> = (0..7).collect();
    m.run(&build_zero_encoder(), &map).unwrap();
    m.backend
}

#[test]
fn naive_syndrome_reads_hamming_column() {
    let c = build_naive_syndrome();
    assert!(!c.is_fault_tolerant());
    let mut m = Machine::with_seed(tableau_with_zero(10), NoFaults, 1);
    let rec = definite(&m.run_direct(&c).unwrap()).unwrap();
    assert_eq!(rec, vec![false, false, false]);
    let mut m = Machine::with_seed(tableau_with_zero(10), NoFaults, 1);
    m.inject(3, Pauli1::X);
    let rec = definite(&m.run_direct(&c).unwrap()).unwrap();
    assert_eq!(rec, vec![true, false, false]);
}

#[test]
fn naive_syndrome_ancilla_fault_spreads_phase_errors() {
    let c = build_naive_syndrome();
    let mut census = Machine::with_seed(PauliFrame::new(10), Census::new(), 0);
    census.run_direct(&c).unwrap();
    let data: Vec<usize> = (0..7).collect();
    let mut worst = 0;
    for (i, (_, loc)) in census.faults.sites.iter().enumerate() {
        for ch in 0..loc.choices() {
            let f = crate_fault(&c, i, ch);
            let on_data = f.error_on(&data);
            let z_weight = (0..7).filter(|&q| on_data.z(q)).count();
            worst = worst.max(z_weight);
        }
    }
    assert!(worst >= 2, "expected a single ancilla fault to reach two data qubits");
}

fn crate_fault(c: &Circuit, target: usize, choice: usize) -> PauliFrame {
    let mut m = Machine::with_seed(PauliFrame::new(c.num_qubits()), SingleFault::new(target, choice), 0);
    m.run_direct(c).unwrap();
    m.backend
}

fn shor_state() -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 16];
    for (i, a) in v.iter_mut().enumerate() {
        if (i as u32).count_ones() % 2 == 0 {
            *a = C64::new(1.0 / 8f64.sqrt(), 0.0);
        }
    }
    v
}

#[test]
fn shor_ancilla_noiseless_accepts_even_weight_state() {
    let c = build_shor_ancilla();
    let mut m = Machine::with_seed(StateVector::new(5).unwrap(), NoFaults, 3);
    let rec = definite(&m.run_direct(&c).unwrap()).unwrap();
    assert_eq!(rec, vec![false]);
    let out = m.backend.factor_out(&[0, 1, 2, 3]).unwrap();
    let target = shor_state();
    let overlap: C64 = out.iter().zip(&target).map(|(a, b)| a.conj() * b).sum();
    assert!((overlap.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn shor_ancilla_rejects_split_cat() {
    let c = build_shor_ancilla();
    let mut census = Machine::with_seed(StateVector::new(5).unwrap(), Census::new(), 0);
    census.run_direct(&c).unwrap();
    let target = census
        .faults
        .sites
        .iter()
        .position(|(_, l)| l.kind == LocKind::Gate(ftlab::circuit::GateKind::Cnot) && l.qubits() == [1, 2])
        .unwrap();
    // choice 0 is (I, X): X on the target of the second XOR
    let mut m = Machine::with_seed(StateVector::new(5).unwrap(), SingleFault::new(target, 0), 0);
    let rec = definite(&m.run_direct(&c).unwrap()).unwrap();
    assert_eq!(rec, vec![true]);
}

/// Smallest number of phase flips (modulo `Z⊗4`) relating `state` to the Shor state,
/// allowing arbitrary bit flips.
fn phase_error_weight(state: &[C64]) -> Option<usize> {
    let target = shor_state();
    let mut best: Option<usize> = None;
    for xm in 0..16usize {
        for zm in 0..16usize {
            let mut v = vec![C64::new(0.0, 0.0); 16];
            for (i, a) in target.iter().enumerate() {
                let sign = if ((i & zm) as u32).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                v[i ^ xm] += a * sign;
            }
            let ov: C64 = state.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            if (ov.norm() - 1.0).abs() < 1e-9 {
                let w = (zm.count_ones() as usize).min(4 - zm.count_ones() as usize);
                best = Some(best.map_or(w, |b: usize| b.min(w)));
            }
        }
    }
    best
}

#[test]
fn shor_ancilla_single_fault_sweep() {
    let c = build_shor_ancilla();
    let mut census = Machine::with_seed(StateVector::new(5).unwrap(), Census::new(), 0);
    census.run_direct(&c).unwrap();
    let mut accepted = 0;
    for (i, (_, loc)) in census.faults.sites.iter().enumerate() {
        for ch in 0..loc.choices() {
            for seed in 0..2 {
                let mut m = Machine::with_seed(StateVector::new(5).unwrap(), SingleFault::new(i, ch), seed);
                let rec = definite(&m.run_direct(&c).unwrap()).unwrap();
                if rec[0] {
                    continue;
                }
                accepted += 1;
                let out = m.backend.factor_out(&[0, 1, 2, 3]).expect("check qubit factors out");
                let w = phase_error_weight(&out).expect("Pauli-related to the Shor state");
                assert!(w <= 1, "fault {i}/{ch} left {w} phase errors");
            }
        }
    }
    assert!(accepted > 0);
}

fn run_shor_generator(gen: usize, inject: Option<(usize, Pauli1)>, seed: u64) -> (bool, Vec<bool>, bool) {
    let code = steane_code();
    let c = build_shor_syndrome(&code, gen).unwrap();
    let mut t = tableau_with_zero(c.num_qubits());
    if let Some((q, p)) = inject {
        t.apply_pauli(q, p);
    }
    let mut m = Machine::with_seed(t, NoFaults, seed);
    let rec = definite(&m.run_direct(&c).unwrap()).unwrap();
    let measured: Vec<bool> = rec[1..].to_vec();
    let parity = measured.iter().filter(|&&b| b).count() % 2 == 1;
    (rec[0], measured, parity)
}

#[test]
fn shor_syndrome_on_clean_zero() {
    for g in 0..6 {
        let (reject, _, parity) = run_shor_generator(g, None, 11 + g as u64);
        assert!(!reject);
        assert!(!parity, "generator {}", g + 1);
    }
}

#[test]
fn shor_syndrome_locates_x3() {
    let code = steane_code();
    let e = PauliString::single(7, 2, Pauli1::X);
    let expected = code.syndrome_of(&e).unwrap();
    let got: Vec<bool> = (0..6).map(|g| run_shor_generator(g, Some((2, Pauli1::X)), 5).2).collect();
    assert_eq!(got, expected);
    assert_eq!(&got[..3], &[false, true, true]);
}

#[test]
fn shor_syndrome_individual_bits_are_random() {
    let trials = 2000;
    let mut ones = [0usize; 4];
    for s in 0..trials {
        let (_, measured, parity) = run_shor_generator(0, None, s);
        assert!(!parity);
        for (k, &b) in measured.iter().enumerate() {
            ones[k] += b as usize;
        }
    }
    let sigma = (trials as f64 * 0.25).sqrt();
    for k in ones {
        assert!((k as f64 - trials as f64 / 2.0).abs() < 4.0 * sigma, "{ones:?}");
    }
}

/// The five-qubit code, optionally conjugated by `P` on its first qubit so that some
/// generators carry `Y` letters.
fn mixed_code(twist: bool) -> ftlab::codes::StabilizerCode {
    let code = ftlab::codes::five_qubit_code();
    if !twist {
        return code;
    }
    let conj = |p: &PauliString| p.conjugate_by(Clifford::P(0)).unwrap();
    ftlab::codes::StabilizerCode::new(
        "five_twisted",
        code.generators.iter().map(conj).collect(),
        code.logical_z.iter().map(conj).collect(),
        code.logical_x.iter().map(conj).collect(),
    )
    .unwrap()
}

#[test]
fn shor_syndrome_handles_mixed_generators() {
    for twist in [false, true] {
        let code = mixed_code(twist);
        let n = code.n;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut gens = code.generators.clone();
        gens.push(code.logical_z[0].clone());
        let state = StateVector::from_stabilizers(&gens, &mut rng).unwrap();
        for g in 0..code.generators.len() {
            let gen = &code.generators[g];
            let ny = (0..n).filter(|&q| gen.get(q) == Pauli1::Y).count();
            let invert = (gen.phase() as usize + 3 * ny) % 4 == 2;
            let c = build_shor_syndrome(&code, g).unwrap();
            for (err, q) in [(None, 0), (Some(Pauli1::X), 1), (Some(Pauli1::Z), 3), (Some(Pauli1::Y), 4), (Some(Pauli1::X), 0)] {
                let extra = c.num_qubits() - n;
                let mut amps = vec![C64::new(0.0, 0.0); 1 << c.num_qubits()];
                for (i, a) in state.amplitudes().iter().enumerate() {
                    amps[i << extra] = *a;
                }
                let mut sv = StateVector::from_amplitudes(c.num_qubits(), amps).unwrap();
                let mut expected = false;
                if let Some(p) = err {
                    sv.apply_pauli(q, p);
                    expected = code.syndrome_of(&PauliString::single(n, q, p)).unwrap()[g];
                }
                let mut m = Machine::with_seed(sv, NoFaults, 9);
                let rec = definite(&m.run_direct(&c).unwrap()).unwrap();
                assert!(!rec[0]);
                let parity = rec[1..].iter().filter(|&&b| b).count() % 2 == 1;
                assert_eq!(parity ^ invert, expected, "twist {twist} generator {} error {err:?} on {q}", g + 1);
            }
        }
    }
}

#[test]
fn steane_round_noiseless_is_trivial() {
    let c = build_steane_recovery_round();
    let mut m = Machine::with_seed(tableau_with_zero(21), NoFaults, 4);
    m.run_direct(&c).unwrap();
    let code = steane_code();
    let lift = |p: &PauliString| {
        let mut l = PauliString::identity(21);
        for q in 0..7 {
            l.set(q, p.get(q));
        }
        l.with_phase(p.phase())
    };
    for g in &code.generators {
        assert_eq!(m.backend.expectation(&lift(g)).unwrap(), Some(1));
    }
    assert_eq!(m.backend.expectation(&lift(&code.logical_z[0])).unwrap(), Some(1));
}

#[test]
fn steane_round_corrects_injected_x2() {
    let c = build_steane_recovery_round();
    let mut f = PauliFrame::new(21);
    f.apply_pauli(1, Pauli1::X);
    let mut m = Machine::with_seed(f, NoFaults, 0);
    let rec = definite(&m.run_direct(&c).unwrap()).unwrap();
    assert!(m.backend.error_on(&(0..7).collect::<Vec<_>>()).is_identity());
    // first bit pass reads column 2
    let first_syndrome = steane_bit_syndrome_bits(&c, 0);
    let word: Vec<bool> = first_syndrome.iter().map(|&b| rec[b]).collect();
    assert_eq!(ftlab::codes::hamming_syndrome_index(&word).unwrap(), 2);
}

/// Bits of the syndrome readout of pass `k` in the static round, found as the
/// measured ancilla qubits 8-14 in order.
fn steane_bit_syndrome_bits(c: &Circuit, k: usize) -> Vec<usize> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut cur = Vec::new();
    for g in c.gates() {
        if let Gate::MeasureZ { qubit, bit } = g {
            if (7..14).contains(qubit) {
                cur.push(*bit);
                if cur.len() == 7 {
                    groups.push(std::mem::take(&mut cur));
                }
            }
        }
    }
    groups[k].clone()
}

#[test]
fn steane_round_measurement_flip_in_first_pass_defers() {
    let c = build_steane_recovery_round();
    let first = steane_bit_syndrome_bits(&c, 0);
    let mut census = Machine::with_seed(PauliFrame::new(21), Census::new(), 0);
    census.run_direct(&c).unwrap();
    let meas_first = census
        .faults
        .sites
        .iter()
        .enumerate()
        .filter(|(_, (_, l))| l.kind == LocKind::Measure && (7..14).contains(&l.qubits()[0]))
        .map(|(i, _)| i)
        .next()
        .unwrap();
    let mut m = Machine::with_seed(PauliFrame::new(21), SingleFault::new(meas_first, 0), 0);
    let rec = definite(&m.run_direct(&c).unwrap()).unwrap();
    let s1: Vec<bool> = first.iter().map(|&b| rec[b]).collect();
    let s2: Vec<bool> = steane_bit_syndrome_bits(&c, 1).iter().map(|&b| rec[b]).collect();
    assert_ne!(ftlab::codes::hamming_syndrome_index(&s1).unwrap(), 0);
    assert_eq!(ftlab::codes::hamming_syndrome_index(&s2).unwrap(), 0);
    assert!(m.backend.error_on(&(0..7).collect::<Vec<_>>()).is_identity());
}

#[test]
fn leak_detector_outcomes() {
    let c = build_leak_detector();
    for input in [false, true] {
        let mut m = Machine::with_seed(StateVector::basis(&[input, false]).unwrap(), NoFaults, 0);
        assert_eq!(definite(&m.run_direct(&c).unwrap()).unwrap(), vec![true]);
        assert_eq!(m.backend.prob_one(0) > 0.5, input, "data restored");
    }
    let mut m = Machine::with_seed(StateVector::basis(&[true, false]).unwrap(), NoFaults, 0);
    m.leak(0);
    assert_eq!(definite(&m.run_direct(&c).unwrap()).unwrap(), vec![false]);
    for seed in 0..50 {
        let mut sv = StateVector::new(2).unwrap();
        sv.apply(ftlab::sim::Unitary::Clifford(Clifford::H(0))).unwrap();
        let mut m = Machine::with_seed(sv, NoFaults, seed);
        assert_eq!(definite(&m.run_direct(&c).unwrap()).unwrap(), vec![true]);
    }
}

#[test]
fn destructive_measurement_tolerates_single_x() {
    let c = build_logical_measurement(true);
    let read = logical_readout(true);
    for logical in [false, true] {
        for q in std::iter::once(None).chain((0..7).map(Some)) {
            let mut t = tableau_with_zero(7);
            if logical {
                for j in 0..7 {
                    t.apply_pauli(j, Pauli1::X);
                }
            }
            if let Some(q) = q {
                t.apply_pauli(q, Pauli1::X);
            }
            let mut m = Machine::with_seed(t, NoFaults, 7);
            let rec = definite(&m.run_direct(&c).unwrap()).unwrap();
            assert_eq!(read.eval(&rec), logical);
        }
    }
}

#[test]
fn nondestructive_measurement_statistics() {
    let c = build_logical_measurement(false);
    let read = logical_readout(false);
    let (a, b) = (C64::new(0.5, 0.0), C64::new(0.75f64.sqrt(), 0.0));
    let enc = encode_dense(a, b);
    let mut amps = vec![C64::new(0.0, 0.0); 256];
    for (i, x) in enc.amplitudes().iter().enumerate() {
        amps[i << 1] = *x;
    }
    let start = StateVector::from_amplitudes(8, amps).unwrap();
    let zbar = {
        let mut p = PauliString::identity(8);
        for j in 0..7 {
            p.set(j, Pauli1::Z);
        }
        p
    };
    let trials = 100_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut zeros = 0u64;
    for _ in 0..trials {
        let mut m = Machine::with_seed(start.clone(), NoFaults, rng.gen());
        let rec = definite(&m.run_direct(&c).unwrap()).unwrap();
        let v = read.eval(&rec);
        assert!(rec.iter().all(|&r| r == v), "noiseless repetitions agree");
        if !v {
            zeros += 1;
        }
        if zeros < 20 {
            let e = m.backend.expectation(&zbar).re;
            assert!((e - if v { -1.0 } else { 1.0 }).abs() < 1e-9);
        }
    }
    let p = zeros as f64 / trials as f64;
    let sigma = (0.25 * 0.75 / trials as f64).sqrt();
    assert!((p - 0.25).abs() < 3.0 * sigma, "p = {p}");
}

#[test]
fn hadamard_conjugation_reverses_xor() {
    let n = 2;
    let hh = mat_mul(&clifford_matrix(Clifford::H(0), n), &clifford_matrix(Clifford::H(1), n));
    let lhs = mat_mul(&hh, &mat_mul(&clifford_matrix(Clifford::Cnot(0, 1), n), &hh));
    assert!(mat_eq(&lhs, &clifford_matrix(Clifford::Cnot(1, 0), n), 1e-12));
}

fn all_builders() -> Vec<Circuit> {
    let code = steane_code();
    let mut v = vec![
        build_encoder(),
        build_zero_encoder(),
        build_naive_syndrome(),
        build_naive_phase_syndrome(),
        build_naive_recovery_round(),
        build_shor_ancilla(),
        build_cat(7),
        build_verified_zero(),
        build_steane_syndrome(),
        build_steane_recovery_round(),
        build_leak_detector(),
        build_logical_measurement(true),
        build_logical_measurement(false),
        build_toffoli_protocol(true),
        build_toffoli_protocol(false),
    ];
    for g in 0..6 {
        v.push(build_shor_syndrome(&code, g).unwrap());
    }
    v
}

#[test]
fn builders_are_well_formed_and_round_trip() {
    for c in all_builders() {
        let again = Circuit::from_text(&c.to_text()).unwrap();
        assert_eq!(again, c, "{}", c.name());
    }
}

#[test]
fn good_layouts_touch_each_ancilla_once() {
    let code = steane_code();
    for g in 0..6 {
        let c = build_shor_syndrome(&code, g).unwrap();
        let mut touches = vec![0; c.num_qubits()];
        for gate in c.gates() {
            if let Gate::Cnot(a, b) = gate {
                if (*a < 7) != (*b < 7) {
                    touches[if *a < 7 { *b } else { *a }] += 1;
                }
            }
        }
        assert!(touches[7..11].iter().all(|&t| t == 1), "generator {}: {touches:?}", g + 1);
    }
    let naive = build_naive_syndrome();
    let hits = naive.count(|g| matches!(g, Gate::Cnot(_, 7)));
    assert_eq!(hits, 4);
}

/// Exact check of frame semantics: the faulty tableau run, forced onto the record
/// the frame predicts, ends in the frame error applied to the noiseless state.
fn frame_matches_tableau(c: &Circuit, start: &StabilizerTableau) {
    let n = c.num_qubits();
    let mut census = Machine::with_seed(PauliFrame::new(n), Census::new(), 0);
    census.run_direct(c).unwrap();
    let measure_order: Vec<usize> = c
        .gates()
        .filter_map(|g| match g {
            Gate::MeasureZ { bit, .. } => Some(*bit),
            _ => None,
        })
        .collect();
    for (i, (_, loc)) in census.faults.sites.iter().enumerate() {
        for ch in 0..loc.choices() {
            let mut fm = Machine::with_seed(PauliFrame::new(n), SingleFault::new(i, ch), 0);
            let flips = definite(&fm.run_direct(c).unwrap()).unwrap();
            let seed = (i * 64 + ch) as u64;
            let mut clean = Machine::with_seed(start.clone(), NoFaults, seed);
            let reference = definite(&clean.run_direct(c).unwrap()).unwrap();
            let mut faulty_start = start.clone();
            let forced: Vec<bool> = reference.iter().zip(&flips).map(|(a, b)| a ^ b).collect();
            // a record fault flips the bit after the physical outcome is drawn
            let mut physical = forced.clone();
            if loc.kind == LocKind::Measure {
                let k = census.faults.sites[..i].iter().filter(|(_, l)| l.kind == LocKind::Measure).count();
                physical[measure_order[k]] ^= true;
            }
            let physical_in_order: Vec<bool> = measure_order.iter().map(|&b| physical[b]).collect();
            faulty_start.force_outcomes(&physical_in_order);
            let mut faulty = Machine::with_seed(faulty_start, SingleFault::new(i, ch), seed);
            let rec = definite(&faulty.run_direct(c).unwrap_or_else(|e| panic!("{} fault {i}/{ch}: {e}", c.name()))).unwrap();
            assert_eq!(rec, forced);
            let mut expected = clean.backend.clone();
            let err = fm.backend.error();
            for q in 0..n {
                if err.get(q) != Pauli1::I {
                    expected.apply_pauli(q, err.get(q));
                }
            }
            assert!(faulty.backend.same_state(&expected), "{} fault {i}/{ch}", c.name());
        }
    }
}

#[test]
fn frame_equals_tableau_on_every_builder() {
    for c in all_builders() {
        if !c.is_clifford() {
            continue;
        }
        let start = if c.inputs().len() >= 7 && c.inputs()[..7] == [0, 1, 2, 3, 4, 5, 6] {
            tableau_with_zero(c.num_qubits())
        } else {
            StabilizerTableau::new(c.num_qubits())
        };
        frame_matches_tableau(&c, &start);
    }
}

#[test]
fn toffoli_encoded_structure() {
    let c = build_toffoli_protocol(false);
    assert_eq!(c.num_qubits(), 64);
    assert_eq!(c.count(|g| matches!(g, Gate::Toffoli(..))), 21);
    let maj = c.count(|g| matches!(g, Gate::Cond { cond: Condition::Majority(_), .. }));
    assert_eq!(maj, 7);
}
