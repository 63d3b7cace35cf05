use ftlab::circuit::figures::build_encoder;
use ftlab::circuit::{Fault, FaultSource, GateKind, LocKind, Location, Machine};
use ftlab::noise::{trial_rng, MultiQubitMode, NoiseModel, NoisySource};
use ftlab::sim::StabilizerTableau;
use ftlab::{Clifford, Pauli1};
use proptest::prelude::*;

fn idle() -> Location {
    Location::new(LocKind::Idle, &[0], 0)
}

fn cnot() -> Location {
    Location::new(LocKind::Gate(GateKind::Cnot), &[0, 1], 0)
}

#[test]
fn zero_rates_give_no_faults() {
    let m = NoiseModel::noiseless();
    let mut rng = trial_rng(7, 0);
    let locs = [
        idle(),
        cnot(),
        Location::new(LocKind::Prep, &[0], 0),
        Location::new(LocKind::Measure, &[0], 0),
        Location::new(LocKind::Gate(GateKind::Toffoli), &[0, 1, 2], 0),
    ];
    for _ in 0..10_000 {
        for l in &locs {
            assert!(m.sample_fault(l, &mut rng).is_none());
        }
    }
}

#[test]
fn storage_faults_are_uniform_over_xyz() {
    let m = NoiseModel::storage(0.03);
    let mut rng = trial_rng(1, 0);
    let n = 1_000_000;
    let mut counts = [0usize; 4];
    for _ in 0..n {
        let f = m.sample_fault(&idle(), &mut rng);
        counts[f.paulis[0] as usize] += 1;
    }
    let sigma = (0.01f64 * 0.99 / n as f64).sqrt();
    for p in Pauli1::NONTRIVIAL {
        let freq = counts[p as usize] as f64 / n as f64;
        assert!((freq - 0.01).abs() < 3.0 * sigma, "{p:?}: {freq}");
    }
}

#[test]
fn all_operands_mode_hits_both_cnot_qubits() {
    let m = NoiseModel::gates(0.2);
    let mut rng = trial_rng(2, 0);
    let mut faulty = 0;
    for _ in 0..20_000 {
        let f = m.sample_fault(&cnot(), &mut rng);
        if !f.is_none() {
            faulty += 1;
            assert!(f.paulis[0] != Pauli1::I && f.paulis[1] != Pauli1::I);
        }
    }
    assert!((faulty as f64 / 20_000.0 - 0.2).abs() < 0.015);
}

#[test]
fn uniform_nontrivial_mode_covers_fifteen_paulis() {
    let mut m = NoiseModel::gates(1.0);
    m.multiqubit_mode = MultiQubitMode::UniformNontrivial;
    let mut rng = trial_rng(3, 0);
    let mut counts = std::collections::HashMap::new();
    let n = 150_000;
    for _ in 0..n {
        let f = m.sample_fault(&cnot(), &mut rng);
        *counts.entry((f.paulis[0], f.paulis[1])).or_insert(0usize) += 1;
    }
    assert_eq!(counts.len(), 15);
    assert!(!counts.contains_key(&(Pauli1::I, Pauli1::I)));
    for &c in counts.values() {
        assert!((c as f64 / n as f64 - 1.0 / 15.0).abs() < 0.005);
    }
}

#[test]
fn measurement_flip_rate() {
    let mut m = NoiseModel::noiseless();
    m.eps_meas = 0.5;
    let mut rng = trial_rng(4, 0);
    let n = 100_000;
    let flips = (0..n).filter(|_| m.measurement_flip(&mut rng)).count();
    assert!((flips as f64 / n as f64 - 0.5).abs() < 3.0 * (0.25f64 / n as f64).sqrt());
}

#[test]
fn prep_fault_flips_to_one() {
    let mut m = NoiseModel::noiseless();
    m.eps_prep = 1.0;
    let mut rng = trial_rng(5, 0);
    assert_eq!(m.prep_fault(&mut rng), Some(Pauli1::X));
}

#[test]
fn consecutive_locations_are_independent() {
    let m = NoiseModel::storage(0.3);
    let mut rng = trial_rng(6, 0);
    let n = 1_000_000;
    let (mut a, mut b, mut ab) = (0usize, 0usize, 0usize);
    for _ in 0..n {
        let x = !m.sample_fault(&idle(), &mut rng).is_none();
        let y = !m.sample_fault(&idle(), &mut rng).is_none();
        a += x as usize;
        b += y as usize;
        ab += (x && y) as usize;
    }
    let (pa, pb, pab) = (a as f64 / n as f64, b as f64 / n as f64, ab as f64 / n as f64);
    let sigma = (pa * pb * (1.0 - pa) * (1.0 - pb) / n as f64).sqrt();
    assert!((pab - pa * pb).abs() < 3.0 * sigma, "{pab} vs {}", pa * pb);
}

struct Recorder {
    inner: NoisySource,
    log: Vec<Fault>,
}

impl FaultSource for Recorder {
    fn fault(&mut self, loc: &Location) -> Fault {
        let f = self.inner.fault(loc);
        self.log.push(f);
        f
    }
}

#[test]
fn fault_stream_does_not_depend_on_data() {
    let c = build_encoder();
    let model = NoiseModel::uniform(0.2);
    let mut logs = Vec::new();
    for flip_input in [false, true] {
        let mut t = StabilizerTableau::new(7);
        if flip_input {
            t.apply_clifford(Clifford::X(2)).unwrap();
        }
        let rec = Recorder { inner: NoisySource::for_trial(model.clone(), 9, 3), log: vec![] };
        let mut m = Machine::with_seed(t, rec, 11);
        m.run_direct(&c).unwrap();
        logs.push(m.faults.log);
    }
    assert_eq!(logs[0], logs[1]);
    assert!(logs[0].iter().any(|f| !f.is_none()));
}

#[test]
fn trial_streams_are_reproducible_and_distinct() {
    use rand::Rng;
    let a: Vec<u64> = (0..4).map(|_| 0).scan(trial_rng(1, 5), |r, _: u64| Some(r.gen())).collect();
    let b: Vec<u64> = (0..4).map(|_| 0).scan(trial_rng(1, 5), |r, _: u64| Some(r.gen())).collect();
    let c: Vec<u64> = (0..4).map(|_| 0).scan(trial_rng(1, 6), |r, _: u64| Some(r.gen())).collect();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

proptest! {
    #[test]
    fn out_of_range_rates_rejected(p in prop_oneof![-10.0f64..-1e-9, 1.0000001f64..10.0]) {
        let mut m = NoiseModel::noiseless();
        prop_assert!(m.set("eps_store", &p.to_string()).is_err());
        prop_assert!(m.set("eps_gate.cnot", &p.to_string()).is_err());
    }

    #[test]
    fn only_operands_are_touched(seed in any::<u64>(), eps in 0.0f64..=1.0) {
        let m = NoiseModel::uniform(eps);
        let mut rng = trial_rng(seed, 0);
        for loc in [idle(), cnot(), Location::new(LocKind::Measure, &[0], 0)] {
            let f = m.sample_fault(&loc, &mut rng);
            let k = loc.qubits().len();
            prop_assert!(f.paulis[k..].iter().all(|&p| p == Pauli1::I));
            if loc.kind != LocKind::Measure {
                prop_assert!(!f.flip);
            }
        }
    }
}
