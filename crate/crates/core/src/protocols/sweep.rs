//! Exhaustive single-fault injection over one recovery round.

use rayon::prelude::*;

use super::{encode_ideal, holds_logical, Basis, Method, Recovery, RecoveryPolicy};
use crate::circuit::{Census, Location, Machine, SingleFault};
use crate::error::Result;
use crate::sim::StabilizerTableau;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepFailure {
    /// Index of the location in execution order of the noiseless round.
    pub index: usize,
    pub choice: usize,
    pub location: Location,
    /// Sub-circuit the location belongs to.
    pub circuit: String,
    pub basis: Basis,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub method: Method,
    pub locations: usize,
    /// Single faults tried, per basis.
    pub faults: usize,
    pub failures: Vec<SweepFailure>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Locations of one noiseless round, with the sub-circuit each belongs to.
pub fn census(policy: &RecoveryPolicy) -> Result<Census> {
    let rec = Recovery::new(*policy)?;
    let n = rec.num_qubits();
    let map: Vec<usize> = (0..n).collect();
    let mut m = Machine::with_seed(StabilizerTableau::new(n), Census::new(), 0);
    encode_ideal(&mut m, &map[..7], Basis::Zero)?;
    rec.recover(&mut m, &map)?;
    Ok(m.faults)
}

/// Every single fault at every location of one round, on `|0̄⟩` and on `|+̄⟩`,
/// followed by a noiseless round. A case fails when the logical state is lost.
pub fn single_fault_sweep(policy: &RecoveryPolicy) -> Result<SweepReport> {
    let rec = Recovery::new(*policy)?;
    let n = rec.num_qubits();
    let map: Vec<usize> = (0..n).collect();
    let sites = census(policy)?.sites;
    let cases: Vec<(usize, usize, Basis)> = sites
        .iter()
        .enumerate()
        .flat_map(|(i, (_, loc))| (0..loc.choices()).map(move |c| (i, c)))
        .flat_map(|(i, c)| [(i, c, Basis::Zero), (i, c, Basis::Plus)])
        .collect();
    let faults = cases.len() / 2;
    let results: Result<Vec<Option<SweepFailure>>> = cases
        .par_iter()
        .map(|&(i, c, basis)| {
            let seed = (i as u64) << 20 | (c as u64) << 1 | (basis == Basis::Plus) as u64;
            let mut m = Machine::with_seed(StabilizerTableau::new(n), SingleFault::new(i, c), seed);
            encode_ideal(&mut m, &map[..7], basis)?;
            rec.recover(&mut m, &map)?;
            rec.recover_ideal(&mut m, &map)?;
            if holds_logical(&m.backend, &map[..7], basis)? {
                Ok(None)
            } else {
                let (name, location) = sites[i].clone();
                Ok(Some(SweepFailure { index: i, choice: c, location, circuit: name, basis }))
            }
        })
        .collect();
    let failures = results?.into_iter().flatten().collect();
    Ok(SweepReport { method: policy.method, locations: sites.len(), faults, failures })
}
