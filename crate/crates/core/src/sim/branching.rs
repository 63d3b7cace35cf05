use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use rand::RngCore;

use super::{check_qubits, Backend, Outcome, Unitary};
use crate::error::{Error, Result};
use crate::pauli::{Clifford, Pauli1, PauliString};

/// Pauli frame that stays exact through non-Clifford error propagation by
/// branching. When a Toffoli meets an error it does not commute with, or a
/// conditional Clifford fires differently from the reference, the resulting
/// operator is expanded in the Pauli basis and one term is followed. A script
/// of choices selects the term at each branch point, so repeated runs can walk
/// every branch (see [`for_each_branch`]).
#[derive(Clone, Debug)]
pub struct BranchingFrame {
    error: PauliString,
    script: Vec<usize>,
    trail: Vec<(usize, usize)>,
}

impl BranchingFrame {
    pub fn new(n: usize, script: Vec<usize>) -> Self {
        BranchingFrame { error: PauliString::identity(n), script, trail: Vec::new() }
    }

    pub fn error(&self) -> &PauliString {
        &self.error
    }

    /// Overwrite the error on `qubits` with `e` (indexed like `qubits`).
    pub fn set_error_on(&mut self, qubits: &[usize], e: &PauliString) {
        for (i, &q) in qubits.iter().enumerate() {
            self.error.set(q, e.get(i));
        }
    }

    /// `(choice, options)` at every branch point reached so far.
    pub fn trail(&self) -> &[(usize, usize)] {
        &self.trail
    }

    fn choose(&mut self, options: usize) -> usize {
        if options <= 1 {
            return 0;
        }
        let c = self.script.get(self.trail.len()).copied().unwrap_or(0).min(options - 1);
        self.trail.push((c, options));
        c
    }

    fn local(&self, qs: &[usize]) -> (usize, usize) {
        let k = qs.len();
        let (mut x, mut z) = (0, 0);
        for (i, &q) in qs.iter().enumerate() {
            let bit = 1 << (k - 1 - i);
            if self.error.x(q) {
                x |= bit;
            }
            if self.error.z(q) {
                z |= bit;
            }
        }
        (x, z)
    }

    fn set_local(&mut self, qs: &[usize], (x, z): (usize, usize)) {
        let k = qs.len();
        for (i, &q) in qs.iter().enumerate() {
            let bit = 1 << (k - 1 - i);
            self.error.set(q, Pauli1::from_bits(x & bit != 0, z & bit != 0));
        }
    }

    fn follow(&mut self, qs: &[usize], terms: &[(usize, usize)]) {
        let c = self.choose(terms.len());
        self.set_local(qs, terms[c]);
    }
}

/// Next script in depth-first order after a run that left `trail`, or `None`
/// when every branch has been visited.
pub fn next_script(trail: &[(usize, usize)]) -> Option<Vec<usize>> {
    let i = trail.iter().rposition(|&(c, n)| c + 1 < n)?;
    let mut s: Vec<usize> = trail[..i].iter().map(|&(c, _)| c).collect();
    s.push(trail[i].0 + 1);
    Some(s)
}

/// Call `run` with successive scripts until every branch is covered. `run`
/// returns the trail of the frame it used. Returns the number of branches.
pub fn for_each_branch(mut run: impl FnMut(Vec<usize>) -> Result<Vec<(usize, usize)>>) -> Result<usize> {
    let mut script = Vec::new();
    let mut count = 0;
    loop {
        let trail = run(script)?;
        count += 1;
        match next_script(&trail) {
            Some(s) => script = s,
            None => return Ok(count),
        }
    }
}

fn dim(k: usize) -> usize {
    1 << k
}

/// Dense matrix of `X^x Z^z` on k qubits (operand 0 is the most significant bit).
fn pauli_entry(x: usize, z: usize, r: usize, c: usize) -> C64 {
    if r != c ^ x {
        return C64::new(0.0, 0.0);
    }
    if (z & c).count_ones() % 2 == 1 {
        C64::new(-1.0, 0.0)
    } else {
        C64::new(1.0, 0.0)
    }
}

fn matmul(a: &[C64], b: &[C64], d: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for k in 0..d {
            let v = a[r * d + k];
            if v.norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..d {
                out[r * d + c] += v * b[k * d + c];
            }
        }
    }
    out
}

fn pauli_matrix(k: usize, x: usize, z: usize) -> Vec<C64> {
    let d = dim(k);
    let mut m = vec![C64::new(0.0, 0.0); d * d];
    for c in 0..d {
        m[(c ^ x) * d + c] = pauli_entry(x, z, c ^ x, c);
    }
    m
}

/// Pauli terms `(x, z)` with nonzero weight in the expansion of `m`.
fn expand(m: &[C64], k: usize) -> Vec<(usize, usize)> {
    let d = dim(k);
    let mut out = Vec::new();
    for x in 0..d {
        for z in 0..d {
            let mut tr = C64::new(0.0, 0.0);
            for c in 0..d {
                tr += pauli_entry(x, z, c ^ x, c).conj() * m[(c ^ x) * d + c];
            }
            if tr.norm() > 1e-9 {
                out.push((x, z));
            }
        }
    }
    out
}

fn unitary_matrix(u: Unitary) -> Vec<C64> {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match u {
        Unitary::Clifford(Clifford::H(_)) => vec![s, s, s, -s],
        Unitary::Clifford(Clifford::P(_)) => vec![l, o, o, i],
        Unitary::Clifford(Clifford::Pinv(_)) => vec![l, o, o, -i],
        Unitary::Clifford(Clifford::X(_)) => vec![o, l, l, o],
        Unitary::Clifford(Clifford::Z(_)) => vec![l, o, o, -l],
        Unitary::Clifford(Clifford::Cnot(..)) => permutation(2, |b| if b & 2 != 0 { b ^ 1 } else { b }),
        Unitary::Clifford(Clifford::Cz(..)) => {
            let mut m = permutation(2, |b| b);
            m[15] = -l;
            m
        }
        Unitary::Toffoli(..) => permutation(3, |b| if b & 6 == 6 { b ^ 1 } else { b }),
    }
}

fn permutation(k: usize, f: impl Fn(usize) -> usize) -> Vec<C64> {
    let d = dim(k);
    let mut m = vec![C64::new(0.0, 0.0); d * d];
    for c in 0..d {
        m[f(c) * d + c] = C64::new(1.0, 0.0);
    }
    m
}

fn dagger(m: &[C64], d: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            out[c * d + r] = m[r * d + c].conj();
        }
    }
    out
}

/// Terms of `T E T` for every 3-qubit Pauli `E`, indexed by `x * 8 + z`.
fn toffoli_table() -> &'static Vec<Vec<(usize, usize)>> {
    static TABLE: OnceLock<Vec<Vec<(usize, usize)>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let t = unitary_matrix(Unitary::Toffoli(0, 1, 2));
        let mut v = Vec::with_capacity(64);
        for x in 0..8 {
            for z in 0..8 {
                let m = matmul(&matmul(&t, &pauli_matrix(3, x, z), 8), &t, 8);
                v.push(expand(&m, 3));
            }
        }
        v
    })
}

impl Backend for BranchingFrame {
    fn num_qubits(&self) -> usize {
        self.error.len()
    }

    fn apply(&mut self, u: Unitary) -> Result<()> {
        check_qubits(&u, self.error.len())?;
        match u {
            Unitary::Clifford(g) => self.error.conjugate_in_place(g),
            Unitary::Toffoli(a, b, c) => {
                let qs = [a, b, c];
                let (x, z) = self.local(&qs);
                let terms = &toffoli_table()[x * 8 + z];
                self.follow(&qs, terms);
            }
        }
        Ok(())
    }

    fn apply_pauli(&mut self, q: usize, p: Pauli1) {
        let cur = self.error.get(q);
        let (a, b) = cur.bits();
        let (c, d) = p.bits();
        self.error.set(q, Pauli1::from_bits(a ^ c, b ^ d));
    }

    fn measure_z<R: RngCore + ?Sized>(&mut self, q: usize, _rng: &mut R) -> Result<Outcome> {
        let x = self.error.x(q);
        self.error.set(q, Pauli1::from_bits(x, false));
        Ok(Some(x))
    }

    fn reset<R: RngCore + ?Sized>(&mut self, q: usize, _rng: &mut R) -> Result<()> {
        self.error.set(q, Pauli1::I);
        Ok(())
    }

    fn conditional(&mut self, u: Unitary, actual: Outcome, reference: bool) -> Result<()> {
        let a = actual.ok_or_else(|| Error::Unsupported("undetermined condition in branching frame".into()))?;
        if let Some((q, p)) = u.as_pauli() {
            if a != reference {
                self.apply_pauli(q, p);
            }
            return Ok(());
        }
        if a == reference {
            return if a { self.apply(u) } else { Ok(()) };
        }
        check_qubits(&u, self.error.len())?;
        let qs = u.qubits();
        let k = qs.len();
        let d = dim(k);
        let (x, z) = self.local(&qs);
        let e = pauli_matrix(k, x, z);
        let g = unitary_matrix(u);
        // applied here but not in the reference: G·E; the other way round: E·G†
        let m = if a { matmul(&g, &e, d) } else { matmul(&e, &dagger(&g, d), d) };
        let terms = expand(&m, k);
        self.follow(&qs, &terms);
        Ok(())
    }

    fn reports_flips(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toffoli_expansions() {
        // X on a control becomes X_a times CNOT(b→c): four terms
        let t = &toffoli_table()[0b100 * 8];
        assert_eq!(t.len(), 4);
        assert!(t.contains(&(0b100, 0)) && t.contains(&(0b101, 0b010)));
        // X on the target and Z on the controls commute with the gate
        assert_eq!(toffoli_table()[0b001 * 8], vec![(0b001, 0)]);
        assert_eq!(toffoli_table()[0b110], vec![(0, 0b110)]);
        // Z on the target picks up a CZ on the controls
        assert_eq!(toffoli_table()[0b001].len(), 4);
    }

    #[test]
    fn branches_are_enumerated() {
        let mut rng = rand::thread_rng();
        let n = for_each_branch(|script| {
            let mut f = BranchingFrame::new(4, script);
            f.apply_pauli(0, Pauli1::X);
            f.apply(Unitary::Toffoli(0, 1, 2))?;
            f.apply_pauli(3, Pauli1::Z);
            f.apply(Unitary::Toffoli(1, 3, 2))?;
            f.measure_z(2, &mut rng)?;
            Ok(f.trail().to_vec())
        })
        .unwrap();
        // four terms after the first gate; none of them fails to commute with the second
        assert_eq!(n, 4);
    }

    #[test]
    fn mismatched_cnot_branches_like_its_expansion() {
        let mut f = BranchingFrame::new(2, vec![]);
        f.conditional(Unitary::Clifford(Clifford::Cnot(0, 1)), Some(true), false).unwrap();
        assert_eq!(f.trail(), &[(0, 4)]);
        let mut f = BranchingFrame::new(2, vec![]);
        f.conditional(Unitary::Clifford(Clifford::Cnot(0, 1)), Some(true), true).unwrap();
        assert!(f.trail().is_empty());
    }
}
