//! Pauli operators in binary symplectic form.
//!
//! An n-qubit operator is stored as `i^phase * prod_j X_j^{x_j} Z_j^{z_j}`, with the
//! X factor written to the left of the Z factor on every site. The letter `Y` therefore
//! denotes the product `X·Z`, which equals `-i` times the Hermitian Pauli-Y matrix
//! (`sigma_y = i·X·Z`). This is the only place the two conventions meet; every other
//! module works with the `X·Z` reading and exact phases in `{+1, +i, -1, -i}`.
//!
//! Qubit indices in the API are 0-based. The text form lists sites left to right, so the
//! first character is qubit 1 in the usual figure labelling.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    pub const NONTRIVIAL: [Pauli1; 3] = [Pauli1::X, Pauli1::Y, Pauli1::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::I => (false, false),
            Pauli1::X => (true, false),
            Pauli1::Y => (true, true),
            Pauli1::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli1::I => 'I',
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        }
    }
}

/// Clifford gates that act on Pauli operators by conjugation. Qubits are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clifford {
    H(usize),
    P(usize),
    Pinv(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
}

impl Clifford {
    pub fn max_qubit(&self) -> usize {
        match *self {
            Clifford::H(q) | Clifford::P(q) | Clifford::Pinv(q) | Clifford::X(q) | Clifford::Z(q) => q,
            Clifford::Cnot(a, b) | Clifford::Cz(a, b) => a.max(b),
        }
    }

    pub fn inverse(&self) -> Clifford {
        match *self {
            Clifford::P(q) => Clifford::Pinv(q),
            Clifford::Pinv(q) => Clifford::P(q),
            other => other,
        }
    }
}

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

/// Packed bit vector used for the X and Z halves.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn zeros(n: usize) -> Self {
        Bits { words: vec![0; words_for(n)] }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        let mask = 1u64 << (i % WORD);
        if v {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Popcount of `self & other`.
    pub fn and_count(&self, other: &Bits) -> u32 {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// An n-qubit Pauli operator with an exact phase `i^phase`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Bits,
    z: Bits,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: Bits::zeros(n), z: Bits::zeros(n), phase: 0 }
    }

    /// Single-site operator `p` on qubit `q` of an n-qubit register.
    pub fn single(n: usize, q: usize, p: Pauli1) -> Self {
        let mut s = Self::identity(n);
        s.set(q, p);
        s
    }

    /// Build from per-site letters with phase +1.
    pub fn from_letters(letters: &[Pauli1]) -> Self {
        let mut s = Self::identity(letters.len());
        for (q, &p) in letters.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// Pure X-type (or Z-type) operator on the given support.
    pub fn from_support(n: usize, support: &[usize], p: Pauli1) -> Self {
        let mut s = Self::identity(n);
        for &q in support {
            s.set(q, p);
        }
        s
    }

    pub fn from_bits(x: Bits, z: Bits, n: usize, phase: u8) -> Self {
        PauliString { n, x, z, phase: phase & 3 }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    pub fn x_bits(&self) -> &Bits {
        &self.x
    }

    pub fn z_bits(&self) -> &Bits {
        &self.z
    }

    pub fn get(&self, q: usize) -> Pauli1 {
        Pauli1::from_bits(self.x.get(q), self.z.get(q))
    }

    /// Overwrite the letter on one site; the phase is left untouched.
    pub fn set(&mut self, q: usize, p: Pauli1) {
        let (x, z) = p.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn x(&self, q: usize) -> bool {
        self.x.get(q)
    }

    pub fn z(&self, q: usize) -> bool {
        self.z.get(q)
    }

    pub fn weight(&self) -> usize {
        (0..self.n).filter(|&q| self.x.get(q) || self.z.get(q)).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x.get(q) || self.z.get(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero() && self.phase == 0
    }

    /// True when the X and Z parts are both zero, ignoring phase.
    pub fn is_trivial(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Phase that makes the operator Hermitian: `i^{#Y}` under the `Y = X·Z` reading.
    /// Returns the operator rescaled so that it squares to `+I`.
    pub fn hermitian(&self) -> Self {
        let ys = self.x.and_count(&self.z) as u8;
        let mut out = self.clone();
        out.phase = ys & 3;
        out
    }

    /// `+1` or `-1` such that `self * self = sign * I`.
    pub fn square_sign(&self) -> i8 {
        // (i^a P)^2 = i^{2a} * (-1)^{#Y}
        let e = (2 * self.phase as u32 + 2 * self.x.and_count(&self.z)) % 4;
        if e == 0 {
            1
        } else {
            -1
        }
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension { expected: self.n, found: other.n });
        }
        Ok(())
    }

    /// Operator product `self · other` with exact phase.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.mul_assign_unchecked(other);
        Ok(out)
    }

    /// In-place `self = self · other`. Panics on length mismatch.
    pub fn mul_assign_unchecked(&mut self, other: &PauliString) {
        assert_eq!(self.n, other.n, "pauli length mismatch");
        // Moving Z^{z1} of self past X^{x2} of other costs (-1)^{z1·x2} per site.
        let swaps = self.z.and_count(&other.x);
        self.phase = ((self.phase as u32 + other.phase as u32 + 2 * swaps) % 4) as u8;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// Symplectic inner product test.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub fn commutes_unchecked(&self, other: &PauliString) -> bool {
        (self.x.and_count(&other.z) + self.z.and_count(&other.x)) % 2 == 0
    }

    /// Returns `g · self · g^{-1}`.
    pub fn conjugate_by(&self, g: Clifford) -> Result<PauliString> {
        if g.max_qubit() >= self.n {
            return Err(Error::QubitOutOfRange { qubit: g.max_qubit(), n: self.n });
        }
        let mut out = self.clone();
        out.conjugate_in_place(g);
        Ok(out)
    }

    pub fn conjugate_in_place(&mut self, g: Clifford) {
        let add = |s: &mut PauliString, k: u8| s.phase = (s.phase + k) & 3;
        match g {
            Clifford::H(q) => {
                let (x, z) = (self.x.get(q), self.z.get(q));
                // X <-> Z, and X·Z -> Z·X = -X·Z
                if x && z {
                    add(self, 2);
                }
                self.x.set(q, z);
                self.z.set(q, x);
            }
            Clifford::P(q) => {
                // X -> i X·Z, X·Z -> i X
                if self.x.get(q) {
                    add(self, 1);
                    self.z.flip(q);
                }
            }
            Clifford::Pinv(q) => {
                if self.x.get(q) {
                    add(self, 3);
                    self.z.flip(q);
                }
            }
            Clifford::X(q) => {
                if self.z.get(q) {
                    add(self, 2);
                }
            }
            Clifford::Z(q) => {
                if self.x.get(q) {
                    add(self, 2);
                }
            }
            Clifford::Cnot(c, t) => {
                // X_c -> X_c X_t, Z_t -> Z_c Z_t; no reordering phase arises.
                if self.x.get(c) {
                    self.x.flip(t);
                }
                if self.z.get(t) {
                    self.z.flip(c);
                }
            }
            Clifford::Cz(a, b) => {
                // X_a -> X_a Z_b, X_b -> Z_a X_b; Z_b^{x_a} must pass X_b^{x_b}.
                let (xa, xb) = (self.x.get(a), self.x.get(b));
                if xa && xb {
                    add(self, 2);
                }
                if xa {
                    self.z.flip(b);
                }
                if xb {
                    self.z.flip(a);
                }
            }
        }
    }

    /// Letters only, no sign.
    pub fn letters(&self) -> String {
        (0..self.n).map(|q| self.get(q).letter()).collect()
    }

    /// Restrict to a subset of qubits (in the given order); phase is dropped.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        let mut out = PauliString::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.set(i, self.get(q));
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{}{}", sign, self.letters())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional sign (`+`, `-`, `+i`, `-i`, `i`) followed by letters I/X/Y/Z.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s)
        };
        if rest.is_empty() {
            return Err(Error::Parse(format!("empty pauli string {s:?}")));
        }
        let mut letters = Vec::with_capacity(rest.len());
        for c in rest.chars() {
            letters.push(match c {
                'I' | '_' => Pauli1::I,
                'X' => Pauli1::X,
                'Y' => Pauli1::Y,
                'Z' => Pauli1::Z,
                other => return Err(Error::Parse(format!("bad pauli letter {other:?} in {s:?}"))),
            });
        }
        Ok(PauliString::from_letters(&letters).with_phase(phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{mat_eq, mat_mul, pauli_matrix, Mat};
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_z_is_y() {
        assert_eq!(p("X").multiply(&p("Z")).unwrap(), p("Y"));
    }

    #[test]
    fn z_times_x_is_minus_y() {
        let prod = p("Z").multiply(&p("X")).unwrap();
        assert_eq!(prod, p("-Y"));
        // matrix oracle
        let m = mat_mul(&pauli_matrix(&p("Z")), &pauli_matrix(&p("X")));
        assert!(mat_eq(&m, &pauli_matrix(&prod), 1e-12));
    }

    #[test]
    fn hermitian_y_phase() {
        // sigma_y = i X Z
        let y = p("Y").hermitian();
        assert_eq!(y.phase(), 1);
        assert_eq!(y.square_sign(), 1);
        assert_eq!(p("Y").square_sign(), -1);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(p("XX").multiply(&p("X")), Err(Error::Dimension { .. })));
        assert!(p("XX").commutes(&p("X")).is_err());
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("IIIZZZZ").commutes(&p("IIIXXXX")).unwrap());
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["+IXYZ", "-XXZ", "+iY", "-iZZ"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }

    #[test]
    fn conjugation_examples() {
        let h = p("X").conjugate_by(Clifford::H(0)).unwrap();
        assert_eq!(h, p("Z"));
        let fwd = p("XI").conjugate_by(Clifford::Cnot(0, 1)).unwrap();
        assert_eq!(fwd, p("XX"));
        let back = p("IZ").conjugate_by(Clifford::Cnot(0, 1)).unwrap();
        assert_eq!(back, p("ZZ"));
        assert!(p("X").conjugate_by(Clifford::Cnot(0, 1)).is_err());
    }

    fn gate_matrix(g: Clifford, n: usize) -> Mat {
        crate::dense::clifford_matrix(g, n)
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        (proptest::collection::vec(0u8..4, n), 0u8..4).prop_map(|(v, ph)| {
            let letters: Vec<Pauli1> = v
                .into_iter()
                .map(|k| [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z][k as usize])
                .collect();
            PauliString::from_letters(&letters).with_phase(ph)
        })
    }

    fn arb_clifford(n: usize) -> impl Strategy<Value = Clifford> {
        (0u8..7, 0..n, 0..n).prop_filter_map("distinct", move |(k, a, b)| {
            Some(match k {
                0 => Clifford::H(a),
                1 => Clifford::P(a),
                2 => Clifford::Pinv(a),
                3 => Clifford::X(a),
                4 => Clifford::Z(a),
                5 if a != b => Clifford::Cnot(a, b),
                6 if a != b => Clifford::Cz(a, b),
                _ => return None,
            })
        })
    }

    #[test]
    fn commutes_matches_matrices_exhaustively_n3() {
        let n = 3;
        let all: Vec<PauliString> = (0..64u32)
            .map(|k| {
                let letters: Vec<Pauli1> = (0..n)
                    .map(|q| [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z][((k >> (2 * q)) & 3) as usize])
                    .collect();
                PauliString::from_letters(&letters)
            })
            .collect();
        for a in &all {
            let ma = pauli_matrix(a);
            for b in &all {
                let mb = pauli_matrix(b);
                let ab = mat_mul(&ma, &mb);
                let ba = mat_mul(&mb, &ma);
                assert_eq!(a.commutes(b).unwrap(), mat_eq(&ab, &ba, 1e-12), "{a} {b}");
            }
        }
    }

    #[test]
    fn seven_qubit_commutator_oracle() {
        let a = p("IIIZZZZ");
        let b = p("IIIXXXX");
        let (ma, mb) = (pauli_matrix(&a), pauli_matrix(&b));
        assert!(mat_eq(&mat_mul(&ma, &mb), &mat_mul(&mb, &ma), 1e-12));
    }

    proptest! {
        #[test]
        fn multiply_matches_matrices(a in arb_pauli(3), b in arb_pauli(3)) {
            let prod = a.multiply(&b).unwrap();
            let m = mat_mul(&pauli_matrix(&a), &pauli_matrix(&b));
            prop_assert!(mat_eq(&m, &pauli_matrix(&prod), 1e-12));
        }

        #[test]
        fn identity_is_neutral(a in arb_pauli(4)) {
            prop_assert_eq!(PauliString::identity(4).multiply(&a).unwrap(), a.clone());
            prop_assert_eq!(a.multiply(&PauliString::identity(4)).unwrap(), a);
        }

        #[test]
        fn multiply_associative(a in arb_pauli(4), b in arb_pauli(4), c in arb_pauli(4)) {
            let l = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let r = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn squares_to_plus_minus_identity(a in arb_pauli(5)) {
            let sq = a.multiply(&a).unwrap();
            prop_assert!(sq.is_trivial());
            prop_assert!(sq.phase() == 0 || sq.phase() == 2);
            prop_assert_eq!(if sq.phase() == 0 { 1 } else { -1 }, a.square_sign());
        }

        #[test]
        fn conjugation_matches_matrices(a in arb_pauli(3), g in arb_clifford(3)) {
            let c = a.conjugate_by(g).unwrap();
            let u = gate_matrix(g, 3);
            let ud = crate::dense::adjoint(&u);
            let m = mat_mul(&mat_mul(&u, &pauli_matrix(&a)), &ud);
            prop_assert!(mat_eq(&m, &pauli_matrix(&c), 1e-12));
        }

        #[test]
        fn conjugation_is_homomorphism(a in arb_pauli(4), b in arb_pauli(4), g in arb_clifford(4)) {
            let lhs = a.multiply(&b).unwrap().conjugate_by(g).unwrap();
            let rhs = a.conjugate_by(g).unwrap().multiply(&b.conjugate_by(g).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn conjugation_preserves_commutation(a in arb_pauli(4), b in arb_pauli(4), g in arb_clifford(4)) {
            let before = a.commutes(&b).unwrap();
            let after = a.conjugate_by(g).unwrap().commutes(&b.conjugate_by(g).unwrap()).unwrap();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn inverse_gate_undoes(a in arb_pauli(3), g in arb_clifford(3)) {
            let back = a.conjugate_by(g).unwrap().conjugate_by(g.inverse()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
