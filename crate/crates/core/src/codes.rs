//! Hamming [7,4,3] machinery and stabilizer codes.
//!
//! The canonical Hamming check matrix has column `j` equal to the binary expansion of
//! `j` (top row most significant), so a single-bit syndrome read as a number is the
//! 1-based position of the flipped bit. The alternative column order used by the
//! encoder is available through [`EQ16_TO_EQ1`].

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pauli::{Pauli1, PauliString};

/// Canonical Hamming parity-check matrix.
pub const HAMMING_H: [[u8; 7]; 3] = [
    [0, 0, 0, 1, 1, 1, 1],
    [0, 1, 1, 0, 0, 1, 1],
    [1, 0, 1, 0, 1, 0, 1],
];

/// Column-permuted check matrix in which the first three positions carry the data
/// of the even subcode.
pub const HAMMING_H_SYSTEMATIC: [[u8; 7]; 3] = [
    [1, 0, 0, 1, 0, 1, 1],
    [0, 1, 0, 1, 1, 0, 1],
    [0, 0, 1, 1, 1, 1, 0],
];

/// `EQ16_TO_EQ1[k]` is the canonical (1-based) position of systematic position `k+1`.
/// Reversing the row order of the systematic matrix and reading each column as a
/// binary number gives this relabeling.
pub const EQ16_TO_EQ1: [usize; 7] = [1, 2, 4, 7, 6, 5, 3];

fn check_len(word: &[bool], n: usize) -> Result<()> {
    if word.len() != n {
        return Err(Error::Dimension { expected: n, found: word.len() });
    }
    Ok(())
}

/// `H · word` over GF(2) for the canonical matrix.
pub fn hamming_syndrome(word: &[bool]) -> Result<[bool; 3]> {
    check_len(word, 7)?;
    let mut s = [false; 3];
    for (r, row) in HAMMING_H.iter().enumerate() {
        s[r] = row.iter().zip(word).filter(|(&h, &w)| h == 1 && w).count() % 2 == 1;
    }
    Ok(s)
}

/// The syndrome read as a binary number, 0 for a codeword.
pub fn hamming_syndrome_index(word: &[bool]) -> Result<usize> {
    let s = hamming_syndrome(word)?;
    Ok(s.iter().fold(0, |acc, &b| (acc << 1) | b as usize))
}

/// Syndrome index without length checking; `word` must have at least 7 entries.
pub(crate) fn syndrome_index7(word: &[bool]) -> usize {
    // column j of HAMMING_H is binary j, so the syndrome is the XOR of set positions
    word.iter().take(7).enumerate().filter(|(_, &b)| b).fold(0, |acc, (i, _)| acc ^ (i + 1))
}

/// Correct at most one flipped bit. Returns the corrected word and the 1-based position
/// that was flipped, if any.
pub fn hamming_decode(word: &[bool]) -> Result<(Vec<bool>, Option<usize>)> {
    let idx = hamming_syndrome_index(word)?;
    let mut out = word.to_vec();
    if idx == 0 {
        Ok((out, None))
    } else {
        out[idx - 1] = !out[idx - 1];
        Ok((out, Some(idx)))
    }
}

/// Parity of the Hamming-corrected word; the logical value of a destructive readout.
pub fn hamming_decoded_parity(word: &[bool]) -> Result<bool> {
    let (w, _) = hamming_decode(word)?;
    Ok(w.iter().filter(|&&b| b).count() % 2 == 1)
}

pub(crate) fn decoded_parity7(word: &[bool]) -> bool {
    let idx = syndrome_index7(word);
    let par = word.iter().take(7).filter(|&&b| b).count() % 2 == 1;
    par ^ (idx != 0)
}

/// All 16 codewords of the canonical Hamming code.
pub fn hamming_codewords() -> Vec<[bool; 7]> {
    (0u32..128)
        .map(|m| {
            let mut w = [false; 7];
            for (i, b) in w.iter_mut().enumerate() {
                *b = (m >> (6 - i)) & 1 == 1;
            }
            w
        })
        .filter(|w| syndrome_index7(w) == 0)
        .collect()
}

/// Even-weight (or odd-weight) codewords: the supports of the two logical basis states.
pub fn hamming_codewords_with_parity(odd: bool) -> Vec<[bool; 7]> {
    hamming_codewords().into_iter().filter(|w| (w.iter().filter(|&&b| b).count() % 2 == 1) == odd).collect()
}

/// Rank over GF(2) of a set of equal-length rows.
pub fn gf2_rank(rows: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c]) else { continue };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= *b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Linear code given by a full-rank parity-check matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCode {
    n: usize,
    checks: Vec<Vec<bool>>,
}

impl ClassicalCode {
    pub fn new(checks: Vec<Vec<bool>>) -> Result<Self> {
        let n = checks.first().map(|r| r.len()).unwrap_or(0);
        if checks.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidCode("ragged check matrix".into()));
        }
        if gf2_rank(&checks) != checks.len() {
            return Err(Error::InvalidCode("check matrix is not full rank".into()));
        }
        Ok(ClassicalCode { n, checks })
    }

    pub fn hamming() -> Self {
        Self::from_rows(&HAMMING_H)
    }

    pub fn hamming_systematic() -> Self {
        Self::from_rows(&HAMMING_H_SYSTEMATIC)
    }

    fn from_rows(rows: &[[u8; 7]; 3]) -> Self {
        let checks = rows.iter().map(|r| r.iter().map(|&b| b == 1).collect()).collect();
        ClassicalCode::new(checks).expect("built-in matrix")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn checks(&self) -> &[Vec<bool>] {
        &self.checks
    }

    pub fn syndrome(&self, word: &[bool]) -> Result<Vec<bool>> {
        check_len(word, self.n)?;
        Ok(self
            .checks
            .iter()
            .map(|row| row.iter().zip(word).filter(|(&h, &w)| h && w).count() % 2 == 1)
            .collect())
    }

    /// All codewords (kernel of the check matrix); exponential in `n`.
    pub fn codewords(&self) -> Vec<Vec<bool>> {
        (0u64..(1 << self.n))
            .map(|m| (0..self.n).map(|i| (m >> (self.n - 1 - i)) & 1 == 1).collect::<Vec<bool>>())
            .filter(|w| self.syndrome(w).unwrap().iter().all(|&b| !b))
            .collect()
    }

    /// Copy with columns relabeled: column `k` of `self` moves to `perm[k]` (1-based).
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        let checks = self
            .checks
            .iter()
            .map(|row| {
                let mut out = vec![false; self.n];
                for (k, &b) in row.iter().enumerate() {
                    out[perm[k] - 1] = b;
                }
                out
            })
            .collect();
        ClassicalCode { n: self.n, checks }
    }
}

/// Decoder attached to a stabilizer code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoder {
    /// CSS Hamming rule: each syndrome half read as a position.
    Steane,
    /// Precomputed syndrome → minimum-weight correction.
    Table(HashMap<Vec<bool>, PauliString>),
}

#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub generators: Vec<PauliString>,
    pub logical_z: Vec<PauliString>,
    pub logical_x: Vec<PauliString>,
    decoder: Option<Decoder>,
}

impl fmt::Debug for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StabilizerCode({}, n={}, k={})", self.name, self.n, self.k)
    }
}

fn symplectic(p: &PauliString) -> Vec<bool> {
    let n = p.len();
    (0..n).map(|q| p.z(q)).chain((0..n).map(|q| p.x(q))).collect()
}

impl StabilizerCode {
    /// Construct and validate.
    pub fn new(
        name: &str,
        generators: Vec<PauliString>,
        logical_z: Vec<PauliString>,
        logical_x: Vec<PauliString>,
    ) -> Result<Self> {
        let code = Self::new_unchecked(name, generators, logical_z, logical_x);
        validate_code(&code)?;
        Ok(code)
    }

    /// Construct without validation; use [`validate_code`] to inspect the result.
    pub fn new_unchecked(
        name: &str,
        generators: Vec<PauliString>,
        logical_z: Vec<PauliString>,
        logical_x: Vec<PauliString>,
    ) -> Self {
        let n = generators.first().or(logical_z.first()).map(|g| g.len()).unwrap_or(0);
        let k = logical_z.len();
        StabilizerCode { name: name.to_string(), n, k, generators, logical_z, logical_x, decoder: None }
    }

    pub fn with_decoder(mut self, d: Decoder) -> Self {
        self.decoder = Some(d);
        self
    }

    pub fn decoder(&self) -> Option<&Decoder> {
        self.decoder.as_ref()
    }

    /// `[H_Z | H_X]`: row i marks where generator i has a Z component, then an X component.
    pub fn hbar(&self) -> Vec<Vec<bool>> {
        self.generators.iter().map(symplectic).collect()
    }

    /// True if each generator is purely X-type or purely Z-type.
    pub fn is_css(&self) -> bool {
        self.generators.iter().all(|g| g.x_bits().is_zero() || g.z_bits().is_zero())
    }

    /// Membership of `p` (ignoring phase) in the group generated by the stabilizers.
    pub fn in_stabilizer_group(&self, p: &PauliString) -> bool {
        if p.is_trivial() {
            return true;
        }
        let mut rows = self.hbar();
        let r = gf2_rank(&rows);
        rows.push(symplectic(p));
        gf2_rank(&rows) == r
    }

    /// Which logical operators `p` fails to commute with: `(flips_z, flips_x)` per
    /// logical qubit. `p` anticommuting with `Z̄_i` means it acts as a logical bit flip.
    pub fn logical_action(&self, p: &PauliString) -> Vec<(bool, bool)> {
        self.logical_z
            .iter()
            .zip(&self.logical_x)
            .map(|(z, x)| (!p.commutes_unchecked(z), !p.commutes_unchecked(x)))
            .collect()
    }

    /// True if `p` commutes with the stabilizer yet acts nontrivially on the logical qubits.
    pub fn is_logical_error(&self, p: &PauliString) -> bool {
        self.logical_action(p).iter().any(|&(a, b)| a || b)
    }

    /// Lowest-weight element of `p` times the stabilizer group (exhaustive, 2^(n-k) terms).
    pub fn min_weight_representative(&self, p: &PauliString) -> PauliString {
        let m = self.generators.len();
        let mut best = p.clone();
        for mask in 1u64..(1 << m) {
            let mut q = p.clone();
            for (i, g) in self.generators.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    q.mul_assign_unchecked(g);
                }
            }
            if q.weight() < best.weight() {
                best = q;
            }
        }
        best.with_phase(0)
    }

    pub fn syndrome_of(&self, error: &PauliString) -> Result<Vec<bool>> {
        if error.len() != self.n {
            return Err(Error::Dimension { expected: self.n, found: error.len() });
        }
        Ok(self.generators.iter().map(|g| !g.commutes_unchecked(error)).collect())
    }

    pub fn decode_syndrome(&self, syndrome: &[bool]) -> Result<PauliString> {
        let m = self.generators.len();
        if syndrome.len() != m {
            return Err(Error::Dimension { expected: m, found: syndrome.len() });
        }
        match &self.decoder {
            Some(Decoder::Steane) => {
                let idx = |s: &[bool]| s.iter().fold(0usize, |a, &b| (a << 1) | b as usize);
                let (xpos, zpos) = (idx(&syndrome[..3]), idx(&syndrome[3..6]));
                let mut c = PauliString::identity(self.n);
                if xpos > 0 {
                    c.set(xpos - 1, Pauli1::X);
                }
                if zpos > 0 {
                    let cur = c.get(zpos - 1);
                    c.set(zpos - 1, if cur == Pauli1::X { Pauli1::Y } else { Pauli1::Z });
                }
                Ok(c)
            }
            Some(Decoder::Table(t)) => t
                .get(syndrome)
                .cloned()
                .ok_or_else(|| Error::Unsupported(format!("syndrome {syndrome:?} not in lookup table"))),
            None => Err(Error::Unsupported(format!("no decoder registered for code {}", self.name))),
        }
    }

    /// Build a lookup-table decoder covering every error of weight ≤ `t`. Syndrome
    /// collisions are accepted only when the two errors differ by a stabilizer.
    pub fn build_lookup_table(&self, t: usize) -> Result<Decoder> {
        let mut table: HashMap<Vec<bool>, PauliString> = HashMap::new();
        let n = self.n;
        let mut by_weight: Vec<PauliString> = vec![PauliString::identity(n)];
        for w in 0..=t {
            if w > 0 {
                let mut next = Vec::new();
                for e in &by_weight {
                    let last = e.support().last().map(|&q| q + 1).unwrap_or(0);
                    for q in last..n {
                        for p in Pauli1::NONTRIVIAL {
                            let mut f = e.clone();
                            f.set(q, p);
                            next.push(f);
                        }
                    }
                }
                by_weight = next;
            }
            for e in &by_weight {
                let s = self.syndrome_of(e)?;
                match table.get(&s) {
                    None => {
                        table.insert(s, e.clone());
                    }
                    Some(prev) => {
                        let prod = prev.multiply(e)?;
                        if !self.in_stabilizer_group(&prod) {
                            return Err(Error::InvalidCode(format!(
                                "errors {prev} and {e} share a syndrome but differ by a logical operator"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Decoder::Table(table))
    }

    /// Text form: generators, then `.logical_z` / `.logical_x` sections.
    pub fn to_text(&self) -> String {
        let mut s = format!(".code {}\n", self.name);
        for g in &self.generators {
            s.push_str(&format!("{g}\n"));
        }
        s.push_str(".logical_z\n");
        for g in &self.logical_z {
            s.push_str(&format!("{g}\n"));
        }
        s.push_str(".logical_x\n");
        for g in &self.logical_x {
            s.push_str(&format!("{g}\n"));
        }
        s
    }

    /// Parse the text form and validate. Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut name = "unnamed".to_string();
        let (mut gens, mut lz, mut lx) = (Vec::new(), Vec::new(), Vec::new());
        let mut section = 0;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix(".code") {
                name = rest.trim().to_string();
                continue;
            }
            match line {
                ".logical_z" => section = 1,
                ".logical_x" => section = 2,
                _ => {
                    let p: PauliString =
                        line.parse().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
                    [&mut gens, &mut lz, &mut lx][section].push(p);
                }
            }
        }
        let code = StabilizerCode::new(&name, gens, lz, lx)?;
        let t = 1;
        let dec = code.build_lookup_table(t)?;
        Ok(code.with_decoder(dec))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Check every structural invariant; the first violation is reported as an error.
pub fn validate_code(code: &StabilizerCode) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidCode(m));
    let n = code.n;
    let all = code.generators.iter().chain(&code.logical_z).chain(&code.logical_x);
    for p in all {
        if p.len() != n {
            return bad(format!("{p} has length {} but the code has n={n}", p.len()));
        }
    }
    if code.logical_z.len() != code.logical_x.len() {
        return bad("logical Z and X lists differ in length".into());
    }
    if code.generators.len() + code.k != n {
        return bad(format!("{} generators and k={} do not add up to n={n}", code.generators.len(), code.k));
    }
    for (i, g) in code.generators.iter().enumerate() {
        if g.square_sign() != 1 {
            return bad(format!("generator {} is not Hermitian", i + 1));
        }
        for (j, h) in code.generators.iter().enumerate().skip(i + 1) {
            if !g.commutes_unchecked(h) {
                return bad(format!("generators {} and {} anticommute", i + 1, j + 1));
            }
        }
    }
    if gf2_rank(&code.hbar()) != code.generators.len() {
        return bad("generators are dependent".into());
    }
    for (li, l) in code.logical_z.iter().chain(&code.logical_x).enumerate() {
        for (gi, g) in code.generators.iter().enumerate() {
            if !l.commutes_unchecked(g) {
                return bad(format!("logical operator {} anticommutes with generator {}", li + 1, gi + 1));
            }
        }
    }
    for (i, zi) in code.logical_z.iter().enumerate() {
        for (j, xj) in code.logical_x.iter().enumerate() {
            if zi.commutes_unchecked(xj) != (i != j) {
                return bad(format!("anticommutation relation violated between Z{} and X{}", i + 1, j + 1));
            }
        }
        for (j, zj) in code.logical_z.iter().enumerate().skip(i + 1) {
            if !zi.commutes_unchecked(zj) || !code.logical_x[i].commutes_unchecked(&code.logical_x[j]) {
                return bad(format!("logical operators {} and {} fail to commute", i + 1, j + 1));
            }
        }
    }
    Ok(())
}

/// Seven-qubit code with the six generators in canonical Hamming order
/// (three Z-type, then three X-type).
pub fn steane_code() -> StabilizerCode {
    let gens = ["IIIZZZZ", "IZZIIZZ", "ZIZIZIZ", "IIIXXXX", "IXXIIXX", "XIXIXIX"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    StabilizerCode::new(
        "steane",
        gens,
        vec!["ZZZZZZZ".parse().unwrap()],
        vec!["XXXXXXX".parse().unwrap()],
    )
    .expect("steane code is valid")
    .with_decoder(Decoder::Steane)
}

/// Weight-3 logical representatives for the seven-qubit code, obtained by reducing
/// `ZZZZZZZ` and `XXXXXXX` modulo the stabilizer (`(Z̄, X̄)`).
pub fn steane_weight3_logicals() -> (PauliString, PauliString) {
    let c = steane_code();
    (c.min_weight_representative(&c.logical_z[0]), c.min_weight_representative(&c.logical_x[0]))
}

/// Five-qubit perfect code, used to exercise the generic table decoder.
pub fn five_qubit_code() -> StabilizerCode {
    let gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"].iter().map(|s| s.parse().unwrap()).collect();
    let code = StabilizerCode::new("five", gens, vec!["ZZZZZ".parse().unwrap()], vec!["XXXXX".parse().unwrap()])
        .expect("five-qubit code is valid");
    let dec = code.build_lookup_table(1).expect("distance 3");
    code.with_decoder(dec)
}
