//! Small dense-matrix helpers used as an independent reference for the
//! symplectic and tableau code. Basis index convention matches [`crate::sim::StateVector`]:
//! qubit 0 is the most significant bit.

use num_complex::Complex64 as C64;

use crate::pauli::{Clifford, PauliString};

/// Square complex matrix, row-major.
#[derive(Clone, Debug)]
pub struct Mat {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        Mat { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.at(r, c) * v[c]).sum())
            .collect()
    }
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.dim, b.dim);
    let d = a.dim;
    let mut out = Mat::zeros(d);
    for i in 0..d {
        for k in 0..d {
            let aik = a.at(i, k);
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..d {
                out.data[i * d + j] += aik * b.at(k, j);
            }
        }
    }
    out
}

pub fn adjoint(a: &Mat) -> Mat {
    let d = a.dim;
    let mut out = Mat::zeros(d);
    for i in 0..d {
        for j in 0..d {
            out.set(j, i, a.at(i, j).conj());
        }
    }
    out
}

pub fn mat_eq(a: &Mat, b: &Mat, tol: f64) -> bool {
    a.dim == b.dim && a.data.iter().zip(&b.data).all(|(x, y)| (x - y).norm() <= tol)
}

fn i_pow(k: u8) -> C64 {
    match k & 3 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Dense matrix of `i^phase · prod X^x Z^z`.
pub fn pauli_matrix(p: &PauliString) -> Mat {
    let n = p.len();
    let dim = 1usize << n;
    let (mut xm, mut zm) = (0usize, 0usize);
    for q in 0..n {
        let bit = 1 << (n - 1 - q);
        if p.x(q) {
            xm |= bit;
        }
        if p.z(q) {
            zm |= bit;
        }
    }
    let ph = i_pow(p.phase());
    let mut m = Mat::zeros(dim);
    for b in 0..dim {
        let sign = if (zm & b).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        m.set(b ^ xm, b, ph * sign);
    }
    m
}

/// Embed a local 2^k × 2^k matrix acting on `qubits` (first listed = most significant
/// local bit) into an n-qubit operator.
pub fn embed(local: &Mat, qubits: &[usize], n: usize) -> Mat {
    let dim = 1usize << n;
    let k = qubits.len();
    assert_eq!(local.dim, 1 << k);
    let sub = |idx: usize| -> usize {
        qubits.iter().fold(0, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1))
    };
    let mask: usize = qubits.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    let mut m = Mat::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            if r & !mask == c & !mask {
                m.set(r, c, local.at(sub(r), sub(c)));
            }
        }
    }
    m
}

fn local(rows: &[&[C64]]) -> Mat {
    let dim = rows.len();
    let mut m = Mat::zeros(dim);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            m.set(r, c, *v);
        }
    }
    m
}

pub fn clifford_matrix(g: Clifford, n: usize) -> Mat {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i = C64::new(0.0, 1.0);
    match g {
        Clifford::H(q) => embed(&local(&[&[s, s], &[s, -s]]), &[q], n),
        Clifford::P(q) => embed(&local(&[&[l, o], &[o, i]]), &[q], n),
        Clifford::Pinv(q) => embed(&local(&[&[l, o], &[o, -i]]), &[q], n),
        Clifford::X(q) => embed(&local(&[&[o, l], &[l, o]]), &[q], n),
        Clifford::Z(q) => embed(&local(&[&[l, o], &[o, -l]]), &[q], n),
        Clifford::Cnot(c, t) => {
            let m = local(&[&[l, o, o, o], &[o, l, o, o], &[o, o, o, l], &[o, o, l, o]]);
            embed(&m, &[c, t], n)
        }
        Clifford::Cz(a, b) => {
            let m = local(&[&[l, o, o, o], &[o, l, o, o], &[o, o, l, o], &[o, o, o, -l]]);
            embed(&m, &[a, b], n)
        }
    }
}

/// Toffoli as a dense matrix, controls `a`, `b`, target `c`.
pub fn toffoli_matrix(a: usize, b: usize, c: usize, n: usize) -> Mat {
    let mut m = Mat::identity(8);
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    m.set(6, 6, o);
    m.set(7, 7, o);
    m.set(6, 7, l);
    m.set(7, 6, l);
    embed(&m, &[a, b, c], n)
}
