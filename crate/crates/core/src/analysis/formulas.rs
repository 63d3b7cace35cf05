use std::f64::consts::E;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FlowTrace {
    pub p0: f64,
    pub coefficient: f64,
    pub levels: usize,
    /// Error rate at levels `0..=levels`.
    pub p_per_level: Vec<f64>,
}

impl FlowTrace {
    pub fn last(&self) -> f64 {
        *self.p_per_level.last().expect("level 0 is always present")
    }
}

/// Iterate `p ↦ coefficient · p²` for `levels` levels of concatenation.
pub fn concatenation_flow(p0: f64, levels: usize, coefficient: f64) -> Result<FlowTrace> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::Domain(format!("p0 = {p0} is not a probability")));
    }
    if !(coefficient > 0.0) {
        return Err(Error::Domain(format!("coefficient {coefficient} must be positive")));
    }
    let mut p_per_level = Vec::with_capacity(levels + 1);
    let mut p = p0;
    p_per_level.push(p);
    for _ in 0..levels {
        p = coefficient * p * p;
        p_per_level.push(p);
    }
    Ok(FlowTrace { p0, coefficient, levels, p_per_level })
}

fn check_eps_b(eps: f64, b: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps = {eps} must lie in (0, 1)")));
    }
    if !(b > 0.0) {
        return Err(Error::Domain(format!("b = {b} must be positive")));
    }
    Ok(())
}

/// `ln` of `(t^b ε)^(t+1)`.
fn log_block_error(eps: f64, b: f64, t: f64) -> f64 {
    (t + 1.0) * (b * t.ln() + eps.ln())
}

/// Block error probability `(t^b ε)^(t+1)` of a code correcting `t` errors whose
/// recovery has `~t^b` fault locations.
pub fn block_error_tradeoff(eps: f64, b: f64, t: f64) -> Result<f64> {
    check_eps_b(eps, b)?;
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("t = {t} must be at least 1")));
    }
    Ok(log_block_error(eps, b, t).exp())
}

/// Closed-form optimum `t* = e⁻¹ ε^(−1/b)`.
pub fn optimal_t(eps: f64, b: f64) -> Result<f64> {
    check_eps_b(eps, b)?;
    Ok(eps.powf(-1.0 / b) / E)
}

/// Closed-form minimum `exp(−e⁻¹ b ε^(−1/b))`.
pub fn min_block_error(eps: f64, b: f64) -> Result<f64> {
    check_eps_b(eps, b)?;
    Ok((-b * eps.powf(-1.0 / b) / E).exp())
}

/// Golden-section minimization of `(t^b ε)^(t+1)` over real `t ≥ 1`. The log is
/// convex there, so the search converges to the global minimum.
/// Returns `(t, value)`.
pub fn numeric_optimum(eps: f64, b: f64) -> Result<(f64, f64)> {
    check_eps_b(eps, b)?;
    let f = |t: f64| log_block_error(eps, b, t);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (1.0, eps.powf(-1.0 / b).max(1.0) + 1.0);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > 1e-12 * hi {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let t = (lo + hi) / 2.0;
    Ok((t, f(t).exp()))
}

/// Largest per-gate error rate for which an optimally chosen code keeps the block
/// error per cycle near `1/T`: `ε = (e ln T / b)^(−b)`.
pub fn allowed_error_rate(horizon: f64, b: f64) -> Result<f64> {
    if !(horizon > 1.0) || !(b > 0.0) {
        return Err(Error::Domain(format!("need T > 1 and b > 0, got T = {horizon}, b = {b}")));
    }
    Ok((E * horizon.ln() / b).powf(-b))
}

/// Growth exponent of the block size per doubling of the correctable distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BlockExponent {
    /// `log₂ 7`, concatenated Steane code.
    #[default]
    Log2Seven,
    /// `log n / log(t+1)` for an `[[n, 1]]` code correcting `t` errors.
    Code { n: u32, t: u32 },
}

impl BlockExponent {
    pub fn value(self) -> f64 {
        match self {
            BlockExponent::Log2Seven => 7f64.log2(),
            BlockExponent::Code { n, t } => (n as f64).ln() / ((t + 1) as f64).ln(),
        }
    }
}

/// Block size `[log(ε₀T) / log(ε₀/ε)]^e` needed to run `T` cycles at error rate `ε`
/// below threshold `ε₀`. A bracket of at most 1 means one qubit suffices.
pub fn required_block_size(eps: f64, eps0: f64, horizon: f64, exponent: BlockExponent) -> Result<f64> {
    if !(eps > 0.0) || !(eps0 > 0.0) || !(horizon > 0.0) {
        return Err(Error::Domain(format!("need positive eps, eps0, T; got {eps}, {eps0}, {horizon}")));
    }
    if let BlockExponent::Code { n, t } = exponent {
        if n < 2 || t < 1 {
            return Err(Error::Domain(format!("code exponent needs n >= 2 and t >= 1, got n = {n}, t = {t}")));
        }
    }
    if eps >= eps0 {
        return Err(Error::AboveThreshold { eps, eps0 });
    }
    let bracket = (eps0 * horizon).ln() / (eps0 / eps).ln();
    Ok(if bracket <= 1.0 { 1.0 } else { bracket.powf(exponent.value()) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resources {
    pub qubits: u128,
    pub toffolis: u128,
}

/// Shor factoring of a `bits`-bit number: `5·bits` qubits and `38·bits³` Toffoli gates.
pub fn factoring_resources(bits: u64) -> Resources {
    let k = bits as u128;
    Resources { qubits: 5 * k, toffolis: 38 * k * k * k }
}
