use std::fmt;
use std::str::FromStr;

use super::memory::{estimate_logical_error_rate, LogicalErrorEstimate, MemoryConfig, MemoryProtocol};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::protocols::{sweep, RecoveryPolicy};

/// One-parameter noise family swept by the threshold search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NoiseFamily {
    /// Every location fails with probability ε.
    #[default]
    Uniform,
    StoreOnly,
    GateOnly,
}

impl NoiseFamily {
    pub fn model(self, eps: f64) -> NoiseModel {
        match self {
            NoiseFamily::Uniform => NoiseModel::uniform(eps),
            NoiseFamily::StoreOnly => NoiseModel::storage(eps),
            NoiseFamily::GateOnly => NoiseModel::gates(eps),
        }
    }
}

impl fmt::Display for NoiseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseFamily::Uniform => "uniform",
            NoiseFamily::StoreOnly => "store",
            NoiseFamily::GateOnly => "gate",
        })
    }
}

impl FromStr for NoiseFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(NoiseFamily::Uniform),
            "store" => Ok(NoiseFamily::StoreOnly),
            "gate" => Ok(NoiseFamily::GateOnly),
            _ => Err(Error::Config(format!("unknown noise family {s:?}"))),
        }
    }
}

/// Error rate the encoded qubit has to beat.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Reference {
    /// `p = ε`: a single unencoded location.
    #[default]
    Unencoded,
    /// `p = c·ε`.
    Scaled(f64),
}

impl Reference {
    pub fn at(self, eps: f64) -> f64 {
        match self {
            Reference::Unencoded => eps,
            Reference::Scaled(c) => c * eps,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdConfig {
    pub policy: RecoveryPolicy,
    pub family: NoiseFamily,
    pub reference: Reference,
    pub lo: f64,
    pub hi: f64,
    /// Trials at each point before escalation.
    pub min_trials: u64,
    /// Escalation multiplies the trial count by 4 up to this cap.
    pub max_trials: u64,
    pub rounds: usize,
    /// Bisection stops once `hi / lo ≤ 1 + rel_tol`.
    pub rel_tol: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            policy: RecoveryPolicy::default(),
            family: NoiseFamily::Uniform,
            reference: Reference::Unencoded,
            lo: 1e-4,
            hi: 1e-1,
            min_trials: 4_000,
            max_trials: 1_024_000,
            rounds: 1,
            rel_tol: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Encoded error rate significantly below the reference.
    Below,
    Above,
    Undecided,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdStep {
    pub eps: f64,
    pub side: Side,
    pub estimate: LogicalErrorEstimate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdEstimate {
    /// Geometric midpoint of the final bracket.
    pub crossing: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// False when the crossing lies outside the search range; the interval is then
    /// a one-sided bound.
    pub bracketed: bool,
    /// Fault locations in one noiseless recovery round.
    pub locations: usize,
    pub steps: Vec<ThresholdStep>,
}

impl ThresholdEstimate {
    pub fn relative_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / self.crossing
    }
}

fn decide(cfg: &ThresholdConfig, eps: f64, seed: u64) -> Result<ThresholdStep> {
    let mem = MemoryConfig { protocol: MemoryProtocol::Coded(cfg.policy), noise: cfg.family.model(eps), rounds: cfg.rounds };
    let target = cfg.reference.at(eps);
    let mut n = cfg.min_trials.max(1);
    loop {
        let estimate = estimate_logical_error_rate(&mem, n, seed)?;
        let side = if estimate.ci_high < target {
            Side::Below
        } else if estimate.ci_low > target {
            Side::Above
        } else {
            Side::Undecided
        };
        if side != Side::Undecided || n >= cfg.max_trials {
            return Ok(ThresholdStep { eps, side, estimate });
        }
        n = (n * 4).min(cfg.max_trials);
    }
}

/// Locate the noise strength at which the encoded memory matches the reference,
/// by bisection in `log ε`. Each point is sampled until its confidence interval
/// excludes the reference or the trial cap is hit. At the first undecided
/// midpoint the two quarter points are tried once and the search stops; it also
/// stops when the bracket is tight.
pub fn pseudothreshold(cfg: &ThresholdConfig, seed: u64) -> Result<ThresholdEstimate> {
    if !(cfg.lo > 0.0 && cfg.lo < cfg.hi && cfg.hi <= 1.0) {
        return Err(Error::Config(format!("bad bracket [{}, {}]", cfg.lo, cfg.hi)));
    }
    let locations = sweep::census(&cfg.policy)?.sites.len();
    let mut steps = Vec::new();
    let low = decide(cfg, cfg.lo, seed)?;
    let low_side = low.side;
    steps.push(low);
    if low_side != Side::Below {
        return Ok(ThresholdEstimate { crossing: cfg.lo, ci_low: 0.0, ci_high: cfg.lo, bracketed: false, locations, steps });
    }
    let high = decide(cfg, cfg.hi, seed)?;
    let high_side = high.side;
    steps.push(high);
    if high_side != Side::Above {
        return Ok(ThresholdEstimate { crossing: cfg.hi, ci_low: cfg.hi, ci_high: 1.0, bracketed: false, locations, steps });
    }
    let (mut lo, mut hi) = (cfg.lo, cfg.hi);
    while hi / lo > 1.0 + cfg.rel_tol {
        let mid = (lo * hi).sqrt();
        let step = decide(cfg, mid, seed)?;
        let side = step.side;
        steps.push(step);
        match side {
            Side::Below => lo = mid,
            Side::Above => hi = mid,
            Side::Undecided => {
                // the crossing is near `mid`; the quarter points may still be decidable
                let (q1, q3) = ((lo * mid).sqrt(), (mid * hi).sqrt());
                let (s1, s3) = (decide(cfg, q1, seed)?, decide(cfg, q3, seed)?);
                if s1.side == Side::Below {
                    lo = q1;
                }
                if s3.side == Side::Above {
                    hi = q3;
                }
                steps.push(s1);
                steps.push(s3);
                break;
            }
        }
    }
    Ok(ThresholdEstimate { crossing: (lo * hi).sqrt(), ci_low: lo, ci_high: hi, bracketed: true, locations, steps })
}

/// Crossing of the scalar recursion `p = c·ε²` with `p = ε`, by bisection to
/// adjacent floating-point numbers.
pub fn analytic_crossing(coefficient: f64) -> Result<f64> {
    if !(coefficient > 1.0) {
        return Err(Error::Domain(format!("coefficient {coefficient} has no crossing in (0, 1)")));
    }
    let g = |e: f64| coefficient * e * e - e;
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 1.0);
    loop {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if -g(lo) <= g(hi) { lo } else { hi })
}
