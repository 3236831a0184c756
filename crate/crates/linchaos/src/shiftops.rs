//! Weighted backward shift operators and orbit computation.
//!
//! A unilateral weighted backward shift acts by
//! (B_w x)_k = w_{k+1} x_{k+1}, so e_1 is annihilated and
//! T^n e_s = (prod_{i=s-n+1}^{s} w_i) e_{s-n} while n < s. The operator
//! norm of a backward shift on l^p or c0 is sup_k |w_k|, which is recorded
//! on construction and drives the certified tail propagation: after n steps
//! a tail bound t becomes at most t * (sup|w|)^n.
//!
//! Orbits are stored as log-domain norm trajectories, never as vectors:
//! the classifiers downstream only consume norms, and norms like 2^(k^2)
//! exist only in log domain.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logdomain::{log_add_exp, Sign, SignedLog, LOG_ZERO};
use crate::seqspace::{Laterality, SeqVector, SpaceTag, TruncationPolicy};

#[derive(Debug, Error, PartialEq)]
pub enum ShiftError {
    #[error("cesaro exponent must be positive (got {0})")]
    BadAlpha(f64),
    #[error("rolewicz weight must be nonzero")]
    ZeroWeight,
    #[error("{0} weights are only defined on unilateral spaces")]
    UnilateralOnly(&'static str),
    #[error("operator and vector live in different spaces")]
    SpaceMismatch,
    #[error("weight table must be nonempty with finite entries")]
    BadTable,
    #[error("space error: {0}")]
    Space(#[from] crate::seqspace::SpaceError),
    #[error("probe needs a nonempty sample set")]
    EmptySamples,
}

/// How the weight sequence w_k (k >= 2 unilateral, k in Z bilateral) is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum WeightRule {
    /// w_k = c for all k (Rolewicz operator when |c| > 1).
    Constant { c: f64 },
    /// w_k = (k/(k-1))^alpha, the Cesaro-bounded example shift.
    Cesaro { alpha: f64 },
    /// Explicit w_2..w_{len+1} plus a bound on all remaining |w_k|.
    Table { weights: Vec<f64>, rest_bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftOperator {
    pub space: SpaceTag,
    pub rule: WeightRule,
    pub name: String,
    /// ln sup_k |w_k|; equals the log operator norm for a backward shift.
    sup_log: f64,
}

impl ShiftOperator {
    /// The shift Te_1 = 0, Te_k = (k/(k-1))^alpha e_{k-1} on l^p(N).
    ///
    /// The absolute-Cesaro-boundedness hypothesis of the source example
    /// needs alpha < 1/p; see [`cesaro_hypothesis_holds`].
    pub fn cesaro(alpha: f64, p: f64) -> Result<ShiftOperator, ShiftError> {
        if !(alpha > 0.0) {
            return Err(ShiftError::BadAlpha(alpha));
        }
        let space = SpaceTag::lp(p)?;
        Ok(ShiftOperator {
            space,
            rule: WeightRule::Cesaro { alpha },
            name: format!("cesaro(alpha={alpha},p={p})"),
            // weights decrease in k, so sup = w_2 = 2^alpha
            sup_log: alpha * std::f64::consts::LN_2,
        })
    }

    /// Constant-weight backward shift c*B.
    pub fn rolewicz(c: f64, space: SpaceTag) -> Result<ShiftOperator, ShiftError> {
        if c == 0.0 {
            return Err(ShiftError::ZeroWeight);
        }
        Ok(ShiftOperator {
            space,
            rule: WeightRule::Constant { c },
            name: format!("rolewicz(c={c})"),
            sup_log: c.abs().ln(),
        })
    }

    /// Explicit weight table w_2..w_{len+1} with a bound on the rest.
    pub fn from_table(
        space: SpaceTag,
        weights: Vec<f64>,
        rest_bound: f64,
        name: impl Into<String>,
    ) -> Result<ShiftOperator, ShiftError> {
        if space.laterality != Laterality::Unilateral {
            return Err(ShiftError::UnilateralOnly("table"));
        }
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite()) || !rest_bound.is_finite() {
            return Err(ShiftError::BadTable);
        }
        let sup = weights.iter().fold(rest_bound.abs(), |acc, w| acc.max(w.abs()));
        Ok(ShiftOperator {
            space,
            rule: WeightRule::Table { weights, rest_bound },
            name: name.into(),
            sup_log: sup.ln(),
        })
    }

    pub fn is_unilateral(&self) -> bool {
        self.space.laterality == Laterality::Unilateral
    }

    /// ln of the operator norm bound sup_k |w_k|.
    pub fn sup_weight_log(&self) -> f64 {
        self.sup_log
    }

    /// The exact weight w_k as (sign, log|w_k|); `None` when the rule only
    /// bounds it (beyond a finite table). Zero weights are `Some` with
    /// log_abs = -inf never occurring here, since rules exclude zeros.
    pub fn weight_signed_log(&self, k: i64) -> Option<SignedLog> {
        match &self.rule {
            WeightRule::Constant { c } => Some(SignedLog {
                sign: Sign::of(*c),
                log_abs: c.abs().ln(),
            }),
            WeightRule::Cesaro { alpha } => {
                if k < 2 {
                    return None;
                }
                let kf = k as f64;
                Some(SignedLog::positive(alpha * (kf.ln() - (kf - 1.0).ln())))
            }
            WeightRule::Table { weights, .. } => {
                if k < 2 {
                    return None;
                }
                weights.get((k - 2) as usize).map(|w| SignedLog {
                    sign: Sign::of(*w),
                    log_abs: w.abs().ln(),
                })
            }
        }
    }

    /// One application of the shift; the tail bound picks up sup|w|, and
    /// coefficients whose weight is only bounded (beyond a table) are moved
    /// into the tail with that bound.
    pub fn apply(&self, x: &SeqVector) -> Result<SeqVector, ShiftError> {
        if x.space() != self.space {
            return Err(ShiftError::SpaceMismatch);
        }
        let unilateral = self.is_unilateral();
        let mut entries: Vec<(i64, Sign, f64)> = Vec::with_capacity(x.support_len());
        let mut unknown_logs: Vec<f64> = Vec::new();
        for (k, c) in x.iter() {
            if unilateral && k <= 1 {
                continue; // e_1 dies
            }
            match self.weight_signed_log(k) {
                Some(w) => {
                    let scaled = c.mul(w);
                    entries.push((k - 1, scaled.sign, scaled.log_abs));
                }
                None => unknown_logs.push(c.log_abs),
            }
        }
        let mut out = SeqVector::from_log_entries(self.space, &entries)?;
        let mut tail = x.tail_log() + self.sup_log;
        if !unknown_logs.is_empty() {
            let unknown_norm = self.space.combine_log_norm(unknown_logs) + self.sup_log;
            tail = log_add_exp(tail, unknown_norm);
        }
        out = out.with_tail_log(tail);
        Ok(out)
    }

    /// Orbit of `x` under repeated application, as a log-norm trajectory
    /// with per-step certified truncation error.
    pub fn orbit(
        &self,
        x: &SeqVector,
        n: usize,
        policy: TruncationPolicy,
    ) -> Result<OrbitRecord, ShiftError> {
        if x.space() != self.space {
            return Err(ShiftError::SpaceMismatch);
        }
        let mut log_norms = Vec::with_capacity(n + 1);
        let mut step_error_log = Vec::with_capacity(n + 1);
        let mut cesaro_log_means = Vec::with_capacity(n);
        let mut v = x.clone();
        log_norms.push(v.log_norm());
        step_error_log.push(v.tail_log());
        let mut mean_acc = LOG_ZERO;
        for step in 1..=n {
            v = self.apply(&v)?;
            if !matches!(policy, TruncationPolicy::Exact) {
                v = v.truncate(policy);
            }
            let ln = v.log_norm();
            log_norms.push(ln);
            step_error_log.push(v.tail_log());
            mean_acc = log_add_exp(mean_acc, ln);
            cesaro_log_means.push(mean_acc - (step as f64).ln());
        }
        Ok(OrbitRecord {
            operator: self.name.clone(),
            initial: x.digest(),
            horizon: n,
            log_norms,
            cesaro_log_means,
            step_error_log,
        })
    }
}

/// Returns true when the parameters satisfy the boundedness hypothesis
/// 0 < alpha < 1/p of the Cesaro shift example.
pub fn cesaro_hypothesis_holds(alpha: f64, p: f64) -> bool {
    alpha > 0.0 && p >= 1.0 && alpha < 1.0 / p
}

/// Log-domain norm trajectory of one orbit.
///
/// `log_norms[n]` is the log norm of the stored coefficients of T^n x — a
/// certified lower bound for the true norm. `step_error_log[n]` is the log
/// of the certified bound on the norm contribution of omitted coordinates
/// (-inf when the step is exact), so the certified upper bound is the
/// triangle combination of the two. `cesaro_log_means[n-1]` is
/// log((1/n) sum_{j=1}^{n} ||T^j x||) over the stored norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub operator: String,
    pub initial: String,
    pub horizon: usize,
    pub log_norms: Vec<f64>,
    pub cesaro_log_means: Vec<f64>,
    pub step_error_log: Vec<f64>,
}

impl OrbitRecord {
    /// A trajectory given directly by its log norms (used for the
    /// constructions that start from a prescribed irregular orbit).
    pub fn synthetic(name: impl Into<String>, log_norms: Vec<f64>) -> OrbitRecord {
        let horizon = log_norms.len().saturating_sub(1);
        let mut mean_acc = LOG_ZERO;
        let mut cesaro_log_means = Vec::with_capacity(horizon);
        for (step, &ln) in log_norms.iter().enumerate().skip(1) {
            mean_acc = log_add_exp(mean_acc, ln);
            cesaro_log_means.push(mean_acc - (step as f64).ln());
        }
        let step_error_log = vec![LOG_ZERO; log_norms.len()];
        OrbitRecord {
            operator: name.into(),
            initial: "synthetic".into(),
            horizon,
            log_norms,
            cesaro_log_means,
            step_error_log,
        }
    }

    /// Certified lower bound on log||T^n x||: the stored coefficient norm.
    pub fn cert_lower_log(&self, n: usize) -> f64 {
        self.log_norms[n]
    }

    /// Certified upper bound on log||T^n x||, by the triangle inequality
    /// against the omitted-coordinate bound.
    pub fn cert_upper_log(&self, n: usize) -> f64 {
        log_add_exp(self.log_norms[n], self.step_error_log[n])
    }

    /// Certified upper bounds on the Cesaro means, accounting per step for
    /// the truncation error.
    pub fn cert_upper_mean_logs(&self) -> Vec<f64> {
        let mut acc = LOG_ZERO;
        let mut out = Vec::with_capacity(self.horizon);
        for n in 1..=self.horizon {
            acc = log_add_exp(acc, self.cert_upper_log(n));
            out.push(acc - (n as f64).ln());
        }
        out
    }

    /// CSV with columns n, log_norm, cesaro_log_mean, step_error_log.
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,log_norm,cesaro_log_mean,step_error_log")?;
        for n in 0..=self.horizon {
            let mean = if n == 0 {
                String::new()
            } else {
                fmt_log(self.cesaro_log_means[n - 1])
            };
            writeln!(
                w,
                "{},{},{},{}",
                n,
                fmt_log(self.log_norms[n]),
                mean,
                fmt_log(self.step_error_log[n])
            )?;
        }
        Ok(())
    }
}

fn fmt_log(v: f64) -> String {
    if v == LOG_ZERO {
        "-inf".to_string()
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerBoundVerdict {
    /// Evidence exceeded the blow-up factor.
    Unbounded,
    /// No blow-up seen at this horizon; explicitly inconclusive.
    BoundedLooking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerBoundProbe {
    pub verdict: PowerBoundVerdict,
    /// log of max over samples and n <= N of ||T^n x|| / ||x||.
    pub evidence_log: f64,
    pub witness: Option<(String, usize)>,
    pub blowup_factor: f64,
}

pub const DEFAULT_BLOWUP_FACTOR: f64 = 1e3;

/// Searches the samples for norm growth; an `Unbounded` verdict is certified
/// (it uses lower bounds), `BoundedLooking` is only a failure to refute.
pub fn power_bounded_probe(
    op: &ShiftOperator,
    n: usize,
    samples: &[SeqVector],
    blowup_factor: f64,
) -> Result<PowerBoundProbe, ShiftError> {
    if samples.is_empty() {
        return Err(ShiftError::EmptySamples);
    }
    let mut evidence_log = LOG_ZERO;
    let mut witness = None;
    for x in samples {
        let base = x.log_norm();
        if base == LOG_ZERO {
            continue;
        }
        let orbit = op.orbit(x, n, TruncationPolicy::Exact)?;
        for step in 1..=n {
            let ratio = orbit.cert_lower_log(step) - base;
            if ratio > evidence_log {
                evidence_log = ratio;
                witness = Some((x.digest(), step));
            }
        }
    }
    let verdict = if evidence_log >= blowup_factor.ln() {
        PowerBoundVerdict::Unbounded
    } else {
        PowerBoundVerdict::BoundedLooking
    };
    Ok(PowerBoundProbe { verdict, evidence_log, witness, blowup_factor })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CesaroBoundProbe {
    /// log of sup over samples and N' <= N of the normalized Cesaro mean.
    pub sup_log: f64,
    pub argmax: Option<(String, usize)>,
}

/// Estimates sup_{x, N' <= N} (1/N') sum_{j<=N'} ||T^j x|| / ||x||, the
/// finite-horizon evidence for or against absolute Cesaro boundedness.
pub fn abs_cesaro_bounded_probe(
    op: &ShiftOperator,
    n: usize,
    samples: &[SeqVector],
) -> Result<CesaroBoundProbe, ShiftError> {
    if samples.is_empty() {
        return Err(ShiftError::EmptySamples);
    }
    let mut sup_log = LOG_ZERO;
    let mut argmax = None;
    for x in samples {
        let base = x.log_norm();
        if base == LOG_ZERO {
            continue;
        }
        let orbit = op.orbit(x, n, TruncationPolicy::Exact)?;
        for (i, &mean) in orbit.cesaro_log_means.iter().enumerate() {
            let normalized = mean - base;
            if normalized > sup_log {
                sup_log = normalized;
                argmax = Some((x.digest(), i + 1));
            }
        }
    }
    Ok(CesaroBoundProbe { sup_log, argmax })
}
