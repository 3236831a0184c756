//! Finitely supported vectors in l^p (1 <= p < infinity) and c0, unilateral
//! or bilateral, with log-domain norms and a certified truncation tail.
//!
//! Coefficients are stored sparsely as (sign, log|value|) pairs because the
//! constructive procedures manipulate magnitudes far outside f64 range. The
//! `tail_bound` of a vector is a hard contract: the norm computed from the
//! stored coefficients is a lower bound for the true norm, and combining it
//! with the tail bound gives a certified upper bound.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logdomain::{log_p_combine, log_p_norm, log_sum_exp, Sign, SignedLog, LOG_ZERO};

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("p-norm exponent must satisfy p >= 1 (got {0})")]
    InvalidExponent(f64),
    #[error("index {0} invalid for a unilateral space (need k >= 1)")]
    InvalidIndex(i64),
    #[error("operands live in different spaces")]
    MixedSpaces,
    #[error("coefficient at index {0} is not finite")]
    NonFiniteCoefficient(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    /// l^p norm with exponent p >= 1.
    PNorm { p: f64 },
    /// Supremum norm (c0-type spaces).
    SupNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Laterality {
    Unilateral,
    Bilateral,
}

/// Which sequence space a vector or operator lives on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTag {
    pub norm: NormKind,
    pub laterality: Laterality,
}

impl SpaceTag {
    pub fn lp(p: f64) -> Result<SpaceTag, SpaceError> {
        if !(p >= 1.0) {
            return Err(SpaceError::InvalidExponent(p));
        }
        Ok(SpaceTag { norm: NormKind::PNorm { p }, laterality: Laterality::Unilateral })
    }

    pub fn lp_bilateral(p: f64) -> Result<SpaceTag, SpaceError> {
        let mut tag = SpaceTag::lp(p)?;
        tag.laterality = Laterality::Bilateral;
        Ok(tag)
    }

    pub fn c0() -> SpaceTag {
        SpaceTag { norm: NormKind::SupNorm, laterality: Laterality::Unilateral }
    }

    pub fn c0_bilateral() -> SpaceTag {
        SpaceTag { norm: NormKind::SupNorm, laterality: Laterality::Bilateral }
    }

    pub fn valid_index(&self, k: i64) -> bool {
        match self.laterality {
            Laterality::Unilateral => k >= 1,
            Laterality::Bilateral => true,
        }
    }

    /// Log-domain norm of a family of coefficient log magnitudes.
    pub fn combine_log_norm<I: IntoIterator<Item = f64>>(&self, logs: I) -> f64 {
        match self.norm {
            NormKind::PNorm { p } => log_p_norm(logs, p),
            NormKind::SupNorm => logs.into_iter().fold(LOG_ZERO, f64::max),
        }
    }

    /// Certified upper bound from a coefficient norm and a tail bound on
    /// disjoint coordinates, both in log domain.
    pub fn combine_with_tail(&self, log_norm: f64, tail_log: f64) -> f64 {
        match self.norm {
            NormKind::PNorm { p } => log_p_combine(log_norm, tail_log, p),
            NormKind::SupNorm => log_norm.max(tail_log),
        }
    }
}

/// Norm report: the coefficient norm is a lower bound for the true norm,
/// `log_upper` a certified upper bound, and the flag marks vectors whose
/// tail bound exceeds half the coefficient norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormInfo {
    pub log_norm: f64,
    pub log_upper: f64,
    pub tail_dominated: bool,
}

/// A finitely supported sequence-space element with a certified tail bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqVector {
    space: SpaceTag,
    coeffs: BTreeMap<i64, SignedLog>,
    /// log of an upper bound on the norm of omitted coordinates.
    tail_log: f64,
}

pub const TAIL_FLAG_FRACTION: f64 = 0.5;

impl SeqVector {
    pub fn zero(space: SpaceTag) -> SeqVector {
        SeqVector { space, coeffs: BTreeMap::new(), tail_log: LOG_ZERO }
    }

    /// The standard basis vector e_k.
    pub fn basis(k: i64, space: SpaceTag) -> Result<SeqVector, SpaceError> {
        if !space.valid_index(k) {
            return Err(SpaceError::InvalidIndex(k));
        }
        let mut coeffs = BTreeMap::new();
        coeffs.insert(k, SignedLog::positive(0.0));
        Ok(SeqVector { space, coeffs, tail_log: LOG_ZERO })
    }

    pub fn from_entries(space: SpaceTag, entries: &[(i64, f64)]) -> Result<SeqVector, SpaceError> {
        let mut v = SeqVector::zero(space);
        for &(k, c) in entries {
            if !space.valid_index(k) {
                return Err(SpaceError::InvalidIndex(k));
            }
            if !c.is_finite() {
                return Err(SpaceError::NonFiniteCoefficient(k));
            }
            if let Some(sl) = SignedLog::from_f64(c) {
                match v.coeffs.remove(&k) {
                    None => {
                        v.coeffs.insert(k, sl);
                    }
                    Some(prev) => {
                        if let Some(sum) = prev.add(sl) {
                            v.coeffs.insert(k, sum);
                        }
                    }
                }
            }
        }
        Ok(v)
    }

    /// Entries given directly in log domain, for magnitudes outside f64.
    pub fn from_log_entries(
        space: SpaceTag,
        entries: &[(i64, Sign, f64)],
    ) -> Result<SeqVector, SpaceError> {
        let mut v = SeqVector::zero(space);
        for &(k, sign, log_abs) in entries {
            if !space.valid_index(k) {
                return Err(SpaceError::InvalidIndex(k));
            }
            if log_abs == LOG_ZERO {
                continue;
            }
            let sl = SignedLog { sign, log_abs };
            match v.coeffs.remove(&k) {
                None => {
                    v.coeffs.insert(k, sl);
                }
                Some(prev) => {
                    if let Some(sum) = prev.add(sl) {
                        v.coeffs.insert(k, sum);
                    }
                }
            }
        }
        Ok(v)
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff_log(&self, k: i64) -> Option<SignedLog> {
        self.coeffs.get(&k).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, SignedLog)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn max_support(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn min_support(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn tail_log(&self) -> f64 {
        self.tail_log
    }

    /// Linear tail bound (may overflow for extreme vectors).
    pub fn tail_bound(&self) -> f64 {
        self.tail_log.exp()
    }

    pub fn with_tail_log(mut self, tail_log: f64) -> SeqVector {
        self.tail_log = tail_log;
        self
    }

    /// log of the norm computed from the stored coefficients.
    pub fn log_norm(&self) -> f64 {
        self.space.combine_log_norm(self.coeffs.values().map(|c| c.log_abs))
    }

    pub fn norm_info(&self) -> NormInfo {
        let log_norm = self.log_norm();
        let log_upper = self.space.combine_with_tail(log_norm, self.tail_log);
        // tail > fraction * coeff-norm, compared in log domain
        let tail_dominated = self.tail_log > TAIL_FLAG_FRACTION.ln() + log_norm;
        NormInfo { log_norm, log_upper, tail_dominated }
    }

    /// Scale by a plain f64 factor. Scaling by zero clears the vector.
    pub fn scale(&self, factor: f64) -> SeqVector {
        match SignedLog::from_f64(factor) {
            None => SeqVector::zero(self.space),
            Some(f) => self.scale_log(f),
        }
    }

    pub fn scale_log(&self, factor: SignedLog) -> SeqVector {
        let coeffs = self.coeffs.iter().map(|(&k, &c)| (k, c.mul(factor))).collect();
        SeqVector { space: self.space, coeffs, tail_log: self.tail_log + factor.log_abs }
    }

    /// Coefficientwise sum of scaled terms sharing one space; the tail bound
    /// is the scalar-weighted sum of the terms' tail bounds.
    pub fn linear_combo(terms: &[(f64, &SeqVector)]) -> Result<SeqVector, SpaceError> {
        let Some(&(_, first)) = terms.first() else {
            return Err(SpaceError::MixedSpaces);
        };
        let space = first.space;
        let mut coeffs: BTreeMap<i64, SignedLog> = BTreeMap::new();
        let mut tail_terms = Vec::with_capacity(terms.len());
        for &(scalar, v) in terms {
            if v.space != space {
                return Err(SpaceError::MixedSpaces);
            }
            let Some(s) = SignedLog::from_f64(scalar) else {
                continue;
            };
            tail_terms.push(s.log_abs + v.tail_log);
            for (&k, &c) in &v.coeffs {
                let scaled = c.mul(s);
                match coeffs.remove(&k) {
                    None => {
                        coeffs.insert(k, scaled);
                    }
                    Some(prev) => {
                        if let Some(sum) = prev.add(scaled) {
                            coeffs.insert(k, sum);
                        }
                    }
                }
            }
        }
        Ok(SeqVector { space, coeffs, tail_log: log_sum_exp(tail_terms) })
    }

    /// Keeps the largest-magnitude coefficients within the budget; the norm
    /// of the dropped ones is folded into the tail bound.
    pub fn truncate(&self, policy: TruncationPolicy) -> SeqVector {
        let keep: Vec<i64> = match policy {
            TruncationPolicy::Exact => return self.clone(),
            TruncationPolicy::KeepLargest(budget) => {
                let mut by_mag: Vec<(i64, f64)> =
                    self.coeffs.iter().map(|(&k, c)| (k, c.log_abs)).collect();
                by_mag.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
                by_mag.into_iter().take(budget).map(|(k, _)| k).collect()
            }
            TruncationPolicy::DropBelowLog(threshold_log) => self
                .coeffs
                .iter()
                .filter(|(_, c)| c.log_abs >= threshold_log)
                .map(|(&k, _)| k)
                .collect(),
        };
        let keep: std::collections::BTreeSet<i64> = keep.into_iter().collect();
        let mut kept = BTreeMap::new();
        let mut dropped_logs = Vec::new();
        for (&k, &c) in &self.coeffs {
            if keep.contains(&k) {
                kept.insert(k, c);
            } else {
                dropped_logs.push(c.log_abs);
            }
        }
        let dropped_norm = self.space.combine_log_norm(dropped_logs);
        let tail_log = self.space.combine_with_tail(dropped_norm, self.tail_log);
        SeqVector { space: self.space, coeffs: kept, tail_log }
    }

    /// Short human-readable digest, e.g. "e_4" or "combo(3 coeffs, 2..206)".
    pub fn digest(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        if self.coeffs.len() == 1 && self.tail_log == LOG_ZERO {
            let (&k, &c) = self.coeffs.iter().next().unwrap();
            if c.log_abs == 0.0 && c.sign == Sign::Pos {
                return format!("e_{k}");
            }
        }
        format!(
            "combo({} coeffs, {}..{})",
            self.coeffs.len(),
            self.min_support().unwrap(),
            self.max_support().unwrap()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationPolicy {
    /// Keep everything.
    Exact,
    /// Keep at most this many coefficients, largest magnitudes first.
    KeepLargest(usize),
    /// Drop coefficients with log magnitude below the threshold.
    DropBelowLog(f64),
}

// JSON shape: {space, entries: [(index, value)], tail_bound}. Coefficients
// cross the boundary as plain values, so extreme-scale vectors should stay
// internal.
#[derive(Serialize, Deserialize)]
struct SeqVectorRepr {
    space: SpaceTag,
    entries: Vec<(i64, f64)>,
    tail_bound: f64,
}

impl Serialize for SeqVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = SeqVectorRepr {
            space: self.space,
            entries: self.coeffs.iter().map(|(&k, &c)| (k, c.to_f64())).collect(),
            tail_bound: self.tail_log.exp(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SeqVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SeqVectorRepr::deserialize(deserializer)?;
        let v = SeqVector::from_entries(repr.space, &repr.entries)
            .map_err(serde::de::Error::custom)?;
        Ok(v.with_tail_log(if repr.tail_bound > 0.0 { repr.tail_bound.ln() } else { LOG_ZERO }))
    }
}
