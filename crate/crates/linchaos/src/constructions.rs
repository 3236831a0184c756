//! The two constructive procedures: Banach-dense visit sets extracted from
//! an irregular orbit, and the dense reiteratively distributionally
//! irregular manifold built from a non-power-bounded shift.
//!
//! Both are greedy finite-horizon searches. Existence is the source
//! theorems' business; here every selected datum is validated against the
//! inequalities it must satisfy, the measured slack is recorded, and a
//! construction that cannot reach the minimum depth reports how far it got
//! instead of pretending.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logdomain::{log_add_exp, Sign, LOG_ZERO};
use crate::natdensity::{DensityError, IndexSet};
use crate::seqspace::{Laterality, NormKind, SeqVector, SpaceError, TruncationPolicy};
use crate::shiftops::{OrbitRecord, ShiftError, ShiftOperator};

const LN_2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("orbit supports the construction only to depth {achieved} (need >= 2)")]
    DepthTooSmall { achieved: usize },
    #[error("manifold selection reached m = {achieved} within the horizon (need >= 2)")]
    ManifoldDepthTooSmall { achieved: usize },
    #[error("operator norm bound {c} is not > 1; the manifold construction needs C > 1")]
    OperatorNormNotAboveOne { c: f64 },
    #[error("the manifold construction is implemented for unilateral shifts")]
    NotUnilateral,
    #[error("beta pattern index {m} is not in the r schedule")]
    PatternOutsideSchedule { m: usize },
    #[error("requested {requested} family members but only {available} disjoint supports exist")]
    InsufficientSupports { requested: usize, available: usize },
    #[error("requested {requested} family members but only {available} dense-sequence vectors given")]
    InsufficientDenseVectors { requested: usize, available: usize },
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Density(#[from] DensityError),
}

/// Output of the visit-set extraction: anchors n_k (lows) and l_k (highs),
/// the block unions A = U[n_k, n_k+k] and B = U[l_k-k, l_k], and the
/// certified margins of the propagated norm bounds on each block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanachVisitSets {
    pub lows: Vec<u64>,
    pub highs: Vec<u64>,
    pub a: IndexSet,
    pub b: IndexSet,
    pub depth: usize,
    /// Threshold exponents used per k: orbit log2 norm < -k^2 at n_k and
    /// > k^2 at l_k.
    pub thresholds_log2: Vec<f64>,
    /// Per k: worst margin (log2) of the bounds ||T^n x|| <= ||T||^k 2^{-k^2}
    /// on the A block and ||T^n x|| >= ||T||^{-k} 2^{k^2} on the B block.
    pub block_margins_log2: Vec<(f64, f64)>,
    pub opnorm_log2: f64,
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    lo: u64,
    hi: u64,
}

fn overlaps(occupied: &[Interval], lo: u64, hi: u64) -> bool {
    occupied.iter().any(|iv| lo <= iv.hi && iv.lo <= hi)
}

/// Greedy extraction of the Prop.-1-style visit sets from a certified
/// irregular orbit: for k = 1, 2, ... pick the smallest admissible anchors
/// n_k (orbit certified below 2^{-k^2}) and l_k (above 2^{k^2}), with
/// strictly increasing anchors, disjoint blocks, and successive anchor
/// gaps > k. Greedy minimality maximizes the depth a horizon can support.
pub fn banach_visit_sets_from_irregular(
    orbit: &OrbitRecord,
    opnorm_log: f64,
) -> Result<BanachVisitSets, ConstructError> {
    let horizon = orbit.horizon as u64;
    let mut lows: Vec<u64> = Vec::new();
    let mut highs: Vec<u64> = Vec::new();
    let mut occupied: Vec<Interval> = Vec::new();
    let opnorm_log2 = opnorm_log / LN_2;

    loop {
        let k = lows.len() as u64 + 1;
        let kk = (k * k) as f64;
        let low_threshold_log = -kk * LN_2;
        let high_threshold_log = kk * LN_2;
        let gap = lows.len() as u64; // previous k; anchors must move by > that

        let low_from = lows.last().map(|&n| n + gap + 1).unwrap_or(1);
        let next_low = (low_from..=horizon.saturating_sub(k)).find(|&n| {
            orbit.cert_upper_log(n as usize) < low_threshold_log && !overlaps(&occupied, n, n + k)
        });
        let Some(n_k) = next_low else { break };

        let high_from = highs.last().map(|&l| l + gap + 1).unwrap_or(1).max(k + 1);
        let next_high = (high_from..=horizon).find(|&l| {
            orbit.cert_lower_log(l as usize) > high_threshold_log
                && !overlaps(&occupied, l - k, l)
                && !(n_k <= l && l - k <= n_k + k)
        });
        let Some(l_k) = next_high else { break };

        occupied.push(Interval { lo: n_k, hi: n_k + k });
        occupied.push(Interval { lo: l_k - k, hi: l_k });
        lows.push(n_k);
        highs.push(l_k);
    }

    let depth = lows.len().min(highs.len());
    if depth < 2 {
        return Err(ConstructError::DepthTooSmall { achieved: depth });
    }

    let a_ranges: Vec<(u64, u64)> =
        lows.iter().enumerate().map(|(i, &n)| (n, n + i as u64 + 1)).collect();
    let b_ranges: Vec<(u64, u64)> =
        highs.iter().enumerate().map(|(i, &l)| (l - (i as u64 + 1), l)).collect();
    let a = IndexSet::from_ranges(horizon, &a_ranges)?;
    let b = IndexSet::from_ranges(horizon, &b_ranges)?;

    let mut block_margins_log2 = Vec::with_capacity(depth);
    for i in 0..depth {
        let k = (i + 1) as f64;
        let kk = k * k;
        let mut a_margin = f64::INFINITY;
        for n in lows[i]..=(lows[i] + i as u64 + 1) {
            let bound = k * opnorm_log2 - kk;
            a_margin = a_margin.min(bound - orbit.cert_upper_log(n as usize) / LN_2);
        }
        let mut b_margin = f64::INFINITY;
        for n in (highs[i] - (i as u64 + 1))..=highs[i] {
            let bound = kk - k * opnorm_log2;
            b_margin = b_margin.min(orbit.cert_lower_log(n as usize) / LN_2 - bound);
        }
        block_margins_log2.push((a_margin, b_margin));
    }

    let thresholds_log2 = (1..=depth).map(|k| (k * k) as f64).collect();
    Ok(BanachVisitSets {
        lows,
        highs,
        a,
        b,
        depth,
        thresholds_log2,
        block_margins_log2,
        opnorm_log2,
    })
}

/// Measured slack of the three selection inequalities at one stage m; the
/// cross and Cesaro entries are None at m = 1 where no earlier vectors
/// constrain the choice (or when every earlier orbit has already died,
/// which makes the slack infinite).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSlack {
    pub m: usize,
    /// log ||T^{N_m} x_m|| - log(m (2C)^m) > 0.
    pub peak_log: f64,
    /// min over k < m of log(1/m) - log ||T^{N_m} x_k||.
    pub cross_log: Option<f64>,
    /// min over k < m of log(1/m) - log of the Cesaro mean of x_k at N_m.
    pub cesaro_log: Option<f64>,
}

/// Data backing the dense irregular-manifold construction: normalized
/// vectors x_m with pairwise disjoint supports, the time schedule N_m, the
/// truncated r schedule, and the measured selection slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldData {
    pub operator: String,
    /// ln C with C = sup_k |w_k| (> 1 by precondition).
    pub c_log: f64,
    pub vectors: Vec<SeqVector>,
    pub n_schedule: Vec<usize>,
    /// Active r indices (a dense prefix 1..=J with J = achieved_m - 1).
    pub r_schedule: Vec<usize>,
    /// Hypothetical next r per the growth recursion
    /// r_{J+1} = 1 + r_J + N_{r_J + 1}; only the truncation tail bound of
    /// x_beta depends on it.
    pub r_next: usize,
    pub slack: Vec<SelectionSlack>,
    pub achieved_m: usize,
    /// Peak overshoot factor mu: selected peaks exceed m (2C)^m by mu.
    pub margin: f64,
}

impl ManifoldData {
    pub fn log_2c(&self) -> f64 {
        LN_2 + self.c_log
    }
}

/// Greedy selection of (x_m, N_m) for a non-power-bounded unilateral shift.
///
/// Each x_m is a normalized two-spike vector a e_s + b e_t with fresh
/// support: the far spike at s = N_m + 1 delivers ||T^{N_m} x_m|| = mu
/// m (2C)^m by the telescoping product, and the near mass at a small t
/// carries the normalization while dying within a few steps, which keeps
/// the orbit sum of x_m of the order of its peak. That containment is what
/// lets N_{m+1} (which must dominate m+1 times every earlier orbit sum)
/// stay polynomial-times-geometric instead of towering.
pub fn select_manifold_data(
    op: &ShiftOperator,
    horizon: usize,
    margin: f64,
) -> Result<ManifoldData, ConstructError> {
    if op.space.laterality != Laterality::Unilateral {
        return Err(ConstructError::NotUnilateral);
    }
    let c_log = op.sup_weight_log();
    if !(c_log > 0.0) {
        return Err(ConstructError::OperatorNormNotAboveOne { c: c_log.exp() });
    }
    let log_2c = LN_2 + c_log;

    // cumulative log weights: cum[k] = sum_{i=2}^{k} ln|w_i|, while known
    let mut cum = vec![0.0f64; 2];
    for k in 2..=(horizon as i64 + 16) {
        match op.weight_signed_log(k) {
            Some(w) => cum.push(cum.last().unwrap() + w.log_abs),
            None => break,
        }
    }
    let max_index = cum.len() - 1; // largest k with known w_k
    let tele = |n: usize, s: usize| -> Option<f64> {
        if s <= n || s > max_index {
            None
        } else {
            Some(cum[s] - cum[s - n])
        }
    };

    let mut vectors: Vec<SeqVector> = Vec::new();
    let mut n_schedule: Vec<usize> = Vec::new();
    let mut slack: Vec<SelectionSlack> = Vec::new();
    let mut used: std::collections::BTreeSet<i64> = std::collections::BTreeSet::new();
    // per accepted vector: log norms and log Cesaro numerators up to horizon
    let mut norms: Vec<Vec<f64>> = Vec::new();
    let mut mean_nums: Vec<Vec<f64>> = Vec::new();

    'outer: for m in 1.. {
        let mf = m as f64;
        let target_log = margin.ln() + mf.ln() + mf * log_2c;
        let n_from = n_schedule.last().map(|&n| n + 1).unwrap_or(1);
        for n in n_from..=horizon {
            // (1) a normalized far spike at some s > n must reach the target
            let mut spike = None;
            for s in (n + 1)..=(n + 8).min(max_index) {
                if used.contains(&(s as i64)) {
                    continue;
                }
                if let Some(t) = tele(n, s) {
                    if t >= target_log {
                        spike = Some((s, t));
                        break;
                    }
                }
            }
            let Some((s, tele_log)) = spike else { continue };
            // (2) every earlier orbit is below 1/m at time n
            let limit = -(mf.ln());
            if !norms.iter().all(|nk| nk[n] < limit) {
                continue;
            }
            // (3) every earlier Cesaro mean at n is below 1/m
            let nf_ln = (n as f64).ln();
            if !mean_nums.iter().all(|mk| mk[n] - nf_ln < limit) {
                continue;
            }

            // accept: build x_m = a e_s + b e_t
            let log_a = target_log - tele_log; // <= 0
            let mut entries: Vec<(i64, Sign, f64)> = vec![(s as i64, Sign::Pos, log_a)];
            if log_a < 0.0 {
                let log_b = match op.space.norm {
                    NormKind::PNorm { p } => (-(p * log_a).exp()).ln_1p() / p,
                    NormKind::SupNorm => 0.0,
                };
                let t_low = (2..).find(|t| !used.contains(t) && *t != s as i64).unwrap();
                entries.push((t_low, Sign::Pos, log_b));
                used.insert(t_low);
            }
            used.insert(s as i64);
            let x = SeqVector::from_log_entries(op.space, &entries)?;
            debug_assert!(x.log_norm().abs() < 1e-9, "x_m must be normalized");

            let orbit = op.orbit(&x, horizon, TruncationPolicy::Exact)?;
            let cross = norms
                .iter()
                .map(|nk| limit - nk[n])
                .fold(f64::INFINITY, f64::min);
            let cesaro = mean_nums
                .iter()
                .map(|mk| limit - (mk[n] - nf_ln))
                .fold(f64::INFINITY, f64::min);
            slack.push(SelectionSlack {
                m,
                peak_log: orbit.log_norms[n] - (mf.ln() + mf * log_2c),
                cross_log: (m > 1 && cross.is_finite()).then_some(cross),
                cesaro_log: (m > 1 && cesaro.is_finite()).then_some(cesaro),
            });
            let mut mean_num = vec![LOG_ZERO; horizon + 1];
            for i in 1..=horizon {
                mean_num[i] = log_add_exp(mean_num[i - 1], orbit.log_norms[i]);
            }
            norms.push(orbit.log_norms);
            mean_nums.push(mean_num);
            vectors.push(x);
            n_schedule.push(n);
            continue 'outer;
        }
        break; // horizon cannot support stage m
    }

    let achieved_m = vectors.len();
    if achieved_m < 2 {
        return Err(ConstructError::ManifoldDepthTooSmall { achieved: achieved_m });
    }
    // the selection slack must be strictly positive everywhere
    debug_assert!(slack.iter().all(|s| {
        s.peak_log > 0.0
            && s.cross_log.map(|v| v > 0.0).unwrap_or(true)
            && s.cesaro_log.map(|v| v > 0.0).unwrap_or(true)
    }));

    let j = achieved_m - 1;
    let r_schedule: Vec<usize> = (1..=j).collect();
    let r_next = 1 + j + n_schedule[j]; // N_{r_J + 1} = N_{J+1}
    Ok(ManifoldData {
        operator: op.name.clone(),
        c_log,
        vectors,
        n_schedule,
        r_schedule,
        r_next,
        slack,
        achieved_m,
        margin,
    })
}

/// A truncated x_beta = sum_{m in ones} (2C)^{-m} x_m together with the
/// pattern, an overall scale, and the geometric tail bound tied to the
/// hypothetical continuation of the r schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XBeta {
    pub vector: SeqVector,
    pub ones: Vec<usize>,
    /// log of an overall scalar applied to the ideal definition (0 for
    /// x_beta itself; -ln n for the family members v_n / n).
    pub scale_log: f64,
}

/// Builds the truncated series; `ones` lists the r values with beta = 1 and
/// must be a subset of the data's r schedule. The tail bound
/// 2 (2C)^{-r_next} dominates the dropped infinite continuation.
pub fn build_x_beta(data: &ManifoldData, ones: &[usize]) -> Result<XBeta, ConstructError> {
    let mut sorted: Vec<usize> = ones.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &m in &sorted {
        if !data.r_schedule.contains(&m) {
            return Err(ConstructError::PatternOutsideSchedule { m });
        }
    }
    let space = data.vectors[0].space();
    if sorted.is_empty() {
        return Ok(XBeta { vector: SeqVector::zero(space), ones: sorted, scale_log: 0.0 });
    }
    let log_2c = data.log_2c();
    let mut entries: Vec<(i64, Sign, f64)> = Vec::new();
    for &m in &sorted {
        let factor = -(m as f64) * log_2c;
        for (idx, coeff) in data.vectors[m - 1].iter() {
            entries.push((idx, coeff.sign, coeff.log_abs + factor));
        }
    }
    let tail_log = LN_2 - (data.r_next as f64) * log_2c;
    let vector = SeqVector::from_log_entries(space, &entries)?.with_tail_log(tail_log);
    Ok(XBeta { vector, ones: sorted, scale_log: 0.0 })
}

impl XBeta {
    /// The same pattern scaled by `factor` (e.g. 1/n for family members).
    pub fn scaled(&self, factor: f64) -> XBeta {
        let f = crate::logdomain::SignedLog::from_f64(factor).expect("nonzero scale");
        XBeta {
            vector: self.vector.scale_log(f),
            ones: self.ones.clone(),
            scale_log: self.scale_log + f.log_abs,
        }
    }
}

/// One verified inequality pair for an active k of the pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldCheck {
    pub r_k: usize,
    /// ||T^{N_{r_k}} v|| vs scale * (r_k - 1), linear domain.
    pub norm_time: usize,
    pub norm_measured: f64,
    pub norm_required: f64,
    pub norm_margin: f64,
    pub norm_pass: bool,
    /// Cesaro mean at N_{r_k + 1} vs scale / (r_k + 1); None when the
    /// schedule has no N_{r_k + 1} inside the data.
    pub cesaro_time: Option<usize>,
    pub cesaro_measured: Option<f64>,
    pub cesaro_bound: Option<f64>,
    pub cesaro_margin: Option<f64>,
    pub cesaro_pass: Option<bool>,
    /// Linear-domain bound on the truncation tail at the norm check time.
    pub tail_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<ManifoldCheck>,
    pub all_passed: bool,
}

/// Certifies the proof's two inequality chains on the actual trajectory:
/// the spike lower bounds ||T^{N_{r_k}} v|| >= scale (r_k - 1) - tail, and
/// the Cesaro bounds mean_{N_{r_k+1}} <= scale / (r_k + 1), the latter via
/// the certified upper means (truncation error included).
pub fn verify_manifold_vector(
    op: &ShiftOperator,
    xb: &XBeta,
    data: &ManifoldData,
) -> Result<VerifyReport, ConstructError> {
    let scale = xb.scale_log.exp();
    let mut horizon = 0usize;
    for &m in &xb.ones {
        horizon = horizon.max(data.n_schedule[m - 1]);
        if m < data.achieved_m {
            horizon = horizon.max(data.n_schedule[m]);
        }
    }
    let orbit = op.orbit(&xb.vector, horizon, TruncationPolicy::Exact)?;
    let upper_means = orbit.cert_upper_mean_logs();

    let mut checks = Vec::new();
    let mut all_passed = true;
    for &r_k in &xb.ones {
        let n_rk = data.n_schedule[r_k - 1];
        let measured = orbit.cert_lower_log(n_rk).exp();
        let required = scale * (r_k as f64 - 1.0);
        let tail_slack = orbit.step_error_log[n_rk].exp();
        let norm_pass = measured >= required - tail_slack;
        let norm_margin = measured - (required - tail_slack);

        let (mut ct, mut cm, mut cb, mut cmargin, mut cpass) = (None, None, None, None, None);
        if r_k < data.achieved_m {
            let n_next = data.n_schedule[r_k];
            let mean = upper_means[n_next - 1].exp();
            let bound = scale / (r_k as f64 + 1.0);
            ct = Some(n_next);
            cm = Some(mean);
            cb = Some(bound);
            cmargin = Some(bound - mean);
            cpass = Some(mean <= bound);
        }
        all_passed &= norm_pass && cpass.unwrap_or(true);
        checks.push(ManifoldCheck {
            r_k,
            norm_time: n_rk,
            norm_measured: measured,
            norm_required: required,
            norm_margin,
            norm_pass,
            cesaro_time: ct,
            cesaro_measured: cm,
            cesaro_bound: cb,
            cesaro_margin: cmargin,
            cesaro_pass: cpass,
            tail_slack,
        });
    }
    Ok(VerifyReport { checks, all_passed })
}

/// One member y_n = w_n + (1/n) v_n of the dense family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub n: usize,
    pub y: SeqVector,
    pub w: SeqVector,
    pub v: XBeta,
}

/// Builds y_n = w_n + (1/n) v_n for n = 1..count, with the gamma_n patterns
/// a round-robin partition of the r schedule (mutually disjoint supports).
pub fn dense_manifold_family(
    data: &ManifoldData,
    dense_seq: &[SeqVector],
    count: usize,
) -> Result<Vec<FamilyMember>, ConstructError> {
    let available = data.r_schedule.len();
    if count > available {
        return Err(ConstructError::InsufficientSupports { requested: count, available });
    }
    if count > dense_seq.len() {
        return Err(ConstructError::InsufficientDenseVectors {
            requested: count,
            available: dense_seq.len(),
        });
    }
    let mut members = Vec::with_capacity(count);
    for n in 1..=count {
        let ones: Vec<usize> = data
            .r_schedule
            .iter()
            .copied()
            .enumerate()
            .filter(|(j, _)| j % count == n - 1)
            .map(|(_, r)| r)
            .collect();
        let v = build_x_beta(data, &ones)?.scaled(1.0 / n as f64);
        let w = dense_seq[n - 1].clone();
        let y = SeqVector::linear_combo(&[(1.0, &w), (1.0, &v.vector)])?
            .with_tail_log(v.vector.tail_log());
        members.push(FamilyMember { n, y, w, v });
    }
    Ok(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqspace::SpaceTag;

    fn l2() -> SpaceTag {
        SpaceTag::lp(2.0).unwrap()
    }

    /// Synthetic orbit, log2 norms -k^2 at 4^k and +k^2 at 2*4^k.
    fn sparse_irregular_orbit(horizon: usize) -> OrbitRecord {
        let mut log_norms = vec![0.0; horizon + 1];
        let mut k = 1u32;
        loop {
            let low = 4usize.pow(k);
            let high = 2 * 4usize.pow(k);
            if low > horizon {
                break;
            }
            let kk = (k * k) as f64;
            log_norms[low] = -kk * LN_2;
            if high <= horizon {
                log_norms[high] = kk * LN_2;
            }
            k += 1;
        }
        OrbitRecord::synthetic("sparse-irregular", log_norms)
    }

    #[test]
    fn visit_sets_from_sparse_orbit() {
        let orbit = sparse_irregular_orbit(100_000);
        let sets = banach_visit_sets_from_irregular(&orbit, 2.0f64.ln()).unwrap();
        assert!(sets.depth >= 3, "depth {}", sets.depth);
        // anchors sit exactly at the prescribed positions
        assert_eq!(sets.lows[0], 4);
        assert_eq!(sets.highs[0], 8);
        // blocks disjoint
        let inter = sets.a.intersection(&sets.b).unwrap();
        assert!(inter.is_empty());
        // propagated bounds hold with positive margin on the synthetic orbit
        for &(am, bm) in &sets.block_margins_log2 {
            assert!(am > 0.0 && bm > 0.0, "margins {am} {bm}");
        }
    }

    #[test]
    fn visit_sets_depth_failures() {
        // power-bounded-looking orbit: never certified below 2^{-1}
        let flat = OrbitRecord::synthetic("flat", vec![0.0; 2000]);
        match banach_visit_sets_from_irregular(&flat, 2.0f64.ln()) {
            Err(ConstructError::DepthTooSmall { achieved }) => assert_eq!(achieved, 0),
            other => panic!("expected depth error, got {other:?}"),
        }

        // only the k = 1 thresholds are reachable
        let mut log_norms = vec![0.0; 2001];
        log_norms[100] = -2.0 * LN_2;
        log_norms[200] = 2.0 * LN_2;
        let depth1 = OrbitRecord::synthetic("depth-1", log_norms);
        match banach_visit_sets_from_irregular(&depth1, 2.0f64.ln()) {
            Err(ConstructError::DepthTooSmall { achieved }) => assert_eq!(achieved, 1),
            other => panic!("expected depth error, got {other:?}"),
        }
    }

    #[test]
    fn manifold_selection_on_rolewicz() {
        let op = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let data = select_manifold_data(&op, 10_000, 2.0).unwrap();
        assert!(data.achieved_m >= 4, "achieved m = {}", data.achieved_m);
        // N schedule strictly increasing, slack positive
        assert!(data.n_schedule.windows(2).all(|w| w[0] < w[1]));
        for s in &data.slack {
            assert!(s.peak_log > 0.0);
            if let Some(v) = s.cross_log {
                assert!(v > 0.0, "cross slack at m={}", s.m);
            }
            if let Some(v) = s.cesaro_log {
                assert!(v > 0.0, "cesaro slack at m={}", s.m);
            }
        }
        // vectors normalized with pairwise disjoint supports
        let mut seen = std::collections::BTreeSet::new();
        for x in &data.vectors {
            assert!(x.log_norm().abs() < 1e-9);
            for (idx, _) in x.iter() {
                assert!(seen.insert(idx), "support {idx} reused");
            }
        }
    }

    #[test]
    fn manifold_selection_on_cesaro_reaches_small_depth() {
        let op = ShiftOperator::cesaro(0.4, 2.0).unwrap();
        let data = select_manifold_data(&op, 10_000, 2.0).unwrap();
        assert_eq!(data.achieved_m, 2);
        assert_eq!(data.r_schedule, vec![1]);
    }

    #[test]
    fn manifold_selection_rejects_power_bounded() {
        let op = ShiftOperator::rolewicz(0.5, l2()).unwrap();
        match select_manifold_data(&op, 1000, 2.0) {
            Err(ConstructError::OperatorNormNotAboveOne { .. }) => {}
            other => panic!("expected norm gate, got {other:?}"),
        }
    }

    #[test]
    fn x_beta_norm_with_disjoint_supports() {
        let op = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let data = select_manifold_data(&op, 10_000, 2.0).unwrap();
        let xb = build_x_beta(&data, &data.r_schedule).unwrap();
        // disjoint supports: squared norm = sum of (2C)^{-2m} (x_m normalized)
        let want: f64 = data
            .r_schedule
            .iter()
            .map(|&m| (-2.0 * m as f64 * data.log_2c()).exp())
            .sum::<f64>()
            .sqrt()
            .ln();
        assert!((xb.vector.log_norm() - want).abs() < 1e-9);
        // tail bound dominated by the hypothetical next r
        let tail_want = LN_2 - data.r_next as f64 * data.log_2c();
        assert!((xb.vector.tail_log() - tail_want).abs() < 1e-9);

        let empty = build_x_beta(&data, &[]).unwrap();
        assert!(empty.vector.is_zero());

        match build_x_beta(&data, &[data.achieved_m + 5]) {
            Err(ConstructError::PatternOutsideSchedule { .. }) => {}
            other => panic!("expected pattern error, got {other:?}"),
        }
    }

    #[test]
    fn x_beta_tail_interval_nests_as_terms_grow() {
        // certified norm interval of the truncated sum must contain the
        // longer truncation's interval shifted... i.e. upper bounds shrink
        // toward the ideal value while lower bounds grow
        let op = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let data = select_manifold_data(&op, 10_000, 2.0).unwrap();
        let mut prev_lower = f64::NEG_INFINITY;
        for j in 1..=data.r_schedule.len() {
            let xb = build_x_beta(&data, &data.r_schedule[..j]).unwrap();
            let info = xb.vector.norm_info();
            assert!(info.log_norm >= prev_lower - 1e-12);
            assert!(info.log_upper >= info.log_norm);
            prev_lower = info.log_norm;
        }
    }

    #[test]
    fn verify_passes_on_rolewicz_data() {
        let op = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let data = select_manifold_data(&op, 10_000, 2.0).unwrap();
        let xb = build_x_beta(&data, &data.r_schedule).unwrap();
        let report = verify_manifold_vector(&op, &xb, &data).unwrap();
        assert!(report.all_passed, "{report:?}");
        // k = 1 and k = 2 both carry full checks with positive margin
        for k in [1usize, 2] {
            let check = report.checks.iter().find(|c| c.r_k == k).unwrap();
            assert!(check.norm_margin > 0.0);
            assert!(check.cesaro_margin.unwrap() > 0.0, "{check:?}");
        }
    }

    #[test]
    fn verify_reports_corrupted_data() {
        let op = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let mut data = select_manifold_data(&op, 10_000, 2.0).unwrap();
        // sabotage: claim stage 2 happened much earlier than it did
        data.n_schedule[1] = data.n_schedule[0] + 1;
        let xb = build_x_beta(&data, &vec![2]).unwrap();
        let report = verify_manifold_vector(&op, &xb, &data).unwrap();
        assert!(!report.all_passed, "corruption must be caught: {report:?}");
    }

    #[test]
    fn verify_zero_vector_is_vacuous() {
        let op = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let data = select_manifold_data(&op, 10_000, 2.0).unwrap();
        let empty = build_x_beta(&data, &[]).unwrap();
        let report = verify_manifold_vector(&op, &empty, &data).unwrap();
        assert!(report.checks.is_empty());
        assert!(report.all_passed);
    }

    #[test]
    fn family_members_verify() {
        let op = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let data = select_manifold_data(&op, 10_000, 2.0).unwrap();
        let dense: Vec<SeqVector> = vec![
            SeqVector::basis(1, l2()).unwrap(),
            SeqVector::from_entries(l2(), &[(1, 0.5), (2, -0.25)]).unwrap(),
        ];
        let family = dense_manifold_family(&data, &dense, 2).unwrap();
        assert_eq!(family.len(), 2);
        for member in &family {
            // y_n - w_n = (1/n) v_n passes the inequality checks
            let report = verify_manifold_vector(&op, &member.v, &data).unwrap();
            assert!(report.all_passed, "member {}: {report:?}", member.n);
        }

        assert!(dense_manifold_family(&data, &dense, 0).unwrap().is_empty());
        assert!(matches!(
            dense_manifold_family(&data, &dense, 99),
            Err(ConstructError::InsufficientSupports { .. })
        ));
    }
}
