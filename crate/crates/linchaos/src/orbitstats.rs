//! Visit sets and single-orbit chaos-ingredient probes.
//!
//! The source notions are asymptotic (irregular vector, distributionally
//! near to zero, distributionally unbounded, absolutely mean irregular);
//! here each is rendered as certified finite evidence: membership in a
//! visit set is granted only when every orbit consistent with the recorded
//! truncation error would be a member, "for every delta" becomes a
//! configured ladder, and "in the tail" becomes the last half of the
//! horizon. Ladders and tolerances travel with the flags as witnesses.

use serde::{Deserialize, Serialize};

use crate::natdensity::{default_n_min, upper_density, IndexSet};
use crate::shiftops::OrbitRecord;

/// {n in [1,N] : ||T^n x|| < delta, certified via the upper norm bound}.
pub fn visit_below(orbit: &OrbitRecord, delta: f64) -> IndexSet {
    debug_assert!(delta > 0.0);
    let log_delta = delta.ln();
    IndexSet::from_fn(orbit.horizon as u64, |n| orbit.cert_upper_log(n as usize) < log_delta)
}

/// {n in [1,N] : ||T^n x|| > M, certified via the lower norm bound}.
pub fn visit_above(orbit: &OrbitRecord, m: f64) -> IndexSet {
    debug_assert!(m > 0.0);
    let log_m = m.ln();
    IndexSet::from_fn(orbit.horizon as u64, |n| orbit.cert_lower_log(n as usize) > log_m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitFlag {
    Irregular,
    DistNearZero,
    DistUnbounded,
    AbsMeanIrregular,
}

/// Probe configuration; all thresholds are reported back in witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitProbeParams {
    pub low_target: f64,
    pub high_target: f64,
    /// Decreasing deltas for the near-zero probe.
    pub delta_ladder: Vec<f64>,
    /// Increasing magnitudes for the unboundedness probe.
    pub m_ladder: Vec<f64>,
    /// Density shortfall tolerated against "upper density 1".
    pub tol: f64,
    pub mean_low: f64,
    pub mean_high: f64,
}

impl Default for OrbitProbeParams {
    fn default() -> Self {
        OrbitProbeParams {
            low_target: 1e-6,
            high_target: 1e6,
            delta_ladder: (1..=6).map(|k| 10f64.powi(-k)).collect(),
            m_ladder: (1..=6).map(|k| 10f64.powi(k)).collect(),
            tol: 0.05,
            mean_low: 1e-6,
            mean_high: 1e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrregularWitness {
    pub low_target: f64,
    pub high_target: f64,
    /// (n, certified upper log-norm) of a tail-half dip below the target.
    pub low_hit: Option<(usize, f64)>,
    /// (n, certified lower log-norm) of a tail-half rise above the target.
    pub high_hit: Option<(usize, f64)>,
}

/// Certified dips and spikes in the last half of the horizon.
pub fn irregular_probe(
    orbit: &OrbitRecord,
    low_target: f64,
    high_target: f64,
) -> (bool, IrregularWitness) {
    debug_assert!(low_target < 1.0 && 1.0 < high_target);
    let half = orbit.horizon / 2;
    let log_low = low_target.ln();
    let log_high = high_target.ln();
    let mut low_hit = None;
    let mut high_hit = None;
    for n in (half + 1)..=orbit.horizon {
        let upper = orbit.cert_upper_log(n);
        let lower = orbit.cert_lower_log(n);
        if low_hit.is_none() && upper < log_low {
            low_hit = Some((n, upper));
        }
        if high_hit.is_none() && lower > log_high {
            high_hit = Some((n, lower));
        }
    }
    let flag = low_hit.is_some() && high_hit.is_some();
    (flag, IrregularWitness { low_target, high_target, low_hit, high_hit })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderDensityWitness {
    /// One row per ladder rung: (threshold, upper-density estimate, gap).
    pub rungs: Vec<(f64, f64, f64)>,
    pub tol: f64,
    /// Largest convergence gap among the density estimates used.
    pub max_gap: f64,
}

fn ladder_density_probe(
    orbit: &OrbitRecord,
    ladder: &[f64],
    tol: f64,
    below: bool,
) -> (bool, LadderDensityWitness) {
    let n_min = default_n_min(orbit.horizon as u64);
    let mut rungs = Vec::with_capacity(ladder.len());
    let mut all_pass = !ladder.is_empty();
    let mut max_gap: f64 = 0.0;
    for &threshold in ladder {
        let set = if below { visit_below(orbit, threshold) } else { visit_above(orbit, threshold) };
        let est = upper_density(&set, n_min).expect("n_min within horizon");
        max_gap = max_gap.max(est.convergence_gap);
        if est.value < 1.0 - tol {
            all_pass = false;
        }
        rungs.push((threshold, est.value, est.convergence_gap));
    }
    (all_pass, LadderDensityWitness { rungs, tol, max_gap })
}

/// Distributionally near to zero: for every delta in the ladder the visit
/// set below delta has upper density at least 1 - tol.
pub fn dist_near_zero_probe(
    orbit: &OrbitRecord,
    delta_ladder: &[f64],
    tol: f64,
) -> (bool, LadderDensityWitness) {
    debug_assert!(delta_ladder.windows(2).all(|w| w[0] > w[1]), "ladder must decrease");
    ladder_density_probe(orbit, delta_ladder, tol, true)
}

/// Distributionally unbounded: dual probe over an increasing M ladder.
pub fn dist_unbounded_probe(
    orbit: &OrbitRecord,
    m_ladder: &[f64],
    tol: f64,
) -> (bool, LadderDensityWitness) {
    debug_assert!(m_ladder.windows(2).all(|w| w[0] < w[1]), "ladder must increase");
    ladder_density_probe(orbit, m_ladder, tol, false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanIrregularWitness {
    pub mean_low: f64,
    pub mean_high: f64,
    pub low_hit: Option<(usize, f64)>,
    pub high_hit: Option<(usize, f64)>,
}

/// Absolutely mean irregular: the certified Cesaro means dip below
/// `mean_low` and rise above `mean_high` within the tail half.
pub fn abs_mean_irregular_probe(
    orbit: &OrbitRecord,
    mean_low: f64,
    mean_high: f64,
) -> (bool, MeanIrregularWitness) {
    let half = orbit.horizon / 2;
    let upper_means = orbit.cert_upper_mean_logs();
    let log_low = mean_low.ln();
    let log_high = mean_high.ln();
    let mut low_hit = None;
    let mut high_hit = None;
    for n in (half + 1)..=orbit.horizon {
        let upper = upper_means[n - 1];
        let lower = orbit.cesaro_log_means[n - 1];
        if low_hit.is_none() && upper < log_low {
            low_hit = Some((n, upper));
        }
        if high_hit.is_none() && lower > log_high {
            high_hit = Some((n, lower));
        }
    }
    let flag = low_hit.is_some() && high_hit.is_some();
    (flag, MeanIrregularWitness { mean_low, mean_high, low_hit, high_hit })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitWitnesses {
    pub irregular: IrregularWitness,
    pub dist_near_zero: LadderDensityWitness,
    pub dist_unbounded: LadderDensityWitness,
    pub abs_mean_irregular: MeanIrregularWitness,
}

/// The orbit-level verdict: which chaos ingredients the trajectory
/// certifies at the configured thresholds, with full witnesses and the
/// density convergence gaps as per-flag confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitVerdict {
    pub flags: std::collections::BTreeSet<OrbitFlag>,
    pub witnesses: OrbitWitnesses,
    pub confidence: std::collections::BTreeMap<OrbitFlag, f64>,
    pub params: OrbitProbeParams,
}

/// Runs all four probes.
pub fn orbit_verdict(orbit: &OrbitRecord, params: &OrbitProbeParams) -> OrbitVerdict {
    let (irr, irr_w) = irregular_probe(orbit, params.low_target, params.high_target);
    let (near, near_w) = dist_near_zero_probe(orbit, &params.delta_ladder, params.tol);
    let (unb, unb_w) = dist_unbounded_probe(orbit, &params.m_ladder, params.tol);
    let (mean, mean_w) = abs_mean_irregular_probe(orbit, params.mean_low, params.mean_high);

    let mut flags = std::collections::BTreeSet::new();
    let mut confidence = std::collections::BTreeMap::new();
    if irr {
        flags.insert(OrbitFlag::Irregular);
        confidence.insert(OrbitFlag::Irregular, 0.0);
    }
    if near {
        flags.insert(OrbitFlag::DistNearZero);
        confidence.insert(OrbitFlag::DistNearZero, near_w.max_gap);
    }
    if unb {
        flags.insert(OrbitFlag::DistUnbounded);
        confidence.insert(OrbitFlag::DistUnbounded, unb_w.max_gap);
    }
    if mean {
        flags.insert(OrbitFlag::AbsMeanIrregular);
        confidence.insert(OrbitFlag::AbsMeanIrregular, 0.0);
    }
    OrbitVerdict {
        flags,
        witnesses: OrbitWitnesses {
            irregular: irr_w,
            dist_near_zero: near_w,
            dist_unbounded: unb_w,
            abs_mean_irregular: mean_w,
        },
        confidence,
        params: params.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logdomain::LOG_ZERO;
    use crate::seqspace::{SeqVector, SpaceTag, TruncationPolicy};
    use crate::shiftops::ShiftOperator;

    fn l2() -> SpaceTag {
        SpaceTag::lp(2.0).unwrap()
    }

    /// log norms (-1)^n * n in log2 scale: odd steps tiny, even steps big.
    fn alternating_orbit(n: usize) -> OrbitRecord {
        let ln2 = std::f64::consts::LN_2;
        let log_norms = (0..=n)
            .map(|j| if j == 0 { 0.0 } else if j % 2 == 1 { -(j as f64) * ln2 } else { j as f64 * ln2 })
            .collect();
        OrbitRecord::synthetic("alternating", log_norms)
    }

    #[test]
    fn visit_below_examples() {
        // cesaro orbit of e_k hits exactly zero from step k on
        let ces = ShiftOperator::cesaro(0.4, 2.0).unwrap();
        let e4 = SeqVector::basis(4, l2()).unwrap();
        let orbit = ces.orbit(&e4, 12, TruncationPolicy::Exact).unwrap();
        let below = visit_below(&orbit, 1e-9);
        assert!(below.members().iter().all(|&n| n >= 4));
        assert!((4..=12).all(|n| below.members().contains(&n)));

        // rolewicz c=2 from e_1: dies at step 1, every step below delta=1
        let rol = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let e1 = SeqVector::basis(1, l2()).unwrap();
        let orbit = rol.orbit(&e1, 10, TruncationPolicy::Exact).unwrap();
        assert_eq!(visit_below(&orbit, 1.0).len(), 10);

        let alt = alternating_orbit(20);
        let below = visit_below(&alt, 1.0);
        assert!(below.members().iter().all(|&n| n % 2 == 1));
        assert_eq!(below.len(), 10);
    }

    #[test]
    fn visit_above_examples() {
        let rol = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let n = 20;
        let e = SeqVector::basis(n as i64 + 1, l2()).unwrap();
        let orbit = rol.orbit(&e, n, TruncationPolicy::Exact).unwrap();
        let above = visit_above(&orbit, 2.0);
        assert_eq!(above.members(), (2..=n as u64).collect::<Vec<_>>().as_slice());

        let zero = SeqVector::zero(l2());
        let orbit = rol.orbit(&zero, 10, TruncationPolicy::Exact).unwrap();
        assert!(visit_above(&orbit, 1.0).is_empty());

        let alt = alternating_orbit(20);
        let above = visit_above(&alt, 1.0);
        assert!(above.members().iter().all(|&n| n % 2 == 0));
    }

    #[test]
    fn visit_sets_monotone_and_disjoint() {
        let alt = alternating_orbit(50);
        let b1 = visit_below(&alt, 0.1);
        let b2 = visit_below(&alt, 10.0);
        assert!(b1.members().iter().all(|m| b2.members().contains(m)));

        let a1 = visit_above(&alt, 10.0);
        let a2 = visit_above(&alt, 0.5);
        assert!(a1.members().iter().all(|m| a2.members().contains(m)));

        // below(delta) and above(M) disjoint when delta <= M
        let inter = b2.intersection(&a2).unwrap();
        assert!(inter.is_empty() || 10.0 > 0.5);
        let b = visit_below(&alt, 0.5);
        let a = visit_above(&alt, 0.5);
        assert!(b.intersection(&a).unwrap().is_empty());
    }

    #[test]
    fn irregular_probe_prop1_shape() {
        // log2 norms -k^2 at 4^k and +k^2 at 2*4^k, last half included
        let ln2 = std::f64::consts::LN_2;
        let n = 600usize;
        let mut log_norms = vec![0.0; n + 1];
        for k in 1..=4 {
            let low = 4usize.pow(k);
            let high = 2 * 4usize.pow(k);
            let kk = (k * k) as f64;
            if low <= n {
                log_norms[low] = -kk * ln2;
            }
            if high <= n {
                log_norms[high] = kk * ln2;
            }
        }
        let orbit = OrbitRecord::synthetic("prop1-premise", log_norms);
        let (flag, w) = irregular_probe(&orbit, 1e-4, 1e4);
        assert!(flag, "witness: {w:?}");
    }

    #[test]
    fn irregular_probe_negative_cases() {
        // power bounded: no unbounded part
        let rol = ShiftOperator::rolewicz(0.5, l2()).unwrap();
        let e30 = SeqVector::basis(30, l2()).unwrap();
        let orbit = rol.orbit(&e30, 20, TruncationPolicy::Exact).unwrap();
        let (flag, _) = irregular_probe(&orbit, 1e-6, 1e6);
        assert!(!flag);

        // orbit of e_1 dies: low part only
        let rol2 = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let e1 = SeqVector::basis(1, l2()).unwrap();
        let orbit = rol2.orbit(&e1, 10, TruncationPolicy::Exact).unwrap();
        let (flag, w) = irregular_probe(&orbit, 1e-6, 1e6);
        assert!(!flag);
        assert!(w.low_hit.is_some() && w.high_hit.is_none());
    }

    #[test]
    fn near_zero_probe_examples() {
        // cesaro orbit of e_k: visit set cofinite, flag set
        let ces = ShiftOperator::cesaro(0.4, 2.0).unwrap();
        let e5 = SeqVector::basis(5, l2()).unwrap();
        let orbit = ces.orbit(&e5, 2000, TruncationPolicy::Exact).unwrap();
        let (flag, _) = dist_near_zero_probe(&orbit, &[0.1, 0.01], 0.05);
        assert!(flag);

        // growing orbit: not near zero
        let rol = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let e = SeqVector::basis(2001, l2()).unwrap();
        let orbit = rol.orbit(&e, 2000, TruncationPolicy::Exact).unwrap();
        let (flag, _) = dist_near_zero_probe(&orbit, &[0.1, 0.01], 0.05);
        assert!(!flag);
    }

    #[test]
    fn near_zero_discriminating_negative() {
        // zero except on blocks [k^2, k^2+k] where the norm is k: the
        // below-delta set has upper density about 1/2, far from 1.
        let n = 100_000usize;
        let mut log_norms = vec![LOG_ZERO; n + 1];
        log_norms[0] = 0.0;
        let mut k = 1usize;
        while k * k <= n {
            for i in (k * k)..=(k * k + k).min(n) {
                log_norms[i] = (k as f64).ln();
            }
            k += 1;
        }
        let orbit = OrbitRecord::synthetic("block-heights", log_norms);
        let (flag, w) = dist_near_zero_probe(&orbit, &[0.5, 0.25], 0.05);
        assert!(!flag, "rungs: {:?}", w.rungs);
        // the below set still has upper density near 1/2
        assert!(w.rungs.iter().all(|&(_, d, _)| (d - 0.5).abs() < 0.1));
    }

    #[test]
    fn unbounded_probe_examples() {
        let rol = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let n = 2000;
        let e = SeqVector::basis(n as i64 + 1, l2()).unwrap();
        let orbit = rol.orbit(&e, n, TruncationPolicy::Exact).unwrap();
        let (flag, _) = dist_unbounded_probe(&orbit, &[10.0, 100.0], 0.05);
        assert!(flag);

        // cesaro orbits die: never distributionally unbounded
        let ces = ShiftOperator::cesaro(0.4, 2.0).unwrap();
        let e9 = SeqVector::basis(9, l2()).unwrap();
        let orbit = ces.orbit(&e9, 2000, TruncationPolicy::Exact).unwrap();
        let (flag, _) = dist_unbounded_probe(&orbit, &[10.0, 100.0], 0.05);
        assert!(!flag);

        let zero = SeqVector::zero(l2());
        let orbit = ces.orbit(&zero, 100, TruncationPolicy::Exact).unwrap();
        let (flag, _) = dist_unbounded_probe(&orbit, &[10.0], 0.05);
        assert!(!flag);
    }

    #[test]
    fn mean_irregular_examples() {
        // cesaro shift, finitely supported x: means bounded, flag not set
        let ces = ShiftOperator::cesaro(0.4, 2.0).unwrap();
        let e7 = SeqVector::basis(7, l2()).unwrap();
        let orbit = ces.orbit(&e7, 500, TruncationPolicy::Exact).unwrap();
        let (flag, _) = abs_mean_irregular_probe(&orbit, 1e-6, 1e6);
        assert!(!flag);

        // rolewicz growing orbit: upper part holds, lower never does
        let rol = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let e = SeqVector::basis(101, l2()).unwrap();
        let orbit = rol.orbit(&e, 100, TruncationPolicy::Exact).unwrap();
        let (flag, w) = abs_mean_irregular_probe(&orbit, 1e-6, 1e6);
        assert!(!flag);
        assert!(w.high_hit.is_some() && w.low_hit.is_none());

        let zero = SeqVector::zero(l2());
        let orbit = rol.orbit(&zero, 100, TruncationPolicy::Exact).unwrap();
        let (flag, _) = abs_mean_irregular_probe(&orbit, 1e-6, 1e6);
        assert!(!flag);
    }

    #[test]
    fn probes_invariant_under_scaling() {
        let alt = alternating_orbit(100);
        let alpha: f64 = 32.0;
        let shift = alpha.ln();
        let scaled = OrbitRecord::synthetic(
            "scaled",
            alt.log_norms.iter().map(|&l| if l == LOG_ZERO { l } else { l + shift }).collect(),
        );
        let (f1, _) = irregular_probe(&alt, 1e-4, 1e4);
        let (f2, _) = irregular_probe(&scaled, 1e-4 * alpha, 1e4 * alpha);
        assert_eq!(f1, f2);

        let (g1, w1) = dist_near_zero_probe(&alt, &[0.5, 0.05], 0.05);
        let (g2, w2) = dist_near_zero_probe(&scaled, &[0.5 * alpha, 0.05 * alpha], 0.05);
        assert_eq!(g1, g2);
        for (a, b) in w1.rungs.iter().zip(&w2.rungs) {
            assert!((a.1 - b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn verdict_collects_flags() {
        let ces = ShiftOperator::cesaro(0.4, 2.0).unwrap();
        let e5 = SeqVector::basis(5, l2()).unwrap();
        let orbit = ces.orbit(&e5, 2000, TruncationPolicy::Exact).unwrap();
        let verdict = orbit_verdict(&orbit, &OrbitProbeParams::default());
        assert!(verdict.flags.contains(&OrbitFlag::DistNearZero));
        assert!(!verdict.flags.contains(&OrbitFlag::Irregular));
        assert!(verdict.confidence.contains_key(&OrbitFlag::DistNearZero));
        // witnesses serialize for audit
        let json = serde_json::to_string(&verdict).unwrap();
        assert!(json.contains("dist_near_zero"));
    }
}
