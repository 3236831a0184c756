//! Pairwise chaos profiles, vector/pair classification, the implication
//! lattice between the chaos notions, and the c(T) lower-bound estimator.
//!
//! The four profile functions of a pair (x, y) are densities of the visit
//! sets {j : ||T^j x - T^j y|| < delta}: F uses the lower density, F* the
//! upper, BF and BF* the Banach lower/upper ones. Everything reduces to the
//! difference orbit z = x - y by linearity. Class predicates quantifying
//! over all delta > 0 are rendered over a finite geometric grid with a
//! tolerance tau; the grid and tau are part of every witness.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::natdensity::{
    banach_lower_density, banach_upper_density, default_n_min, default_window_ladder,
    lower_density, upper_density, DensityError, DensityEstimate,
};
use crate::orbitstats::{
    abs_mean_irregular_probe, dist_near_zero_probe, dist_unbounded_probe, irregular_probe,
    visit_below, OrbitProbeParams,
};
use crate::seqspace::{Laterality, SeqVector};
use crate::shiftops::{OrbitRecord, ShiftError, ShiftOperator};

#[derive(Debug, Error)]
pub enum ChaosError {
    #[error("pair classification needs x != y")]
    PairEqual,
    #[error("vector classification needs a nonzero vector")]
    ZeroVector,
    #[error("delta grid must be nonempty and strictly increasing")]
    BadGrid,
    #[error("epsilon {0} is not a grid point of the profile")]
    EpsNotInGrid(f64),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Density(#[from] DensityError),
}

/// The chaos classes a verdict can assert.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash,
)]
pub enum ChaosClass {
    LiYorkePair,
    MeanLiYorkePair,
    DC1,
    DC2,
    DC2half,
    RDC1,
    RDC1plus,
    RDC2,
}

/// Tail-half orbit extremes carried alongside a profile so the Li-Yorke
/// and mean Li-Yorke predicates can be evaluated from the profile alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSummary {
    /// min over the tail half of the certified upper log norm.
    pub tail_min_upper_log: f64,
    /// max over the tail half of the certified lower log norm.
    pub tail_max_lower_log: f64,
    pub tail_min_upper_mean_log: f64,
    pub tail_max_lower_mean_log: f64,
}

impl OrbitSummary {
    pub fn from_orbit(orbit: &OrbitRecord) -> OrbitSummary {
        let half = orbit.horizon / 2;
        let upper_means = orbit.cert_upper_mean_logs();
        let mut s = OrbitSummary {
            tail_min_upper_log: f64::INFINITY,
            tail_max_lower_log: f64::NEG_INFINITY,
            tail_min_upper_mean_log: f64::INFINITY,
            tail_max_lower_mean_log: f64::NEG_INFINITY,
        };
        for n in (half + 1)..=orbit.horizon {
            s.tail_min_upper_log = s.tail_min_upper_log.min(orbit.cert_upper_log(n));
            s.tail_max_lower_log = s.tail_max_lower_log.max(orbit.cert_lower_log(n));
            s.tail_min_upper_mean_log = s.tail_min_upper_mean_log.min(upper_means[n - 1]);
            s.tail_max_lower_mean_log =
                s.tail_max_lower_mean_log.max(orbit.cesaro_log_means[n - 1]);
        }
        s
    }
}

/// The four density-profile functions of a pair over a delta grid.
///
/// The stored estimates are raw; the accessor methods project them onto the
/// order chain BF <= F <= F* <= BF* that the true quantities satisfy, which
/// keeps the rendered class predicates nested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosProfile {
    pub horizon: usize,
    pub delta_grid: Vec<f64>,
    pub f_lower: Vec<DensityEstimate>,
    pub f_star: Vec<DensityEstimate>,
    pub bf_lower: Vec<DensityEstimate>,
    pub bf_star: Vec<DensityEstimate>,
    pub orbit_summary: OrbitSummary,
}

impl ChaosProfile {
    fn grid_index(&self, delta: f64) -> Result<usize, ChaosError> {
        self.delta_grid
            .iter()
            .position(|&d| (d - delta).abs() <= 1e-12 * d.abs().max(1.0))
            .ok_or(ChaosError::EpsNotInGrid(delta))
    }

    pub fn f(&self, i: usize) -> f64 {
        self.f_lower[i].value.min(self.f_star[i].value)
    }

    pub fn f_star_at(&self, i: usize) -> f64 {
        self.f_star[i].value.max(self.f_lower[i].value)
    }

    pub fn bf(&self, i: usize) -> f64 {
        self.bf_lower[i].value.min(self.f(i))
    }

    pub fn bf_star_at(&self, i: usize) -> f64 {
        self.bf_star[i].value.max(self.f_star_at(i))
    }

    /// CSV with columns delta, F, F_star, BF, BF_star (projected values).
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "delta,f,f_star,bf_lower,bf_star")?;
        for i in 0..self.delta_grid.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.delta_grid[i],
                self.f(i),
                self.f_star_at(i),
                self.bf(i),
                self.bf_star_at(i)
            )?;
        }
        Ok(())
    }
}

/// Default geometric delta grid 10^-6 .. 10^6.
pub fn default_delta_grid() -> Vec<f64> {
    (-6..=6).map(|k| 10f64.powi(k)).collect()
}

/// Computes the profile of the pair (x, y) from the single orbit of
/// z = x - y.
pub fn pair_profile(
    op: &ShiftOperator,
    x: &SeqVector,
    y: &SeqVector,
    n: usize,
    delta_grid: &[f64],
) -> Result<ChaosProfile, ChaosError> {
    if delta_grid.is_empty() || delta_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ChaosError::BadGrid);
    }
    let z = SeqVector::linear_combo(&[(1.0, x), (-1.0, y)]).map_err(ShiftError::Space)?;
    if z.is_zero() && z.tail_log() == f64::NEG_INFINITY {
        return Err(ChaosError::PairEqual);
    }
    let orbit = op.orbit(&z, n, crate::seqspace::TruncationPolicy::Exact)?;
    profile_from_orbit(&orbit, delta_grid)
}

/// Profile of a difference orbit given directly as a trajectory.
pub fn profile_from_orbit(
    orbit: &OrbitRecord,
    delta_grid: &[f64],
) -> Result<ChaosProfile, ChaosError> {
    if delta_grid.is_empty() || delta_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ChaosError::BadGrid);
    }
    let h = orbit.horizon as u64;
    let n_min = default_n_min(h);
    let windows = default_window_ladder(h);
    let mut f_lower = Vec::with_capacity(delta_grid.len());
    let mut f_star = Vec::with_capacity(delta_grid.len());
    let mut bf_lower = Vec::with_capacity(delta_grid.len());
    let mut bf_star = Vec::with_capacity(delta_grid.len());
    for &delta in delta_grid {
        let set = visit_below(orbit, delta);
        f_lower.push(lower_density(&set, n_min)?);
        f_star.push(upper_density(&set, n_min)?);
        bf_lower.push(banach_lower_density(&set, &windows)?);
        bf_star.push(banach_upper_density(&set, &windows)?);
    }
    Ok(ChaosProfile {
        horizon: orbit.horizon,
        delta_grid: delta_grid.to_vec(),
        f_lower,
        f_star,
        bf_lower,
        bf_star,
        orbit_summary: OrbitSummary::from_orbit(orbit),
    })
}

/// Tolerances for the grid-rendered class predicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairClassifyParams {
    /// Slack against the exact values 0 and 1 in the predicates.
    pub tau: f64,
    /// Required separation for the strict inequalities (DC2, DC2half, RDC2).
    pub margin: f64,
    pub ly_low: f64,
    pub ly_high: f64,
    pub mean_low: f64,
    pub mean_high: f64,
}

impl Default for PairClassifyParams {
    fn default() -> Self {
        PairClassifyParams {
            tau: 0.05,
            margin: 0.05,
            ly_low: 1e-6,
            ly_high: 1e6,
            mean_low: 1e-6,
            mean_high: 1e6,
        }
    }
}

impl PairClassifyParams {
    fn validate(&self) -> Result<(), ChaosError> {
        if !(self.tau > 0.0 && self.tau < 0.5) {
            return Err(ChaosError::BadParams(format!("tau {} outside (0, 0.5)", self.tau)));
        }
        // keeps DC1 => DC2 nested: tau <= 1 - tau - margin
        if !(self.margin > 0.0 && self.margin <= 1.0 - 2.0 * self.tau) {
            return Err(ChaosError::BadParams(format!(
                "margin {} outside (0, 1 - 2 tau]",
                self.margin
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assumptions {
    pub dense_x0: bool,
}

/// A classification outcome: asserted classes with per-class witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosVerdict {
    pub flags: BTreeSet<ChaosClass>,
    pub witnesses: BTreeMap<ChaosClass, serde_json::Value>,
    pub assumptions: Assumptions,
}

impl ChaosVerdict {
    fn new(dense_x0: bool) -> ChaosVerdict {
        ChaosVerdict {
            flags: BTreeSet::new(),
            witnesses: BTreeMap::new(),
            assumptions: Assumptions { dense_x0 },
        }
    }

    fn set(&mut self, class: ChaosClass, witness: serde_json::Value) {
        self.flags.insert(class);
        self.witnesses.insert(class, witness);
    }
}

/// Best (min F*, max F) over grid deltas strictly below each candidate r;
/// candidates are every grid value plus infinity.
fn band_candidates(profile: &ChaosProfile) -> Vec<(f64, f64, f64)> {
    let grid = &profile.delta_grid;
    let mut out = Vec::new();
    let mut candidates: Vec<f64> = grid.clone();
    candidates.push(f64::INFINITY);
    for &r in &candidates {
        let below: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] < r).collect();
        if below.is_empty() {
            continue;
        }
        let min_fstar =
            below.iter().map(|&i| profile.f_star_at(i)).fold(f64::INFINITY, f64::min);
        let max_f = below.iter().map(|&i| profile.f(i)).fold(f64::NEG_INFINITY, f64::max);
        out.push((r, min_fstar, max_f));
    }
    out
}

/// Grid-rendered pair classification per the DC / RDC predicates.
pub fn classify_pair(
    profile: &ChaosProfile,
    eps_grid: &[f64],
    params: &PairClassifyParams,
) -> Result<ChaosVerdict, ChaosError> {
    params.validate()?;
    let tau = params.tau;
    let margin = params.margin;
    let grid_len = profile.delta_grid.len();
    let eps_idx: Vec<usize> = eps_grid
        .iter()
        .map(|&e| profile.grid_index(e))
        .collect::<Result<_, _>>()?;

    let f_star_high = (0..grid_len).all(|i| profile.f_star_at(i) >= 1.0 - tau);
    let bf_star_high = (0..grid_len).all(|i| profile.bf_star_at(i) >= 1.0 - tau);
    let eps_f_small = eps_idx.iter().copied().find(|&i| profile.f(i) <= tau);
    let eps_f_below_one =
        eps_idx.iter().copied().find(|&i| profile.f(i) <= 1.0 - tau - margin);
    let eps_bf_small = eps_idx.iter().copied().find(|&i| profile.bf(i) <= tau);

    let mut verdict = ChaosVerdict::new(false);
    let grid = json!({ "tau": tau, "grid": profile.delta_grid });

    if f_star_high {
        if let Some(i) = eps_f_small {
            verdict.set(
                ChaosClass::DC1,
                json!({ "eps": profile.delta_grid[i], "f": profile.f(i), "config": grid }),
            );
        }
        if let Some(i) = eps_f_below_one {
            verdict.set(
                ChaosClass::DC2,
                json!({ "eps": profile.delta_grid[i], "f": profile.f(i), "margin": margin }),
            );
        }
        if let Some(i) = eps_bf_small {
            verdict.set(
                ChaosClass::RDC1plus,
                json!({ "eps": profile.delta_grid[i], "bf_lower": profile.bf(i) }),
            );
        }
    }

    // DC2half: some band 0 < delta < r where F < c < F* with a real gap
    for (r, min_fstar, max_f) in band_candidates(profile) {
        if min_fstar - max_f >= margin {
            let c = 0.5 * (min_fstar + max_f);
            verdict.set(
                ChaosClass::DC2half,
                json!({ "r": r, "c": c, "gap": min_fstar - max_f }),
            );
            break;
        }
    }

    // RDC1: BF(eps) ~ 0 plus a uniform positive floor c > tau on F* below r
    if let Some(i) = eps_bf_small {
        for (r, min_fstar, _) in band_candidates(profile) {
            if min_fstar > tau {
                verdict.set(
                    ChaosClass::RDC1,
                    json!({
                        "eps": profile.delta_grid[i],
                        "bf_lower": profile.bf(i),
                        "r": r,
                        "c": min_fstar,
                    }),
                );
                break;
            }
        }
    }

    if bf_star_high {
        if let Some(i) = eps_f_below_one {
            verdict.set(
                ChaosClass::RDC2,
                json!({ "eps": profile.delta_grid[i], "f": profile.f(i), "margin": margin }),
            );
        }
    }

    let s = &profile.orbit_summary;
    if s.tail_min_upper_log < params.ly_low.ln() && s.tail_max_lower_log > params.ly_high.ln() {
        verdict.set(
            ChaosClass::LiYorkePair,
            json!({
                "low_threshold": params.ly_low,
                "high_threshold": params.ly_high,
                "tail_min_upper_log": s.tail_min_upper_log,
                "tail_max_lower_log": s.tail_max_lower_log,
            }),
        );
    }
    if s.tail_min_upper_mean_log < params.mean_low.ln()
        && s.tail_max_lower_mean_log > params.mean_high.ln()
    {
        verdict.set(
            ChaosClass::MeanLiYorkePair,
            json!({
                "mean_low": params.mean_low,
                "mean_high": params.mean_high,
            }),
        );
    }
    Ok(verdict)
}

/// Parameters for single-vector classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorClassifyParams {
    pub probe: OrbitProbeParams,
    /// Positive density floor for the RDC1 side condition.
    pub c0: f64,
}

impl Default for VectorClassifyParams {
    fn default() -> Self {
        VectorClassifyParams { probe: OrbitProbeParams::default(), c0: 0.1 }
    }
}

/// Vector-level classification via the irregular-vector characterizations:
/// RDC1 needs an irregular orbit returning below every ladder delta on a
/// set of upper density >= c0; RDC1plus strengthens the density floor to
/// 1 - tol (distributionally near zero); RDC2 pairs irregularity with a
/// distributionally unbounded orbit.
pub fn classify_orbit(orbit: &OrbitRecord, params: &VectorClassifyParams, dense_x0: bool) -> ChaosVerdict {
    let p = &params.probe;
    let (irregular, irr_w) = irregular_probe(orbit, p.low_target, p.high_target);
    let (near_zero, near_w) = dist_near_zero_probe(orbit, &p.delta_ladder, p.tol);
    let (unbounded, unb_w) = dist_unbounded_probe(orbit, &p.m_ladder, p.tol);
    let (mean_irr, mean_w) = abs_mean_irregular_probe(orbit, p.mean_low, p.mean_high);
    // near-zero (density >= 1 - tol for every delta) subsumes the positive
    // floor c0, so RDC1plus always entails RDC1
    let side_condition = near_zero
        || (!near_w.rungs.is_empty() && near_w.rungs.iter().all(|&(_, d, _)| d >= params.c0));

    let mut verdict = ChaosVerdict::new(dense_x0);
    let irr_json = serde_json::to_value(&irr_w).unwrap();
    if irregular {
        verdict.set(ChaosClass::LiYorkePair, irr_json.clone());
        if side_condition {
            verdict.set(
                ChaosClass::RDC1,
                json!({ "irregular": irr_json, "c0": params.c0,
                        "densities": serde_json::to_value(&near_w).unwrap() }),
            );
        }
        if near_zero {
            verdict.set(
                ChaosClass::RDC1plus,
                json!({ "irregular": irr_json, "near_zero": serde_json::to_value(&near_w).unwrap() }),
            );
        }
        if unbounded {
            verdict.set(
                ChaosClass::RDC2,
                json!({ "irregular": irr_json, "unbounded": serde_json::to_value(&unb_w).unwrap() }),
            );
        }
    }
    if mean_irr {
        verdict.set(ChaosClass::MeanLiYorkePair, serde_json::to_value(&mean_w).unwrap());
    }
    verdict
}

/// Classifies a single vector by simulating its orbit; the dense-X0
/// assumption is recorded structurally (finitely supported vectors vanish
/// under a unilateral backward shift).
pub fn classify_vector(
    op: &ShiftOperator,
    x: &SeqVector,
    n: usize,
    params: &VectorClassifyParams,
) -> Result<ChaosVerdict, ChaosError> {
    if x.is_zero() {
        return Err(ChaosError::ZeroVector);
    }
    let orbit = op.orbit(x, n, crate::seqspace::TruncationPolicy::Exact)?;
    Ok(classify_orbit(&orbit, params, dense_x0_structural(op)))
}

/// The dense-X0 hypothesis holds structurally for unilateral shifts: every
/// finitely supported vector is annihilated after max-support many steps.
pub fn dense_x0_structural(op: &ShiftOperator) -> bool {
    op.space.laterality == Laterality::Unilateral
}

/// Nodes of the implication lattice; the hypercyclicity-side labels are
/// carried for documentation but no classifier ever asserts them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
pub enum LatticeNode {
    FHC,
    Mixing,
    Devaney,
    FH,
    UFH,
    RH,
    WeakMixing,
    H,
    DC1,
    DC2,
    DC2half,
    MeanLiYorke,
    RDC1,
    RDC1plus,
    RDC2,
    LiYorke,
}

impl LatticeNode {
    pub fn chaos_class(self) -> Option<ChaosClass> {
        match self {
            LatticeNode::DC1 => Some(ChaosClass::DC1),
            LatticeNode::DC2 => Some(ChaosClass::DC2),
            LatticeNode::DC2half => Some(ChaosClass::DC2half),
            LatticeNode::MeanLiYorke => Some(ChaosClass::MeanLiYorkePair),
            LatticeNode::RDC1 => Some(ChaosClass::RDC1),
            LatticeNode::RDC1plus => Some(ChaosClass::RDC1plus),
            LatticeNode::RDC2 => Some(ChaosClass::RDC2),
            LatticeNode::LiYorke => Some(ChaosClass::LiYorkePair),
            _ => None,
        }
    }

    pub fn of_class(class: ChaosClass) -> LatticeNode {
        match class {
            ChaosClass::DC1 => LatticeNode::DC1,
            ChaosClass::DC2 => LatticeNode::DC2,
            ChaosClass::DC2half => LatticeNode::DC2half,
            ChaosClass::MeanLiYorkePair => LatticeNode::MeanLiYorke,
            ChaosClass::RDC1 => LatticeNode::RDC1,
            ChaosClass::RDC1plus => LatticeNode::RDC1plus,
            ChaosClass::RDC2 => LatticeNode::RDC2,
            ChaosClass::LiYorkePair => LatticeNode::LiYorke,
        }
    }
}

/// The implication DAG, plus the node merges activated by a dense X0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub edges: Vec<(LatticeNode, LatticeNode)>,
    /// Equivalences (mutual implication) active under the dense-X0 hypothesis.
    pub merges: Vec<(LatticeNode, LatticeNode)>,
    pub dense_x0: bool,
}

/// Base edges of the implication diagram, with the merges DC1 = RDC2 and
/// LiYorke = RDC1plus activated when `dense_x0` holds.
pub fn implication_lattice(dense_x0: bool) -> Lattice {
    use LatticeNode::*;
    let edges = vec![
        // chaos-class implications
        (DC1, DC2),
        (DC2, DC2half),
        (DC1, RDC1plus),
        (DC1, DC2half),
        (DC2half, RDC1),
        (DC2half, RDC2),
        (RDC1plus, RDC1),
        (RDC1, LiYorke),
        (RDC2, LiYorke),
        (MeanLiYorke, RDC1plus),
        // hypercyclicity-side edges, carried as drawn but never asserted
        (FHC, Mixing),
        (FHC, Devaney),
        (FHC, FH),
        (FHC, DC1),
        (FHC, MeanLiYorke),
        (Devaney, RH),
        (Mixing, WeakMixing),
        (FH, UFH),
        (UFH, DC2half),
        (UFH, RH),
        (RH, WeakMixing),
        (WeakMixing, H),
        (H, LiYorke),
    ];
    let merges = if dense_x0 {
        vec![(DC1, RDC2), (LiYorke, RDC1plus)]
    } else {
        Vec::new()
    };
    Lattice { edges, merges, dense_x0 }
}

impl Lattice {
    /// Nodes reachable from `start` by following edges (and merges).
    pub fn reachable(&self, start: LatticeNode) -> BTreeSet<LatticeNode> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            for &(u, v) in &self.edges {
                if u == n && seen.insert(v) {
                    stack.push(v);
                }
            }
            for &(a, b) in &self.merges {
                if a == n && seen.insert(b) {
                    stack.push(b);
                }
                if b == n && seen.insert(a) {
                    stack.push(a);
                }
            }
        }
        seen
    }

    /// True when the edge relation alone (merges excluded) has no cycle.
    pub fn is_acyclic(&self) -> bool {
        let mut nodes: BTreeSet<LatticeNode> = BTreeSet::new();
        for &(u, v) in &self.edges {
            nodes.insert(u);
            nodes.insert(v);
        }
        let mut state: BTreeMap<LatticeNode, u8> = BTreeMap::new();
        fn visit(
            n: LatticeNode,
            edges: &[(LatticeNode, LatticeNode)],
            state: &mut BTreeMap<LatticeNode, u8>,
        ) -> bool {
            match state.get(&n) {
                Some(1) => return false, // back edge
                Some(2) => return true,
                _ => {}
            }
            state.insert(n, 1);
            for &(u, v) in edges {
                if u == n && !visit(v, edges, state) {
                    return false;
                }
            }
            state.insert(n, 2);
            true
        }
        nodes.iter().all(|&n| visit(n, &self.edges, &mut state))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub from: LatticeNode,
    pub missing: LatticeNode,
    pub via_merge: bool,
}

/// Audits a verdict against a lattice: the asserted flag set must be closed
/// under the implication edges between chaos classes (and under the merges
/// when active). Consistency is checked, never silently enforced.
pub fn check_consistency(verdict: &ChaosVerdict, lattice: &Lattice) -> Vec<Violation> {
    let asserted: BTreeSet<LatticeNode> =
        verdict.flags.iter().map(|&c| LatticeNode::of_class(c)).collect();
    let mut violations = Vec::new();
    for &(u, v) in &lattice.edges {
        if asserted.contains(&u) && v.chaos_class().is_some() && !asserted.contains(&v) {
            violations.push(Violation { from: u, missing: v, via_merge: false });
        }
    }
    for &(a, b) in &lattice.merges {
        if asserted.contains(&a) && b.chaos_class().is_some() && !asserted.contains(&b) {
            violations.push(Violation { from: a, missing: b, via_merge: true });
        }
        if asserted.contains(&b) && a.chaos_class().is_some() && !asserted.contains(&a) {
            violations.push(Violation { from: b, missing: a, via_merge: true });
        }
    }
    violations
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtCandidate {
    pub digest: String,
    pub density: f64,
    pub convergence_gap: f64,
    /// The orbit is certified below the radius on the whole last quarter;
    /// such a vector cannot be hypercyclic, so its bound is discounted.
    pub degenerate: bool,
}

/// Finite-horizon lower-bound evidence for c(T): the best upper density of
/// {n : T^n x in B(0, a)} over the candidate vectors. Only a genuine lower
/// bound when the candidates are hypercyclic, which is not certified here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtLowerBound {
    pub value: f64,
    pub radius: f64,
    pub candidates: Vec<CtCandidate>,
    pub heuristic: &'static str,
}

pub fn c_t_lower_bound(
    op: &ShiftOperator,
    candidates: &[SeqVector],
    a: f64,
    n: usize,
) -> Result<CtLowerBound, ChaosError> {
    if !(a > 0.0) {
        return Err(ChaosError::BadParams(format!("radius {a} must be positive")));
    }
    if candidates.is_empty() {
        return Err(ChaosError::BadParams("candidate list is empty".into()));
    }
    let n_min = default_n_min(n as u64);
    let mut rows = Vec::with_capacity(candidates.len());
    let mut value: f64 = 0.0;
    for x in candidates {
        let orbit = op.orbit(x, n, crate::seqspace::TruncationPolicy::Exact)?;
        let set = visit_below(&orbit, a);
        let est = upper_density(&set, n_min)?;
        let log_a = a.ln();
        let quarter = (3 * n) / 4;
        let degenerate = (quarter.max(1)..=n).all(|j| orbit.cert_upper_log(j) < log_a);
        if !degenerate {
            value = value.max(est.value);
        }
        rows.push(CtCandidate {
            digest: x.digest(),
            density: est.value,
            convergence_gap: est.convergence_gap,
            degenerate,
        });
    }
    Ok(CtLowerBound {
        value,
        radius: a,
        candidates: rows,
        heuristic: "lower bound for c(T) only if some candidate is hypercyclic; not certified",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logdomain::LOG_ZERO;
    use crate::seqspace::SpaceTag;

    fn l2() -> SpaceTag {
        SpaceTag::lp(2.0).unwrap()
    }

    fn grid_small() -> Vec<f64> {
        vec![1e-3, 1e-2, 1e-1, 1.0, 10.0]
    }

    /// Hand-built profile with constant values across the grid.
    fn flat_profile(f: f64, f_star: f64, bf: f64, bf_star: f64) -> ChaosProfile {
        let grid = grid_small();
        let mk = |v: f64, kind| DensityEstimate {
            value: v,
            kind,
            ladder: vec![crate::natdensity::LadderRung { length: 1, ratio: v }],
            convergence_gap: 0.0,
        };
        ChaosProfile {
            horizon: 1000,
            delta_grid: grid.clone(),
            f_lower: grid.iter().map(|_| mk(f, crate::natdensity::DensityKind::Lower)).collect(),
            f_star: grid.iter().map(|_| mk(f_star, crate::natdensity::DensityKind::Upper)).collect(),
            bf_lower: grid
                .iter()
                .map(|_| mk(bf, crate::natdensity::DensityKind::BanachLower))
                .collect(),
            bf_star: grid
                .iter()
                .map(|_| mk(bf_star, crate::natdensity::DensityKind::BanachUpper))
                .collect(),
            orbit_summary: OrbitSummary {
                tail_min_upper_log: LOG_ZERO,
                tail_max_lower_log: f64::INFINITY,
                tail_min_upper_mean_log: 0.0,
                tail_max_lower_mean_log: 0.0,
            },
        }
    }

    #[test]
    fn pair_profile_dying_orbit() {
        // y = 0, cesaro shift, x = e_5: the orbit dies at step 5, so the
        // below-delta visit sets are cofinite and F is ~1 for every delta.
        let ces = ShiftOperator::cesaro(0.4, 2.0).unwrap();
        let x = SeqVector::basis(5, l2()).unwrap();
        let y = SeqVector::zero(l2());
        let profile = pair_profile(&ces, &x, &y, 2000, &grid_small()).unwrap();
        for i in 0..profile.delta_grid.len() {
            assert!(profile.f(i) > 0.95, "F({}) = {}", profile.delta_grid[i], profile.f(i));
        }
    }

    #[test]
    fn pair_profile_growing_orbit() {
        let rol = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let x = SeqVector::basis(2001, l2()).unwrap();
        let y = SeqVector::zero(l2());
        let profile = pair_profile(&rol, &x, &y, 2000, &grid_small()).unwrap();
        for (i, &d) in profile.delta_grid.iter().enumerate() {
            if d <= 2.0 {
                assert!(profile.f(i) <= 0.05, "F({d}) = {}", profile.f(i));
            }
        }
    }

    #[test]
    fn pair_profile_rejects_equal_pair() {
        let rol = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let x = SeqVector::basis(3, l2()).unwrap();
        assert!(matches!(
            pair_profile(&rol, &x, &x, 100, &grid_small()),
            Err(ChaosError::PairEqual)
        ));
    }

    #[test]
    fn profile_chain_and_monotonicity() {
        // synthetic block-structured difference orbit
        let n = 20_000usize;
        let mut log_norms = vec![0.0; n + 1];
        let mut k = 1usize;
        while k * k <= n {
            for i in (k * k)..=(k * k + k).min(n) {
                log_norms[i] = LOG_ZERO; // exactly zero on the blocks
            }
            k += 1;
        }
        let orbit = OrbitRecord::synthetic("blocks", log_norms);
        let profile = profile_from_orbit(&orbit, &grid_small()).unwrap();
        for i in 0..profile.delta_grid.len() {
            assert!(profile.bf(i) <= profile.f(i) + 1e-12);
            assert!(profile.f(i) <= profile.f_star_at(i) + 1e-12);
            assert!(profile.f_star_at(i) <= profile.bf_star_at(i) + 1e-12);
            if i > 0 {
                assert!(profile.f(i) + 1e-12 >= profile.f(i - 1), "F monotone in delta");
                assert!(profile.f_star_at(i) + 1e-12 >= profile.f_star_at(i - 1));
            }
        }
    }

    #[test]
    fn classify_dc1_shaped_profile() {
        // F* = 1 everywhere, F = 0: every flag of the hierarchy follows
        let mut profile = flat_profile(0.0, 1.0, 0.0, 1.0);
        profile.orbit_summary.tail_min_upper_log = (1e-9f64).ln();
        profile.orbit_summary.tail_max_lower_log = (1e9f64).ln();
        let verdict =
            classify_pair(&profile, &grid_small(), &PairClassifyParams::default()).unwrap();
        for class in [
            ChaosClass::DC1,
            ChaosClass::DC2,
            ChaosClass::DC2half,
            ChaosClass::RDC1,
            ChaosClass::RDC1plus,
            ChaosClass::RDC2,
            ChaosClass::LiYorkePair,
        ] {
            assert!(verdict.flags.contains(&class), "missing {class:?}");
        }
        let violations = check_consistency(&verdict, &implication_lattice(false));
        assert!(violations.is_empty(), "{violations:?}");
    }

    #[test]
    fn classify_cesaro_dying_pair_sets_nothing() {
        let ces = ShiftOperator::cesaro(0.4, 2.0).unwrap();
        let x = SeqVector::basis(5, l2()).unwrap();
        let y = SeqVector::zero(l2());
        let profile = pair_profile(&ces, &x, &y, 2000, &grid_small()).unwrap();
        let verdict =
            classify_pair(&profile, &grid_small(), &PairClassifyParams::default()).unwrap();
        assert!(verdict.flags.is_empty(), "{:?}", verdict.flags);
    }

    #[test]
    fn classify_example_210_shape() {
        // F = F* = 1, BF(eps) = 0: reiterative type 1+ without type 2
        let profile = flat_profile(1.0, 1.0, 0.0, 1.0);
        let verdict =
            classify_pair(&profile, &grid_small(), &PairClassifyParams::default()).unwrap();
        assert!(verdict.flags.contains(&ChaosClass::RDC1plus));
        assert!(verdict.flags.contains(&ChaosClass::RDC1));
        assert!(!verdict.flags.contains(&ChaosClass::RDC2));
        assert!(!verdict.flags.contains(&ChaosClass::DC1));
        let violations = check_consistency(&verdict, &implication_lattice(false));
        assert!(violations.is_empty(), "{violations:?}");
    }

    #[test]
    fn classifier_output_nests() {
        // scan a family of synthetic profiles; the rendered predicates must
        // nest: DC1 => DC2 => DC2half and DC1 => RDC1plus => RDC1
        let params = PairClassifyParams::default();
        let grid = grid_small();
        let vals = [0.0, 0.02, 0.3, 0.7, 0.9, 0.96, 1.0];
        for &f in &vals {
            for &fs in &vals {
                for &bf in &vals {
                    for &bfs in &vals {
                        let profile = flat_profile(f, fs, bf, bfs);
                        let v = classify_pair(&profile, &grid, &params).unwrap();
                        if v.flags.contains(&ChaosClass::DC1) {
                            assert!(v.flags.contains(&ChaosClass::DC2));
                            assert!(v.flags.contains(&ChaosClass::RDC1plus));
                        }
                        if v.flags.contains(&ChaosClass::DC2) {
                            assert!(v.flags.contains(&ChaosClass::DC2half), "f={f} fs={fs}");
                        }
                        if v.flags.contains(&ChaosClass::RDC1plus) {
                            assert!(v.flags.contains(&ChaosClass::RDC1));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn classify_pair_swap_invariant() {
        let rol = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        let x = SeqVector::from_entries(l2(), &[(40, 1.0), (3, -0.5)]).unwrap();
        let y = SeqVector::basis(7, l2()).unwrap();
        let pxy = pair_profile(&rol, &x, &y, 500, &grid_small()).unwrap();
        let pyx = pair_profile(&rol, &y, &x, 500, &grid_small()).unwrap();
        let params = PairClassifyParams::default();
        let vxy = classify_pair(&pxy, &grid_small(), &params).unwrap();
        let vyx = classify_pair(&pyx, &grid_small(), &params).unwrap();
        assert_eq!(vxy.flags, vyx.flags);
    }

    #[test]
    fn lattice_reachability_and_acyclicity() {
        let lat = implication_lattice(false);
        assert!(lat.is_acyclic());
        let reach = lat.reachable(LatticeNode::DC1);
        for n in [
            LatticeNode::RDC1plus,
            LatticeNode::RDC1,
            LatticeNode::RDC2,
            LatticeNode::LiYorke,
        ] {
            assert!(reach.contains(&n), "DC1 should reach {n:?}");
        }

        // dense X0: RDC2 implies DC1 through the merge
        let merged = implication_lattice(true);
        assert!(merged.reachable(LatticeNode::RDC2).contains(&LatticeNode::DC1));
        assert!(merged.is_acyclic());
    }

    #[test]
    fn consistency_violations_reported() {
        let mut verdict = ChaosVerdict::new(false);
        verdict.set(ChaosClass::DC1, json!({}));
        let violations = check_consistency(&verdict, &implication_lattice(false));
        assert!(!violations.is_empty());

        let mut ok = ChaosVerdict::new(false);
        for c in [ChaosClass::RDC1plus, ChaosClass::RDC1, ChaosClass::LiYorkePair] {
            ok.set(c, json!({}));
        }
        assert!(check_consistency(&ok, &implication_lattice(false)).is_empty());
        // Example 2.10-shaped verdict stays consistent without RDC2
        assert!(check_consistency(&ok, &implication_lattice(true)).is_empty());
    }

    #[test]
    fn classify_vector_examples() {
        // cesaro, finitely supported: orbit dies, no flags
        let ces = ShiftOperator::cesaro(0.4, 2.0).unwrap();
        let x = SeqVector::basis(6, l2()).unwrap();
        let v = classify_vector(&ces, &x, 2000, &VectorClassifyParams::default()).unwrap();
        assert!(v.flags.is_empty());
        assert!(v.assumptions.dense_x0);

        // rolewicz c = 1/2: power bounded, no flags
        let half = ShiftOperator::rolewicz(0.5, l2()).unwrap();
        let v = classify_vector(&half, &x, 2000, &VectorClassifyParams::default()).unwrap();
        assert!(v.flags.is_empty());

        let zero = SeqVector::zero(l2());
        assert!(matches!(
            classify_vector(&half, &zero, 100, &VectorClassifyParams::default()),
            Err(ChaosError::ZeroVector)
        ));
    }

    #[test]
    fn ct_lower_bound_examples() {
        let rol = ShiftOperator::rolewicz(2.0, l2()).unwrap();
        // dying orbit: density 1 but flagged degenerate and discounted
        let dying = SeqVector::basis(3, l2()).unwrap();
        let out = c_t_lower_bound(&rol, &[dying], 0.5, 400).unwrap();
        assert!(out.candidates[0].degenerate);
        assert!(out.candidates[0].density > 0.95);
        assert_eq!(out.value, 0.0);

        // growing orbit: bound ~ 0 for small radius
        let growing = SeqVector::basis(401, l2()).unwrap();
        let out = c_t_lower_bound(&rol, &[growing], 0.5, 400).unwrap();
        assert!(!out.candidates[0].degenerate);
        assert!(out.value <= 0.05);

        assert!(c_t_lower_bound(&rol, &[], 0.5, 100).is_err());
    }
}
