//! Natural and Banach densities of subsets of N at a finite horizon.
//!
//! The asymptotic quantities are liminf/limsup of prefix ratios
//! card(A ∩ [1,n])/n and their sliding-window analogues
//! lim_n inf_m / lim_n sup_m of card(A ∩ [m+1,m+n])/n. At a finite horizon
//! we report extremal ratios over an explicit ladder of prefix lengths or
//! window lengths, together with the gap between the last two rungs, so the
//! non-convergence of an estimate is visible instead of hidden.
//!
//! The Banach estimators run in the direction Fekete's lemma makes stable:
//! the true Banach upper density is inf_w sup_m of the window ratio, so the
//! estimate takes the minimum over the window ladder of the per-window
//! maximum (and dually for the lower one).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DensityError {
    #[error("window [{}, {}] exceeds horizon {horizon}", m + 1, m + w)]
    WindowOutOfRange { m: u64, w: u64, horizon: u64 },
    #[error("n_min {n_min} exceeds horizon {horizon}")]
    NMinOutOfRange { n_min: u64, horizon: u64 },
    #[error("window ladder is empty")]
    EmptyLadder,
    #[error("window {w} exceeds half the horizon {horizon}")]
    WindowTooLarge { w: u64, horizon: u64 },
    #[error("window ladder must be strictly increasing")]
    LadderNotIncreasing,
    #[error("period must be positive")]
    ZeroPeriod,
    #[error("pattern length {len} does not equal period {period}")]
    PatternPeriodMismatch { len: usize, period: u64 },
    #[error("invalid member list: {0}")]
    InvalidMembers(String),
    #[error("horizon mismatch: {0} vs {1}")]
    HorizonMismatch(u64, u64),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A finite-horizon subset of N with exact window counting.
///
/// `members` is strictly increasing and contained in `[1, horizon]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSet {
    horizon: u64,
    members: Vec<u64>,
}

impl IndexSet {
    pub fn new(horizon: u64, members: Vec<u64>) -> Result<Self, DensityError> {
        if horizon == 0 {
            return Err(DensityError::InvalidMembers("horizon must be positive".into()));
        }
        for pair in members.windows(2) {
            if pair[0] >= pair[1] {
                return Err(DensityError::InvalidMembers(format!(
                    "members not strictly increasing at {}..{}",
                    pair[0], pair[1]
                )));
            }
        }
        if let Some(&first) = members.first() {
            if first < 1 {
                return Err(DensityError::InvalidMembers("member 0 below range".into()));
            }
        }
        if let Some(&last) = members.last() {
            if last > horizon {
                return Err(DensityError::InvalidMembers(format!(
                    "member {last} beyond horizon {horizon}"
                )));
            }
        }
        Ok(IndexSet { horizon, members })
    }

    pub fn empty(horizon: u64) -> Self {
        IndexSet { horizon, members: Vec::new() }
    }

    /// Builds the set {n in [1,H] : pred(n)}.
    pub fn from_fn(horizon: u64, mut pred: impl FnMut(u64) -> bool) -> Self {
        let members = (1..=horizon).filter(|&n| pred(n)).collect();
        IndexSet { horizon, members }
    }

    /// Union of closed ranges [a, b] clipped to the horizon.
    pub fn from_ranges(horizon: u64, ranges: &[(u64, u64)]) -> Result<Self, DensityError> {
        let mut marks = vec![false; horizon as usize + 1];
        for &(a, b) in ranges {
            if a > b {
                return Err(DensityError::InvalidMembers(format!("empty range {a}-{b}")));
            }
            for n in a.max(1)..=b.min(horizon) {
                marks[n as usize] = true;
            }
        }
        let members = (1..=horizon).filter(|&n| marks[n as usize]).collect();
        Ok(IndexSet { horizon, members })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// card(A ∩ [1, n]) by binary search.
    pub fn count_prefix(&self, n: u64) -> u64 {
        self.members.partition_point(|&m| m <= n) as u64
    }

    /// card(A ∩ [m+1, m+w]); requires m + w <= horizon.
    pub fn window_count(&self, m: u64, w: u64) -> Result<u64, DensityError> {
        if w == 0 || m + w > self.horizon {
            return Err(DensityError::WindowOutOfRange { m, w, horizon: self.horizon });
        }
        Ok(self.count_prefix(m + w) - self.count_prefix(m))
    }

    pub fn complement(&self) -> IndexSet {
        let mut members = Vec::with_capacity(self.horizon as usize - self.members.len());
        let mut it = self.members.iter().peekable();
        for n in 1..=self.horizon {
            if it.peek() == Some(&&n) {
                it.next();
            } else {
                members.push(n);
            }
        }
        IndexSet { horizon: self.horizon, members }
    }

    pub fn union(&self, other: &IndexSet) -> Result<IndexSet, DensityError> {
        if self.horizon != other.horizon {
            return Err(DensityError::HorizonMismatch(self.horizon, other.horizon));
        }
        let mut members = Vec::with_capacity(self.members.len() + other.members.len());
        let (mut i, mut j) = (0, 0);
        while i < self.members.len() || j < other.members.len() {
            let next = match (self.members.get(i), other.members.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                    a
                }
                (Some(&a), Some(&b)) if a < b => {
                    i += 1;
                    a
                }
                (Some(_), Some(&b)) => {
                    j += 1;
                    b
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            members.push(next);
        }
        Ok(IndexSet { horizon: self.horizon, members })
    }

    pub fn intersection(&self, other: &IndexSet) -> Result<IndexSet, DensityError> {
        if self.horizon != other.horizon {
            return Err(DensityError::HorizonMismatch(self.horizon, other.horizon));
        }
        let set: std::collections::BTreeSet<u64> = other.members.iter().copied().collect();
        let members = self.members.iter().copied().filter(|m| set.contains(m)).collect();
        Ok(IndexSet { horizon: self.horizon, members })
    }

    /// Per-index membership flags over [0, horizon]; index 0 unused.
    #[cfg(test)]
    pub(crate) fn flags(&self) -> Vec<bool> {
        let mut f = vec![false; self.horizon as usize + 1];
        for &m in &self.members {
            f[m as usize] = true;
        }
        f
    }

    /// Prefix counts pc[n] = card(A ∩ [1, n]) for n in [0, horizon].
    fn prefix_counts(&self) -> Vec<u32> {
        let mut pc = vec![0u32; self.horizon as usize + 1];
        let mut it = self.members.iter().peekable();
        let mut count = 0u32;
        for n in 1..=self.horizon as usize {
            if it.peek() == Some(&&(n as u64)) {
                it.next();
                count += 1;
            }
            pc[n] = count;
        }
        pc
    }

    /// Compact run-length text: "1-5,9,12-20". Ranges are inclusive.
    pub fn to_runlength_string(&self) -> String {
        let mut out = format!("horizon={}\n", self.horizon);
        let mut runs: Vec<(u64, u64)> = Vec::new();
        for &m in &self.members {
            match runs.last_mut() {
                Some((_, end)) if *end + 1 == m => *end = m,
                _ => runs.push((m, m)),
            }
        }
        let parts: Vec<String> = runs
            .iter()
            .map(|&(a, b)| if a == b { a.to_string() } else { format!("{a}-{b}") })
            .collect();
        out.push_str(&parts.join(","));
        out.push('\n');
        out
    }

    pub fn from_runlength_str(text: &str) -> Result<IndexSet, DensityError> {
        let mut horizon: Option<u64> = None;
        let mut ranges: Vec<(u64, u64)> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(h) = line.strip_prefix("horizon=") {
                horizon = Some(h.trim().parse().map_err(|e| DensityError::Parse(format!("{e}")))?);
                continue;
            }
            for part in line.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                if let Some((a, b)) = part.split_once('-') {
                    let a: u64 = a.trim().parse().map_err(|e| DensityError::Parse(format!("{e}")))?;
                    let b: u64 = b.trim().parse().map_err(|e| DensityError::Parse(format!("{e}")))?;
                    ranges.push((a, b));
                } else {
                    let v: u64 = part.parse().map_err(|e| DensityError::Parse(format!("{e}")))?;
                    ranges.push((v, v));
                }
            }
        }
        let max = ranges.iter().map(|&(_, b)| b).max().unwrap_or(1);
        let horizon = horizon.unwrap_or(max);
        IndexSet::from_ranges(horizon, &ranges)
    }

    /// Newline-separated integer list with a leading "horizon=H" line.
    pub fn to_lines_string(&self) -> String {
        let mut out = format!("horizon={}\n", self.horizon);
        for m in &self.members {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_lines_str(text: &str) -> Result<IndexSet, DensityError> {
        let mut horizon: Option<u64> = None;
        let mut members: Vec<u64> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(h) = line.strip_prefix("horizon=") {
                horizon = Some(h.trim().parse().map_err(|e| DensityError::Parse(format!("{e}")))?);
                continue;
            }
            members.push(line.parse().map_err(|e| DensityError::Parse(format!("{e}")))?);
        }
        members.sort_unstable();
        members.dedup();
        let horizon = horizon.unwrap_or_else(|| members.last().copied().unwrap_or(1));
        IndexSet::new(horizon, members)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Lower,
    Upper,
    BanachLower,
    BanachUpper,
}

/// One checkpoint of an estimation ladder: the prefix or window length and
/// the running extremal ratio once that length has been processed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub length: u64,
    pub ratio: f64,
}

/// A density value in [0,1] with its estimation ladder; `value` always
/// equals the last rung and `convergence_gap` the distance between the last
/// two rungs (0 for a single-rung ladder).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub kind: DensityKind,
    pub ladder: Vec<LadderRung>,
    pub convergence_gap: f64,
}

impl DensityEstimate {
    fn from_ladder(kind: DensityKind, ladder: Vec<LadderRung>) -> Self {
        let value = ladder.last().map(|r| r.ratio).unwrap_or(0.0);
        let convergence_gap = if ladder.len() >= 2 {
            (ladder[ladder.len() - 1].ratio - ladder[ladder.len() - 2].ratio).abs()
        } else {
            0.0
        };
        DensityEstimate { value, kind, ladder, convergence_gap }
    }
}

/// Default smallest prefix length: H/100, clamped to at least 1.
pub fn default_n_min(horizon: u64) -> u64 {
    (horizon / 100).max(1)
}

/// Prefix checkpoints: n_min, 10·n_min, ... with the horizon appended.
pub fn default_prefix_ladder(horizon: u64, n_min: u64) -> Vec<u64> {
    let mut ladder = Vec::new();
    let mut n = n_min;
    while n < horizon {
        ladder.push(n);
        n = n.saturating_mul(10);
    }
    ladder.push(horizon);
    ladder
}

/// Window ladder: powers of 10 up to H/2 (at least one window).
pub fn default_window_ladder(horizon: u64) -> Vec<u64> {
    let mut ladder: Vec<u64> = Vec::new();
    let mut w = 10u64;
    while w <= horizon / 2 {
        ladder.push(w);
        w *= 10;
    }
    if ladder.is_empty() {
        ladder.push((horizon / 2).max(1));
    }
    ladder
}

fn prefix_extremal(
    a: &IndexSet,
    n_min: u64,
    kind: DensityKind,
) -> Result<DensityEstimate, DensityError> {
    if n_min == 0 || n_min > a.horizon {
        return Err(DensityError::NMinOutOfRange { n_min, horizon: a.horizon });
    }
    let minimize = matches!(kind, DensityKind::Lower);
    let checkpoints = default_prefix_ladder(a.horizon, n_min);
    let pc = a.prefix_counts();
    let mut running = if minimize { f64::INFINITY } else { f64::NEG_INFINITY };
    let mut ladder = Vec::with_capacity(checkpoints.len());
    let mut ci = 0;
    for n in n_min..=a.horizon {
        let ratio = pc[n as usize] as f64 / n as f64;
        if minimize {
            running = running.min(ratio);
        } else {
            running = running.max(ratio);
        }
        while ci < checkpoints.len() && checkpoints[ci] == n {
            ladder.push(LadderRung { length: n, ratio: running });
            ci += 1;
        }
    }
    Ok(DensityEstimate::from_ladder(kind, ladder))
}

/// Finite-horizon lower density: min over n in [n_min, H] of card(A∩[1,n])/n,
/// with the running minimum recorded at geometrically spaced checkpoints.
pub fn lower_density(a: &IndexSet, n_min: u64) -> Result<DensityEstimate, DensityError> {
    prefix_extremal(a, n_min, DensityKind::Lower)
}

/// Finite-horizon upper density: max in place of min.
pub fn upper_density(a: &IndexSet, n_min: u64) -> Result<DensityEstimate, DensityError> {
    prefix_extremal(a, n_min, DensityKind::Upper)
}

fn window_extremal(a: &IndexSet, w: u64, maximize: bool) -> f64 {
    let pc = a.prefix_counts();
    let mut best = if maximize { 0u32 } else { u32::MAX };
    for m in 0..=(a.horizon - w) as usize {
        let c = pc[m + w as usize] - pc[m];
        if maximize {
            best = best.max(c);
        } else {
            best = best.min(c);
        }
    }
    best as f64 / w as f64
}

fn validate_ladder(a: &IndexSet, ladder: &[u64]) -> Result<(), DensityError> {
    if ladder.is_empty() {
        return Err(DensityError::EmptyLadder);
    }
    for pair in ladder.windows(2) {
        if pair[0] >= pair[1] {
            return Err(DensityError::LadderNotIncreasing);
        }
    }
    for &w in ladder {
        if w == 0 || w > a.horizon / 2 {
            return Err(DensityError::WindowTooLarge { w, horizon: a.horizon });
        }
    }
    Ok(())
}

/// Banach upper density estimate: min over the window ladder of
/// f(w) = max_m card(A∩[m+1,m+w])/w. Rungs record the running minimum.
pub fn banach_upper_density(a: &IndexSet, ladder: &[u64]) -> Result<DensityEstimate, DensityError> {
    validate_ladder(a, ladder)?;
    let mut running = f64::INFINITY;
    let rungs = ladder
        .iter()
        .map(|&w| {
            running = running.min(window_extremal(a, w, true));
            LadderRung { length: w, ratio: running }
        })
        .collect();
    Ok(DensityEstimate::from_ladder(DensityKind::BanachUpper, rungs))
}

/// Banach lower density estimate: max over the ladder of the per-window
/// minimum ratio. Rungs record the running maximum.
pub fn banach_lower_density(a: &IndexSet, ladder: &[u64]) -> Result<DensityEstimate, DensityError> {
    validate_ladder(a, ladder)?;
    let mut running = f64::NEG_INFINITY;
    let rungs = ladder
        .iter()
        .map(|&w| {
            running = running.max(window_extremal(a, w, false));
            LadderRung { length: w, ratio: running }
        })
        .collect();
    Ok(DensityEstimate::from_ladder(DensityKind::BanachLower, rungs))
}

/// The four density values of a set, in chain order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourDensities {
    pub banach_lower: f64,
    pub lower: f64,
    pub upper: f64,
    pub banach_upper: f64,
}

/// For a purely periodic set all four densities equal (ones in pattern)/period.
pub fn exact_four_densities_periodic(
    pattern: &[bool],
    period: u64,
) -> Result<FourDensities, DensityError> {
    if period == 0 {
        return Err(DensityError::ZeroPeriod);
    }
    if pattern.len() as u64 != period {
        return Err(DensityError::PatternPeriodMismatch { len: pattern.len(), period });
    }
    let ones = pattern.iter().filter(|&&b| b).count() as f64;
    let d = ones / period as f64;
    Ok(FourDensities { banach_lower: d, lower: d, upper: d, banach_upper: d })
}

/// Convenience: all four finite-horizon estimates with default ladders.
pub fn four_density_estimates(a: &IndexSet) -> Result<[DensityEstimate; 4], DensityError> {
    let n_min = default_n_min(a.horizon());
    let ladder = default_window_ladder(a.horizon());
    Ok([
        banach_lower_density(a, &ladder)?,
        lower_density(a, n_min)?,
        upper_density(a, n_min)?,
        banach_upper_density(a, &ladder)?,
    ])
}

/// Periodic repetition of `pattern` over [1, horizon] (index 1 maps to
/// pattern[0]). Test fixture and experiment helper.
pub fn periodic_set(horizon: u64, pattern: &[bool]) -> IndexSet {
    IndexSet::from_fn(horizon, |n| pattern[((n - 1) % pattern.len() as u64) as usize])
}

/// The block union ⋃_k [k^2, k^2+k] clipped to the horizon.
pub fn square_block_union(horizon: u64) -> IndexSet {
    let mut ranges = Vec::new();
    let mut k = 1u64;
    while k * k <= horizon {
        ranges.push((k * k, (k * k + k).min(horizon)));
        k += 1;
    }
    IndexSet::from_ranges(horizon, &ranges).expect("ranges valid")
}

/// The set of perfect squares within the horizon.
pub fn squares_set(horizon: u64) -> IndexSet {
    let mut members = Vec::new();
    let mut k = 1u64;
    while k * k <= horizon {
        members.push(k * k);
        k += 1;
    }
    IndexSet::new(horizon, members).expect("members valid")
}
