//! Dimension reduction of curve ensembles.
//!
//! A projection filter is a finite set of coefficient indices `(j, k)`.
//! Scaling coefficients at the coarsest scale `j0` are addressed as detail
//! coefficients at the pseudo-level `j0 - 1`. Three selection rules are
//! provided: all coefficients up to a scale (linear), the `N` indices with
//! highest empirical second moment across an ensemble (top-variance), and a
//! level-dependent hard threshold on the empirical second moment.

use std::borrow::Borrow;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavelet::{dwt_forward, CoefficientSet, Curve, WaveletFamily};

/// Address of one coefficient: `(level, position)`. Serializes as a
/// two-element array. Level `j0 - 1` (possibly `-1`) addresses the scaling
/// coefficients.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct CoeffIndex(pub i32, pub usize);

impl CoeffIndex {
    pub fn level(&self) -> i32 {
        self.0
    }

    pub fn pos(&self) -> usize {
        self.1
    }
}

impl std::fmt::Display for CoeffIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// How the indices of a filter were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    Linear,
    TopVariance,
    Threshold,
}

/// A finite ordered set of coefficient indices defining a projection filter.
///
/// `indices` is ordered by descending selection statistic with `(j, k)`
/// lexicographic tie-breaks (lexicographic throughout for the linear rule).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterIndexSet {
    pub indices: Vec<CoeffIndex>,
    pub j0: usize,
    pub jmax_used: usize,
    pub mode: SelectionMode,
    /// Family metadata; set when the producing ensemble's family is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<WaveletFamily>,
}

impl FilterIndexSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Copy with indices reordered lexicographically by `(level, pos)`.
    /// Used wherever a presentation order independent of the selection
    /// statistic is required.
    pub fn sorted_lex(&self) -> FilterIndexSet {
        let mut out = self.clone();
        out.indices.sort_unstable();
        out
    }

    /// FNV-1a fingerprint of the index list and range metadata. Stable
    /// across processes and builds.
    pub fn fingerprint(&self) -> u64 {
        let mut h = fnv1a64_init();
        h = fnv1a64_u64(h, self.j0 as u64);
        h = fnv1a64_u64(h, self.jmax_used as u64);
        for ix in &self.indices {
            h = fnv1a64_u64(h, ix.0 as u64);
            h = fnv1a64_u64(h, ix.1 as u64);
        }
        h
    }

    fn check_no_duplicates(&self) -> Result<()> {
        let set: HashSet<_> = self.indices.iter().collect();
        if set.len() != self.indices.len() {
            return Err(Error::InvalidCoefficients("duplicate filter index".into()));
        }
        Ok(())
    }
}

pub(crate) fn fnv1a64_init() -> u64 {
    0xcbf29ce484222325
}

pub(crate) fn fnv1a64_u64(mut h: u64, v: u64) -> u64 {
    for byte in v.to_le_bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Feature vector obtained by applying a filter to one coefficient set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    /// Fingerprint of the producing filter; 0 for free-standing vectors.
    pub provenance: u64,
}

impl FeatureVector {
    /// Vector without filter provenance (hand-built features, CSV columns).
    pub fn free(values: Vec<f64>) -> Self {
        Self {
            values,
            provenance: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// All indices of the linear projection onto scale `j`: scaling level `j0`
/// plus detail levels `j0 .. j-1`, `2^j` indices in total, in lexicographic
/// order.
pub fn linear_index_set(j: usize, j0: usize) -> Result<FilterIndexSet> {
    if j < j0 {
        return Err(Error::InvalidScale(format!("finest level {j} < j0 {j0}")));
    }
    let mut indices = Vec::with_capacity(1 << j);
    for k in 0..1usize << j0 {
        indices.push(CoeffIndex(j0 as i32 - 1, k));
    }
    for level in j0..j {
        for k in 0..1usize << level {
            indices.push(CoeffIndex(level as i32, k));
        }
    }
    Ok(FilterIndexSet {
        indices,
        j0,
        jmax_used: if j > j0 { j - 1 } else { j0 },
        mode: SelectionMode::Linear,
        family: None,
    })
}

/// Empirical second moment of every index in `[j0 - 1, jmax]` across the
/// ensemble, as `(index, moment)` pairs in lexicographic index order.
fn ensemble_moments<S: Borrow<CoefficientSet>>(
    sets: &[S],
    j0: usize,
    jmax: usize,
) -> Result<Vec<(CoeffIndex, f64)>> {
    if sets.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    for cs in sets {
        let cs = cs.borrow();
        if cs.j0() != j0 || cs.jmax() < jmax {
            return Err(Error::IndexMismatch(format!(
                "coefficient set covers [{}..={}], selection wants [{}..={}]",
                cs.j0() as i32 - 1,
                cs.jmax(),
                j0 as i32 - 1,
                jmax
            )));
        }
    }
    let inv_n = 1.0 / sets.len() as f64;
    let mut out = Vec::new();
    for level in (j0 as i32 - 1)..=(jmax as i32) {
        let count = if level == j0 as i32 - 1 {
            1usize << j0
        } else {
            1usize << level
        };
        for pos in 0..count {
            let m: f64 = sets
                .iter()
                .map(|cs| {
                    let v = cs.borrow().get(level, pos).expect("validated range");
                    v * v
                })
                .sum::<f64>()
                * inv_n;
            out.push((CoeffIndex(level, pos), m));
        }
    }
    Ok(out)
}

/// Orders `(index, moment)` pairs by descending moment, lexicographic ties.
fn sort_by_moment(moments: &mut [(CoeffIndex, f64)]) {
    moments.sort_unstable_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

/// The `n` indices with highest empirical second moment over the ensemble.
pub fn top_variance_index_set<S: Borrow<CoefficientSet>>(
    sets: &[S],
    n: usize,
    j0: usize,
    jmax: usize,
) -> Result<FilterIndexSet> {
    let mut moments = ensemble_moments(sets, j0, jmax)?;
    if n == 0 || n > moments.len() {
        return Err(Error::InvalidCount(format!(
            "requested {n} of {} available indices",
            moments.len()
        )));
    }
    sort_by_moment(&mut moments);
    Ok(FilterIndexSet {
        indices: moments[..n].iter().map(|(ix, _)| *ix).collect(),
        j0,
        jmax_used: jmax,
        mode: SelectionMode::TopVariance,
        family: None,
    })
}

/// Parameters of the hard-threshold selection rule: indices at level `j`
/// survive when their empirical second moment reaches
/// `sqrt(j_eff / n_target^(r+1))`, `j_eff = max(j - j0 + 1, 1)`, considering
/// levels `j <= level_factor * log2(n_target)` only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRule {
    /// Target scale `N` of the approximation.
    pub n_target: usize,
    /// Smoothness parameter `r`; the true smoothness is unknown in practice.
    pub r: f64,
    /// Level-cap factor `c` in `j <= c * log2(N)`.
    pub level_factor: f64,
}

impl Default for ThresholdRule {
    fn default() -> Self {
        Self {
            n_target: 1,
            r: 1.0,
            level_factor: 1.5,
        }
    }
}

impl ThresholdRule {
    pub fn with_target(n_target: usize) -> Self {
        Self {
            n_target,
            ..Self::default()
        }
    }

    /// Threshold applied to the empirical second moment at `level`.
    pub fn level_threshold(&self, level: i32, j0: usize) -> f64 {
        let j_eff = (level - j0 as i32 + 1).max(1) as f64;
        (j_eff / (self.n_target as f64).powf(self.r + 1.0)).sqrt()
    }

    fn level_cap(&self, jmax_cap: usize) -> usize {
        let cap = (self.level_factor * (self.n_target as f64).log2()).ceil();
        (cap.max(0.0) as usize).min(jmax_cap)
    }
}

/// Hard-threshold selection; cardinality is data-dependent.
pub fn threshold_index_set<S: Borrow<CoefficientSet>>(
    sets: &[S],
    rule: &ThresholdRule,
    j0: usize,
    jmax_cap: usize,
) -> Result<FilterIndexSet> {
    if rule.n_target == 0 {
        return Err(Error::InvalidCount("threshold target must be >= 1".into()));
    }
    if rule.r <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "smoothness r must be positive, got {}",
            rule.r
        )));
    }
    let cap = rule.level_cap(jmax_cap).max(j0);
    let mut moments = ensemble_moments(sets, j0, cap)?;
    moments.retain(|(ix, m)| {
        ix.level() <= cap as i32 && *m >= rule.level_threshold(ix.level(), j0)
    });
    sort_by_moment(&mut moments);
    Ok(FilterIndexSet {
        indices: moments.into_iter().map(|(ix, _)| ix).collect(),
        j0,
        jmax_used: cap,
        mode: SelectionMode::Threshold,
        family: None,
    })
}

/// Reads the filter's coefficients off one coefficient set, in the filter's
/// stored order.
pub fn apply_filter(coeffs: &CoefficientSet, filter: &FilterIndexSet) -> Result<FeatureVector> {
    filter.check_no_duplicates()?;
    let mut values = Vec::with_capacity(filter.len());
    for ix in &filter.indices {
        let v = coeffs.get(ix.level(), ix.pos()).ok_or_else(|| {
            Error::IndexMismatch(format!(
                "filter index {ix} outside coefficient range"
            ))
        })?;
        values.push(v);
    }
    Ok(FeatureVector {
        values,
        provenance: filter.fingerprint(),
    })
}

/// Squared L2 distortion of projecting `curve` onto the filter: the energy
/// of the discarded coefficients, which by orthonormality equals
/// `||x - reconstruction from retained coefficients||^2`.
pub fn distortion(curve: &Curve, filter: &FilterIndexSet, family: WaveletFamily) -> Result<f64> {
    let coeffs = dwt_forward(curve, family, filter.j0)?;
    for ix in &filter.indices {
        if coeffs.get(ix.level(), ix.pos()).is_none() {
            return Err(Error::IndexMismatch(format!(
                "filter index {ix} outside coefficient range"
            )));
        }
    }
    let retained: HashSet<CoeffIndex> = filter.indices.iter().copied().collect();
    Ok(coeffs
        .iter()
        .filter(|(level, pos, _)| !retained.contains(&CoeffIndex(*level, *pos)))
        .map(|(_, _, v)| v * v)
        .sum())
}
