//! ROC curves, tie-corrected empirical AUC, and ROC envelopes.
//!
//! The empirical AUC is the rate of concording pairs with ties across
//! classes counted half. It is computed exactly: pair counts are integers
//! accumulated over score-sorted tie groups, and the final value is a single
//! integer ratio, so the fast path agrees bit-for-bit with brute-force pair
//! enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Label;

/// One scored observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample {
    pub score: f64,
    pub label: Label,
}

impl ScoredSample {
    pub fn new(score: f64, label: Label) -> Self {
        Self { score, label }
    }
}

fn class_counts(samples: &[ScoredSample]) -> Result<(u64, u64)> {
    if let Some(bad) = samples.iter().find(|s| !s.score.is_finite()) {
        return Err(Error::NonFinite(format!("score {}", bad.score)));
    }
    let pos = samples.iter().filter(|s| s.label.is_positive()).count() as u64;
    let neg = samples.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateSample(format!(
            "need both classes, got {pos} positive / {neg} negative"
        )));
    }
    Ok((pos, neg))
}

/// Doubled concordance count: `2 * #(neg below pos) + #(cross-class ties)`.
/// The empirical AUC is this value over `2 * n_pos * n_neg`.
fn doubled_concordance(samples: &[ScoredSample]) -> u64 {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_unstable_by(|&a, &b| samples[a].score.total_cmp(&samples[b].score));

    let mut num = 0u64;
    let mut neg_below = 0u64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let mut pos_here = 0u64;
        let mut neg_here = 0u64;
        while j < order.len() && samples[order[j]].score == samples[order[i]].score {
            match samples[order[j]].label {
                Label::Pos => pos_here += 1,
                Label::Neg => neg_here += 1,
            }
            j += 1;
        }
        num += 2 * pos_here * neg_below + pos_here * neg_here;
        neg_below += neg_here;
        i = j;
    }
    num
}

/// Tie-corrected empirical AUC, computed exactly in `O(n log n)`.
pub fn empirical_auc(samples: &[ScoredSample]) -> Result<f64> {
    let (pos, neg) = class_counts(samples)?;
    Ok(doubled_concordance(samples) as f64 / (2 * pos * neg) as f64)
}

/// An ROC polyline: `(false positive rate, true positive rate)` points from
/// `(0, 0)` to `(1, 1)`, both coordinates nondecreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
}

impl RocCurve {
    /// Validated construction from raw points.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "an ROC curve needs at least two points".into(),
            ));
        }
        let first = points[0];
        let last = points[points.len() - 1];
        if first != (0.0, 0.0) || last != (1.0, 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ROC curve must run from (0,0) to (1,1), got {first:?} .. {last:?}"
            )));
        }
        for w in points.windows(2) {
            if w[1].0 < w[0].0 || w[1].1 < w[0].1 {
                return Err(Error::InvalidParameter(
                    "ROC coordinates must be nondecreasing".into(),
                ));
            }
        }
        Ok(Self { points })
    }

    /// Trapezoid area under the polyline.
    pub fn area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) * 0.5)
            .sum()
    }

    /// TPR of the polyline at false-positive rate `alpha`, reading vertical
    /// segments at their upper point.
    pub fn tpr_at(&self, alpha: f64) -> f64 {
        let a = alpha.clamp(0.0, 1.0);
        let mut tpr = 0.0;
        for w in self.points.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if a < x0 {
                break;
            }
            if a > x1 {
                tpr = y1;
                continue;
            }
            // x0 <= a <= x1
            if x1 == x0 {
                tpr = y1.max(tpr);
            } else {
                tpr = tpr.max(y0 + (y1 - y0) * (a - x0) / (x1 - x0));
            }
        }
        tpr
    }

    /// CSV rows `fpr,tpr`, one point per line, with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fpr,tpr\n");
        for (x, y) in &self.points {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }
}

/// Empirical ROC curve of a scored sample: one step point per distinct
/// score threshold, mixed-class tie groups producing diagonal segments.
pub fn roc_curve(samples: &[ScoredSample]) -> Result<RocCurve> {
    let (pos, neg) = class_counts(samples)?;
    let mut order: Vec<usize> = (0..samples.len()).collect();
    // descending score: thresholds sweep from strictest to loosest
    order.sort_unstable_by(|&a, &b| samples[b].score.total_cmp(&samples[a].score));

    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && samples[order[j]].score == samples[order[i]].score {
            match samples[order[j]].label {
                Label::Pos => tp += 1,
                Label::Neg => fp += 1,
            }
            j += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
        i = j;
    }
    RocCurve::new(points)
}

/// Pointwise lower/upper/mean envelope of a set of ROC curves on a uniform
/// FPR grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocEnvelope {
    pub lower: RocCurve,
    pub upper: RocCurve,
    pub mean: RocCurve,
}

/// Pointwise min/max/mean of TPR over a uniform grid of `grid` FPR values.
pub fn roc_envelope(curves: &[RocCurve], grid: usize) -> Result<RocEnvelope> {
    if curves.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if grid < 2 {
        return Err(Error::InvalidCount(format!(
            "envelope grid must have >= 2 points, got {grid}"
        )));
    }
    let build = |f: &dyn Fn(f64) -> f64| -> Result<RocCurve> {
        let mut points = Vec::with_capacity(grid + 1);
        points.push((0.0, 0.0));
        for g in 0..grid {
            let alpha = g as f64 / (grid - 1) as f64;
            points.push((alpha, f(alpha)));
        }
        RocCurve::new(points)
    };
    let lower = build(&|a| {
        curves
            .iter()
            .map(|c| c.tpr_at(a))
            .fold(f64::INFINITY, f64::min)
    })?;
    let upper = build(&|a| {
        curves
            .iter()
            .map(|c| c.tpr_at(a))
            .fold(f64::NEG_INFINITY, f64::max)
    })?;
    let mean = build(&|a| curves.iter().map(|c| c.tpr_at(a)).sum::<f64>() / curves.len() as f64)?;
    Ok(RocEnvelope { lower, upper, mean })
}

/// Brute-force pair enumeration; the independent oracle for [`empirical_auc`].
/// Exposed for tests and the acceptance suite.
pub fn brute_force_auc(samples: &[ScoredSample]) -> Result<f64> {
    let (pos, neg) = class_counts(samples)?;
    let mut num = 0u64;
    for a in samples.iter().filter(|s| !s.label.is_positive()) {
        for b in samples.iter().filter(|s| s.label.is_positive()) {
            if a.score < b.score {
                num += 2;
            } else if a.score == b.score {
                num += 1;
            }
        }
    }
    Ok(num as f64 / (2 * pos * neg) as f64)
}
