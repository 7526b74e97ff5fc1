//! Automatic choice of the filter dimension by complexity-penalized
//! empirical AUC maximization.
//!
//! For each candidate dimension `N` a functional tree is grown, its training
//! AUC computed, and the dimension penalty `4 sqrt((V_N ln(n+1) + ln 2)/n)`
//! subtracted; the candidate maximizing the penalized value wins, smaller
//! `N` on ties. The test AUC reported elsewhere stays honest: no holdout is
//! consumed here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{empirical_auc, ScoredSample};
use crate::treerank::{grow_functional, score_curves, FunctionalParams, LabeledCurveSet};

/// VC-dimension schedule `V_N = c_v * N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySchedule {
    /// Proportionality constant of the VC dimension in the feature count.
    pub vc_constant: f64,
}

impl Default for PenaltySchedule {
    fn default() -> Self {
        Self { vc_constant: 1.0 }
    }
}

impl PenaltySchedule {
    pub fn new(vc_constant: f64) -> Result<Self> {
        if !(vc_constant > 0.0 && vc_constant.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "VC constant must be positive, got {vc_constant}"
            )));
        }
        Ok(Self { vc_constant })
    }

    pub fn vc_dim(&self, n_dim: usize) -> f64 {
        self.vc_constant * n_dim as f64
    }
}

/// Dimension penalty `4 sqrt((V_N ln(n+1) + ln 2)/n)`.
pub fn penalty(n_dim: usize, n_samples: usize, schedule: &PenaltySchedule) -> f64 {
    let v = schedule.vc_dim(n_dim);
    let n = n_samples as f64;
    4.0 * ((v * (n + 1.0).ln() + 2f64.ln()) / n).sqrt()
}

/// One row of the selection report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionRow {
    pub n_coeffs: usize,
    pub train_auc: Option<f64>,
    pub penalty: f64,
    pub cpauc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Result of a dimension sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionReport {
    pub rows: Vec<SelectionRow>,
    pub selected: usize,
}

impl SelectionReport {
    /// CSV rendering: `N,auc,pen,cpauc,selected`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,auc,pen,cpauc,selected\n");
        for row in &self.rows {
            let auc = row.train_auc.map(|v| v.to_string()).unwrap_or_default();
            let cpauc = row.cpauc.map(|v| v.to_string()).unwrap_or_default();
            let selected = row.n_coeffs == self.selected;
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.n_coeffs, auc, row.penalty, cpauc, selected
            ));
        }
        out
    }
}

/// Grows one functional tree per candidate dimension and selects the
/// penalized-AUC maximizer (ties go to the smallest dimension). Candidates
/// that fail to train are recorded and skipped; if every candidate fails the
/// sweep fails.
pub fn select_dimension(
    data: &LabeledCurveSet,
    candidates: &[usize],
    base: &FunctionalParams,
    schedule: &PenaltySchedule,
) -> Result<SelectionReport> {
    if candidates.is_empty() {
        return Err(Error::InvalidCount("no candidate dimensions".into()));
    }
    let mut sorted: Vec<usize> = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let n_samples = data.len();
    let mut rows = Vec::with_capacity(sorted.len());
    for &n_dim in &sorted {
        let pen = penalty(n_dim, n_samples, schedule);
        let mut params = base.clone();
        params.n_coeffs = n_dim;
        params.threshold.n_target = n_dim;
        let row = match grow_functional(data, &params).and_then(|tree| {
            let scores = score_curves(&tree, data.curves())?;
            let scored: Vec<ScoredSample> = scores
                .into_iter()
                .zip(data.labels())
                .map(|(s, &l)| ScoredSample::new(s, l))
                .collect();
            empirical_auc(&scored)
        }) {
            Ok(auc) => SelectionRow {
                n_coeffs: n_dim,
                train_auc: Some(auc),
                penalty: pen,
                cpauc: Some(auc - pen),
                error: None,
            },
            Err(e) => SelectionRow {
                n_coeffs: n_dim,
                train_auc: None,
                penalty: pen,
                cpauc: None,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
    }

    // ascending N with strict improvement keeps the smallest N on ties
    let mut selected: Option<(usize, f64)> = None;
    for row in &rows {
        if let Some(cpauc) = row.cpauc {
            let better = match selected {
                None => true,
                Some((_, best)) => cpauc > best,
            };
            if better {
                selected = Some((row.n_coeffs, cpauc));
            }
        }
    }
    let Some((selected, _)) = selected else {
        return Err(Error::SelectionFailed(
            "every candidate dimension failed to train".into(),
        ));
    };
    Ok(SelectionReport { rows, selected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtering::SelectionMode;
    use crate::treerank::{GrowParams, LeafParams};
    use crate::wavelet::{dwt_inverse, CoefficientSet, WaveletFamily};
    use crate::Label;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn penalty_matches_the_closed_form() {
        let schedule = PenaltySchedule::default();
        // V = 1, n = 1: 4 sqrt(ln 2 + ln 2)
        let expected = 4.0 * (2.0 * 2f64.ln()).sqrt();
        assert!((penalty(1, 1, &schedule) - expected).abs() < 1e-12);
        assert!((expected - 4.7096).abs() < 1e-4);

        // strictly increasing in N, vanishing in n
        let mut prev = 0.0;
        for n_dim in 1..50 {
            let p = penalty(n_dim, 100, &schedule);
            assert!(p > prev);
            prev = p;
        }
        assert!(penalty(10, 1_000_000, &schedule) > penalty(10, 1_000_000_000_000, &schedule));
        assert!(penalty(10, 1_000_000_000_000, &schedule) < 1e-3);
    }

    fn spike_data(rng: &mut ChaCha8Rng, n: usize, informative: usize) -> LabeledCurveSet {
        // informative detail coefficients at level 3; everything else noise
        let len = 128usize;
        let levels = len.trailing_zeros() as usize;
        let mut curves = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let label = if rng.gen_bool(0.5) { Label::Pos } else { Label::Neg };
            let mut cs = CoefficientSet::zeroed(1, levels - 1).unwrap();
            for (level, pos, _) in cs.clone().iter() {
                let mut v: f64 = rng.gen_range(-0.1..0.1);
                if level == 3 && pos < informative {
                    v += if label.is_positive() {
                        rng.gen_range(1.0..2.0)
                    } else {
                        rng.gen_range(-2.0..-1.0)
                    };
                }
                cs.set(level, pos, v).unwrap();
            }
            curves.push(dwt_inverse(&cs, WaveletFamily::Daubechies4).unwrap());
            labels.push(label);
        }
        LabeledCurveSet::analyze(curves, labels, WaveletFamily::Daubechies4, 1).unwrap()
    }

    fn base_params(jmax: usize) -> FunctionalParams {
        FunctionalParams {
            n_coeffs: 1,
            selection: SelectionMode::TopVariance,
            threshold: Default::default(),
            jmax,
            grow: GrowParams {
                depth: 3,
                min_split: 10,
                leaf: LeafParams::default(),
            },
        }
    }

    #[test]
    fn single_candidate_is_returned_unconditionally() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let data = spike_data(&mut rng, 80, 4);
        let report = select_dimension(
            &data,
            &[6],
            &base_params(data.jmax()),
            &PenaltySchedule::default(),
        )
        .unwrap();
        assert_eq!(report.selected, 6);
        assert_eq!(report.rows.len(), 1);
    }

    #[test]
    fn equal_auc_candidates_tie_break_to_the_smaller_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data = spike_data(&mut rng, 120, 2);
        // both candidates capture the 2 informative atoms: equal train AUC,
        // penalty decides
        let report = select_dimension(
            &data,
            &[8, 16],
            &base_params(data.jmax()),
            &PenaltySchedule::default(),
        )
        .unwrap();
        let a8 = report.rows[0].train_auc.unwrap();
        let a16 = report.rows[1].train_auc.unwrap();
        if a8 == a16 {
            assert_eq!(report.selected, 8);
        } else {
            // penalized criterion is definitionally maximized by the winner
            let w = report
                .rows
                .iter()
                .find(|r| r.n_coeffs == report.selected)
                .unwrap();
            for r in &report.rows {
                assert!(w.cpauc.unwrap() >= r.cpauc.unwrap());
            }
        }
    }

    #[test]
    fn report_is_definitionally_maximized_and_renders_csv() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let data = spike_data(&mut rng, 100, 4);
        let report = select_dimension(
            &data,
            &[2, 4, 16],
            &base_params(data.jmax()),
            &PenaltySchedule::default(),
        )
        .unwrap();
        let w = report
            .rows
            .iter()
            .find(|r| r.n_coeffs == report.selected)
            .unwrap();
        for r in &report.rows {
            assert!(w.cpauc.unwrap() >= r.cpauc.unwrap() - 1e-15);
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("N,auc,pen,cpauc,selected\n"));
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.contains("true"));
    }

    #[test]
    fn zero_penalty_degenerates_to_training_auc_argmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data = spike_data(&mut rng, 100, 4);
        let tiny = PenaltySchedule::new(1e-12).unwrap();
        let report = select_dimension(&data, &[2, 4, 8], &base_params(data.jmax()), &tiny).unwrap();
        let best_auc = report
            .rows
            .iter()
            .filter_map(|r| r.train_auc)
            .fold(f64::NEG_INFINITY, f64::max);
        let w = report
            .rows
            .iter()
            .find(|r| r.n_coeffs == report.selected)
            .unwrap();
        assert!(w.train_auc.unwrap() >= best_auc - 1e-9);
    }
}
