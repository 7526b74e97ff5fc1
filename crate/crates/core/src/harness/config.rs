//! Declarative experiment configuration.
//!
//! A config file is a single JSON document; every field has a default so
//! configs stay small. The same structure echoes back inside every report,
//! which keeps artifacts self-describing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtering::SelectionMode;
use crate::wavelet::WaveletFamily;

/// Synthetic data source: a mixture spec is built (or loaded) and sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSource {
    #[serde(default = "default_components")]
    pub components: usize,
    #[serde(default = "default_target_auc")]
    pub target_auc: f64,
    #[serde(default = "default_length")]
    pub length: usize,
    /// Family used to synthesize the curves (analysis may differ).
    #[serde(default = "default_family")]
    pub gen_family: WaveletFamily,
    #[serde(default = "default_j0")]
    pub gen_j0: usize,
    #[serde(default = "default_positive_rate")]
    pub positive_rate: f64,
    #[serde(default = "default_atoms_per_scale")]
    pub atoms_per_scale: f64,
    #[serde(default = "default_amplitude_std")]
    pub amplitude_std: f64,
    #[serde(default)]
    pub amplitude_decay: f64,
    #[serde(default)]
    pub amplitude_spread: f64,
    #[serde(default)]
    pub loudness_spread: f64,
    #[serde(default)]
    pub concentration_bands: usize,
    #[serde(default)]
    pub equalize_energy: bool,
    #[serde(default)]
    pub template_correlation: f64,
    #[serde(default)]
    pub scale_coupling: f64,
    #[serde(default = "default_weight_concentration")]
    pub weight_concentration: f64,
    /// Fixed spec seed; defaults to a value derived from the run seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_seed: Option<u64>,
}

impl Default for SynthSource {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

fn default_components() -> usize {
    50
}
fn default_target_auc() -> f64 {
    0.94
}
fn default_length() -> usize {
    2048
}
fn default_family() -> WaveletFamily {
    WaveletFamily::Beylkin
}
fn default_j0() -> usize {
    1
}
fn default_positive_rate() -> f64 {
    0.5
}
fn default_atoms_per_scale() -> f64 {
    2.0
}
fn default_amplitude_std() -> f64 {
    1.0
}
fn default_weight_concentration() -> f64 {
    8.0
}

/// CSV data source; see [`crate::harness::csv`] for the format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSource {
    pub path: String,
    /// Sensors per observation; blocks are padded independently.
    #[serde(default = "default_sensors")]
    pub sensors: usize,
    /// Samples per sensor; inferred from the column count when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensor_len: Option<usize>,
    /// Sidecar JSON with oracle ground truth, when available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sidecar: Option<String>,
}

fn default_sensors() -> usize {
    1
}

/// Where observations come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Synth(SynthSource),
    Csv(CsvSource),
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Synth(SynthSource::default())
    }
}

/// Filter size, absolute or as a percentage of the available coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffCount {
    Count(usize),
    Percent(f64),
}

impl CoeffCount {
    /// Resolves to an absolute count, at least 1.
    pub fn resolve(&self, total: usize) -> Result<usize> {
        let n = match self {
            CoeffCount::Count(c) => *c,
            CoeffCount::Percent(p) => {
                if !(*p > 0.0 && *p <= 100.0) {
                    return Err(Error::InvalidCount(format!(
                        "percent must lie in (0, 100], got {p}"
                    )));
                }
                ((p / 100.0) * total as f64).floor() as usize
            }
        };
        let n = n.max(1);
        if n > total {
            return Err(Error::InvalidCount(format!(
                "{n} coefficients requested, {total} available"
            )));
        }
        Ok(n)
    }
}

/// Which learner scores the test curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    /// One global filter, then the standard ranking tree.
    Filtered,
    /// Per-node adaptive filtering.
    Functional,
    /// The generator's hidden component score; synthetic data only.
    Oracle,
}

/// Evaluation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Bootstrap {
        b: usize,
        /// Resample size; defaults to the training pool size.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_boot: Option<usize>,
    },
    VFold {
        v: usize,
    },
    Holdout {
        train_fraction: f64,
    },
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol::Bootstrap { b: 10, n_boot: None }
    }
}

/// Full experiment description; deserializes from a JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub data: DataSource,
    /// Analysis wavelet family.
    #[serde(default = "default_family")]
    pub family: WaveletFamily,
    /// Projection scale: selection considers detail levels up to `j - 1`,
    /// for `2^j` available coefficients.
    #[serde(default = "default_j")]
    pub j: usize,
    #[serde(default = "default_j0")]
    pub j0: usize,
    #[serde(default = "default_selection")]
    pub selection: SelectionMode,
    #[serde(default = "default_n")]
    pub n: CoeffCount,
    #[serde(default = "default_learner")]
    pub learner: LearnerKind,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_max_leaves")]
    pub max_leaves: usize,
    #[serde(default = "default_min_split")]
    pub min_split: usize,
    #[serde(default = "default_min_node")]
    pub min_node: usize,
    /// Smoothness parameter of the threshold selection rule.
    #[serde(default = "default_threshold_r")]
    pub threshold_r: f64,
    /// Level-cap factor of the threshold selection rule.
    #[serde(default = "default_threshold_c")]
    pub threshold_c: f64,
    #[serde(default)]
    pub protocol: Protocol,
    /// Training pool size (synthetic data).
    #[serde(default = "default_n_train")]
    pub n_train: usize,
    /// Test set size (synthetic data).
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    /// Test fraction split off a CSV dataset for bootstrap/holdout runs.
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    /// Center curves by the training-pool mean before analysis.
    /// Defaults to on for CSV data and off for synthetic data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<bool>,
    /// Prune the master tree by 4-fold cross-validated AUC.
    #[serde(default)]
    pub prune: bool,
    #[serde(default = "default_envelope_grid")]
    pub envelope_grid: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_j() -> usize {
    11
}
fn default_selection() -> SelectionMode {
    SelectionMode::TopVariance
}
fn default_n() -> CoeffCount {
    CoeffCount::Percent(5.0)
}
fn default_learner() -> LearnerKind {
    LearnerKind::Functional
}
fn default_depth() -> usize {
    4
}
fn default_max_leaves() -> usize {
    8
}
fn default_min_split() -> usize {
    20
}
fn default_min_node() -> usize {
    5
}
fn default_threshold_r() -> f64 {
    1.0
}
fn default_threshold_c() -> f64 {
    1.5
}
fn default_n_train() -> usize {
    600
}
fn default_n_test() -> usize {
    600
}
fn default_test_fraction() -> f64 {
    1.0 / 3.0
}
fn default_envelope_grid() -> usize {
    101
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl ExperimentConfig {
    /// Loads a config from a JSON file.
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::DataError(format!("config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Restores the sample sizes of the reference experiments
    /// (train 5000, test 2000, 50 bootstrap resamples of 2000).
    pub fn paper_scale(&mut self) {
        self.n_train = 5000;
        self.n_test = 2000;
        if let Protocol::Bootstrap { b, n_boot } = &mut self.protocol {
            *b = 50;
            *n_boot = Some(2000);
        }
    }

    /// Whether curves get centered by the training-pool mean.
    pub fn centering(&self) -> bool {
        self.center
            .unwrap_or(matches!(self.data, DataSource::Csv(_)))
    }

    pub fn validate(&self) -> Result<()> {
        if self.j < self.j0 {
            return Err(Error::InvalidScale(format!(
                "j {} below j0 {}",
                self.j, self.j0
            )));
        }
        if self.depth == 0 {
            return Err(Error::InvalidParameter("depth must be >= 1".into()));
        }
        match self.protocol {
            Protocol::Bootstrap { b, .. } if b == 0 => {
                Err(Error::InvalidProtocol("bootstrap needs b >= 1".into()))
            }
            Protocol::VFold { v } if v < 2 => {
                Err(Error::InvalidProtocol("v-fold needs v >= 2".into()))
            }
            Protocol::Holdout { train_fraction }
                if !(train_fraction > 0.0 && train_fraction < 1.0) =>
            {
                Err(Error::InvalidProtocol(format!(
                    "holdout fraction must lie in (0,1), got {train_fraction}"
                )))
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_configs_fill_defaults() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"seed": 7, "n": {"count": 20}}"#).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.family, WaveletFamily::Beylkin);
        assert_eq!(cfg.j, 11);
        assert!(matches!(cfg.n, CoeffCount::Count(20)));
        assert!(matches!(cfg.protocol, Protocol::Bootstrap { b: 10, .. }));
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"sees": 7}"#);
        assert!(err.is_err());
    }

    #[test]
    fn percent_resolution_floors_and_clamps() {
        assert_eq!(CoeffCount::Percent(1.0).resolve(2048).unwrap(), 20);
        assert_eq!(CoeffCount::Percent(0.001).resolve(2048).unwrap(), 1);
        assert_eq!(CoeffCount::Count(5).resolve(8).unwrap(), 5);
        assert!(CoeffCount::Count(9).resolve(8).is_err());
        assert!(CoeffCount::Percent(0.0).resolve(8).is_err());
    }

    #[test]
    fn paper_scale_restores_reference_sizes() {
        let mut cfg = ExperimentConfig::default();
        cfg.paper_scale();
        assert_eq!(cfg.n_train, 5000);
        assert_eq!(cfg.n_test, 2000);
        assert!(matches!(
            cfg.protocol,
            Protocol::Bootstrap {
                b: 50,
                n_boot: Some(2000)
            }
        ));
    }

    #[test]
    fn centering_defaults_follow_the_data_source() {
        let synth = ExperimentConfig::default();
        assert!(!synth.centering());
        let mut csv = ExperimentConfig::default();
        csv.data = DataSource::Csv(CsvSource {
            path: "x.csv".into(),
            sensors: 1,
            sensor_len: None,
            sidecar: None,
        });
        assert!(csv.centering());
        csv.center = Some(false);
        assert!(!csv.centering());
    }
}
