//! Bipartite ranking of labeled curves.
//!
//! The pipeline: curves are analyzed with an orthonormal discrete wavelet
//! transform ([`wavelet`]), reduced to a small coefficient subset by linear,
//! top-variance or thresholded selection ([`filtering`]), and ranked by a
//! recursive scoring tree whose nodes re-select coefficients locally and
//! split with a cost-sensitive classification tree ([`treerank`],
//! [`leafrank`]). Accuracy is measured by ROC/AUC ([`metrics`]), the filter
//! dimension can be chosen by penalized empirical AUC ([`modelselect`]), and
//! [`synth`] generates mixture ensembles with a closed-form optimal ROC for
//! end-to-end validation. [`harness`] orchestrates experiments: ingestion,
//! bootstrap / V-fold protocols, paired comparisons, reports and plots.
//!
//! All randomized components draw from seeded `ChaCha8` generators, so every
//! artifact is reproducible from its config and seed.

use serde::{Deserialize, Serialize};

pub mod error;
pub mod filtering;
pub mod harness;
pub mod leafrank;
pub mod metrics;
pub mod modelselect;
pub mod synth;
pub mod treerank;
pub mod wavelet;

pub use error::{Error, Result};
pub use wavelet::{Curve, WaveletFamily};

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "-1")]
    Neg,
    #[serde(rename = "+1")]
    Pos,
}

impl Label {
    pub fn from_signum(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Label::Pos),
            -1 => Ok(Label::Neg),
            other => Err(Error::InvalidParameter(format!(
                "label must be +1 or -1, got {other}"
            ))),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Label::Pos => 1,
            Label::Neg => -1,
        }
    }

    pub fn is_positive(&self) -> bool {
        matches!(self, Label::Pos)
    }

    pub fn flipped(&self) -> Label {
        match self {
            Label::Pos => Label::Neg,
            Label::Neg => Label::Pos,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:+}", self.signum())
    }
}
