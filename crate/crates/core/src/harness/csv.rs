//! Curve CSV ingestion and emission.
//!
//! One row per observation: the first column is the label (`-1`/`1`, with
//! `0` accepted for the negative class), the remaining columns are samples.
//! Multi-sensor rows carry the sensors' samples back to back; each sensor
//! block is zero-padded to the next power of two and the padded blocks are
//! concatenated (with tail padding when the sensor count is not a power of
//! two), so one observation stays one dyadic curve.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::MixtureSpec;
use crate::wavelet::Curve;
use crate::Label;

/// Physical layout of the value columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvLayout {
    pub sensors: usize,
    /// Samples per sensor; inferred from the column count when `None`.
    pub sensor_len: Option<usize>,
}

impl Default for CsvLayout {
    fn default() -> Self {
        Self {
            sensors: 1,
            sensor_len: None,
        }
    }
}

/// What ingestion did to the raw rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows: usize,
    pub sensors: usize,
    pub sensor_len: usize,
    pub padded_sensor_len: usize,
    /// Zeros appended to every sensor block.
    pub pad_per_sensor: usize,
    /// Final dyadic curve length after concatenation and tail padding.
    pub curve_len: usize,
    /// Only one class present; training will fail loudly later.
    pub single_class: bool,
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two().max(2)
}

fn parse_label(field: &str, line: usize) -> Result<Label> {
    match field.trim() {
        "1" | "+1" => Ok(Label::Pos),
        "-1" | "0" => Ok(Label::Neg),
        other => Err(Error::ParseError {
            line,
            msg: format!("label must be -1, 0 or 1, got {other:?}"),
        }),
    }
}

/// Reads a labeled curve file, padding rows to dyadic length.
pub fn ingest_csv(path: &Path, layout: &CsvLayout) -> Result<(Vec<Curve>, Vec<Label>, IngestReport)> {
    if layout.sensors == 0 {
        return Err(Error::InvalidParameter("sensor count must be >= 1".into()));
    }
    let text = std::fs::read_to_string(path)?;
    let mut curves = Vec::new();
    let mut labels = Vec::new();
    let mut expected_cols = None;
    let mut report: Option<IngestReport> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() < 2 {
            return Err(Error::FormatError {
                line,
                msg: "need a label column and at least one sample".into(),
            });
        }
        match expected_cols {
            None => expected_cols = Some(fields.len()),
            Some(cols) if cols != fields.len() => {
                return Err(Error::FormatError {
                    line,
                    msg: format!("ragged row: {} columns, expected {cols}", fields.len()),
                })
            }
            _ => {}
        }
        let label = parse_label(fields[0], line)?;
        let values = fields[1..]
            .iter()
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| Error::ParseError {
                    line,
                    msg: format!("not a number: {f:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::ParseError {
                line,
                msg: "non-finite sample".into(),
            });
        }

        let total = values.len();
        let sensor_len = match layout.sensor_len {
            Some(l) => l,
            None => {
                if total % layout.sensors != 0 {
                    return Err(Error::FormatError {
                        line,
                        msg: format!(
                            "{total} samples do not divide into {} sensors",
                            layout.sensors
                        ),
                    });
                }
                total / layout.sensors
            }
        };
        if sensor_len * layout.sensors != total {
            return Err(Error::FormatError {
                line,
                msg: format!(
                    "expected {} x {} samples, found {total}",
                    layout.sensors, sensor_len
                ),
            });
        }

        let padded_sensor = next_pow2(sensor_len);
        let mut samples = Vec::with_capacity(padded_sensor * layout.sensors);
        for s in 0..layout.sensors {
            let block = &values[s * sensor_len..(s + 1) * sensor_len];
            samples.extend_from_slice(block);
            samples.resize(samples.len() + (padded_sensor - sensor_len), 0.0);
        }
        let curve_len = next_pow2(samples.len());
        samples.resize(curve_len, 0.0);

        report.get_or_insert(IngestReport {
            rows: 0,
            sensors: layout.sensors,
            sensor_len,
            padded_sensor_len: padded_sensor,
            pad_per_sensor: padded_sensor - sensor_len,
            curve_len,
            single_class: false,
        });
        curves.push(Curve::new(samples)?);
        labels.push(label);
    }

    let Some(mut report) = report else {
        return Err(Error::DataError(format!("{}: no data rows", path.display())));
    };
    report.rows = curves.len();
    let pos = labels.iter().filter(|l| l.is_positive()).count();
    report.single_class = pos == 0 || pos == labels.len();
    Ok((curves, labels, report))
}

/// Writes curves in the same format `ingest_csv` reads. Floats use the
/// shortest round-trip decimal form, so write → ingest → write is stable
/// byte for byte.
pub fn write_csv(path: &Path, curves: &[Curve], labels: &[Label]) -> Result<()> {
    if curves.len() != labels.len() {
        return Err(Error::DataError(format!(
            "{} curves vs {} labels",
            curves.len(),
            labels.len()
        )));
    }
    let mut out = String::new();
    for (curve, label) in curves.iter().zip(labels) {
        out.push_str(&label.signum().to_string());
        for v in curve.samples() {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Ground-truth sidecar written next to generated datasets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSidecar {
    pub spec: MixtureSpec,
    pub sample_seed: u64,
    pub n: usize,
    /// Hidden component of each row, 0-based.
    pub components: Vec<usize>,
}

impl DatasetSidecar {
    /// Optimal score of each row under the generating mixture.
    pub fn oracle_scores(&self) -> Vec<f64> {
        let k = self.spec.components();
        self.components.iter().map(|&c| (k - c) as f64).collect()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::DataError(format!("sidecar {}: {e}", path.display())))
    }
}
