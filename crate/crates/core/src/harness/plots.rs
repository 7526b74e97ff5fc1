//! Report artifacts: an SVG of the ROC envelope and a CSV of every plotted
//! series. Output is deterministic byte for byte.

use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::harness::protocols::{ComparisonReport, EvaluationReport};
use crate::metrics::RocCurve;

const WIDTH: f64 = 560.0;
const MARGIN: f64 = 48.0;

fn x_of(fpr: f64) -> f64 {
    MARGIN + fpr * (WIDTH - 2.0 * MARGIN)
}

fn y_of(tpr: f64) -> f64 {
    WIDTH - MARGIN - tpr * (WIDTH - 2.0 * MARGIN)
}

fn polyline(curve: &RocCurve, style: &str) -> String {
    let pts: Vec<String> = curve
        .points
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", x_of(*x), y_of(*y)))
        .collect();
    format!("  <polyline points=\"{}\" fill=\"none\" {style}/>\n", pts.join(" "))
}

fn band(lower: &RocCurve, upper: &RocCurve, fill: &str) -> String {
    let mut pts: Vec<String> = upper
        .points
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", x_of(*x), y_of(*y)))
        .collect();
    pts.extend(
        lower
            .points
            .iter()
            .rev()
            .map(|(x, y)| format!("{:.2},{:.2}", x_of(*x), y_of(*y))),
    );
    format!("  <polygon points=\"{}\" fill=\"{fill}\" stroke=\"none\" opacity=\"0.3\"/>\n", pts.join(" "))
}

fn svg_frame(title: &str) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{W}\" viewBox=\"0 0 {W} {W}\">\n",
        W = WIDTH
    ));
    s.push_str(&format!(
        "  <rect width=\"{W}\" height=\"{W}\" fill=\"white\"/>\n",
        W = WIDTH
    ));
    s.push_str(&format!(
        "  <rect x=\"{m}\" y=\"{m}\" width=\"{w}\" height=\"{w}\" fill=\"none\" stroke=\"#333\"/>\n",
        m = MARGIN,
        w = WIDTH - 2.0 * MARGIN
    ));
    for tick in [0.25, 0.5, 0.75] {
        s.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{m}\" x2=\"{:.2}\" y2=\"{h}\" stroke=\"#ddd\"/>\n",
            x_of(tick),
            x_of(tick),
            m = MARGIN,
            h = WIDTH - MARGIN
        ));
        s.push_str(&format!(
            "  <line x1=\"{m}\" y1=\"{:.2}\" x2=\"{h}\" y2=\"{:.2}\" stroke=\"#ddd\"/>\n",
            y_of(tick),
            y_of(tick),
            m = MARGIN,
            h = WIDTH - MARGIN
        ));
    }
    s.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" font-family=\"sans-serif\">{title}</text>\n",
        MARGIN,
        MARGIN - 14.0
    ));
    s.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" font-family=\"sans-serif\">false positive rate</text>\n",
        WIDTH / 2.0 - 48.0,
        WIDTH - 14.0
    ));
    s
}

fn eval_body(report: &EvaluationReport, run_style: &str, mean_color: &str) -> String {
    let mut s = String::new();
    s.push_str(&band(&report.envelope.lower, &report.envelope.upper, mean_color));
    for roc in &report.per_run_roc {
        s.push_str(&polyline(roc, run_style));
    }
    s.push_str(&polyline(
        &report.envelope.mean,
        &format!("stroke=\"{mean_color}\" stroke-width=\"2\""),
    ));
    if let Some(oracle) = &report.oracle_roc {
        s.push_str(&polyline(
            oracle,
            "stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6,4\"",
        ));
    }
    s
}

/// Writes `roc.svg` and `roc_series.csv` for one evaluation report.
/// Returns the created paths.
pub fn emit_plots(report: &EvaluationReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let title = format!(
        "test ROC envelope ({} runs, mean AUC {:.4})",
        report.completed_runs, report.mean_auc
    );
    let mut svg = svg_frame(&title);
    svg.push_str(&eval_body(report, "stroke=\"#9ecae1\" stroke-width=\"1\"", "#1f77b4"));
    svg.push_str("</svg>\n");
    let svg_path = out_dir.join("roc.svg");
    std::fs::write(&svg_path, svg)?;

    let mut csv = String::from("series,fpr,tpr\n");
    let mut series = |name: &str, curve: &RocCurve| {
        for (x, y) in &curve.points {
            csv.push_str(&format!("{name},{x},{y}\n"));
        }
    };
    for (i, roc) in report.per_run_roc.iter().enumerate() {
        series(&format!("run_{i}"), roc);
    }
    series("envelope_lower", &report.envelope.lower);
    series("envelope_upper", &report.envelope.upper);
    series("envelope_mean", &report.envelope.mean);
    if let Some(oracle) = &report.oracle_roc {
        series("oracle_optimal", oracle);
    }
    let csv_path = out_dir.join("roc_series.csv");
    std::fs::write(&csv_path, csv)?;
    Ok(vec![svg_path, csv_path])
}

/// Writes the two-learner overlay (`comparison.svg`) plus both per-learner
/// series files.
pub fn emit_comparison_plots(report: &ComparisonReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let title = format!(
        "filtered (black) vs functional (blue), mean delta {:+.4}",
        report.mean_delta
    );
    let mut svg = svg_frame(&title);
    svg.push_str(&eval_body(
        &report.filtered,
        "stroke=\"#bbbbbb\" stroke-width=\"1\"",
        "#444444",
    ));
    svg.push_str(&eval_body(
        &report.functional,
        "stroke=\"#9ecae1\" stroke-width=\"1\"",
        "#1f77b4",
    ));
    svg.push_str("</svg>\n");
    let svg_path = out_dir.join("comparison.svg");
    std::fs::write(&svg_path, svg)?;

    let mut out = vec![svg_path];
    out.extend(emit_plots(&report.filtered, &out_dir.join("filtered"))?);
    out.extend(emit_plots(&report.functional, &out_dir.join("functional"))?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{ExperimentConfig, LearnerKind, Protocol, SynthSource};

    fn small_report() -> EvaluationReport {
        let mut cfg = ExperimentConfig::default();
        cfg.data = crate::harness::config::DataSource::Synth(SynthSource {
            components: 8,
            length: 64,
            ..SynthSource::default()
        });
        cfg.learner = LearnerKind::Oracle;
        cfg.protocol = Protocol::Bootstrap { b: 1, n_boot: None };
        cfg.n_train = 40;
        cfg.n_test = 60;
        cfg.seed = 5;
        crate::harness::protocols::run_bootstrap(&cfg).unwrap()
    }

    #[test]
    fn single_run_svg_has_one_run_polyline_and_the_oracle_curve() {
        let report = small_report();
        let dir = std::env::temp_dir().join("curverank-plot-test");
        let files = emit_plots(&report, &dir).unwrap();
        let svg = std::fs::read_to_string(&files[0]).unwrap();
        // band polygon + run + mean + oracle
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
        assert_eq!(svg.matches("<polygon").count(), 1);
    }

    #[test]
    fn emitted_series_are_consistent_with_the_report() {
        let report = small_report();
        let dir = std::env::temp_dir().join("curverank-plot-test2");
        let files = emit_plots(&report, &dir).unwrap();
        let csv = std::fs::read_to_string(&files[1]).unwrap();

        // envelope width nonnegative everywhere
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut run0 = Vec::new();
        for line in csv.lines().skip(1) {
            let mut parts = line.split(',');
            let name = parts.next().unwrap();
            let fpr: f64 = parts.next().unwrap().parse().unwrap();
            let tpr: f64 = parts.next().unwrap().parse().unwrap();
            match name {
                "envelope_lower" => lower.push((fpr, tpr)),
                "envelope_upper" => upper.push((fpr, tpr)),
                "run_0" => run0.push((fpr, tpr)),
                _ => {}
            }
        }
        assert_eq!(lower.len(), upper.len());
        for (lo, hi) in lower.iter().zip(&upper) {
            assert_eq!(lo.0, hi.0);
            assert!(hi.1 >= lo.1);
        }

        // the re-read run curve's trapezoid area equals the reported AUC
        let area: f64 = run0
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) * 0.5)
            .sum();
        assert!((area - report.per_run_auc[0]).abs() < 1e-9);
    }
}
