//! Command-line experiment runner.
//!
//! Subcommands: `generate` a synthetic dataset, `train` a ranking tree,
//! `score` curves with a saved tree, `evaluate` a config under its
//! protocol, `compare` the filtered and functional learners on shared
//! resamples, and `select-dim` for penalized dimension selection.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime
//! error. All randomness derives from `--seed` (or the config's seed), so
//! artifacts are byte-identical across reruns.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use curverank::harness::{
    self, csv::DatasetSidecar, CsvLayout, ExperimentConfig, Observation,
};
use curverank::metrics::{empirical_auc, ScoredSample};
use curverank::modelselect::{select_dimension, PenaltySchedule};
use curverank::treerank::{score_curve, RankingTree};
use curverank::Error;

#[derive(Parser)]
#[command(name = "curverank", version, about = "Bipartite ranking of labeled curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON experiment config; defaults apply for missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Restore the reference sample sizes (train 5000, test 2000, B 50).
    #[arg(long)]
    paper_scale: bool,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_path(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.paper_scale {
            cfg.paper_scale();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic dataset and write curves plus an oracle sidecar.
    Generate {
        #[command(flatten)]
        config: ConfigArgs,
        /// Rows to generate; defaults to the config's training pool size.
        #[arg(long)]
        n: Option<usize>,
        /// Output CSV path; the sidecar lands next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the configured learner on a curve CSV and save the tree.
    Train {
        #[command(flatten)]
        config: ConfigArgs,
        /// Input curve CSV.
        #[arg(long)]
        data: PathBuf,
        /// Output tree JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score curves with a saved tree.
    Score {
        /// Tree JSON produced by `train`.
        #[arg(long)]
        tree: PathBuf,
        /// Input curve CSV.
        #[arg(long)]
        data: PathBuf,
        /// Output scores CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the config's evaluation protocol and emit report + plots.
    Evaluate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Paired filtered-vs-functional comparison on shared resamples.
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Penalized dimension selection over candidate filter sizes.
    SelectDim {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated candidate dimensions, e.g. 10,20,51.
        #[arg(long, value_delimiter = ',', required = true)]
        candidates: Vec<usize>,
        /// VC-dimension proportionality constant.
        #[arg(long, default_value_t = 1.0)]
        vc_constant: f64,
        /// Output report CSV.
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::UnknownFamily(_)
        | Error::InvalidParameter(_)
        | Error::InvalidScale(_)
        | Error::InvalidCount(_)
        | Error::InvalidProtocol(_)
        | Error::ConfigMismatch(_) => 2,
        Error::DataError(_)
        | Error::FormatError { .. }
        | Error::ParseError { .. }
        | Error::InvalidLength { .. }
        | Error::NonFinite(_)
        | Error::Io(_) => 3,
        _ => 4,
    }
}

fn ingest(path: &PathBuf) -> Result<(Vec<Observation>, harness::IngestReport), Error> {
    let (curves, labels, report) = harness::ingest_csv(path, &CsvLayout::default())?;
    let obs = curves
        .into_iter()
        .zip(labels)
        .map(|(curve, label)| Observation {
            curve,
            label,
            oracle_score: None,
        })
        .collect();
    Ok((obs, report))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Generate { config, n, out } => {
            let cfg = config.load()?;
            let n = n.unwrap_or(cfg.n_train);
            let (obs, spec, sample_seed) = harness::generate_dataset(&cfg, n)?;
            let curves: Vec<_> = obs.iter().map(|o| o.curve.clone()).collect();
            let labels: Vec<_> = obs.iter().map(|o| o.label).collect();
            harness::write_csv(&out, &curves, &labels)?;
            // the oracle score is K - component, so the component recovers
            // from it exactly
            let k = spec.components();
            let sidecar = DatasetSidecar {
                components: obs
                    .iter()
                    .map(|o| k - o.oracle_score.expect("synthetic data") as usize)
                    .collect(),
                spec,
                sample_seed,
                n,
            };
            let sidecar_path = out.with_extension("sidecar.json");
            std::fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar)?)?;
            println!(
                "wrote {} rows to {} (sidecar {})",
                n,
                out.display(),
                sidecar_path.display()
            );
            Ok(())
        }
        Command::Train { config, data, out } => {
            let cfg = config.load()?;
            let (obs, _) = ingest(&data)?;
            let tree = harness::train_tree(&cfg, &obs)?;
            std::fs::write(&out, serde_json::to_string_pretty(&tree)?)?;
            let scored: Vec<ScoredSample> = obs
                .iter()
                .map(|o| Ok(ScoredSample::new(score_curve(&tree, &o.curve)?, o.label)))
                .collect::<Result<Vec<_>, Error>>()?;
            println!(
                "trained tree with {} leaves, train AUC {:.4} -> {}",
                tree.num_leaves(),
                empirical_auc(&scored)?,
                out.display()
            );
            Ok(())
        }
        Command::Score { tree, data, out } => {
            let text = std::fs::read_to_string(&tree)?;
            let tree: RankingTree = serde_json::from_str(&text)
                .map_err(|e| Error::DataError(format!("tree file: {e}")))?;
            let (obs, _) = ingest(&data)?;
            let mut csv = String::from("index,label,score\n");
            for (i, o) in obs.iter().enumerate() {
                let score = score_curve(&tree, &o.curve)?;
                csv.push_str(&format!("{},{},{}\n", i, o.label.signum(), score));
            }
            std::fs::write(&out, csv)?;
            println!("scored {} curves -> {}", obs.len(), out.display());
            Ok(())
        }
        Command::Evaluate { config, out_dir } => {
            let cfg = config.load()?;
            let report = harness::run_experiment(&cfg)?;
            std::fs::create_dir_all(&out_dir)?;
            std::fs::write(
                out_dir.join("report.json"),
                serde_json::to_string_pretty(&report)?,
            )?;
            harness::emit_plots(&report, &out_dir)?;
            eprintln!("runtime: {:?}", report.runtime);
            println!(
                "mean test AUC {:.4} (+/- {:.4}) over {} runs{} -> {}",
                report.mean_auc,
                report.std_auc,
                report.completed_runs,
                report
                    .oracle_optimal_auc
                    .map(|a| format!(", optimal AUC {a:.4}"))
                    .unwrap_or_default(),
                out_dir.display()
            );
            Ok(())
        }
        Command::Compare { config, out_dir } => {
            let cfg = config.load()?;
            let report = harness::compare_paired(&cfg)?;
            std::fs::create_dir_all(&out_dir)?;
            std::fs::write(
                out_dir.join("comparison.json"),
                serde_json::to_string_pretty(&report)?,
            )?;
            harness::emit_comparison_plots(&report, &out_dir)?;
            eprintln!(
                "runtime: {:?}",
                report.filtered.runtime + report.functional.runtime
            );
            println!(
                "filtered {:.4} vs functional {:.4}, mean delta {:+.4} over {} paired runs -> {}",
                report.filtered.mean_auc,
                report.functional.mean_auc,
                report.mean_delta,
                report.paired_delta.len(),
                out_dir.display()
            );
            Ok(())
        }
        Command::SelectDim {
            config,
            candidates,
            vc_constant,
            out,
        } => {
            let cfg = config.load()?;
            let dataset = harness::assemble_dataset(&cfg)?;
            let data = harness::labeled_set(&cfg, &dataset.pool)?;
            let params = harness::functional_params_for(&cfg, &data)?;
            let schedule = PenaltySchedule::new(vc_constant)?;
            let report = select_dimension(&data, &candidates, &params, &schedule)?;
            std::fs::write(&out, report.to_csv())?;
            println!("selected N = {} -> {}", report.selected, out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
