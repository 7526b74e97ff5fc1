//! Experiment orchestration: data ingestion and generation, bootstrap and
//! V-fold evaluation protocols, paired local-vs-global comparisons, and
//! report/plot emission.

pub mod config;
pub mod csv;
pub mod plots;
pub mod protocols;

pub use config::{
    CoeffCount, CsvSource, DataSource, ExperimentConfig, LearnerKind, Protocol, SynthSource,
};
pub use csv::{ingest_csv, write_csv, CsvLayout, DatasetSidecar, IngestReport};
pub use plots::{emit_comparison_plots, emit_plots};
pub use protocols::{
    assemble_dataset, compare_local_vs_global, compare_paired, functional_params_for,
    generate_dataset, labeled_set, run_bootstrap, run_experiment, run_holdout, run_vfold,
    train_tree, ComparisonReport, Dataset, EvaluationReport, ExcludedRun, Observation,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::SynthSource;
    use crate::metrics::{empirical_auc, ScoredSample};

    fn tiny_synth(learner: LearnerKind, protocol: Protocol, seed: u64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.data = DataSource::Synth(SynthSource {
            components: 8,
            target_auc: 0.9,
            length: 64,
            ..SynthSource::default()
        });
        cfg.j = 6;
        cfg.j0 = 1;
        cfg.n = CoeffCount::Count(8);
        cfg.depth = 2;
        cfg.min_split = 10;
        cfg.learner = learner;
        cfg.protocol = protocol;
        cfg.n_train = 80;
        cfg.n_test = 120;
        cfg.seed = seed;
        cfg
    }

    #[test]
    fn oracle_bootstrap_run_reproduces_the_test_set_auc() {
        let cfg = tiny_synth(
            LearnerKind::Oracle,
            Protocol::Bootstrap { b: 1, n_boot: None },
            3,
        );
        let report = run_bootstrap(&cfg).unwrap();
        assert_eq!(report.completed_runs, 1);
        assert_eq!(Some(report.mean_auc), report.oracle_test_auc);
        assert_eq!(report.std_auc, 0.0);
    }

    #[test]
    fn reports_are_deterministic_under_a_fixed_seed() {
        let cfg = tiny_synth(
            LearnerKind::Functional,
            Protocol::Bootstrap { b: 3, n_boot: None },
            11,
        );
        let a = run_bootstrap(&cfg).unwrap();
        let b = run_bootstrap(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn report_moments_recompute_from_the_per_run_list() {
        let cfg = tiny_synth(
            LearnerKind::Functional,
            Protocol::Bootstrap { b: 4, n_boot: None },
            7,
        );
        let report = run_bootstrap(&cfg).unwrap();
        let n = report.per_run_auc.len() as f64;
        let mean = report.per_run_auc.iter().sum::<f64>() / n;
        let var = report
            .per_run_auc
            .iter()
            .map(|v| (v - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        assert!((report.mean_auc - mean).abs() < 1e-12);
        assert!((report.std_auc - var.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn oracle_vfold_matches_whole_set_auc() {
        let mut cfg = tiny_synth(LearnerKind::Oracle, Protocol::VFold { v: 4 }, 9);
        cfg.n_train = 400;
        let report = run_vfold(&cfg).unwrap();
        assert_eq!(report.completed_runs, 4);

        let dataset = assemble_dataset(&cfg).unwrap();
        let scored: Vec<ScoredSample> = dataset
            .pool
            .iter()
            .map(|o| ScoredSample::new(o.oracle_score.unwrap(), o.label))
            .collect();
        let whole = empirical_auc(&scored).unwrap();
        assert!(
            (report.mean_auc - whole).abs() < 0.03,
            "folds {} vs whole {whole}",
            report.mean_auc
        );
    }

    #[test]
    fn duplicated_interleaved_pool_gives_equal_fold_aucs() {
        // duplicate every observation back to back: with v = 2 the
        // round-robin fold assignment sends one copy to each fold, so the
        // two folds are identical and so are their AUCs
        let base = tiny_synth(LearnerKind::Oracle, Protocol::VFold { v: 2 }, 21);
        let dataset = assemble_dataset(&base).unwrap();
        let mut curves = Vec::new();
        let mut labels = Vec::new();
        for o in &dataset.pool {
            curves.push(o.curve.clone());
            curves.push(o.curve.clone());
            labels.push(o.label);
            labels.push(o.label);
        }
        let dir = std::env::temp_dir().join("curverank-harness-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("dup.csv");
        write_csv(&path, &curves, &labels).unwrap();

        let mut cfg = base;
        cfg.data = DataSource::Csv(CsvSource {
            path: path.to_string_lossy().into_owned(),
            sensors: 1,
            sensor_len: None,
            sidecar: None,
        });
        cfg.learner = LearnerKind::Functional;
        cfg.center = Some(false);
        let report = run_vfold(&cfg).unwrap();
        assert_eq!(report.completed_runs, 2);
        assert_eq!(report.per_run_auc[0], report.per_run_auc[1]);
    }

    #[test]
    fn leave_one_out_is_rejected() {
        let mut cfg = tiny_synth(LearnerKind::Oracle, Protocol::VFold { v: 40 }, 2);
        cfg.n_train = 80;
        // v = n/2 passes the validation gate; v = n must not
        cfg.protocol = Protocol::VFold { v: 80 };
        assert!(matches!(
            run_vfold(&cfg),
            Err(crate::Error::InvalidProtocol(_))
        ));
    }

    #[test]
    fn paired_comparison_shares_resamples_and_deltas_vanish_at_full_dimension() {
        let mut cfg = tiny_synth(
            LearnerKind::Functional,
            Protocol::Bootstrap { b: 2, n_boot: None },
            5,
        );
        cfg.n = CoeffCount::Percent(100.0);
        let report = compare_paired(&cfg).unwrap();
        assert!(report.resamples_match);
        assert_eq!(report.paired_delta.len(), 2);
        for d in &report.paired_delta {
            assert_eq!(*d, 0.0, "full dimension must make both learners equal");
        }
    }

    #[test]
    fn mismatched_pairs_are_rejected() {
        let a = tiny_synth(
            LearnerKind::Filtered,
            Protocol::Bootstrap { b: 2, n_boot: None },
            5,
        );
        let mut b = tiny_synth(
            LearnerKind::Functional,
            Protocol::Bootstrap { b: 2, n_boot: None },
            5,
        );
        b.depth = 3;
        assert!(matches!(
            compare_local_vs_global(&a, &b),
            Err(crate::Error::ConfigMismatch(_))
        ));
        let same = a.clone();
        assert!(matches!(
            compare_local_vs_global(&a, &same),
            Err(crate::Error::ConfigMismatch(_))
        ));
    }

    #[test]
    fn synth_dataset_round_trips_through_csv_for_oracle_evaluation() {
        let cfg = tiny_synth(
            LearnerKind::Oracle,
            Protocol::Bootstrap { b: 1, n_boot: None },
            13,
        );
        let dataset = assemble_dataset(&cfg).unwrap();
        let dir = std::env::temp_dir().join("curverank-harness-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("export.csv");
        let curves: Vec<_> = dataset.test.iter().map(|o| o.curve.clone()).collect();
        let labels: Vec<_> = dataset.test.iter().map(|o| o.label).collect();
        write_csv(&path, &curves, &labels).unwrap();
        let (c2, l2, _) = ingest_csv(&path, &CsvLayout::default()).unwrap();

        let direct: Vec<ScoredSample> = dataset
            .test
            .iter()
            .map(|o| ScoredSample::new(o.oracle_score.unwrap(), o.label))
            .collect();
        let reread: Vec<ScoredSample> = dataset
            .test
            .iter()
            .zip(c2.iter().zip(&l2))
            .map(|(o, (c, l))| {
                assert_eq!(o.curve.samples(), c.samples());
                ScoredSample::new(o.oracle_score.unwrap(), *l)
            })
            .collect();
        assert_eq!(
            empirical_auc(&direct).unwrap(),
            empirical_auc(&reread).unwrap()
        );
    }
}
