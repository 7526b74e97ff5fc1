//! Evaluation protocols: bootstrap, stratified V-fold, holdout, and the
//! paired local-vs-global comparison.
//!
//! Determinism contract: a report is a pure function of (config, seed).
//! Every random draw comes from a ChaCha8 generator seeded from the config
//! seed on a documented stream, independent of scheduling or data layout,
//! so paired runs share their resample index sets exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtering::{
    fnv1a64_init, fnv1a64_u64, linear_index_set, threshold_index_set, top_variance_index_set,
    FilterIndexSet, SelectionMode, ThresholdRule,
};
use crate::harness::config::{
    CsvSource, DataSource, ExperimentConfig, LearnerKind, Protocol, SynthSource,
};
use crate::harness::csv::{ingest_csv, CsvLayout, DatasetSidecar, IngestReport};
use crate::metrics::{empirical_auc, roc_curve, roc_envelope, RocCurve, RocEnvelope, ScoredSample};
use crate::synth::{build_spec, optimal_auc, optimal_roc, sample, AtomProcess, MixtureSpec, SpecParams};
use crate::treerank::{
    grow_filtered, grow_functional, prune_filtered, prune_functional, score_curve,
    stratified_folds, FunctionalParams, GrowParams, LabeledCurveSet, LeafParams, PruneMethod,
    RankingTree,
};
use crate::wavelet::Curve;
use crate::Label;

// Seed-stream layout (ChaCha8 stream ids and derived seeds).
const STREAM_CSV_SPLIT: u64 = 0xB1;
const STREAM_RESAMPLE_BASE: u64 = 0xC000;
const TAG_SPEC: u64 = 0xA1;
const TAG_TRAIN: u64 = 0xA2;
const TAG_TEST: u64 = 0xA3;

fn derive_seed(base: u64, tag: u64) -> u64 {
    fnv1a64_u64(fnv1a64_u64(fnv1a64_init(), base), tag)
}

fn fnv_indices(indices: &[usize]) -> u64 {
    indices
        .iter()
        .fold(fnv1a64_init(), |h, &i| fnv1a64_u64(h, i as u64))
}

/// One observation as the protocols see it.
#[derive(Debug, Clone)]
pub struct Observation {
    pub curve: Curve,
    pub label: Label,
    /// Hidden-component score for synthetic data.
    pub oracle_score: Option<f64>,
}

/// Assembled experiment data: a training pool, a test set (empty for
/// V-fold), and generator ground truth when available.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub pool: Vec<Observation>,
    pub test: Vec<Observation>,
    pub spec: Option<MixtureSpec>,
    pub ingest: Option<IngestReport>,
}

fn synth_observations(spec: &MixtureSpec, n: usize, seed: u64) -> Result<Vec<Observation>> {
    Ok(sample(spec, n, seed)?
        .into_iter()
        .map(|s| Observation {
            curve: s.curve,
            label: s.label,
            oracle_score: Some(s.oracle_score),
        })
        .collect())
}

fn spec_from_source(source: &SynthSource, config_seed: u64) -> Result<MixtureSpec> {
    let params = SpecParams {
        components: source.components,
        target_auc: source.target_auc,
        family: source.gen_family,
        signal_length: source.length,
        j0: source.gen_j0,
        positive_rate: source.positive_rate,
        process: AtomProcess {
            atoms_per_scale: source.atoms_per_scale,
            amplitude_std: source.amplitude_std,
            amplitude_decay: source.amplitude_decay,
            amplitude_spread: source.amplitude_spread,
            loudness_spread: source.loudness_spread,
            concentration_bands: source.concentration_bands,
            equalize_energy: source.equalize_energy,
            template_correlation: source.template_correlation,
            scale_coupling: source.scale_coupling,
        },
        weight_concentration: source.weight_concentration,
    };
    build_spec(
        &params,
        source.spec_seed.unwrap_or_else(|| derive_seed(config_seed, TAG_SPEC)),
    )
}

fn csv_observations(source: &CsvSource) -> Result<(Vec<Observation>, IngestReport)> {
    let layout = CsvLayout {
        sensors: source.sensors,
        sensor_len: source.sensor_len,
    };
    let (curves, labels, report) = ingest_csv(std::path::Path::new(&source.path), &layout)?;
    let oracle = match &source.sidecar {
        Some(sidecar) => {
            let sc = DatasetSidecar::from_path(std::path::Path::new(sidecar))?;
            if sc.components.len() != curves.len() {
                return Err(Error::DataError(format!(
                    "sidecar covers {} rows, dataset has {}",
                    sc.components.len(),
                    curves.len()
                )));
            }
            Some(sc.oracle_scores())
        }
        None => None,
    };
    let obs = curves
        .into_iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (curve, label))| Observation {
            curve,
            label,
            oracle_score: oracle.as_ref().map(|o| o[i]),
        })
        .collect();
    Ok((obs, report))
}

/// Splits CSV observations into pool and test, stratified, shuffled by a
/// dedicated seed stream.
fn split_csv(
    mut obs: Vec<Observation>,
    test_fraction: f64,
    seed: u64,
) -> (Vec<Observation>, Vec<Observation>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_CSV_SPLIT);
    let mut order: Vec<usize> = (0..obs.len()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut pool = Vec::new();
    let mut test = Vec::new();
    let mut taken = [0usize; 2];
    let totals = [
        obs.iter().filter(|o| !o.label.is_positive()).count(),
        obs.iter().filter(|o| o.label.is_positive()).count(),
    ];
    let quota = [
        (totals[0] as f64 * test_fraction).round() as usize,
        (totals[1] as f64 * test_fraction).round() as usize,
    ];
    let mut by_order: Vec<Option<Observation>> = obs.drain(..).map(Some).collect();
    for &i in &order {
        let o = by_order[i].take().expect("visited once");
        let class = usize::from(o.label.is_positive());
        if taken[class] < quota[class] {
            taken[class] += 1;
            test.push(o);
        } else {
            pool.push(o);
        }
    }
    (pool, test)
}

/// Builds the dataset a config describes. For the V-fold protocol all data
/// lands in the pool; otherwise a test split is made (generated separately
/// for synthetic sources).
pub fn assemble_dataset(config: &ExperimentConfig) -> Result<Dataset> {
    config.validate()?;
    let vfold = matches!(config.protocol, Protocol::VFold { .. });
    match &config.data {
        DataSource::Synth(source) => {
            let spec = spec_from_source(source, config.seed)?;
            let pool = synth_observations(&spec, config.n_train, derive_seed(config.seed, TAG_TRAIN))?;
            let test = if vfold {
                Vec::new()
            } else {
                synth_observations(&spec, config.n_test, derive_seed(config.seed, TAG_TEST))?
            };
            Ok(Dataset {
                pool,
                test,
                spec: Some(spec),
                ingest: None,
            })
        }
        DataSource::Csv(source) => {
            let (obs, report) = csv_observations(source)?;
            let test_fraction = match config.protocol {
                Protocol::Holdout { train_fraction } => 1.0 - train_fraction,
                _ => config.test_fraction,
            };
            let (pool, test) = if vfold {
                (obs, Vec::new())
            } else {
                split_csv(obs, test_fraction, config.seed)
            };
            if pool.is_empty() {
                return Err(Error::DataError("empty training pool after split".into()));
            }
            Ok(Dataset {
                pool,
                test,
                spec: None,
                ingest: Some(report),
            })
        }
    }
}

/// Subtracts the training-pool mean curve from every observation.
fn center_dataset(dataset: &mut Dataset) -> Result<()> {
    let n = dataset.pool.len();
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let len = dataset.pool[0].curve.len();
    let mut mean = vec![0.0; len];
    for obs in &dataset.pool {
        for (m, v) in mean.iter_mut().zip(obs.curve.samples()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let recenter = |obs: &mut Observation| -> Result<()> {
        let samples = obs
            .curve
            .samples()
            .iter()
            .zip(&mean)
            .map(|(v, m)| v - m)
            .collect();
        obs.curve = Curve::new(samples)?;
        Ok(())
    };
    for obs in dataset.pool.iter_mut().chain(dataset.test.iter_mut()) {
        recenter(obs)?;
    }
    Ok(())
}

/// A fitted scoring rule.
enum Scorer {
    Tree(RankingTree),
    Oracle,
}

impl Scorer {
    fn score(&self, obs: &Observation) -> Result<f64> {
        match self {
            Scorer::Tree(tree) => score_curve(tree, &obs.curve),
            Scorer::Oracle => obs.oracle_score.ok_or_else(|| {
                Error::DataError("oracle scoring needs generator ground truth".into())
            }),
        }
    }
}

fn grow_params(config: &ExperimentConfig) -> GrowParams {
    GrowParams {
        depth: config.depth,
        min_split: config.min_split,
        leaf: LeafParams {
            max_leaves: config.max_leaves,
            min_node: config.min_node,
        },
    }
}

fn threshold_rule(config: &ExperimentConfig, n: usize) -> ThresholdRule {
    ThresholdRule {
        n_target: n,
        r: config.threshold_r,
        level_factor: config.threshold_c,
    }
}

/// Selects the global filter for the filtered learner.
fn global_filter(
    config: &ExperimentConfig,
    data: &LabeledCurveSet,
    n: usize,
    jmax_sel: usize,
) -> Result<FilterIndexSet> {
    match config.selection {
        SelectionMode::Linear => {
            let full = linear_index_set(config.j, config.j0)?;
            Ok(FilterIndexSet {
                indices: full.indices.into_iter().take(n).collect(),
                ..full
            })
        }
        SelectionMode::TopVariance => top_variance_index_set(data.coeffs(), n, config.j0, jmax_sel),
        SelectionMode::Threshold => {
            threshold_index_set(data.coeffs(), &threshold_rule(config, n), config.j0, jmax_sel)
        }
    }
}

/// Trains the configured learner on the given observations.
fn fit(config: &ExperimentConfig, train: &[Observation]) -> Result<Scorer> {
    if matches!(config.learner, LearnerKind::Oracle) {
        return Ok(Scorer::Oracle);
    }
    let curves: Vec<Curve> = train.iter().map(|o| o.curve.clone()).collect();
    let labels: Vec<Label> = train.iter().map(|o| o.label).collect();
    let data = LabeledCurveSet::analyze(curves, labels, config.family, config.j0)?;
    let jmax_sel = config.j.saturating_sub(1).max(config.j0);
    if jmax_sel > data.jmax() {
        return Err(Error::InvalidScale(format!(
            "config level j {} exceeds the data's finest level {}",
            config.j,
            data.jmax() + 1
        )));
    }
    let total = 1usize << config.j;
    let n = config.n.resolve(total)?;
    let grow = grow_params(config);

    let tree = match (config.learner, config.selection) {
        // linear selection is data-independent, so both learners coincide
        (LearnerKind::Filtered, _) | (LearnerKind::Functional, SelectionMode::Linear) => {
            let filter = global_filter(config, &data, n, jmax_sel)?;
            let tree = grow_filtered(&data, &filter, &grow)?;
            if config.prune {
                prune_filtered(&tree, &data, &filter, &grow, PruneMethod::VFold(4))?.tree
            } else {
                tree
            }
        }
        (LearnerKind::Functional, _) => {
            let params = FunctionalParams {
                n_coeffs: n,
                selection: config.selection,
                threshold: threshold_rule(config, n),
                jmax: jmax_sel,
                grow,
            };
            let tree = grow_functional(&data, &params)?;
            if config.prune {
                prune_functional(&tree, &data, &params, PruneMethod::VFold(4))?.tree
            } else {
                tree
            }
        }
        (LearnerKind::Oracle, _) => unreachable!(),
    };
    Ok(Scorer::Tree(tree))
}

fn evaluate_scorer(scorer: &Scorer, test: &[Observation]) -> Result<(f64, RocCurve)> {
    let scored: Vec<ScoredSample> = test
        .iter()
        .map(|o| Ok(ScoredSample::new(scorer.score(o)?, o.label)))
        .collect::<Result<Vec<_>>>()?;
    Ok((empirical_auc(&scored)?, roc_curve(&scored)?))
}

/// A failed run, kept in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedRun {
    pub run: usize,
    pub error: String,
}

/// Everything one protocol run produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config: ExperimentConfig,
    pub per_run_auc: Vec<f64>,
    pub mean_auc: f64,
    /// Sample standard deviation over runs (0 for a single run).
    pub std_auc: f64,
    pub completed_runs: usize,
    pub excluded: Vec<ExcludedRun>,
    pub per_run_roc: Vec<RocCurve>,
    pub envelope: RocEnvelope,
    /// FNV hash of each run's resample indices; paired comparisons assert
    /// equality of these.
    pub resample_hashes: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_optimal_auc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_test_auc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_roc: Option<RocCurve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ingest: Option<IngestReport>,
    /// Wall-clock duration, reported on stderr only; never serialized so
    /// artifacts stay byte-identical across runs.
    #[serde(skip)]
    pub runtime: std::time::Duration,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

struct RunOutcome {
    auc: Vec<f64>,
    roc: Vec<RocCurve>,
    hashes: Vec<u64>,
    excluded: Vec<ExcludedRun>,
}

fn finish_report(
    config: &ExperimentConfig,
    dataset: &Dataset,
    outcome: RunOutcome,
    started: std::time::Instant,
) -> Result<EvaluationReport> {
    if outcome.auc.is_empty() {
        return Err(Error::DegenerateSample(format!(
            "every run failed; first error: {}",
            outcome
                .excluded
                .first()
                .map(|e| e.error.clone())
                .unwrap_or_default()
        )));
    }
    let (mean, std) = mean_std(&outcome.auc);
    let envelope = roc_envelope(&outcome.roc, config.envelope_grid)?;

    let mut oracle_optimal_auc = None;
    let mut oracle_test_auc = None;
    let mut oracle_roc = None;
    if let Some(spec) = &dataset.spec {
        oracle_optimal_auc = Some(optimal_auc(spec));
        oracle_roc = Some(optimal_roc(spec)?);
        let eval_set = if dataset.test.is_empty() {
            &dataset.pool
        } else {
            &dataset.test
        };
        let scored: Vec<ScoredSample> = eval_set
            .iter()
            .filter_map(|o| o.oracle_score.map(|s| ScoredSample::new(s, o.label)))
            .collect();
        if scored.len() == eval_set.len() {
            oracle_test_auc = Some(empirical_auc(&scored)?);
        }
    }

    Ok(EvaluationReport {
        config: config.clone(),
        completed_runs: outcome.auc.len(),
        per_run_auc: outcome.auc,
        mean_auc: mean,
        std_auc: std,
        excluded: outcome.excluded,
        per_run_roc: outcome.roc,
        envelope,
        resample_hashes: outcome.hashes,
        oracle_optimal_auc,
        oracle_test_auc,
        oracle_roc,
        ingest: dataset.ingest,
        runtime: started.elapsed(),
    })
}

/// Bootstrap protocol: `b` resamples with replacement from the pool, one
/// model per resample, each evaluated on the fixed test set.
pub fn run_bootstrap(config: &ExperimentConfig) -> Result<EvaluationReport> {
    let Protocol::Bootstrap { b, n_boot } = config.protocol else {
        return Err(Error::InvalidProtocol(
            "run_bootstrap needs a bootstrap protocol".into(),
        ));
    };
    let started = std::time::Instant::now();
    let mut dataset = assemble_dataset(config)?;
    if config.centering() {
        center_dataset(&mut dataset)?;
    }
    if dataset.test.is_empty() {
        return Err(Error::InvalidProtocol("bootstrap needs a test split".into()));
    }
    let pool = &dataset.pool;
    let resample_size = n_boot.unwrap_or(pool.len());
    if resample_size == 0 {
        return Err(Error::InvalidProtocol("empty bootstrap resample".into()));
    }

    let mut outcome = RunOutcome {
        auc: Vec::new(),
        roc: Vec::new(),
        hashes: Vec::new(),
        excluded: Vec::new(),
    };
    for run in 0..b {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(STREAM_RESAMPLE_BASE + run as u64);
        let indices: Vec<usize> = (0..resample_size)
            .map(|_| rng.gen_range(0..pool.len()))
            .collect();
        outcome.hashes.push(fnv_indices(&indices));
        let train: Vec<Observation> = indices.iter().map(|&i| pool[i].clone()).collect();
        match fit(config, &train).and_then(|s| evaluate_scorer(&s, &dataset.test)) {
            Ok((auc, roc)) => {
                outcome.auc.push(auc);
                outcome.roc.push(roc);
            }
            Err(e) => outcome.excluded.push(ExcludedRun {
                run,
                error: e.to_string(),
            }),
        }
    }
    finish_report(config, &dataset, outcome, started)
}

/// Stratified V-fold cross-validation over the whole pool.
pub fn run_vfold(config: &ExperimentConfig) -> Result<EvaluationReport> {
    let Protocol::VFold { v } = config.protocol else {
        return Err(Error::InvalidProtocol("run_vfold needs a v_fold protocol".into()));
    };
    let started = std::time::Instant::now();
    let mut dataset = assemble_dataset(config)?;
    if config.centering() {
        center_dataset(&mut dataset)?;
    }
    let pool = &dataset.pool;
    if v < 2 || pool.len() < 2 * v {
        return Err(Error::InvalidProtocol(format!(
            "{} samples cannot support {v}-fold evaluation",
            pool.len()
        )));
    }
    let labels: Vec<Label> = pool.iter().map(|o| o.label).collect();
    let assignment = stratified_folds(&labels, v);

    let mut outcome = RunOutcome {
        auc: Vec::new(),
        roc: Vec::new(),
        hashes: Vec::new(),
        excluded: Vec::new(),
    };
    for fold in 0..v {
        let train_idx: Vec<usize> = (0..pool.len()).filter(|&i| assignment[i] != fold).collect();
        let val_idx: Vec<usize> = (0..pool.len()).filter(|&i| assignment[i] == fold).collect();
        outcome.hashes.push(fnv_indices(&val_idx));
        let train: Vec<Observation> = train_idx.iter().map(|&i| pool[i].clone()).collect();
        let val: Vec<Observation> = val_idx.iter().map(|&i| pool[i].clone()).collect();
        match fit(config, &train).and_then(|s| evaluate_scorer(&s, &val)) {
            Ok((auc, roc)) => {
                outcome.auc.push(auc);
                outcome.roc.push(roc);
            }
            Err(e) => outcome.excluded.push(ExcludedRun {
                run: fold,
                error: e.to_string(),
            }),
        }
    }
    finish_report(config, &dataset, outcome, started)
}

/// Single split: one model trained on the pool, one test evaluation.
/// Synthetic sources generate the two sets directly; CSV sources split by
/// the protocol's training fraction.
pub fn run_holdout(config: &ExperimentConfig) -> Result<EvaluationReport> {
    if !matches!(config.protocol, Protocol::Holdout { .. }) {
        return Err(Error::InvalidProtocol("run_holdout needs a holdout protocol".into()));
    }
    let started = std::time::Instant::now();
    let mut dataset = assemble_dataset(config)?;
    if config.centering() {
        center_dataset(&mut dataset)?;
    }
    if dataset.test.is_empty() {
        return Err(Error::InvalidProtocol("holdout produced an empty test set".into()));
    }
    let mut outcome = RunOutcome {
        auc: Vec::new(),
        roc: Vec::new(),
        hashes: vec![fnv_indices(&(0..dataset.pool.len()).collect::<Vec<_>>())],
        excluded: Vec::new(),
    };
    match fit(config, &dataset.pool).and_then(|s| evaluate_scorer(&s, &dataset.test)) {
        Ok((auc, roc)) => {
            outcome.auc.push(auc);
            outcome.roc.push(roc);
        }
        Err(e) => outcome.excluded.push(ExcludedRun {
            run: 0,
            error: e.to_string(),
        }),
    }
    finish_report(config, &dataset, outcome, started)
}

/// Runs whatever protocol the config selects.
pub fn run_experiment(config: &ExperimentConfig) -> Result<EvaluationReport> {
    match config.protocol {
        Protocol::Bootstrap { .. } => run_bootstrap(config),
        Protocol::VFold { .. } => run_vfold(config),
        Protocol::Holdout { .. } => run_holdout(config),
    }
}

/// Draws a fresh dataset from the config's synthetic source. Returns the
/// observations, the calibrated spec, and the sample seed that was used
/// (recorded in sidecars).
pub fn generate_dataset(
    config: &ExperimentConfig,
    n: usize,
) -> Result<(Vec<Observation>, MixtureSpec, u64)> {
    let DataSource::Synth(source) = &config.data else {
        return Err(Error::InvalidParameter(
            "dataset generation needs a synthetic data source".into(),
        ));
    };
    let spec = spec_from_source(source, config.seed)?;
    let sample_seed = derive_seed(config.seed, TAG_TRAIN);
    let obs = synth_observations(&spec, n, sample_seed)?;
    Ok((obs, spec, sample_seed))
}

/// Trains the configured tree learner on the given observations and returns
/// the ranking tree (the oracle learner has no tree to return).
pub fn train_tree(config: &ExperimentConfig, train: &[Observation]) -> Result<RankingTree> {
    if matches!(config.learner, LearnerKind::Oracle) {
        return Err(Error::InvalidParameter(
            "the oracle learner has no trainable tree".into(),
        ));
    }
    match fit(config, train)? {
        Scorer::Tree(tree) => Ok(tree),
        Scorer::Oracle => unreachable!(),
    }
}

/// Analyzes observations with the config's family and coarsest scale.
pub fn labeled_set(config: &ExperimentConfig, obs: &[Observation]) -> Result<LabeledCurveSet> {
    let curves: Vec<Curve> = obs.iter().map(|o| o.curve.clone()).collect();
    let labels: Vec<Label> = obs.iter().map(|o| o.label).collect();
    LabeledCurveSet::analyze(curves, labels, config.family, config.j0)
}

/// Functional growth parameters implied by a config, with the filter size
/// resolved against the available coefficient count.
pub fn functional_params_for(
    config: &ExperimentConfig,
    data: &LabeledCurveSet,
) -> Result<FunctionalParams> {
    let jmax_sel = config.j.saturating_sub(1).max(config.j0);
    if jmax_sel > data.jmax() {
        return Err(Error::InvalidScale(format!(
            "config level j {} exceeds the data's finest level {}",
            config.j,
            data.jmax() + 1
        )));
    }
    let n = config.n.resolve(1usize << config.j)?;
    Ok(FunctionalParams {
        n_coeffs: n,
        selection: config.selection,
        threshold: threshold_rule(config, n),
        jmax: jmax_sel,
        grow: grow_params(config),
    })
}

/// Paired comparison of two learners on shared resamples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub filtered: EvaluationReport,
    pub functional: EvaluationReport,
    /// Functional minus filtered AUC on runs completed by both.
    pub paired_delta: Vec<f64>,
    pub mean_delta: f64,
    /// Both sides drew identical resample index sets.
    pub resamples_match: bool,
}

/// Runs both configs (which must differ only in the learner) with shared
/// seeds and reports paired AUC deltas.
pub fn compare_local_vs_global(
    filtered_cfg: &ExperimentConfig,
    functional_cfg: &ExperimentConfig,
) -> Result<ComparisonReport> {
    let mut a = filtered_cfg.clone();
    let mut b = functional_cfg.clone();
    a.learner = LearnerKind::Filtered;
    b.learner = LearnerKind::Filtered;
    if a != b {
        return Err(Error::ConfigMismatch(
            "paired configs must agree on everything except the learner".into(),
        ));
    }
    if filtered_cfg.learner == functional_cfg.learner {
        return Err(Error::ConfigMismatch(
            "paired configs use the same learner".into(),
        ));
    }
    let filtered = run_experiment(filtered_cfg)?;
    let functional = run_experiment(functional_cfg)?;

    let resamples_match = filtered.resample_hashes == functional.resample_hashes;
    // align completed runs by run id on both sides
    let completed = |r: &EvaluationReport| -> Vec<usize> {
        let excluded: std::collections::HashSet<usize> =
            r.excluded.iter().map(|e| e.run).collect();
        let total = r.completed_runs + r.excluded.len();
        (0..total).filter(|i| !excluded.contains(i)).collect()
    };
    let runs_a = completed(&filtered);
    let runs_b = completed(&functional);
    let mut paired_delta = Vec::new();
    let mut ia = 0;
    let mut ib = 0;
    while ia < runs_a.len() && ib < runs_b.len() {
        match runs_a[ia].cmp(&runs_b[ib]) {
            std::cmp::Ordering::Equal => {
                paired_delta.push(functional.per_run_auc[ib] - filtered.per_run_auc[ia]);
                ia += 1;
                ib += 1;
            }
            std::cmp::Ordering::Less => ia += 1,
            std::cmp::Ordering::Greater => ib += 1,
        }
    }
    let mean_delta = if paired_delta.is_empty() {
        f64::NAN
    } else {
        paired_delta.iter().sum::<f64>() / paired_delta.len() as f64
    };
    Ok(ComparisonReport {
        filtered,
        functional,
        paired_delta,
        mean_delta,
        resamples_match,
    })
}

/// Builds the paired comparison from one base config.
pub fn compare_paired(base: &ExperimentConfig) -> Result<ComparisonReport> {
    let mut filtered = base.clone();
    filtered.learner = LearnerKind::Filtered;
    let mut functional = base.clone();
    functional.learner = LearnerKind::Functional;
    compare_local_vs_global(&filtered, &functional)
}
