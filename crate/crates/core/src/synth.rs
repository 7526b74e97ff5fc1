//! Synthetic curve generator with a closed-form optimal ROC.
//!
//! Both class distributions are mixtures of `K` component laws with pairwise
//! disjoint wavelet-atom supports and likelihood ratios nonincreasing in the
//! component index. Because the supports are disjoint, the component index
//! is an optimal scorer and the optimal ROC is the polyline through the
//! cumulative weight knots, so learners can be validated against an exact
//! reference.
//!
//! Weight construction: both weight vectors start from a symmetric Dirichlet
//! draw, components are sorted by likelihood ratio, and the positive weights
//! are recalibrated as `w+ ∝ w- * ratio^gamma` with `gamma` found by
//! bisection until the optimal AUC hits the requested target. The exponent
//! preserves the ratio ordering, and `gamma = 0` collapses the classes, so
//! every target in (0.5, 1 - w-_1/2) is reachable.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtering::CoeffIndex;
use crate::metrics::RocCurve;
use crate::wavelet::{dwt_inverse, CoefficientSet, Curve, WaveletFamily};
use crate::Label;

/// One wavelet atom of a mixture component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub index: CoeffIndex,
    /// Standard deviation of the Gaussian amplitude.
    pub sigma: f64,
    /// Fixed sign mark of the atom's template direction.
    pub sign: f64,
}

/// Marked-Poisson atom process parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomProcess {
    /// Mean atom count per component and scale.
    pub atoms_per_scale: f64,
    /// Base amplitude standard deviation.
    pub amplitude_std: f64,
    /// Scale decay exponent: atom std is `sigma * 2^(-decay * j / 2)`.
    pub amplitude_decay: f64,
    /// Log-normal spread of the per-atom mark: each atom's std is further
    /// multiplied by `exp(spread * z)`, `z ~ N(0,1)`. Zero keeps all marks
    /// at their scale value; large values decouple an atom's ensemble
    /// variance from its component's mixture mass.
    pub amplitude_spread: f64,
    /// Log-normal spread of a per-component loudness mark shared by all of
    /// a component's atoms. Loud components dominate the ensemble second
    /// moments, so a single global selection spends its whole budget on a
    /// handful of components while per-node re-selection keeps finding the
    /// loudest components remaining in each cell.
    pub loudness_spread: f64,
    /// Number of concentration bands. When positive, components are split
    /// by ratio rank into this many equal groups; a component in band `b`
    /// (0 = highest ratios) draws `atoms_per_scale * 2^b` atoms placed
    /// uniformly across scales, instead of per-scale Poisson counts.
    /// Together with energy equalization this steps the per-atom variance
    /// by factors of two from band to band: the most discriminative
    /// components are spectrally concentrated and dominate any global
    /// variance ranking, while spread-out components surface only once a
    /// cell has been narrowed to them.
    pub concentration_bands: usize,
    /// Rescale every component's atom amplitudes so all components carry
    /// the same expected signal energy. Components with few atoms then
    /// concentrate their energy (high per-atom variance), which is what
    /// variance-based selection keys on; without equalization a component's
    /// total energy itself becomes a ranking shortcut.
    pub equalize_energy: bool,
    /// One-sidedness of the atom amplitudes along the atoms' fixed sign
    /// marks: each amplitude is `sigma * (tc * sign * |z| + sqrt(1-tc^2) * z')`
    /// with iid standard normal `z`, `z'`. At 0 amplitudes are symmetric
    /// zero-mean; at 1 every atom keeps its template sign, so one classifier
    /// cut per coefficient captures a whole component. The per-atom second
    /// moment is `sigma^2` either way.
    pub template_correlation: f64,
    /// Couples a component's atom scales to its likelihood-ratio rank, so
    /// different ranking levels occupy different frequency bands (which is
    /// what per-node re-filtering exploits). At 0 every component draws its
    /// scales uniformly. Positive values map high-ratio components to
    /// coarse scales monotonically; negative values map the ratio extremes
    /// to coarse scales and the uninformative middle ranks to fine scales.
    /// The magnitude sets how tightly a component sticks to its band.
    pub scale_coupling: f64,
}

impl Default for AtomProcess {
    fn default() -> Self {
        Self {
            atoms_per_scale: 2.0,
            amplitude_std: 1.0,
            amplitude_decay: 0.0,
            amplitude_spread: 0.0,
            loudness_spread: 0.0,
            concentration_bands: 0,
            equalize_energy: false,
            template_correlation: 0.0,
            scale_coupling: 0.0,
        }
    }
}

/// Everything [`build_spec`] needs besides the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecParams {
    pub components: usize,
    pub target_auc: f64,
    pub family: WaveletFamily,
    pub signal_length: usize,
    pub j0: usize,
    pub positive_rate: f64,
    pub process: AtomProcess,
    /// Dirichlet concentration of the raw weight draws. Large values give
    /// flat weight profiles and a smooth optimal ROC; small values
    /// concentrate class mass on few components.
    pub weight_concentration: f64,
}

impl Default for SpecParams {
    fn default() -> Self {
        Self {
            components: 50,
            target_auc: 0.94,
            family: WaveletFamily::Beylkin,
            signal_length: 2048,
            j0: 1,
            positive_rate: 0.5,
            process: AtomProcess::default(),
            weight_concentration: 8.0,
        }
    }
}

/// A calibrated mixture: weights, disjoint atom supports, and generation
/// metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub omega_plus: Vec<f64>,
    pub omega_minus: Vec<f64>,
    /// Atom set of each component; pairwise disjoint.
    pub atoms: Vec<Vec<Atom>>,
    pub family: WaveletFamily,
    pub signal_length: usize,
    pub j0: usize,
    pub positive_rate: f64,
    /// Within-curve amplitude correlation along the atom template.
    #[serde(default)]
    pub template_correlation: f64,
}

impl MixtureSpec {
    pub fn components(&self) -> usize {
        self.omega_plus.len()
    }

    /// Finest detail level of the generated signals.
    pub fn jmax(&self) -> usize {
        self.signal_length.trailing_zeros() as usize - 1
    }

    /// Checks weight normalization, ratio ordering, and atom disjointness.
    pub fn validate(&self) -> Result<()> {
        let k = self.components();
        if k < 2 || self.omega_minus.len() != k || self.atoms.len() != k {
            return Err(Error::InvalidParameter(format!(
                "inconsistent component counts ({k} weights)"
            )));
        }
        for sum in [
            self.omega_plus.iter().sum::<f64>(),
            self.omega_minus.iter().sum::<f64>(),
        ] {
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "mixture weights sum to {sum}"
                )));
            }
        }
        // nonincreasing likelihood ratios, compared without division
        for w in 0..k - 1 {
            if self.omega_plus[w] * self.omega_minus[w + 1]
                < self.omega_plus[w + 1] * self.omega_minus[w] - 1e-12
            {
                return Err(Error::InvalidParameter(format!(
                    "likelihood ratio increases at component {w}"
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for atoms in &self.atoms {
            if atoms.is_empty() {
                return Err(Error::InvalidParameter("component without atoms".into()));
            }
            for atom in atoms {
                if !seen.insert(atom.index) {
                    return Err(Error::InvalidParameter(format!(
                        "atom {} appears in two components",
                        atom.index
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One generated observation with its hidden ground truth.
#[derive(Debug, Clone)]
pub struct OracleSample {
    pub curve: Curve,
    pub label: Label,
    /// Component index, 0-based.
    pub component: usize,
    /// `K - k` for 1-based component `k+1`: the optimal scorer.
    pub oracle_score: f64,
}

/// Closed-form optimal AUC of a mixture:
/// `sum_{k<l} w-_l w+_k + 1/2 sum_k w-_k w+_k`.
pub fn optimal_auc(spec: &MixtureSpec) -> f64 {
    let k = spec.components();
    let mut minus_after: f64 = spec.omega_minus.iter().sum();
    let mut auc = 0.0;
    for i in 0..k {
        minus_after -= spec.omega_minus[i];
        auc += spec.omega_plus[i] * minus_after + 0.5 * spec.omega_plus[i] * spec.omega_minus[i];
    }
    auc
}

/// The optimal ROC: the polyline through the cumulative-weight knots.
pub fn optimal_roc(spec: &MixtureSpec) -> Result<RocCurve> {
    let mut points = vec![(0.0, 0.0)];
    let mut cm = 0.0;
    let mut cp = 0.0;
    let k = spec.components();
    for i in 0..k {
        cm += spec.omega_minus[i];
        cp += spec.omega_plus[i];
        if i + 1 == k {
            points.push((1.0, 1.0));
        } else {
            points.push((cm, cp));
        }
    }
    RocCurve::new(points)
}

fn dirichlet_symmetric(rng: &mut ChaCha8Rng, k: usize, alpha: f64) -> Result<Vec<f64>> {
    // symmetric Dirichlet via normalized Gamma(alpha) draws
    let gamma = Gamma::new(alpha, 1.0)
        .map_err(|e| Error::InvalidParameter(format!("weight concentration: {e}")))?;
    let draws: Vec<f64> = (0..k).map(|_| gamma.sample(rng).max(1e-300)).collect();
    let sum: f64 = draws.iter().sum();
    Ok(draws.into_iter().map(|v| v / sum).collect())
}

/// Weight pair at contrast exponent `gamma`: likelihood ratios proportional
/// to `ratio^gamma`, each weight vector summing to one, and the component
/// sums pinned to `2 * mass_k` by iterative proportional fitting. Pinning
/// the sums keeps the pooled component frequencies at the mass profile, so
/// the class contrast is invisible to unconditional second moments.
fn weights_at_gamma(mass: &[f64], log_ratio: &[f64], gamma: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let k = mass.len();
    // start from the per-component logistic split of 2 * mass
    let mut plus: Vec<f64> = Vec::with_capacity(k);
    let mut minus: Vec<f64> = Vec::with_capacity(k);
    for i in 0..k {
        let l = gamma * log_ratio[i];
        // sigma(l) computed stably on both tails
        let p = if l >= 0.0 {
            1.0 / (1.0 + (-l).exp())
        } else {
            let e = l.exp();
            e / (1.0 + e)
        };
        plus.push(2.0 * mass[i] * p);
        minus.push(2.0 * mass[i] * (1.0 - p));
    }
    // alternate row and column normalization; both scalings preserve the
    // per-component likelihood-ratio ordering
    for _ in 0..200 {
        let sp: f64 = plus.iter().sum();
        let sm: f64 = minus.iter().sum();
        for i in 0..k {
            plus[i] /= sp;
            minus[i] /= sm;
        }
        let mut worst: f64 = 0.0;
        for i in 0..k {
            let col = plus[i] + minus[i];
            let target = 2.0 * mass[i];
            let scale = target / col.max(1e-300);
            plus[i] *= scale;
            minus[i] *= scale;
            worst = worst.max((scale - 1.0).abs());
        }
        if worst < 1e-13 {
            break;
        }
    }
    // exact row sums after the final column pass
    let sp: f64 = plus.iter().sum();
    let sm: f64 = minus.iter().sum();
    for i in 0..k {
        plus[i] /= sp;
        minus[i] /= sm;
    }
    let spec_like = MixtureSpec {
        omega_plus: plus.clone(),
        omega_minus: minus.clone(),
        atoms: vec![],
        family: WaveletFamily::Haar,
        signal_length: 4,
        j0: 0,
        positive_rate: 0.5,
        template_correlation: 0.0,
    };
    let auc = optimal_auc(&spec_like);
    (plus, minus, auc)
}

/// Samples mixture weights and disjoint atom supports, calibrating the
/// weight contrast so that the optimal AUC lands within 0.005 of the target.
pub fn build_spec(params: &SpecParams, seed: u64) -> Result<MixtureSpec> {
    let k = params.components;
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 components, got {k}"
        )));
    }
    if !(params.target_auc > 0.5 && params.target_auc < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target AUC must lie in (0.5, 1), got {}",
            params.target_auc
        )));
    }
    if params.signal_length < 4 || !params.signal_length.is_power_of_two() {
        return Err(Error::InvalidLength {
            len: params.signal_length,
        });
    }
    let jmax = params.signal_length.trailing_zeros() as usize - 1;
    if params.j0 > jmax {
        return Err(Error::InvalidScale(format!(
            "j0 {} exceeds finest level {jmax}",
            params.j0
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // weights: two Dirichlet draws supply the likelihood-ratio profile
    // (sorted nonincreasing) and a third supplies the pooled component
    // masses; the ratio contrast exponent is then calibrated by bisection
    let raw_plus = dirichlet_symmetric(&mut rng, k, params.weight_concentration)?;
    let raw_minus = dirichlet_symmetric(&mut rng, k, params.weight_concentration)?;
    let mass = dirichlet_symmetric(&mut rng, k, params.weight_concentration * k as f64)?;
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        let ra = raw_plus[a] / raw_minus[a];
        let rb = raw_plus[b] / raw_minus[b];
        rb.total_cmp(&ra)
    });
    let log_ratio: Vec<f64> = order
        .iter()
        .map(|&i| (raw_plus[i] / raw_minus[i]).max(1e-300).ln())
        .collect();

    let tol = 0.005;
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut hi_auc = weights_at_gamma(&mass, &log_ratio, hi).2;
    let mut expansions = 0;
    while hi_auc < params.target_auc {
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::CalibrationFailed(format!(
                "target {} unreachable; contrast saturates at {hi_auc:.4}",
                params.target_auc
            )));
        }
        hi_auc = weights_at_gamma(&mass, &log_ratio, hi).2;
    }
    let mut omega_plus = Vec::new();
    let mut omega_minus = Vec::new();
    let mut converged = false;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (plus, minus, auc) = weights_at_gamma(&mass, &log_ratio, mid);
        if (auc - params.target_auc).abs() <= tol {
            omega_plus = plus;
            omega_minus = minus;
            converged = true;
            break;
        }
        if auc < params.target_auc {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !converged {
        return Err(Error::CalibrationFailed(format!(
            "bisection did not reach target {} within 200 iterations",
            params.target_auc
        )));
    }

    // disjoint atom supports: per-scale pools, shuffled once, dealt to
    // Poisson demands component by component round-robin per scale
    let scales: Vec<usize> = (params.j0..=jmax).collect();
    let mut pools: Vec<Vec<usize>> = scales
        .iter()
        .map(|&j| {
            let mut positions: Vec<usize> = (0..1usize << j).collect();
            for i in (1..positions.len()).rev() {
                positions.swap(i, rng.gen_range(0..=i));
            }
            positions
        })
        .collect();
    // per-(component, scale) Poisson intensities; with coupling, a
    // component's intensities concentrate around its rank-preferred scale
    let coupling = params.process.scale_coupling.clamp(-1.0, 1.0);
    let tightness = coupling.abs();
    let span = (jmax - params.j0) as f64;
    let total_intensity = params.process.atoms_per_scale.max(1e-9) * scales.len() as f64;
    let preferred: Vec<f64> = (0..k)
        .map(|c| {
            let rank_frac = if k > 1 { c as f64 / (k - 1) as f64 } else { 0.0 };
            if coupling >= 0.0 {
                // rank 0 = highest ratio prefers the coarsest scale
                params.j0 as f64 + rank_frac * span
            } else {
                // ratio extremes prefer coarse scales, middle ranks fine ones
                jmax as f64 - (2.0 * rank_frac - 1.0).abs() * span
            }
        })
        .collect();
    let width = (1.0 - tightness) * span.max(1.0) + tightness * 0.3;
    let mut demands = vec![vec![0usize; scales.len()]; k];
    if params.process.concentration_bands > 0 {
        // fixed per-band atom counts keep the per-atom variance plateaus
        // exactly a factor of two apart; positions are drawn uniformly over
        // the whole remaining index pool
        let bands = params.process.concentration_bands;
        for (c, comp) in demands.iter_mut().enumerate() {
            let band = (c * bands) / k;
            let total =
                (params.process.atoms_per_scale.max(1.0).round() as usize) << band;
            for _ in 0..total {
                let weights: Vec<usize> = pools.iter().map(|p| p.len()).collect();
                let total_slots: usize = weights.iter().sum::<usize>();
                if total_slots == 0 {
                    break;
                }
                let mut pick = rng.gen_range(0..total_slots);
                let mut s = 0;
                while pick >= weights[s] {
                    pick -= weights[s];
                    s += 1;
                }
                comp[s] += 1;
                // reserve the slot now so counts stay feasible
                pools[s].pop();
            }
        }
        // dealing happens below; restore the reserved capacity
        let mut pools_fresh: Vec<Vec<usize>> = scales
            .iter()
            .map(|&j| (0..1usize << j).collect())
            .collect();
        for (s, pool) in pools_fresh.iter_mut().enumerate() {
            let mut order: Vec<usize> = (0..pool.len()).collect();
            for i in (1..order.len()).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            *pool = order;
            let _ = s;
        }
        pools = pools_fresh;
    } else {
        for (c, comp) in demands.iter_mut().enumerate() {
            let mut rates: Vec<f64> = scales
                .iter()
                .map(|&j| (-((j as f64 - preferred[c]) / width).powi(2) / 2.0).exp())
                .collect();
            let rate_sum: f64 = rates.iter().sum();
            for r in &mut rates {
                *r *= total_intensity / rate_sum;
            }
            for (d, &rate) in comp.iter_mut().zip(&rates) {
                if rate > 1e-9 {
                    let poisson = Poisson::new(rate)
                        .map_err(|e| Error::InvalidParameter(format!("atom intensity: {e}")))?;
                    *d = poisson.sample(&mut rng) as usize;
                }
            }
        }
    }
    let mut atoms: Vec<Vec<Atom>> = vec![Vec::new(); k];
    let loudness: Vec<f64> = (0..k)
        .map(|_| {
            if params.process.loudness_spread == 0.0 {
                1.0
            } else {
                let z: f64 = rand_distr::StandardNormal.sample(&mut rng);
                (params.process.loudness_spread * z).exp()
            }
        })
        .collect();
    let mark = |rng: &mut ChaCha8Rng, comp: usize, scale: usize| -> f64 {
        let base = params.process.amplitude_std
            * loudness[comp]
            * 2f64.powf(-params.process.amplitude_decay * scale as f64 / 2.0);
        if params.process.amplitude_spread == 0.0 {
            return base;
        }
        let z: f64 = rand_distr::StandardNormal.sample(rng);
        base * (params.process.amplitude_spread * z).exp()
    };
    for (s, &j) in scales.iter().enumerate() {
        // deal one atom per component per round, in an order shuffled per
        // scale; contested coarse scales must not favor any ratio rank
        let mut order: Vec<usize> = (0..k).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut remaining: Vec<usize> = order.iter().copied().filter(|&c| demands[c][s] > 0).collect();
        while !remaining.is_empty() {
            for &c in &remaining {
                if demands[c][s] == 0 {
                    continue;
                }
                let Some(pos) = pools[s].pop() else {
                    demands.iter_mut().for_each(|d| d[s] = 0);
                    break;
                };
                let sigma = mark(&mut rng, c, j);
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                atoms[c].push(Atom {
                    index: CoeffIndex(j as i32, pos),
                    sigma,
                    sign,
                });
                demands[c][s] -= 1;
            }
            remaining.retain(|&c| demands[c][s] > 0);
        }
    }
    // a component with no atoms would generate the zero curve; give each
    // empty component one atom from the non-exhausted scale nearest its
    // preferred band, so pool exhaustion never moves a component out of
    // its frequency band
    for c in 0..k {
        if atoms[c].is_empty() {
            let mut by_distance: Vec<usize> = (0..scales.len()).collect();
            by_distance.sort_by(|&a, &b| {
                let da = (scales[a] as f64 - preferred[c]).abs();
                let db = (scales[b] as f64 - preferred[c]).abs();
                da.total_cmp(&db).then(scales[b].cmp(&scales[a]))
            });
            let slot = by_distance
                .into_iter()
                .find_map(|s| pools[s].pop().map(|pos| (s, pos)));
            let granted = slot.map(|(s, pos)| Atom {
                index: CoeffIndex(scales[s] as i32, pos),
                sigma: mark(&mut rng, c, scales[s]),
                sign: if rng.gen::<bool>() { 1.0 } else { -1.0 },
            });
            match granted {
                Some(atom) => atoms[c].push(atom),
                None => {
                    return Err(Error::CalibrationFailed(format!(
                        "index pool exhausted before component {c} received an atom"
                    )))
                }
            }
        }
    }

    if params.process.equalize_energy {
        let energies: Vec<f64> = atoms
            .iter()
            .map(|set| set.iter().map(|a| a.sigma * a.sigma).sum::<f64>())
            .collect();
        let target = energies.iter().sum::<f64>() / k as f64;
        for (set, &energy) in atoms.iter_mut().zip(&energies) {
            if energy > 0.0 {
                let scale = (target / energy).sqrt();
                for a in set.iter_mut() {
                    a.sigma *= scale;
                }
            }
        }
    }

    let spec = MixtureSpec {
        omega_plus,
        omega_minus,
        atoms,
        family: params.family,
        signal_length: params.signal_length,
        j0: params.j0,
        positive_rate: params.positive_rate,
        template_correlation: params.process.template_correlation.clamp(0.0, 1.0),
    };
    spec.validate()?;
    Ok(spec)
}

fn categorical(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    for (i, w) in weights.iter().enumerate() {
        cum += w;
        if u < cum {
            return i;
        }
    }
    weights.len() - 1
}

/// Draws `n` reproducible observations. Each sample uses its own ChaCha8
/// stream offset, so any partition of the index range generates identical
/// results.
pub fn sample(spec: &MixtureSpec, n: usize, seed: u64) -> Result<Vec<OracleSample>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::InvalidCount("cannot draw zero samples".into()));
    }
    let k = spec.components();
    let jmax = spec.jmax();
    // a vanishing background floor under every coefficient: off-support
    // energy stays far below the 1e-8 contract, but synthesis/analysis
    // rounding residue stops being a readable component fingerprint. The
    // floor is one global level, never per component, so it carries no
    // class or component information itself.
    let global_scale = spec
        .atoms
        .iter()
        .flatten()
        .map(|a| a.sigma)
        .fold(0.0, f64::max);
    // three-level jitter: +/-floor or zero; a coarse value set leaves a
    // split-based learner no ordering structure to overfit
    let floor = (global_scale * 1e-9).max(1e-300);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        let label = if rng.gen::<f64>() < spec.positive_rate {
            Label::Pos
        } else {
            Label::Neg
        };
        let weights = if label.is_positive() {
            &spec.omega_plus
        } else {
            &spec.omega_minus
        };
        let component = categorical(&mut rng, weights);
        let mut coeffs = CoefficientSet::zeroed(spec.j0, jmax)?;
        let levels: Vec<i32> = (spec.j0 as i32 - 1..=jmax as i32).collect();
        for &level in &levels {
            let count = if level == spec.j0 as i32 - 1 {
                1usize << spec.j0
            } else {
                1usize << level
            };
            for pos in 0..count {
                let jitter = match rng.gen_range(0..3u8) {
                    0 => -floor,
                    1 => 0.0,
                    _ => floor,
                };
                coeffs.set(level, pos, jitter)?;
            }
        }
        let tc = spec.template_correlation;
        let residual_scale = (1.0 - tc * tc).max(0.0).sqrt();
        for atom in &spec.atoms[component] {
            let z: f64 = rand_distr::StandardNormal.sample(&mut rng);
            let z2: f64 = rand_distr::StandardNormal.sample(&mut rng);
            let amplitude = atom.sigma * (tc * atom.sign * z.abs() + residual_scale * z2);
            coeffs.set(atom.index.level(), atom.index.pos(), amplitude)?;
        }
        let curve = dwt_inverse(&coeffs, spec.family)?;
        out.push(OracleSample {
            curve,
            label,
            component,
            oracle_score: (k - component) as f64,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{empirical_auc, ScoredSample};
    use crate::wavelet::dwt_forward;

    fn two_component(omega_plus: [f64; 2], omega_minus: [f64; 2]) -> MixtureSpec {
        MixtureSpec {
            omega_plus: omega_plus.to_vec(),
            omega_minus: omega_minus.to_vec(),
            atoms: vec![
                vec![Atom {
                    index: CoeffIndex(2, 0),
                    sigma: 1.0,
                    sign: 1.0,
                }],
                vec![Atom {
                    index: CoeffIndex(3, 1),
                    sigma: 1.0,
                    sign: -1.0,
                }],
            ],
            family: WaveletFamily::Haar,
            signal_length: 64,
            j0: 1,
            positive_rate: 0.5,
            template_correlation: 0.0,
        }
    }

    #[test]
    fn disjoint_class_supports_give_auc_one() {
        let spec = two_component([1.0, 0.0], [0.0, 1.0]);
        spec.validate().unwrap();
        assert!((optimal_auc(&spec) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_class_laws_give_auc_half() {
        let spec = two_component([0.6, 0.4], [0.6, 0.4]);
        spec.validate().unwrap();
        assert!((optimal_auc(&spec) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn knot_polyline_example_evaluates_to_point_eight() {
        // knots (0,0), (0.2, 0.8), (1,1): trapezoid area 0.80
        let spec = two_component([0.8, 0.2], [0.2, 0.8]);
        spec.validate().unwrap();
        assert!((optimal_auc(&spec) - 0.8).abs() < 1e-12);
        let roc = optimal_roc(&spec).unwrap();
        assert_eq!(roc.points, vec![(0.0, 0.0), (0.2, 0.8), (1.0, 1.0)]);
        assert!((roc.area() - optimal_auc(&spec)).abs() < 1e-12);
    }

    #[test]
    fn optimal_roc_area_matches_optimal_auc_on_random_specs() {
        for seed in 0..10 {
            let params = SpecParams {
                components: 12,
                target_auc: 0.75,
                signal_length: 256,
                ..Default::default()
            };
            let spec = build_spec(&params, seed).unwrap();
            let roc = optimal_roc(&spec).unwrap();
            assert!((roc.area() - optimal_auc(&spec)).abs() < 1e-12);
        }
    }

    #[test]
    fn build_spec_hits_both_paper_targets() {
        for (seed, target) in [(11u64, 0.94), (12, 0.71)] {
            let params = SpecParams {
                components: 50,
                target_auc: target,
                signal_length: 512,
                ..Default::default()
            };
            let spec = build_spec(&params, seed).unwrap();
            spec.validate().unwrap();
            let auc = optimal_auc(&spec);
            assert!((auc - target).abs() <= 0.005, "target {target}: got {auc}");
        }
    }

    #[test]
    fn infeasible_parameters_are_rejected() {
        let bad = SpecParams {
            components: 1,
            ..Default::default()
        };
        assert!(build_spec(&bad, 0).is_err());
        let bad = SpecParams {
            target_auc: 0.4,
            ..Default::default()
        };
        assert!(matches!(build_spec(&bad, 0), Err(Error::InvalidParameter(_))));
        // target so close to 1 that the ratio contrast saturates below it
        let bad = SpecParams {
            components: 2,
            target_auc: 0.9999,
            signal_length: 64,
            ..Default::default()
        };
        assert!(matches!(
            build_spec(&bad, 3),
            Err(Error::CalibrationFailed(_))
        ));
    }

    #[test]
    fn samples_stay_on_their_component_support() {
        let params = SpecParams {
            components: 6,
            target_auc: 0.85,
            signal_length: 128,
            ..Default::default()
        };
        let spec = build_spec(&params, 21).unwrap();
        let draws = sample(&spec, 40, 77).unwrap();
        for s in &draws {
            let coeffs = dwt_forward(&s.curve, spec.family, spec.j0).unwrap();
            let support: std::collections::HashSet<CoeffIndex> = spec.atoms[s.component]
                .iter()
                .map(|a| a.index)
                .collect();
            let total = coeffs.energy();
            if total == 0.0 {
                continue;
            }
            let off: f64 = coeffs
                .iter()
                .filter(|(l, p, _)| !support.contains(&CoeffIndex(*l, *p)))
                .map(|(_, _, v)| v * v)
                .sum();
            assert!(off / total < 1e-8, "off-support energy {off} of {total}");
            assert_eq!(s.oracle_score, (spec.components() - s.component) as f64);
        }
    }

    #[test]
    fn label_rate_concentrates_near_positive_rate() {
        let params = SpecParams {
            components: 8,
            target_auc: 0.8,
            signal_length: 64,
            ..Default::default()
        };
        let spec = build_spec(&params, 5).unwrap();
        let draws = sample(&spec, 10_000, 123).unwrap();
        let rate = draws.iter().filter(|s| s.label.is_positive()).count() as f64 / 10_000.0;
        assert!((rate - 0.5).abs() < 0.02, "rate {rate}");
    }

    #[test]
    fn oracle_score_auc_matches_the_closed_form() {
        let params = SpecParams {
            components: 20,
            target_auc: 0.87,
            signal_length: 64,
            ..Default::default()
        };
        let spec = build_spec(&params, 9).unwrap();
        let draws = sample(&spec, 10_000, 55).unwrap();
        let scored: Vec<ScoredSample> = draws
            .iter()
            .map(|s| ScoredSample::new(s.oracle_score, s.label))
            .collect();
        let mc = empirical_auc(&scored).unwrap();
        assert!((mc - optimal_auc(&spec)).abs() < 0.02, "mc {mc}");
    }

    #[test]
    fn sampling_is_reproducible_and_stream_partitioned() {
        let params = SpecParams {
            components: 5,
            target_auc: 0.8,
            signal_length: 64,
            ..Default::default()
        };
        let spec = build_spec(&params, 2).unwrap();
        let a = sample(&spec, 20, 9).unwrap();
        let b = sample(&spec, 20, 9).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.curve.samples(), y.curve.samples());
            assert_eq!(x.component, y.component);
        }
        // a shorter draw is a prefix of a longer one
        let c = sample(&spec, 5, 9).unwrap();
        for (x, y) in c.iter().zip(&a) {
            assert_eq!(x.curve.samples(), y.curve.samples());
        }
    }
}
