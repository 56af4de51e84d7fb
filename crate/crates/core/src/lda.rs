//! Standard LDA variational inference: the per-document E-step shared by all
//! fitting routines, plus batch and online (stochastic natural-gradient)
//! updates of the topic parameters.

use ndarray::{Array1, Array2};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::corpus::{BatchSampler, BatchSampling, Corpus, SparseDocument};
use crate::error::{Error, Result};
use crate::math;

/// RNG stream tags; every consumer of randomness hashes the run seed with
/// its own tag so that adding draws in one place never shifts another.
pub(crate) mod seed_tags {
    pub const MODEL_INIT: u64 = 1;
    pub const SAMPLER: u64 = 2;
    pub const MSTEP_INIT: u64 = 3;
}

/// Symmetric priors and topic count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    pub alpha: f64,
    pub eta: f64,
    pub k: usize,
}

impl Hyperparameters {
    pub fn new(alpha: f64, eta: f64, k: usize) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::argument(format!("alpha must be positive, got {alpha}")));
        }
        if !eta.is_finite() || eta <= 0.0 {
            return Err(Error::argument(format!("eta must be positive, got {eta}")));
        }
        if k == 0 {
            return Err(Error::argument("topic count K must be >= 1"));
        }
        Ok(Hyperparameters { alpha, eta, k })
    }
}

/// Decaying step size rho_t = (tau0 + t)^(-kappa), clamped to (0, 1].
///
/// kappa in (0.5, 1] guarantees stochastic-approximation convergence;
/// kappa = 0 recovers the batch update (rho = 1 forever). Values in
/// (0, 0.5] are accepted for experimentation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningRate {
    pub tau0: f64,
    pub kappa: f64,
}

impl LearningRate {
    pub fn new(tau0: f64, kappa: f64) -> Result<Self> {
        if !tau0.is_finite() || tau0 < 0.0 {
            return Err(Error::argument(format!("tau0 must be >= 0, got {tau0}")));
        }
        if !(0.0..=1.0).contains(&kappa) {
            return Err(Error::argument(format!(
                "kappa must lie in [0, 1], got {kappa}"
            )));
        }
        Ok(LearningRate { tau0, kappa })
    }

    /// Batch recovery schedule: rho_t = 1 for every t.
    pub fn batch() -> Self {
        LearningRate { tau0: 0.0, kappa: 0.0 }
    }

    pub fn rho(&self, t: u64) -> f64 {
        let base = self.tau0 + t as f64;
        let rho = base.powf(-self.kappa);
        rho.min(1.0)
    }
}

/// Variational Dirichlet parameters over each topic's word distribution.
#[derive(Debug, Clone)]
pub struct StandardModel {
    pub lambda: Array2<f64>,
    pub hyper: Hyperparameters,
}

impl StandardModel {
    /// Posterior-mean topic-word distributions: lambda rows normalized.
    pub fn expected_beta(&self) -> Array2<f64> {
        let mut beta = self.lambda.clone();
        for mut row in beta.outer_iter_mut() {
            let sum = row.sum();
            row.mapv_inplace(|v| v / sum);
        }
        beta
    }

    /// E[log beta] under the variational posterior, the E-step weights.
    pub fn expected_log_beta(&self) -> Array2<f64> {
        let (k, w) = self.lambda.dim();
        let mut out = Array2::zeros((k, w));
        for (mut orow, lrow) in out.outer_iter_mut().zip(self.lambda.outer_iter()) {
            math::dirichlet_log_expectation_into(
                lrow.as_slice().expect("standard layout"),
                orow.as_slice_mut().expect("standard layout"),
            );
        }
        out
    }
}

/// Per-document variational state: gamma over topics and one phi row per
/// distinct word.
#[derive(Debug, Clone)]
pub struct DocumentPosterior {
    pub gamma: Array1<f64>,
    pub phi: Array2<f64>,
}

/// Inner-loop controls for the per-document fixed point.
#[derive(Debug, Clone, Copy)]
pub struct EStepConfig {
    /// Stop when the mean absolute change of gamma over K drops below this.
    pub gamma_tol: f64,
    pub max_iter: usize,
}

impl Default for EStepConfig {
    fn default() -> Self {
        EStepConfig {
            gamma_tol: 1e-5,
            max_iter: 100,
        }
    }
}

pub(crate) struct DocOutcome {
    pub gamma: Array1<f64>,
    pub phi: Array2<f64>,
    /// Word + theta ELBO terms of this document at the returned state,
    /// evaluated against the supplied log weights.
    pub bound: f64,
}

/// The per-document coordinate ascent. `log_weights` is K x W: for standard
/// LDA the Dirichlet expectation of log beta, for the regularized model the
/// log of the convolved expectations.
pub(crate) fn e_step_inner(
    doc: &SparseDocument,
    log_weights: &Array2<f64>,
    alpha: f64,
    cfg: &EStepConfig,
) -> DocOutcome {
    let k = log_weights.nrows();
    let n_total = doc.total() as f64;
    let entries = doc.entries();

    let mut gamma = vec![alpha + n_total / k as f64; k];
    let mut elog_theta = vec![0.0; k];
    let mut scores = vec![0.0; k];
    let mut phi = Array2::zeros((entries.len(), k));

    for _ in 0..cfg.max_iter.max(1) {
        math::dirichlet_log_expectation_into(&gamma, &mut elog_theta);
        let mut gamma_new = vec![alpha; k];
        for (row, &(w, n)) in entries.iter().enumerate() {
            for (t, s) in scores.iter_mut().enumerate() {
                *s = elog_theta[t] + log_weights[[t, w as usize]];
            }
            let lse = math::log_sum_exp_unchecked(&scores);
            for (t, s) in scores.iter().enumerate() {
                let p = (s - lse).exp();
                phi[[row, t]] = p;
                gamma_new[t] += n as f64 * p;
            }
        }
        let change: f64 = gamma
            .iter()
            .zip(&gamma_new)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / k as f64;
        gamma = gamma_new;
        if change < cfg.gamma_tol {
            break;
        }
    }

    // One closing phi pass against the final gamma so the returned state is
    // internally consistent (phi is the exact maximizer given gamma).
    math::dirichlet_log_expectation_into(&gamma, &mut elog_theta);
    let mut bound_words = 0.0;
    for (row, &(w, n)) in entries.iter().enumerate() {
        for (t, s) in scores.iter_mut().enumerate() {
            *s = elog_theta[t] + log_weights[[t, w as usize]];
        }
        let lse = math::log_sum_exp_unchecked(&scores);
        bound_words += n as f64 * lse;
        for (t, s) in scores.iter().enumerate() {
            phi[[row, t]] = (s - lse).exp();
        }
    }

    // Theta-side ELBO terms.
    let gamma_sum: f64 = gamma.iter().sum();
    let mut bound_theta = math::ln_gamma(k as f64 * alpha).unwrap()
        - k as f64 * math::ln_gamma(alpha).unwrap()
        - math::ln_gamma(gamma_sum).unwrap();
    for (t, &g) in gamma.iter().enumerate() {
        bound_theta += math::ln_gamma(g).unwrap() + (alpha - g) * elog_theta[t];
    }

    DocOutcome {
        gamma: Array1::from(gamma),
        phi,
        bound: bound_words + bound_theta,
    }
}

/// Runs the E-step for one document against precomputed log weights.
///
/// Iterates phi and gamma until the mean absolute gamma change over K falls
/// below the tolerance (default 1e-5) or the iteration cap is hit.
pub fn e_step(
    doc: &SparseDocument,
    expected_log_beta: &Array2<f64>,
    alpha: f64,
    cfg: &EStepConfig,
) -> Result<DocumentPosterior> {
    let (k, w) = expected_log_beta.dim();
    if k == 0 {
        return Err(Error::argument("log weight matrix must have K >= 1 rows"));
    }
    if doc.max_word_id() as usize >= w {
        return Err(Error::shape(format!(
            "document references word {} outside weight matrix width {w}",
            doc.max_word_id()
        )));
    }
    for &(word, _) in doc.entries() {
        for t in 0..k {
            let lw = expected_log_beta[[t, word as usize]];
            if lw.is_nan() || lw == f64::INFINITY {
                return Err(Error::argument(format!(
                    "non-finite log weight for topic {t}, word {word}"
                )));
            }
        }
    }
    let out = e_step_inner(doc, expected_log_beta, alpha, cfg);
    Ok(DocumentPosterior {
        gamma: out.gamma,
        phi: out.phi,
    })
}

/// Accumulated sufficient statistics of an E-step sweep.
pub(crate) struct SweepOutcome {
    /// K x W matrix of expected topic-word counts (sum of n_dw * phi_dwk).
    pub phi_stats: Array2<f64>,
    /// Sum of per-document ELBO contributions at the swept state.
    pub doc_bound: f64,
}

/// E-steps every document in `indices` (callers pass them sorted) and merges
/// sufficient statistics in index order, so the result is bitwise
/// reproducible for any thread count.
pub(crate) fn sweep_docs(
    corpus: &Corpus,
    indices: &[usize],
    log_weights: &Array2<f64>,
    alpha: f64,
    cfg: &EStepConfig,
    pool: Option<&rayon::ThreadPool>,
) -> SweepOutcome {
    let (k, w) = log_weights.dim();
    let per_doc: Vec<DocOutcome> = match pool {
        Some(pool) => pool.install(|| {
            use rayon::prelude::*;
            indices
                .par_iter()
                .map(|&d| e_step_inner(corpus.document(d), log_weights, alpha, cfg))
                .collect()
        }),
        None => indices
            .iter()
            .map(|&d| e_step_inner(corpus.document(d), log_weights, alpha, cfg))
            .collect(),
    };

    let mut phi_stats = Array2::zeros((k, w));
    let mut doc_bound = 0.0;
    for (&d, out) in indices.iter().zip(&per_doc) {
        let doc = corpus.document(d);
        for (row, &(word, n)) in doc.entries().iter().enumerate() {
            for t in 0..k {
                phi_stats[[t, word as usize]] += n as f64 * out.phi[[row, t]];
            }
        }
        doc_bound += out.bound;
    }
    SweepOutcome {
        phi_stats,
        doc_bound,
    }
}

pub(crate) fn build_pool(threads: usize) -> Result<Option<rayon::ThreadPool>> {
    if threads <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

/// Draws the K x W Gamma(100, 1/100) initialization (entry mean 1) used for
/// both lambda and nu.
pub(crate) fn init_topic_matrix(k: usize, w: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let gamma = Gamma::new(100.0f64, 0.01).expect("valid shape/scale");
    let values: Vec<f64> = (0..k * w).map(|_| gamma.sample(rng)).collect();
    Array2::from_shape_vec((k, w), values).expect("length matches")
}

/// Topic-side ELBO terms for the standard model.
fn topic_terms(lambda: &Array2<f64>, elog_beta: &Array2<f64>, eta: f64) -> f64 {
    let (k, w) = lambda.dim();
    let mut total =
        k as f64 * (math::ln_gamma(w as f64 * eta).unwrap() - w as f64 * math::ln_gamma(eta).unwrap());
    for (lrow, erow) in lambda.outer_iter().zip(elog_beta.outer_iter()) {
        let row_sum = lrow.sum();
        total -= math::ln_gamma(row_sum).unwrap();
        for (&l, &e) in lrow.iter().zip(erow.iter()) {
            total += math::ln_gamma(l).unwrap() + (eta - l) * e;
        }
    }
    total
}

/// Evidence lower bound of the standard model at the given posteriors.
pub fn elbo(
    corpus: &Corpus,
    model: &StandardModel,
    posteriors: &[DocumentPosterior],
) -> Result<f64> {
    if posteriors.len() != corpus.num_documents() {
        return Err(Error::shape(format!(
            "{} posteriors for {} documents",
            posteriors.len(),
            corpus.num_documents()
        )));
    }
    let (k, w) = model.lambda.dim();
    if w != corpus.vocab_size() {
        return Err(Error::shape(format!(
            "model width {w} vs corpus vocabulary {}",
            corpus.vocab_size()
        )));
    }
    let elog_beta = model.expected_log_beta();
    let alpha = model.hyper.alpha;

    let mut total = 0.0;
    for (doc, post) in corpus.documents().iter().zip(posteriors) {
        if post.gamma.len() != k || post.phi.dim() != (doc.distinct(), k) {
            return Err(Error::shape("posterior shape does not match document"));
        }
        let gamma = post.gamma.as_slice().expect("standard layout");
        let elog_theta = math::dirichlet_log_expectation(gamma)?;
        for (row, &(word, n)) in doc.entries().iter().enumerate() {
            for t in 0..k {
                let p = post.phi[[row, t]];
                if p > 0.0 {
                    total +=
                        n as f64 * p * (elog_theta[t] + elog_beta[[t, word as usize]] - p.ln());
                }
            }
        }
        let gamma_sum: f64 = gamma.iter().sum();
        total += math::ln_gamma(k as f64 * alpha)? - k as f64 * math::ln_gamma(alpha)?
            - math::ln_gamma(gamma_sum)?;
        for (t, &g) in gamma.iter().enumerate() {
            total += math::ln_gamma(g)? + (alpha - g) * elog_theta[t];
        }
    }
    total += topic_terms(&model.lambda, &elog_beta, model.hyper.eta);
    Ok(total)
}

/// Re-runs the E-step over a whole corpus against a fitted model, returning
/// the per-document posteriors (used by evaluation).
pub fn infer_posteriors(
    corpus: &Corpus,
    model: &StandardModel,
    cfg: &EStepConfig,
    threads: usize,
) -> Result<Vec<DocumentPosterior>> {
    if corpus.vocab_size() != model.lambda.ncols() {
        return Err(Error::shape("corpus and model vocabulary sizes differ"));
    }
    let log_weights = model.expected_log_beta();
    let pool = build_pool(threads)?;
    let indices: Vec<usize> = (0..corpus.num_documents()).collect();
    let run = |d: usize| {
        let out = e_step_inner(corpus.document(d), &log_weights, model.hyper.alpha, cfg);
        DocumentPosterior {
            gamma: out.gamma,
            phi: out.phi,
        }
    };
    Ok(match pool {
        Some(pool) => pool.install(|| {
            use rayon::prelude::*;
            indices.par_iter().map(|&d| run(d)).collect()
        }),
        None => indices.iter().map(|&d| run(d)).collect(),
    })
}

impl StandardModel {
    /// Text export: header `K W alpha eta`, then K rows of W lambda values.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        use std::io::Write;
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        let (k, w) = self.lambda.dim();
        writeln!(out, "{k} {w} {} {}", self.hyper.alpha, self.hyper.eta)
            .map_err(|e| Error::io(path, e))?;
        for row in self.lambda.outer_iter() {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(out, "{}", line.join(" ")).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        use std::io::BufRead;
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = std::io::BufReader::new(file).lines();
        let header = lines
            .next()
            .transpose()
            .map_err(|e| Error::io(path, e))?
            .ok_or_else(|| Error::Format {
                path: path.to_path_buf(),
                msg: "empty model file".into(),
            })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Format {
                path: path.to_path_buf(),
                msg: format!(
                    "expected header `K W alpha eta`, got {} fields",
                    fields.len()
                ),
            });
        }
        let bad = || Error::Format {
            path: path.to_path_buf(),
            msg: "unparseable model header".into(),
        };
        let k: usize = fields[0].parse().map_err(|_| bad())?;
        let w: usize = fields[1].parse().map_err(|_| bad())?;
        let alpha: f64 = fields[2].parse().map_err(|_| bad())?;
        let eta: f64 = fields[3].parse().map_err(|_| bad())?;
        let mut values = Vec::with_capacity(k * w);
        for r in 0..k {
            let line = lines
                .next()
                .transpose()
                .map_err(|e| Error::io(path, e))?
                .ok_or_else(|| Error::Format {
                    path: path.to_path_buf(),
                    msg: format!("missing lambda row {r}"),
                })?;
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Format {
                    path: path.to_path_buf(),
                    msg: format!("unparseable lambda row {r}"),
                })?;
            if row.len() != w {
                return Err(Error::Format {
                    path: path.to_path_buf(),
                    msg: format!("lambda row {r} has {} values, expected {w}", row.len()),
                });
            }
            values.extend(row);
        }
        Ok(StandardModel {
            lambda: Array2::from_shape_vec((k, w), values).expect("length checked"),
            hyper: Hyperparameters::new(alpha, eta, k)?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BatchFitConfig {
    pub max_epochs: usize,
    /// Early stop when the relative ELBO change drops below this; 0 disables
    /// early stopping.
    pub tol: f64,
    pub seed: u64,
    pub threads: usize,
    pub estep: EStepConfig,
    /// Keep a lambda snapshot after every epoch (for trajectory tests).
    pub track_parameters: bool,
}

impl Default for BatchFitConfig {
    fn default() -> Self {
        BatchFitConfig {
            max_epochs: 100,
            tol: 1e-6,
            seed: 0,
            threads: 1,
            estep: EStepConfig::default(),
            track_parameters: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatchFitResult {
    pub model: StandardModel,
    /// ELBO measured once per epoch, after the E-step and before the lambda
    /// update.
    pub elbo_trace: Vec<f64>,
    pub snapshots: Vec<Array2<f64>>,
}

/// Full-corpus variational Bayes: alternate a corpus-wide E-step with
/// lambda_kw = eta + sum_d n_dw phi_dwk until the ELBO stabilizes.
pub fn batch_vb_fit(
    corpus: &Corpus,
    hyper: Hyperparameters,
    cfg: &BatchFitConfig,
) -> Result<BatchFitResult> {
    let mut init_rng = crate::corpus::rng_for(cfg.seed, seed_tags::MODEL_INIT);
    let lambda = init_topic_matrix(hyper.k, corpus.vocab_size(), &mut init_rng);
    batch_vb_fit_from(corpus, StandardModel { lambda, hyper }, cfg)
}

/// Batch epochs continuing from an existing model (refinement after an
/// online pass).
pub fn batch_vb_fit_from(
    corpus: &Corpus,
    start: StandardModel,
    cfg: &BatchFitConfig,
) -> Result<BatchFitResult> {
    if corpus.num_documents() == 0 {
        return Err(Error::argument("corpus must not be empty"));
    }
    let w = corpus.vocab_size();
    if start.lambda.ncols() != w {
        return Err(Error::shape(format!(
            "model width {} vs corpus vocabulary {w}",
            start.lambda.ncols()
        )));
    }
    let hyper = start.hyper;
    let pool = build_pool(cfg.threads)?;
    let mut lambda = start.lambda;
    let indices: Vec<usize> = (0..corpus.num_documents()).collect();

    let mut elbo_trace = Vec::new();
    let mut snapshots = Vec::new();
    for _epoch in 0..cfg.max_epochs {
        let model = StandardModel {
            lambda: lambda.clone(),
            hyper,
        };
        let elog_beta = model.expected_log_beta();
        let sweep = sweep_docs(corpus, &indices, &elog_beta, hyper.alpha, &cfg.estep, pool.as_ref());
        let bound = sweep.doc_bound + topic_terms(&lambda, &elog_beta, hyper.eta);
        elbo_trace.push(bound);

        lambda = sweep.phi_stats;
        lambda.mapv_inplace(|v| v + hyper.eta);
        if cfg.track_parameters {
            snapshots.push(lambda.clone());
        }

        if cfg.tol > 0.0 && elbo_trace.len() >= 2 {
            let prev = elbo_trace[elbo_trace.len() - 2];
            let cur = *elbo_trace.last().unwrap();
            if ((cur - prev) / prev.abs().max(1.0)).abs() < cfg.tol {
                break;
            }
        }
    }
    Ok(BatchFitResult {
        model: StandardModel { lambda, hyper },
        elbo_trace,
        snapshots,
    })
}

#[derive(Debug, Clone)]
pub struct OnlineFitConfig {
    pub batch_size: usize,
    pub rate: LearningRate,
    /// Stop budget: each pass is ceil(D / S) updates; the default single
    /// pass corresponds to every document seen once.
    pub passes: usize,
    pub sampling: BatchSampling,
    pub seed: u64,
    pub threads: usize,
    pub estep: EStepConfig,
    pub track_parameters: bool,
}

impl OnlineFitConfig {
    pub fn new(batch_size: usize, rate: LearningRate) -> Self {
        OnlineFitConfig {
            batch_size,
            rate,
            passes: 1,
            sampling: BatchSampling::Independent,
            seed: 0,
            threads: 1,
            estep: EStepConfig::default(),
            track_parameters: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct UpdateStats {
    pub t: u64,
    pub rho: f64,
    /// Total L1 change of the expected topic-word matrix at this update.
    pub grt: f64,
}

#[derive(Debug, Clone)]
pub struct OnlineFitResult {
    pub model: StandardModel,
    pub trace: Vec<UpdateStats>,
    pub snapshots: Vec<Array2<f64>>,
}

/// Online (mini-batch natural-gradient) variational Bayes. Per batch:
/// E-step the members, rescale the batch statistics by D/S, then blend
/// lambda <- (1 - rho_t) lambda + rho_t lambda~.
pub fn online_vb_fit(
    corpus: &Corpus,
    hyper: Hyperparameters,
    cfg: &OnlineFitConfig,
) -> Result<OnlineFitResult> {
    let d = corpus.num_documents();
    if d == 0 {
        return Err(Error::argument("corpus must not be empty"));
    }
    if cfg.batch_size == 0 || cfg.batch_size > d {
        return Err(Error::argument(format!(
            "batch size {} must be in 1..={d}",
            cfg.batch_size
        )));
    }
    let w = corpus.vocab_size();
    let pool = build_pool(cfg.threads)?;
    let mut init_rng = crate::corpus::rng_for(cfg.seed, seed_tags::MODEL_INIT);
    let mut lambda = init_topic_matrix(hyper.k, w, &mut init_rng);
    let mut sampler = BatchSampler::new(
        corpus,
        cfg.batch_size,
        cfg.sampling,
        crate::corpus::rng_for(cfg.seed, seed_tags::SAMPLER),
    )?;

    let updates_per_pass = d.div_ceil(cfg.batch_size);
    let total_updates = updates_per_pass * cfg.passes.max(1);

    let mut beta_prev = StandardModel {
        lambda: lambda.clone(),
        hyper,
    }
    .expected_beta();
    let mut trace = Vec::with_capacity(total_updates);
    let mut snapshots = Vec::new();

    for t in 0..total_updates as u64 {
        let mut batch = sampler.next_batch().doc_indices;
        // Fixed-order accumulation keeps the sweep deterministic and makes
        // the S = D schedule coincide with the batch update bit for bit.
        batch.sort_unstable();
        let model = StandardModel {
            lambda: lambda.clone(),
            hyper,
        };
        let elog_beta = model.expected_log_beta();
        let sweep = sweep_docs(corpus, &batch, &elog_beta, hyper.alpha, &cfg.estep, pool.as_ref());

        let scale = d as f64 / batch.len() as f64;
        let rho = cfg.rate.rho(t);
        for (l, &s) in lambda.iter_mut().zip(sweep.phi_stats.iter()) {
            let blended = hyper.eta + scale * s;
            *l = (1.0 - rho) * *l + rho * blended;
        }

        let beta = StandardModel {
            lambda: lambda.clone(),
            hyper,
        }
        .expected_beta();
        let grt = crate::eval::grt(&beta, &beta_prev)?;
        beta_prev = beta;
        trace.push(UpdateStats { t, rho, grt });
        if cfg.track_parameters {
            snapshots.push(lambda.clone());
        }
    }

    Ok(OnlineFitResult {
        model: StandardModel { lambda, hyper },
        trace,
        snapshots,
    })
}
