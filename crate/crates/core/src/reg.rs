//! Convolved-Dirichlet regularized variational Bayes, batch and online.
//!
//! Topics are modeled as beta_k proportional to C^T b_k with b_k ~ Dir(eta)
//! and q(b_k) = Dir(nu_k). The M step redistributes expected topic counts
//! through C with a fixed-point update; setting C to the identity recovers
//! standard VB exactly, entry for entry.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{BatchSampler, BatchSampling, Corpus};
use crate::depmat::DependencyMatrix;
use crate::error::{Error, Result};
use crate::lda::{
    build_pool, e_step_inner, init_topic_matrix, seed_tags, sweep_docs, DocumentPosterior,
    EStepConfig, Hyperparameters, LearningRate, UpdateStats,
};
use crate::math;

/// Which expectation enters the fixed-point numerator.
///
/// The mass-conserving reading weights source word i's counts toward target
/// w by C_iw exp(E[log b_wk]) normalized over targets; per source the
/// weights sum to one, so sum_w (nu_wk - eta) = sum_w Phi_wk holds. The
/// alternative couples C_iw with exp(E[log b_ik]) instead, which does not
/// redistribute mass; it is kept for A/B comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NuUpdate {
    #[default]
    TargetWord,
    SourceWord,
}

/// Whether the E step scores words with the raw convolved expectations or
/// with per-topic normalized beta rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EStepBeta {
    /// log sum_i C_iw exp(E[log b_ik]); the exact coordinate-ascent weight
    /// under the Jensen bound, and the one that makes C = I coincide with
    /// standard VB bitwise.
    #[default]
    Unnormalized,
    /// The same minus each topic's log normalizer.
    Normalized,
}

/// Variational state of the regularized model.
#[derive(Debug, Clone)]
pub struct RegularizedModel {
    pub nu: Array2<f64>,
    pub hyper: Hyperparameters,
    pub reg_iter: usize,
    pub c: DependencyMatrix,
}

impl RegularizedModel {
    /// Topic-word distributions reconstructed through C (rows sum to one).
    pub fn beta(&self) -> Result<Array2<f64>> {
        compute_beta(&self.nu, &self.c)
    }

    pub fn estep_log_weights(&self, mode: EStepBeta) -> Array2<f64> {
        estep_log_weights(&self.nu, &self.c, mode)
    }
}

/// Per-topic log of the convolved expectations:
/// out[k][w] = log sum_i C_iw exp(Psi(nu_ik) - Psi(sum_s nu_sk)).
///
/// Computed one column at a time in log space; a single-entry column (the
/// identity matrix case) reduces to the bare Dirichlet expectation with no
/// rounding.
fn conv_log_weights(nu: &Array2<f64>, c: &DependencyMatrix) -> Array2<f64> {
    let (k, w) = nu.dim();
    debug_assert_eq!(w, c.size());
    let mut out = Array2::zeros((k, w));
    let mut elogb = vec![0.0; w];
    for t in 0..k {
        math::dirichlet_log_expectation_into(
            nu.row(t).to_slice().expect("standard layout"),
            &mut elogb,
        );
        for target in 0..w {
            let col = c.col(target);
            let value = if col.len() == 1 {
                col[0].log_value + elogb[col[0].idx as usize]
            } else {
                let max = col
                    .iter()
                    .map(|e| e.log_value + elogb[e.idx as usize])
                    .fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = col
                    .iter()
                    .map(|e| (e.log_value + elogb[e.idx as usize] - max).exp())
                    .sum();
                max + sum.ln()
            };
            out[[t, target]] = value;
        }
    }
    out
}

fn estep_log_weights(nu: &Array2<f64>, c: &DependencyMatrix, mode: EStepBeta) -> Array2<f64> {
    let mut lw = conv_log_weights(nu, c);
    if mode == EStepBeta::Normalized {
        for mut row in lw.outer_iter_mut() {
            let lse = math::log_sum_exp_unchecked(row.as_slice().expect("standard layout"));
            row.mapv_inplace(|v| v - lse);
        }
    }
    lw
}

/// Topic-word matrix reconstructed through C: softmax of the convolved
/// log expectations per topic.
pub fn compute_beta(nu: &Array2<f64>, c: &DependencyMatrix) -> Result<Array2<f64>> {
    let w = nu.ncols();
    if w != c.size() {
        return Err(Error::shape(format!(
            "nu width {w} vs dependency matrix size {}",
            c.size()
        )));
    }
    for (i, &v) in nu.iter().enumerate() {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::argument(format!(
                "nu entry {i} must be positive and finite, got {v}"
            )));
        }
    }
    let mut beta = conv_log_weights(nu, c);
    for mut row in beta.outer_iter_mut() {
        let lse = math::log_sum_exp_unchecked(row.as_slice().expect("standard layout"));
        if lse == f64::NEG_INFINITY {
            return Err(Error::Internal(
                "topic lost all mass during beta reconstruction".into(),
            ));
        }
        row.mapv_inplace(|v| (v - lse).exp());
    }
    Ok(beta)
}

/// One fixed-point sweep of the variational parameter nu given expected
/// topic counts Phi (K x W, indexed [topic][word]).
pub fn fixed_point_nu(
    phi_stats: &Array2<f64>,
    nu_current: &Array2<f64>,
    c: &DependencyMatrix,
    eta: f64,
    form: NuUpdate,
) -> Result<Array2<f64>> {
    let (k, w) = nu_current.dim();
    if phi_stats.dim() != (k, w) {
        return Err(Error::shape(format!(
            "Phi is {:?}, nu is {:?}",
            phi_stats.dim(),
            nu_current.dim()
        )));
    }
    if w != c.size() {
        return Err(Error::shape(format!(
            "nu width {w} vs dependency matrix size {}",
            c.size()
        )));
    }
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::argument(format!("eta must be positive, got {eta}")));
    }

    let mut next = Array2::from_elem((k, w), eta);
    let mut elogb = vec![0.0; w];
    for t in 0..k {
        math::dirichlet_log_expectation_into(
            nu_current.row(t).to_slice().expect("standard layout"),
            &mut elogb,
        );
        for source in 0..w {
            let phi_ik = phi_stats[[t, source]];
            if phi_ik == 0.0 {
                continue;
            }
            let row = c.row(source);
            // log of the responsibility denominator, max-shifted; with one
            // row entry this is exact, so C = I gives nu = eta + Phi with no
            // rounding at all.
            let log_den = if row.len() == 1 {
                row[0].log_value + elogb[row[0].idx as usize]
            } else {
                let max = row
                    .iter()
                    .map(|e| e.log_value + elogb[e.idx as usize])
                    .fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = row
                    .iter()
                    .map(|e| (e.log_value + elogb[e.idx as usize] - max).exp())
                    .sum();
                max + sum.ln()
            };
            match form {
                NuUpdate::TargetWord => {
                    for e in row {
                        let weight =
                            (e.log_value + elogb[e.idx as usize] - log_den).exp();
                        next[[t, e.idx as usize]] += phi_ik * weight;
                    }
                }
                NuUpdate::SourceWord => {
                    let source_term = elogb[source];
                    for e in row {
                        let weight = (e.log_value + source_term - log_den).exp();
                        next[[t, e.idx as usize]] += phi_ik * weight;
                    }
                }
            }
        }
    }
    Ok(next)
}

/// The tractable lower bound on the nu-dependent part of the ELBO: the
/// Jensen term over sources plus the prior and entropy terms of q(b).
pub fn surrogate_bound(
    phi_stats: &Array2<f64>,
    nu: &Array2<f64>,
    c: &DependencyMatrix,
    eta: f64,
) -> Result<f64> {
    let (k, w) = nu.dim();
    if phi_stats.dim() != (k, w) || w != c.size() {
        return Err(Error::shape("Phi, nu and C must share the vocabulary"));
    }
    let ln_gamma_eta_terms =
        math::ln_gamma(w as f64 * eta)? - w as f64 * math::ln_gamma(eta)?;

    let mut total = 0.0;
    let mut elogb = vec![0.0; w];
    for t in 0..k {
        math::dirichlet_log_expectation_into(
            nu.row(t).to_slice().expect("standard layout"),
            &mut elogb,
        );
        // Jensen word term: sum_i Phi_ik log sum_j C_ij exp(E[log b_jk]).
        for source in 0..w {
            let phi_ik = phi_stats[[t, source]];
            if phi_ik == 0.0 {
                continue;
            }
            let row = c.row(source);
            let log_den = if row.len() == 1 {
                row[0].log_value + elogb[row[0].idx as usize]
            } else {
                let max = row
                    .iter()
                    .map(|e| e.log_value + elogb[e.idx as usize])
                    .fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = row
                    .iter()
                    .map(|e| (e.log_value + elogb[e.idx as usize] - max).exp())
                    .sum();
                max + sum.ln()
            };
            total += phi_ik * log_den;
        }
        // E[log p(b | eta)] - E[log q(b)] for this topic.
        total += ln_gamma_eta_terms;
        let nu_sum = nu.row(t).sum();
        total += -math::ln_gamma(nu_sum)?;
        for (word, &n) in nu.row(t).iter().enumerate() {
            total += math::ln_gamma(n)? + (eta - n) * elogb[word];
        }
    }
    Ok(total)
}

/// Controls shared by the regularized fits.
#[derive(Debug, Clone)]
pub struct RegConfig {
    /// Fixed-point sweeps per M step.
    pub reg_iter: usize,
    pub nu_update: NuUpdate,
    pub estep_beta: EStepBeta,
    /// Record the surrogate bound after the random init and after every
    /// sweep of every M step.
    pub track_bound: bool,
}

impl Default for RegConfig {
    fn default() -> Self {
        RegConfig {
            reg_iter: 10,
            nu_update: NuUpdate::default(),
            estep_beta: EStepBeta::default(),
            track_bound: false,
        }
    }
}

/// One M step: re-initialize nu from seeded Gamma noise, then
/// apply `reg_iter` fixed-point sweeps. Returns nu and, when requested, the
/// surrogate bound after init and after each sweep.
fn reg_m_step_impl(
    phi_stats: &Array2<f64>,
    c: &DependencyMatrix,
    eta: f64,
    cfg: &RegConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(Array2<f64>, Vec<f64>)> {
    if cfg.reg_iter == 0 {
        return Err(Error::argument("reg_iter must be >= 1"));
    }
    let (k, w) = phi_stats.dim();
    let mut nu = init_topic_matrix(k, w, rng);
    let mut bounds = Vec::new();
    if cfg.track_bound {
        bounds.push(surrogate_bound(phi_stats, &nu, c, eta)?);
    }
    for _ in 0..cfg.reg_iter {
        nu = fixed_point_nu(phi_stats, &nu, c, eta, cfg.nu_update)?;
        if cfg.track_bound {
            bounds.push(surrogate_bound(phi_stats, &nu, c, eta)?);
        }
    }
    Ok((nu, bounds))
}

/// Public M step with the default (mass-conserving) update form.
pub fn reg_m_step(
    phi_stats: &Array2<f64>,
    c: &DependencyMatrix,
    eta: f64,
    reg_iter: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Array2<f64>> {
    let cfg = RegConfig {
        reg_iter,
        ..RegConfig::default()
    };
    reg_m_step_impl(phi_stats, c, eta, &cfg, rng).map(|(nu, _)| nu)
}

#[derive(Debug, Clone)]
pub struct RegBatchFitConfig {
    pub reg: RegConfig,
    pub max_epochs: usize,
    /// Early stop on relative surrogate-bound change; 0 disables.
    pub tol: f64,
    pub seed: u64,
    pub threads: usize,
    pub estep: EStepConfig,
    pub track_parameters: bool,
}

impl Default for RegBatchFitConfig {
    fn default() -> Self {
        RegBatchFitConfig {
            reg: RegConfig::default(),
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
pub struct RegBatchFitResult {
    pub model: RegularizedModel,
    /// Surrogate bound after each epoch's M step.
    pub bound_trace: Vec<f64>,
    /// Per M step, the bound after init and after every sweep (only when
    /// `track_bound` is set).
    pub sweep_bounds: Vec<Vec<f64>>,
    pub snapshots: Vec<Array2<f64>>,
}

/// Coordinate ascent over phi, gamma and nu on the full corpus.
pub fn reg_batch_fit(
    corpus: &Corpus,
    c: &DependencyMatrix,
    hyper: Hyperparameters,
    cfg: &RegBatchFitConfig,
) -> Result<RegBatchFitResult> {
    if corpus.num_documents() == 0 {
        return Err(Error::argument("corpus must not be empty"));
    }
    let w = corpus.vocab_size();
    if w != c.size() {
        return Err(Error::argument(format!(
            "corpus vocabulary {w} vs dependency matrix size {}",
            c.size()
        )));
    }
    let pool = build_pool(cfg.threads)?;
    let mut init_rng = crate::corpus::rng_for(cfg.seed, seed_tags::MODEL_INIT);
    let mut nu = init_topic_matrix(hyper.k, w, &mut init_rng);
    let mut mstep_rng = crate::corpus::rng_for(cfg.seed, seed_tags::MSTEP_INIT);
    let indices: Vec<usize> = (0..corpus.num_documents()).collect();

    let mut bound_trace = Vec::new();
    let mut sweep_bounds = Vec::new();
    let mut snapshots = Vec::new();
    for _epoch in 0..cfg.max_epochs {
        let log_weights = estep_log_weights(&nu, c, cfg.reg.estep_beta);
        let sweep = sweep_docs(corpus, &indices, &log_weights, hyper.alpha, &cfg.estep, pool.as_ref());
        let (next_nu, bounds) =
            reg_m_step_impl(&sweep.phi_stats, c, hyper.eta, &cfg.reg, &mut mstep_rng)?;
        nu = next_nu;
        if cfg.reg.track_bound {
            sweep_bounds.push(bounds);
        }
        bound_trace.push(surrogate_bound(&sweep.phi_stats, &nu, c, hyper.eta)?);
        if cfg.track_parameters {
            snapshots.push(nu.clone());
        }
        if cfg.tol > 0.0 && bound_trace.len() >= 2 {
            let prev = bound_trace[bound_trace.len() - 2];
            let cur = *bound_trace.last().unwrap();
            if ((cur - prev) / prev.abs().max(1.0)).abs() < cfg.tol {
                break;
            }
        }
    }
    Ok(RegBatchFitResult {
        model: RegularizedModel {
            nu,
            hyper,
            reg_iter: cfg.reg.reg_iter,
            c: c.clone(),
        },
        bound_trace,
        sweep_bounds,
        snapshots,
    })
}

#[derive(Debug, Clone)]
pub struct RegOnlineFitConfig {
    pub reg: RegConfig,
    pub batch_size: usize,
    pub rate: LearningRate,
    pub passes: usize,
    pub sampling: BatchSampling,
    pub seed: u64,
    pub threads: usize,
    pub estep: EStepConfig,
    pub track_parameters: bool,
}

impl RegOnlineFitConfig {
    pub fn new(batch_size: usize, rate: LearningRate) -> Self {
        RegOnlineFitConfig {
            reg: RegConfig::default(),
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

#[derive(Debug, Clone)]
pub struct RegOnlineFitResult {
    pub model: RegularizedModel,
    pub trace: Vec<UpdateStats>,
    pub sweep_bounds: Vec<Vec<f64>>,
    pub snapshots: Vec<Array2<f64>>,
}

/// Online regularized VB: per mini-batch, E-step the members against the
/// current beta, rescale the batch statistics by D/S, run the fixed-point
/// M step on them, and blend nu <- (1 - rho_t) nu + rho_t nu~.
pub fn reg_online_fit(
    corpus: &Corpus,
    c: &DependencyMatrix,
    hyper: Hyperparameters,
    cfg: &RegOnlineFitConfig,
) -> Result<RegOnlineFitResult> {
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
    if w != c.size() {
        return Err(Error::argument(format!(
            "corpus vocabulary {w} vs dependency matrix size {}",
            c.size()
        )));
    }
    let pool = build_pool(cfg.threads)?;
    let mut init_rng = crate::corpus::rng_for(cfg.seed, seed_tags::MODEL_INIT);
    let mut nu = init_topic_matrix(hyper.k, w, &mut init_rng);
    let mut mstep_rng = crate::corpus::rng_for(cfg.seed, seed_tags::MSTEP_INIT);
    let mut sampler = BatchSampler::new(
        corpus,
        cfg.batch_size,
        cfg.sampling,
        crate::corpus::rng_for(cfg.seed, seed_tags::SAMPLER),
    )?;

    let updates_per_pass = d.div_ceil(cfg.batch_size);
    let total_updates = updates_per_pass * cfg.passes.max(1);

    let mut beta_prev = compute_beta(&nu, c)?;
    let mut trace = Vec::with_capacity(total_updates);
    let mut sweep_bounds = Vec::new();
    let mut snapshots = Vec::new();

    for t in 0..total_updates as u64 {
        let mut batch = sampler.next_batch().doc_indices;
        batch.sort_unstable();
        let log_weights = estep_log_weights(&nu, c, cfg.reg.estep_beta);
        let sweep = sweep_docs(corpus, &batch, &log_weights, hyper.alpha, &cfg.estep, pool.as_ref());

        let scale = d as f64 / batch.len() as f64;
        let mut phi_scaled = sweep.phi_stats;
        phi_scaled.mapv_inplace(|v| v * scale);
        let (nu_tilde, bounds) =
            reg_m_step_impl(&phi_scaled, c, hyper.eta, &cfg.reg, &mut mstep_rng)?;
        if cfg.reg.track_bound {
            sweep_bounds.push(bounds);
        }
        let rho = cfg.rate.rho(t);
        for (cur, &fresh) in nu.iter_mut().zip(nu_tilde.iter()) {
            *cur = (1.0 - rho) * *cur + rho * fresh;
        }

        let beta = compute_beta(&nu, c)?;
        let grt = crate::eval::grt(&beta, &beta_prev)?;
        beta_prev = beta;
        trace.push(UpdateStats { t, rho, grt });
        if cfg.track_parameters {
            snapshots.push(nu.clone());
        }
    }

    Ok(RegOnlineFitResult {
        model: RegularizedModel {
            nu,
            hyper,
            reg_iter: cfg.reg.reg_iter,
            c: c.clone(),
        },
        trace,
        sweep_bounds,
        snapshots,
    })
}

/// Re-runs the E-step over a corpus against a fitted regularized model.
pub fn infer_posteriors(
    corpus: &Corpus,
    model: &RegularizedModel,
    mode: EStepBeta,
    cfg: &EStepConfig,
    threads: usize,
) -> Result<Vec<DocumentPosterior>> {
    if corpus.vocab_size() != model.nu.ncols() {
        return Err(Error::shape("corpus and model vocabulary sizes differ"));
    }
    let log_weights = model.estep_log_weights(mode);
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

/// Parsed regularized model file, before the dependency matrix is attached.
pub struct RegModelFile {
    pub nu: Array2<f64>,
    pub beta: Array2<f64>,
    pub hyper: Hyperparameters,
    pub reg_iter: usize,
    pub c_path: PathBuf,
}

impl RegularizedModel {
    /// Text export: header `K W alpha eta reg_iter`, K rows of nu, K rows of
    /// derived beta, and a final manifest line `C <path>` naming the
    /// dependency-matrix file.
    pub fn save(&self, path: &Path, c_reference: &Path) -> Result<()> {
        let beta = self.beta()?;
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let (k, w) = self.nu.dim();
        writeln!(
            out,
            "{k} {w} {} {} {}",
            self.hyper.alpha, self.hyper.eta, self.reg_iter
        )
        .map_err(|e| Error::io(path, e))?;
        for matrix in [&self.nu, &beta] {
            for row in matrix.outer_iter() {
                let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                writeln!(out, "{}", line.join(" ")).map_err(|e| Error::io(path, e))?;
            }
        }
        writeln!(out, "C {}", c_reference.display()).map_err(|e| Error::io(path, e))?;
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load_file(path: &Path) -> Result<RegModelFile> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .transpose()
            .map_err(|e| Error::io(path, e))?
            .ok_or_else(|| Error::Format {
                path: path.to_path_buf(),
                msg: "empty model file".into(),
            })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Format {
                path: path.to_path_buf(),
                msg: format!(
                    "expected header `K W alpha eta reg_iter`, got {} fields",
                    fields.len()
                ),
            });
        }
        let k: usize = fields[0].parse().map_err(|_| bad_header(path))?;
        let w: usize = fields[1].parse().map_err(|_| bad_header(path))?;
        let alpha: f64 = fields[2].parse().map_err(|_| bad_header(path))?;
        let eta: f64 = fields[3].parse().map_err(|_| bad_header(path))?;
        let reg_iter: usize = fields[4].parse().map_err(|_| bad_header(path))?;

        let mut read_matrix = |name: &str| -> Result<Array2<f64>> {
            let mut values = Vec::with_capacity(k * w);
            for r in 0..k {
                let line = lines
                    .next()
                    .transpose()
                    .map_err(|e| Error::io(path, e))?
                    .ok_or_else(|| Error::Format {
                        path: path.to_path_buf(),
                        msg: format!("missing {name} row {r}"),
                    })?;
                let row: Vec<f64> = line
                    .split_whitespace()
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Format {
                        path: path.to_path_buf(),
                        msg: format!("unparseable {name} row {r}"),
                    })?;
                if row.len() != w {
                    return Err(Error::Format {
                        path: path.to_path_buf(),
                        msg: format!("{name} row {r} has {} values, expected {w}", row.len()),
                    });
                }
                values.extend(row);
            }
            Ok(Array2::from_shape_vec((k, w), values).expect("length checked"))
        };
        let nu = read_matrix("nu")?;
        let beta = read_matrix("beta")?;
        let manifest = lines
            .next()
            .transpose()
            .map_err(|e| Error::io(path, e))?
            .ok_or_else(|| Error::Format {
                path: path.to_path_buf(),
                msg: "missing C manifest line".into(),
            })?;
        let c_path = manifest
            .strip_prefix("C ")
            .ok_or_else(|| Error::Format {
                path: path.to_path_buf(),
                msg: format!("expected `C <path>` manifest line, got {manifest:?}"),
            })?
            .trim()
            .to_string();
        Ok(RegModelFile {
            nu,
            beta,
            hyper: Hyperparameters::new(alpha, eta, k)?,
            reg_iter,
            c_path: PathBuf::from(c_path),
        })
    }
}

fn bad_header(path: &Path) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        msg: "unparseable model header".into(),
    }
}
