use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use ndarray::Array2;

use spectral_topics::corpus::{BatchSampling, Corpus, Vocabulary};
use spectral_topics::depmat::{
    build_dependency_matrix, pmi, CooccurrenceCounts, DependencyMatrix,
};
use spectral_topics::eval as metrics;
use spectral_topics::lda::{
    self, BatchFitConfig, EStepConfig, Hyperparameters, LearningRate, OnlineFitConfig,
    StandardModel, UpdateStats,
};
use spectral_topics::reg::{self, RegBatchFitConfig, RegOnlineFitConfig, RegularizedModel};
use spectral_topics::spectral::{
    aggregate_blocks, crop_bands, discretize, load_white_reference, normalize_reflectance,
    spectral_cooccurrences, HyperCube, PixelMask, SpectralWordSpec,
};

use crate::config::ConfigFile;
use crate::{
    BinningArg, BuildCArgs, EvalArgs, ExportArgs, PrepareArgs, TrainArgs, TrainMode,
};

pub fn prepare(args: PrepareArgs) -> anyhow::Result<()> {
    if !args.masks.is_empty() && args.masks.len() != 1 && args.masks.len() != args.cubes.len() {
        bail!(
            "pass no --mask, one shared mask, or one per cube ({} cubes, {} masks)",
            args.cubes.len(),
            args.masks.len()
        );
    }
    let reference = args
        .reference
        .as_deref()
        .map(load_white_reference)
        .transpose()?;

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;

    let mut documents = Vec::new();
    let mut spec: Option<SpectralWordSpec> = None;
    let mut vocab: Option<Vocabulary> = None;
    let mut counts: Option<CooccurrenceCounts> = None;
    let mut band_grid: Option<Vec<f64>> = None;

    for (i, cube_path) in args.cubes.iter().enumerate() {
        let mut cube = HyperCube::load(cube_path)?;
        if let Some(reference) = &reference {
            cube = normalize_reflectance(&cube, reference)?;
        }
        let cube = crop_bands(&cube, args.band_lo, args.band_hi)?;
        match &band_grid {
            None => band_grid = Some(cube.bands().to_vec()),
            Some(grid) => {
                if grid != cube.bands() {
                    bail!(
                        "cube {} has a different band grid after cropping",
                        cube_path.display()
                    );
                }
            }
        }
        let mask = match args.masks.len() {
            0 => PixelMask::all(cube.height(), cube.width()),
            1 => PixelMask::load(&args.masks[0])?,
            _ => PixelMask::load(&args.masks[i])?,
        };

        // Binning ranges are pinned by the first cube so every document
        // shares one vocabulary.
        if spec.is_none() {
            let built = match args.binning {
                BinningArg::EqualWidth => {
                    SpectralWordSpec::equal_width(&cube, args.r_bins, args.refl_lo, args.refl_hi)?
                }
                BinningArg::PerBand => SpectralWordSpec::per_band(&cube, &mask, args.r_bins)?,
                BinningArg::Quantile => SpectralWordSpec::quantile(&cube, &mask, args.r_bins)?,
            };
            vocab = Some(built.vocabulary(cube.bands())?);
            spec = Some(built);
        }
        let spec = spec.as_ref().expect("spec pinned by the first cube");

        // Per-pixel documents from the unaggregated signatures.
        let pixel_corpus = discretize(&cube, spec, &mask)?;
        documents.extend(pixel_corpus.documents().iter().cloned());

        // Co-occurrences from the block-aggregated signatures.
        let aggregated = aggregate_blocks(&cube, args.block)?;
        let agg_mask = mask.aggregate_blocks(args.block)?;
        if agg_mask.kept() > 0 {
            let agg_corpus = discretize(&aggregated, spec, &agg_mask)?;
            let cube_counts =
                spectral_cooccurrences(&agg_corpus, spec, !args.unconstrained_pairs)?;
            match &mut counts {
                Some(c) => c.merge(&cube_counts)?,
                None => counts = Some(cube_counts),
            }
        }
    }

    let spec = spec.context("no cubes processed")?;
    let vocab = vocab.expect("vocabulary built with the spec");
    let counts = counts.unwrap_or_else(|| CooccurrenceCounts::new(spec.vocab_size()));
    let corpus = Corpus::new(documents, vocab)?;

    let corpus_path = args.out_dir.join("corpus.bow");
    let vocab_path = args.out_dir.join("vocab.txt");
    let cooc_path = args.out_dir.join("cooc.txt");
    corpus.save_bow(&corpus_path)?;
    corpus.vocab().save(&vocab_path)?;
    counts.save(&cooc_path)?;
    println!(
        "prepare: {} documents over {} spectral words ({} bands x {} bins), {} co-occurrence events",
        corpus.num_documents(),
        corpus.vocab_size(),
        spec.wl,
        spec.r_bins,
        counts.total() / 2
    );
    println!("  corpus  -> {}", corpus_path.display());
    println!("  vocab   -> {}", vocab_path.display());
    println!("  cooc    -> {}", cooc_path.display());
    Ok(())
}

pub fn build_c(args: BuildCArgs) -> anyhow::Result<()> {
    let counts = CooccurrenceCounts::load(&args.cooc)?;
    let w = counts.vocab_size();
    let c = if counts.total() == 0 {
        DependencyMatrix::identity(w)
    } else {
        let pmi_matrix = pmi(&counts)?;
        let frequencies: Vec<u64> = (0..w as u32).map(|i| counts.marginal(i)).collect();
        build_dependency_matrix(&pmi_matrix, args.top_n.min(w), &frequencies, !args.no_normalize)?
    };
    c.save(&args.out)?;
    // Re-read to validate the written file against the type invariants.
    let reloaded = DependencyMatrix::load(&args.out)?;
    if !args.no_normalize && !reloaded.is_row_stochastic(1e-9) {
        bail!("written dependency matrix failed row-sum validation");
    }
    println!(
        "build-c: {} x {} matrix with {} nonzeros -> {}",
        w,
        w,
        c.nnz(),
        args.out.display()
    );
    Ok(())
}

struct TrainConfig {
    corpus: PathBuf,
    c: Option<PathBuf>,
    mode: TrainMode,
    hyper: Hyperparameters,
    batch_size: usize,
    rate: LearningRate,
    reg_iter: usize,
    passes: usize,
    epochs: usize,
    tol: f64,
    seed: u64,
    threads: usize,
    sampling: BatchSampling,
    model_out: PathBuf,
    metrics_out: PathBuf,
}

fn resolve_train(args: TrainArgs) -> anyhow::Result<TrainConfig> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::empty(),
    };
    let corpus = args
        .corpus
        .or_else(|| file.get_path("corpus"))
        .context("--corpus is required")?;
    let mode = match args.mode {
        Some(m) => m,
        None => file.get_mode()?.context("--mode is required")?,
    };
    let model_out = args
        .model_out
        .or_else(|| file.get_path("model_out"))
        .context("--model-out is required")?;
    let metrics_out = args
        .metrics_out
        .or_else(|| file.get_path("metrics_out"))
        .context("--metrics-out is required")?;

    let k = match args.k {
        Some(v) => v,
        None => file.get("k")?.unwrap_or(15),
    };
    let alpha = match args.alpha {
        Some(v) => v,
        None => file.get("alpha")?.unwrap_or(0.01),
    };
    let eta = match args.eta {
        Some(v) => v,
        None => file.get("eta")?.unwrap_or(0.01),
    };
    let batch_size = match args.batch_size {
        Some(v) => v,
        None => file.get("batch_size")?.unwrap_or(1024),
    };
    let kappa = match args.kappa {
        Some(v) => v,
        None => file.get("kappa")?.unwrap_or(0.51),
    };
    let tau0 = match args.tau0 {
        Some(v) => v,
        None => file.get("tau0")?.unwrap_or(1024.0),
    };
    let reg_iter = match args.reg_iter {
        Some(v) => v,
        None => file.get("reg_iter")?.unwrap_or(10),
    };
    let passes = match args.passes {
        Some(v) => v,
        None => file.get("passes")?.unwrap_or(1),
    };
    let epochs = match args.epochs {
        Some(v) => v,
        None => file.get("epochs")?.unwrap_or(100),
    };
    let tol = match args.tol {
        Some(v) => v,
        None => file.get("tol")?.unwrap_or(1e-6),
    };
    let seed = match args.seed {
        Some(v) => v,
        None => file.get("seed")?.unwrap_or(42),
    };
    let threads = match args.threads {
        Some(v) => v,
        None => file.get("threads")?.unwrap_or(1),
    };
    let sampling = if args.epoch_sampling || file.get_flag("epoch_sampling")? {
        BatchSampling::Epoch
    } else {
        BatchSampling::Independent
    };

    Ok(TrainConfig {
        corpus,
        c: args.c.or_else(|| file.get_path("c")),
        mode,
        hyper: Hyperparameters::new(alpha, eta, k)?,
        batch_size,
        rate: LearningRate::new(tau0, kappa)?,
        reg_iter,
        passes,
        epochs,
        tol,
        seed,
        threads,
        sampling,
        model_out,
        metrics_out,
    })
}

fn write_batch_metrics(path: &Path, objective: &[f64]) -> anyhow::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "epoch,objective")?;
    for (epoch, value) in objective.iter().enumerate() {
        writeln!(out, "{epoch},{value}")?;
    }
    out.flush()?;
    Ok(())
}

fn write_online_metrics(path: &Path, trace: &[UpdateStats]) -> anyhow::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "update,rho,grt")?;
    for u in trace {
        writeln!(out, "{},{},{}", u.t, u.rho, u.grt)?;
    }
    out.flush()?;
    Ok(())
}

pub fn train(args: TrainArgs) -> anyhow::Result<()> {
    let cfg = resolve_train(args)?;
    let corpus = Corpus::load_bow(&cfg.corpus)?;
    let estep = EStepConfig::default();

    match cfg.mode {
        TrainMode::StandardBatch => {
            let fit = lda::batch_vb_fit(
                &corpus,
                cfg.hyper,
                &BatchFitConfig {
                    max_epochs: cfg.epochs,
                    tol: cfg.tol,
                    seed: cfg.seed,
                    threads: cfg.threads,
                    estep,
                    track_parameters: false,
                },
            )?;
            fit.model.save(&cfg.model_out)?;
            write_batch_metrics(&cfg.metrics_out, &fit.elbo_trace)?;
            println!(
                "train: standard batch, {} epochs, final ELBO {:.6}",
                fit.elbo_trace.len(),
                fit.elbo_trace.last().unwrap()
            );
        }
        TrainMode::StandardOnline => {
            let mut online = OnlineFitConfig::new(cfg.batch_size, cfg.rate);
            online.passes = cfg.passes;
            online.sampling = cfg.sampling;
            online.seed = cfg.seed;
            online.threads = cfg.threads;
            let fit = lda::online_vb_fit(&corpus, cfg.hyper, &online)?;
            fit.model.save(&cfg.model_out)?;
            write_online_metrics(&cfg.metrics_out, &fit.trace)?;
            println!("train: standard online, {} updates", fit.trace.len());
        }
        TrainMode::RegBatch | TrainMode::RegOnline => {
            let c_path = cfg
                .c
                .clone()
                .context("--c is required for the regularized modes")?;
            let c = DependencyMatrix::load(&c_path)?;
            match cfg.mode {
                TrainMode::RegBatch => {
                    let fit = reg::reg_batch_fit(
                        &corpus,
                        &c,
                        cfg.hyper,
                        &RegBatchFitConfig {
                            reg: reg::RegConfig {
                                reg_iter: cfg.reg_iter,
                                ..reg::RegConfig::default()
                            },
                            max_epochs: cfg.epochs,
                            tol: cfg.tol,
                            seed: cfg.seed,
                            threads: cfg.threads,
                            estep,
                            track_parameters: false,
                        },
                    )?;
                    fit.model.save(&cfg.model_out, &c_path)?;
                    write_batch_metrics(&cfg.metrics_out, &fit.bound_trace)?;
                    println!(
                        "train: regularized batch, {} epochs, final bound {:.6}",
                        fit.bound_trace.len(),
                        fit.bound_trace.last().unwrap()
                    );
                }
                TrainMode::RegOnline => {
                    let mut online = RegOnlineFitConfig::new(cfg.batch_size, cfg.rate);
                    online.reg.reg_iter = cfg.reg_iter;
                    online.passes = cfg.passes;
                    online.sampling = cfg.sampling;
                    online.seed = cfg.seed;
                    online.threads = cfg.threads;
                    let fit = reg::reg_online_fit(&corpus, &c, cfg.hyper, &online)?;
                    fit.model.save(&cfg.model_out, &c_path)?;
                    write_online_metrics(&cfg.metrics_out, &fit.trace)?;
                    println!("train: regularized online, {} updates", fit.trace.len());
                }
                _ => unreachable!(),
            }
        }
    }
    println!("  model   -> {}", cfg.model_out.display());
    println!("  metrics -> {}", cfg.metrics_out.display());
    Ok(())
}

/// Either flavor of fitted model, unified for evaluation and export.
enum AnyModel {
    Standard(StandardModel),
    Regularized(RegularizedModel),
}

impl AnyModel {
    fn load(path: &Path) -> anyhow::Result<Self> {
        let header = {
            use std::io::BufRead;
            let file = File::open(path)
                .with_context(|| format!("opening model {}", path.display()))?;
            std::io::BufReader::new(file)
                .lines()
                .next()
                .transpose()?
                .unwrap_or_default()
        };
        match header.split_whitespace().count() {
            4 => Ok(AnyModel::Standard(StandardModel::load(path)?)),
            5 => {
                let file = RegularizedModel::load_file(path)?;
                let c_path = resolve_relative(path, &file.c_path);
                let c = DependencyMatrix::load(&c_path).with_context(|| {
                    format!("loading dependency matrix {}", c_path.display())
                })?;
                Ok(AnyModel::Regularized(RegularizedModel {
                    nu: file.nu,
                    hyper: file.hyper,
                    reg_iter: file.reg_iter,
                    c,
                }))
            }
            n => bail!("model header has {n} fields, expected 4 (standard) or 5 (regularized)"),
        }
    }

    fn k(&self) -> usize {
        match self {
            AnyModel::Standard(m) => m.hyper.k,
            AnyModel::Regularized(m) => m.hyper.k,
        }
    }

    fn beta(&self) -> anyhow::Result<Array2<f64>> {
        Ok(match self {
            AnyModel::Standard(m) => m.expected_beta(),
            AnyModel::Regularized(m) => m.beta()?,
        })
    }

    fn posteriors(
        &self,
        corpus: &Corpus,
        threads: usize,
    ) -> anyhow::Result<Vec<lda::DocumentPosterior>> {
        let estep = EStepConfig::default();
        Ok(match self {
            AnyModel::Standard(m) => lda::infer_posteriors(corpus, m, &estep, threads)?,
            AnyModel::Regularized(m) => {
                reg::infer_posteriors(corpus, m, reg::EStepBeta::Unnormalized, &estep, threads)?
            }
        })
    }
}

/// Model files reference C by the path given at save time; try it as
/// written, then relative to the model file.
fn resolve_relative(model_path: &Path, referenced: &Path) -> PathBuf {
    if referenced.exists() {
        return referenced.to_path_buf();
    }
    match model_path.parent() {
        Some(dir) => dir.join(referenced),
        None => referenced.to_path_buf(),
    }
}

struct Group {
    name: String,
    class: char,
    start: usize,
    end: usize,
}

fn load_groups(path: &Path, num_docs: usize) -> anyhow::Result<Vec<Group>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading groups {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            bail!(
                "{}:{}: expected `name class start end`, got {line:?}",
                path.display(),
                i + 1
            );
        }
        let class = match fields[1] {
            "a" => 'a',
            "b" => 'b',
            other => bail!("{}:{}: class must be a or b, got {other:?}", path.display(), i + 1),
        };
        let start: usize = fields[2]
            .parse()
            .with_context(|| format!("{}:{}: bad start", path.display(), i + 1))?;
        let end: usize = fields[3]
            .parse()
            .with_context(|| format!("{}:{}: bad end", path.display(), i + 1))?;
        if start >= end || end > num_docs {
            bail!(
                "{}:{}: document range [{start}, {end}) invalid for {num_docs} documents",
                path.display(),
                i + 1
            );
        }
        out.push(Group {
            name: fields[0].to_string(),
            class,
            start,
            end,
        });
    }
    Ok(out)
}

pub fn eval(args: EvalArgs) -> anyhow::Result<()> {
    let model = AnyModel::load(&args.model)?;
    let corpus = Corpus::load_bow(&args.corpus)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let threads = args.threads.unwrap_or(1);

    let posteriors = model.posteriors(&corpus, threads)?;
    let k = model.k();
    let gammas = Array2::from_shape_fn((posteriors.len(), k), |(d, t)| posteriors[d].gamma[t]);
    let ms = metrics::background_distance(&gammas)?;
    println!("Ms = {ms:.6}");

    let Some(groups_path) = &args.groups else {
        return Ok(());
    };
    let groups = load_groups(groups_path, corpus.num_documents())?;
    if groups.is_empty() {
        bail!("grouping manifest {} lists no groups", groups_path.display());
    }

    // Per image: normalize each document's gamma into topic proportions,
    // then fit the Dirichlet concentration by maximum likelihood.
    let mut expectations = Vec::with_capacity(groups.len());
    for g in &groups {
        let rows = g.end - g.start;
        let samples = Array2::from_shape_fn((rows, k), |(r, t)| {
            let gamma = &posteriors[g.start + r].gamma;
            gamma[t] / gamma.sum()
        });
        let est = metrics::dirichlet_mle(&samples)?;
        expectations.push(est.expected_probabilities);
    }

    let prob_path = args.out_dir.join("topic_probabilities.csv");
    {
        let mut out = BufWriter::new(File::create(&prob_path)?);
        let header: Vec<String> = (0..k).map(|t| format!("topic{t}")).collect();
        writeln!(out, "image,class,{}", header.join(","))?;
        for (g, probs) in groups.iter().zip(&expectations) {
            let values: Vec<String> = probs.iter().map(|p| format!("{p}")).collect();
            writeln!(out, "{},{},{}", g.name, g.class, values.join(","))?;
        }
        out.flush()?;
    }
    println!("  per-image expected topic probabilities -> {}", prob_path.display());

    let group_a: Vec<Vec<f64>> = groups
        .iter()
        .zip(&expectations)
        .filter(|(g, _)| g.class == 'a')
        .map(|(_, e)| e.clone())
        .collect();
    let group_b: Vec<Vec<f64>> = groups
        .iter()
        .zip(&expectations)
        .filter(|(g, _)| g.class == 'b')
        .map(|(_, e)| e.clone())
        .collect();
    let pairs = group_a.len().min(group_b.len());
    if pairs < 2 {
        eprintln!(
            "warning: the paired ratio test needs at least 2 pairs ({} a, {} b); skipping it",
            group_a.len(),
            group_b.len()
        );
        return Ok(());
    }
    if group_a.len() != group_b.len() {
        eprintln!(
            "warning: unpaired images dropped ({} a vs {} b); using the first {pairs} of each",
            group_a.len(),
            group_b.len()
        );
    }
    let test = metrics::topic_ratio_test(
        &group_a[..pairs],
        &group_b[..pairs],
        args.topic_num,
        args.topic_den,
    )?;
    let ratio_path = args.out_dir.join("ratio_test.csv");
    {
        let mut out = BufWriter::new(File::create(&ratio_path)?);
        writeln!(out, "pair,ratio_a,ratio_b,difference")?;
        for (i, (ra, rb)) in test.ratios_a.iter().zip(&test.ratios_b).enumerate() {
            writeln!(out, "{i},{ra},{rb},{}", ra - rb)?;
        }
        writeln!(out, "t,{},,", test.t_statistic)?;
        writeln!(out, "p,{},,", test.p_value)?;
        out.flush()?;
    }
    if test.excluded > 0 {
        eprintln!(
            "warning: {} pair(s) excluded for zero denominator probability",
            test.excluded
        );
    }
    println!(
        "  ratio test (topic {} / topic {}): t = {:.4}, p = {:.6} -> {}",
        args.topic_num,
        args.topic_den,
        test.t_statistic,
        test.p_value,
        ratio_path.display()
    );
    Ok(())
}

pub fn export_topics(args: ExportArgs) -> anyhow::Result<()> {
    let model = AnyModel::load(&args.model)?;
    let beta = model.beta()?;
    let vocab = args.vocab.as_deref().map(Vocabulary::load).transpose()?;
    if let Some(v) = &vocab {
        if v.len() != beta.ncols() {
            bail!(
                "vocabulary has {} terms, model has {} words",
                v.len(),
                beta.ncols()
            );
        }
    }
    for (t, row) in beta.outer_iter().enumerate() {
        let mut ranked: Vec<(usize, f64)> = row.iter().cloned().enumerate().collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let words: Vec<String> = ranked
            .iter()
            .take(args.top)
            .map(|&(w, p)| match &vocab {
                Some(v) => format!("{}:{p:.5}", v.term(w as u32).unwrap_or("?")),
                None => format!("{w}:{p:.5}"),
            })
            .collect();
        println!("topic {t}: {}", words.join(" "));
    }
    Ok(())
}
