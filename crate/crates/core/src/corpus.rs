//! Document representation, vocabulary management, mini-batch sampling and
//! synthetic data generation.
//!
//! All randomness is owned explicitly: samplers and generators take a seeded
//! RNG (or a seed) from the caller, never a thread-local one.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};

/// Deterministic sub-seed derivation (splitmix64 over base ^ tag). Every
/// component that needs its own stream hashes the run seed with a fixed tag
/// so streams never interleave.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    let mut z = base ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_for(base_seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base_seed, tag))
}

/// Bijection between word strings and dense ids 0..W-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: BTreeMap<String, u32>,
}

impl Vocabulary {
    pub fn new(terms: Vec<String>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i as u32).is_some() {
                return Err(Error::argument(format!("duplicate vocabulary term {t:?}")));
            }
        }
        Ok(Vocabulary { terms, index })
    }

    /// Placeholder vocabulary `w0..w{n-1}` for synthetic corpora.
    pub fn numbered(n: usize) -> Self {
        let terms: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        Vocabulary::new(terms).expect("numbered terms are unique")
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, id: u32) -> Option<&str> {
        self.terms.get(id as usize).map(String::as_str)
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for t in &self.terms {
            writeln!(w, "{t}").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// One UTF-8 term per line, line number = id.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut terms = Vec::new();
        for line in BufReader::new(file).lines() {
            terms.push(line.map_err(|e| Error::io(path, e))?);
        }
        Vocabulary::new(terms)
    }
}

/// One document as a sparse word-id -> count map, ids strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseDocument {
    entries: Vec<(u32, u32)>,
    total: u64,
}

impl SparseDocument {
    /// `entries` must have strictly increasing ids and counts >= 1.
    pub fn new(entries: Vec<(u32, u32)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::argument("document must contain at least one word"));
        }
        let mut total = 0u64;
        for (i, &(w, n)) in entries.iter().enumerate() {
            if n == 0 {
                return Err(Error::argument(format!("zero count for word {w}")));
            }
            if i > 0 && entries[i - 1].0 >= w {
                return Err(Error::argument(
                    "word ids must be strictly increasing within a document",
                ));
            }
            total += n as u64;
        }
        Ok(SparseDocument { entries, total })
    }

    /// Builds a document from an unordered token multiset.
    pub fn from_tokens(tokens: &[u32]) -> Result<Self> {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for &t in tokens {
            *counts.entry(t).or_insert(0) += 1;
        }
        SparseDocument::new(counts.into_iter().collect())
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    /// Total token count N_d.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn max_word_id(&self) -> u32 {
        self.entries.last().map(|&(w, _)| w).unwrap_or(0)
    }
}

/// An immutable bag-of-words collection plus its vocabulary.
#[derive(Debug, Clone)]
pub struct Corpus {
    documents: Vec<SparseDocument>,
    vocab: Vocabulary,
}

impl Corpus {
    pub fn new(documents: Vec<SparseDocument>, vocab: Vocabulary) -> Result<Self> {
        let w = vocab.len() as u32;
        for (d, doc) in documents.iter().enumerate() {
            if doc.max_word_id() >= w {
                return Err(Error::argument(format!(
                    "document {d} references word id {} outside vocabulary of size {w}",
                    doc.max_word_id()
                )));
            }
        }
        Ok(Corpus { documents, vocab })
    }

    pub fn num_documents(&self) -> usize {
        self.documents.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn document(&self, d: usize) -> &SparseDocument {
        &self.documents[d]
    }

    pub fn documents(&self) -> &[SparseDocument] {
        &self.documents
    }

    pub fn total_tokens(&self) -> u64 {
        self.documents.iter().map(SparseDocument::total).sum()
    }

    /// Per-word token counts over the whole corpus.
    pub fn word_frequencies(&self) -> Vec<u64> {
        let mut freq = vec![0u64; self.vocab_size()];
        for doc in &self.documents {
            for &(w, n) in doc.entries() {
                freq[w as usize] += n as u64;
            }
        }
        freq
    }

    /// Writes the bag-of-words text format: three header lines `D`, `W`,
    /// `NNZ`, then one `doc_id word_id count` triplet per line, 0-based,
    /// ascending (doc_id, word_id).
    pub fn save_bow(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let nnz: usize = self.documents.iter().map(SparseDocument::distinct).sum();
        writeln!(out, "{}", self.num_documents()).map_err(|e| Error::io(path, e))?;
        writeln!(out, "{}", self.vocab_size()).map_err(|e| Error::io(path, e))?;
        writeln!(out, "{nnz}").map_err(|e| Error::io(path, e))?;
        for (d, doc) in self.documents.iter().enumerate() {
            for &(w, n) in doc.entries() {
                writeln!(out, "{d} {w} {n}").map_err(|e| Error::io(path, e))?;
            }
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads the bag-of-words text format written by [`Corpus::save_bow`].
    ///
    /// The vocabulary is synthesized as numbered terms; pair with
    /// [`Vocabulary::load`] and [`Corpus::with_vocab`] when term strings
    /// matter.
    pub fn load_bow(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut lines = reader.lines().enumerate();

        let mut header = |name: &str| -> Result<usize> {
            let (i, line) = lines.next().ok_or_else(|| Error::Format {
                path: path.to_path_buf(),
                msg: format!("missing {name} header line"),
            })?;
            let line = line.map_err(|e| Error::io(path, e))?;
            line.trim().parse::<usize>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("expected integer {name}, got {line:?}"),
            })
        };
        let d = header("D")?;
        let w = header("W")?;
        let nnz = header("NNZ")?;
        if d == 0 {
            return Err(Error::Format {
                path: path.to_path_buf(),
                msg: "empty corpus (D = 0)".into(),
            });
        }

        let mut docs: Vec<Vec<(u32, u32)>> = vec![Vec::new(); d];
        let mut seen = 0usize;
        let mut prev: Option<(usize, u32)> = None;
        for (i, line) in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let parse = |s: Option<&str>, what: &str| -> Result<usize> {
                s.and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse {
                        path: path.to_path_buf(),
                        line: i + 1,
                        msg: format!("expected {what} in triplet {line:?}"),
                    })
            };
            let mut it = line.split_whitespace();
            let doc_id = parse(it.next(), "doc_id")?;
            let word_id = parse(it.next(), "word_id")?;
            let count = parse(it.next(), "count")?;
            if it.next().is_some() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: "trailing fields in triplet".into(),
                });
            }
            if doc_id >= d || word_id >= w || count == 0 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: format!(
                        "triplet ({doc_id}, {word_id}, {count}) out of range for D={d}, W={w}"
                    ),
                });
            }
            let key = (doc_id, word_id as u32);
            if let Some(p) = prev {
                if key <= p {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: i + 1,
                        msg: "triplets must be strictly ascending by (doc_id, word_id)".into(),
                    });
                }
            }
            prev = Some(key);
            docs[doc_id].push((word_id as u32, count as u32));
            seen += 1;
        }
        if seen != nnz {
            return Err(Error::Format {
                path: path.to_path_buf(),
                msg: format!("header promises {nnz} triplets, found {seen}"),
            });
        }
        let documents = docs
            .into_iter()
            .enumerate()
            .map(|(d, entries)| {
                if entries.is_empty() {
                    Err(Error::Format {
                        path: path.to_path_buf(),
                        msg: format!("document {d} has no entries"),
                    })
                } else {
                    SparseDocument::new(entries)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Corpus::new(documents, Vocabulary::numbered(w))
    }

    /// Replaces the placeholder vocabulary (sizes must agree).
    pub fn with_vocab(mut self, vocab: Vocabulary) -> Result<Self> {
        if vocab.len() != self.vocab.len() {
            return Err(Error::shape(format!(
                "vocabulary of size {} does not match corpus width {}",
                vocab.len(),
                self.vocab.len()
            )));
        }
        self.vocab = vocab;
        Ok(self)
    }
}

/// Indices of the documents forming one mini-batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiniBatch {
    pub doc_indices: Vec<usize>,
}

impl MiniBatch {
    pub fn len(&self) -> usize {
        self.doc_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_indices.is_empty()
    }
}

/// How consecutive mini-batches relate across a pass over the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BatchSampling {
    /// Each batch is a fresh uniform draw without replacement within the
    /// batch; documents may repeat across batches.
    #[default]
    Independent,
    /// The corpus is shuffled once per pass and chunked; every document
    /// appears exactly once per pass (the final chunk may be short).
    Epoch,
}

/// Draws `s` distinct document indices uniformly from `corpus`.
pub fn sample_minibatch(
    corpus: &Corpus,
    s: usize,
    rng: &mut ChaCha8Rng,
) -> Result<MiniBatch> {
    let d = corpus.num_documents();
    if s == 0 || s > d {
        return Err(Error::argument(format!(
            "batch size {s} must be in 1..={d}"
        )));
    }
    let doc_indices = rand::seq::index::sample(rng, d, s).into_vec();
    Ok(MiniBatch { doc_indices })
}

/// Stateful mini-batch source implementing both [`BatchSampling`] modes.
pub struct BatchSampler {
    mode: BatchSampling,
    size: usize,
    num_docs: usize,
    rng: ChaCha8Rng,
    epoch_order: Vec<usize>,
    epoch_pos: usize,
}

impl BatchSampler {
    pub fn new(corpus: &Corpus, size: usize, mode: BatchSampling, rng: ChaCha8Rng) -> Result<Self> {
        let d = corpus.num_documents();
        if size == 0 || size > d {
            return Err(Error::argument(format!(
                "batch size {size} must be in 1..={d}"
            )));
        }
        Ok(BatchSampler {
            mode,
            size,
            num_docs: d,
            rng,
            epoch_order: Vec::new(),
            epoch_pos: 0,
        })
    }

    pub fn next_batch(&mut self) -> MiniBatch {
        match self.mode {
            BatchSampling::Independent => MiniBatch {
                doc_indices: rand::seq::index::sample(&mut self.rng, self.num_docs, self.size)
                    .into_vec(),
            },
            BatchSampling::Epoch => {
                if self.epoch_pos >= self.epoch_order.len() {
                    use rand::seq::SliceRandom;
                    self.epoch_order = (0..self.num_docs).collect();
                    self.epoch_order.shuffle(&mut self.rng);
                    self.epoch_pos = 0;
                }
                let end = (self.epoch_pos + self.size).min(self.epoch_order.len());
                let batch = self.epoch_order[self.epoch_pos..end].to_vec();
                self.epoch_pos = end;
                MiniBatch { doc_indices: batch }
            }
        }
    }
}

/// One Dirichlet draw via normalized Gamma variates (works for any
/// dimension, unlike the const-generic distribution type).
pub fn sample_dirichlet(alpha: &[f64], rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    if alpha.is_empty() {
        return Err(Error::argument("empty Dirichlet parameter vector"));
    }
    let mut out = Vec::with_capacity(alpha.len());
    let mut sum = 0.0;
    for &a in alpha {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::argument(format!(
                "Dirichlet parameters must be positive, got {a}"
            )));
        }
        let g = Gamma::new(a, 1.0)
            .map_err(|e| Error::argument(format!("Gamma({a}, 1): {e}")))?;
        let v: f64 = g.sample(rng);
        out.push(v);
        sum += v;
    }
    if sum == 0.0 {
        // All shape parameters tiny enough to underflow; fall back to the
        // argmax-free uniform point.
        let u = 1.0 / alpha.len() as f64;
        out.iter_mut().for_each(|v| *v = u);
    } else {
        out.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(out)
}

fn sample_symmetric_dirichlet(param: f64, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    sample_dirichlet(&vec![param; n], rng)
}

/// Ground truth returned by the synthetic generator for recovery tests.
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    /// K x W row-stochastic topic-word matrix the documents were drawn from.
    pub true_beta: ndarray::Array2<f64>,
    /// D x K row-stochastic per-document topic proportions.
    pub true_theta: ndarray::Array2<f64>,
}

/// Draws a corpus from the LDA generative process: topics from Dir(eta),
/// per-document proportions from Dir(alpha), then `doc_length` tokens per
/// document.
pub fn generate_synthetic(
    k: usize,
    w: usize,
    d: usize,
    doc_length: usize,
    alpha: f64,
    eta: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SyntheticCorpus> {
    if k == 0 || w == 0 || d == 0 || doc_length == 0 {
        return Err(Error::argument("all sizes must be >= 1"));
    }
    if alpha <= 0.0 || eta <= 0.0 || !alpha.is_finite() || !eta.is_finite() {
        return Err(Error::argument("alpha and eta must be positive"));
    }
    let mut beta = ndarray::Array2::zeros((k, w));
    for mut row in beta.outer_iter_mut() {
        let sample = sample_symmetric_dirichlet(eta, w, rng)?;
        for (b, v) in row.iter_mut().zip(sample) {
            *b = v;
        }
    }
    generate_from_beta(&beta, d, doc_length, alpha, rng)
}

/// Same generative process with a caller-supplied topic-word matrix; used to
/// build corpora with controlled (e.g. disjoint-support) topics.
pub fn generate_from_beta(
    beta: &ndarray::Array2<f64>,
    d: usize,
    doc_length: usize,
    alpha: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SyntheticCorpus> {
    let (k, w) = beta.dim();
    if k == 0 || w == 0 || d == 0 || doc_length == 0 {
        return Err(Error::argument("all sizes must be >= 1"));
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::argument("alpha must be positive"));
    }
    let mut theta = ndarray::Array2::zeros((d, k));
    let mut documents = Vec::with_capacity(d);

    // Cumulative rows once, for inverse-CDF sampling.
    let beta_cdf: Vec<Vec<f64>> = beta
        .outer_iter()
        .map(|row| {
            let mut acc = 0.0;
            row.iter()
                .map(|&p| {
                    acc += p;
                    acc
                })
                .collect()
        })
        .collect();

    for di in 0..d {
        let props: Vec<f64> = if k > 1 {
            sample_symmetric_dirichlet(alpha, k, rng)?
        } else {
            vec![1.0]
        };
        for (t, &v) in theta.row_mut(di).iter_mut().zip(&props) {
            *t = v;
        }
        let mut theta_cdf = props.clone();
        for i in 1..k {
            theta_cdf[i] += theta_cdf[i - 1];
        }
        let mut tokens = Vec::with_capacity(doc_length);
        for _ in 0..doc_length {
            let z = sample_cdf(&theta_cdf, rng);
            let word = sample_cdf(&beta_cdf[z], rng);
            tokens.push(word as u32);
        }
        documents.push(SparseDocument::from_tokens(&tokens)?);
    }
    Ok(SyntheticCorpus {
        corpus: Corpus::new(documents, Vocabulary::numbered(w))?,
        true_beta: beta.clone(),
        true_theta: theta,
    })
}

fn sample_cdf(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    use rand::Rng;
    let total = *cdf.last().expect("non-empty cdf");
    let u: f64 = rng.random_range(0.0..total);
    match cdf.partition_point(|&c| c <= u) {
        i if i < cdf.len() => i,
        _ => cdf.len() - 1,
    }
}

/// D = W documents, document d holding exactly word d once.
pub fn identity_corpus(w: usize) -> Result<Corpus> {
    if w == 0 {
        return Err(Error::argument("vocabulary size must be >= 1"));
    }
    let documents = (0..w as u32)
        .map(|i| SparseDocument::new(vec![(i, 1)]))
        .collect::<Result<Vec<_>>>()?;
    Corpus::new(documents, Vocabulary::numbered(w))
}
