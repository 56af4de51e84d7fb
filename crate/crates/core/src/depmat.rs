//! Word-pair dependency matrix construction: sliding-window co-occurrence
//! counting, positive PMI, and the row-stochastic matrix C that the
//! regularized model convolves topics with.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Sparse symmetric co-occurrence counts with per-word marginals.
///
/// `marginal[i]` is the i-th row sum of the symmetric matrix and `total` the
/// grand sum, so `total = sum(marginals)`.
#[derive(Debug, Clone)]
pub struct CooccurrenceCounts {
    vocab_size: usize,
    // Canonical storage: key (i, j) with i <= j.
    counts: BTreeMap<(u32, u32), u64>,
    marginals: Vec<u64>,
    total: u64,
}

impl CooccurrenceCounts {
    pub fn new(vocab_size: usize) -> Self {
        CooccurrenceCounts {
            vocab_size,
            counts: BTreeMap::new(),
            marginals: vec![0; vocab_size],
            total: 0,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn marginal(&self, w: u32) -> u64 {
        self.marginals[w as usize]
    }

    pub fn get(&self, i: u32, j: u32) -> u64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.counts.get(&key).copied().unwrap_or(0)
    }

    /// Records one co-occurrence event between words `a` and `b`. A
    /// same-word event contributes 2 to the diagonal (both slots of the
    /// pair), which keeps PMI exactly zero for independent streams.
    pub fn add_pair(&mut self, a: u32, b: u32) {
        debug_assert!((a as usize) < self.vocab_size && (b as usize) < self.vocab_size);
        let key = if a <= b { (a, b) } else { (b, a) };
        if a == b {
            *self.counts.entry(key).or_insert(0) += 2;
            self.marginals[a as usize] += 2;
        } else {
            *self.counts.entry(key).or_insert(0) += 1;
            self.marginals[a as usize] += 1;
            self.marginals[b as usize] += 1;
        }
        self.total += 2;
    }

    /// Merges another shard of counts (integer addition, order-free).
    pub fn merge(&mut self, other: &CooccurrenceCounts) -> Result<()> {
        if other.vocab_size != self.vocab_size {
            return Err(Error::shape(format!(
                "cannot merge counts over vocabularies of size {} and {}",
                self.vocab_size, other.vocab_size
            )));
        }
        for (&k, &v) in &other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        for (m, o) in self.marginals.iter_mut().zip(&other.marginals) {
            *m += o;
        }
        self.total += other.total;
        Ok(())
    }

    /// Canonical (i <= j) entries in ascending order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.counts.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    /// Writes the upper triangle in the sparse text format.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{} {}", self.vocab_size, self.counts.len())
            .map_err(|e| Error::io(path, e))?;
        for (i, j, c) in self.entries() {
            writeln!(out, "{i} {j} {c}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mat = SparseMatrix::load(path)?;
        let mut counts = CooccurrenceCounts::new(mat.size());
        for (i, row) in mat.rows().iter().enumerate() {
            for &(j, v) in row {
                if (j as usize) < i {
                    return Err(Error::Format {
                        path: path.to_path_buf(),
                        msg: "co-occurrence file must store the upper triangle".into(),
                    });
                }
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(Error::Format {
                        path: path.to_path_buf(),
                        msg: format!(
                            "co-occurrence count ({i},{j}) = {v} is not a nonnegative integer"
                        ),
                    });
                }
                let v = v as u64;
                if v == 0 {
                    continue;
                }
                counts.counts.insert((i as u32, j), v);
                if i as u32 == j {
                    counts.marginals[i] += v;
                    counts.total += v;
                } else {
                    counts.marginals[i] += v;
                    counts.marginals[j as usize] += v;
                    counts.total += 2 * v;
                }
            }
        }
        Ok(counts)
    }
}

/// Generic sparse W x W real matrix, row storage with sorted columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    size: usize,
    rows: Vec<Vec<(u32, f64)>>,
}

impl SparseMatrix {
    pub fn zeros(size: usize) -> Self {
        SparseMatrix {
            size,
            rows: vec![Vec::new(); size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rows(&self) -> &[Vec<(u32, f64)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: u32) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|p| self.rows[i][p].1)
            .unwrap_or(0.0)
    }

    /// Inserts or overwrites an entry, keeping columns sorted.
    pub fn set(&mut self, i: usize, j: u32, v: f64) {
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&j, |&(c, _)| c) {
            Ok(p) => row[p].1 = v,
            Err(p) => row.insert(p, (j, v)),
        }
    }

    /// Text format: header `W NNZ`, then `row col value` per line, 0-based,
    /// row-major sorted.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{} {}", self.size, self.nnz()).map_err(|e| Error::io(path, e))?;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                writeln!(out, "{i} {j} {v}").map_err(|e| Error::io(path, e))?;
            }
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let reader = BufReader::new(file);
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::Format {
            path: path.to_path_buf(),
            msg: "missing header".into(),
        })?;
        let header = header.map_err(|e| Error::io(path, e))?;
        let mut it = header.split_whitespace();
        let size: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: "expected `W NNZ` header".into(),
            })?;
        let nnz: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: "expected `W NNZ` header".into(),
            })?;

        let mut mat = SparseMatrix::zeros(size);
        let mut seen = 0usize;
        let mut prev: Option<(usize, u32)> = None;
        for (ln, line) in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let bad = |msg: &str| Error::Parse {
                path: path.to_path_buf(),
                line: ln + 1,
                msg: msg.into(),
            };
            let i: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("expected row index"))?;
            let j: u32 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("expected column index"))?;
            let v: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("expected value"))?;
            if i >= size || j as usize >= size {
                return Err(bad("index out of range"));
            }
            if let Some(p) = prev {
                if (i, j) <= p {
                    return Err(bad("entries must be row-major sorted"));
                }
            }
            prev = Some((i, j));
            mat.rows[i].push((j, v));
            seen += 1;
        }
        if seen != nnz {
            return Err(Error::Format {
                path: path.to_path_buf(),
                msg: format!("header promises {nnz} entries, found {seen}"),
            });
        }
        Ok(mat)
    }
}

/// Positive pointwise mutual information of the counts: entry (i, j) is
/// max(0, ln(c_ij * total / (m_i * m_j))) wherever c_ij > 0; non-positive
/// values are dropped (clipped to zero).
pub fn pmi(counts: &CooccurrenceCounts) -> Result<SparseMatrix> {
    if counts.total() == 0 {
        return Err(Error::domain("pmi of empty co-occurrence counts"));
    }
    let total = counts.total() as f64;
    let mut mat = SparseMatrix::zeros(counts.vocab_size());
    for (i, j, c) in counts.entries() {
        let mi = counts.marginal(i) as f64;
        let mj = counts.marginal(j) as f64;
        let value = ((c as f64) * total / (mi * mj)).ln();
        if value > 0.0 {
            mat.set(i as usize, j, value);
            if i != j {
                mat.set(j as usize, i, value);
            }
        }
    }
    Ok(mat)
}

/// How the token stream is scanned for co-occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    /// Symmetric window radius: positions p and q co-occur when
    /// 0 < |p - q| <= radius.
    pub radius: usize,
}

/// Counts co-occurrences over ordered token sequences with a symmetric
/// window. Each unordered position pair is one event.
pub fn count_cooccurrences(
    sequences: &[Vec<u32>],
    vocab_size: usize,
    window: WindowSpec,
) -> Result<CooccurrenceCounts> {
    if window.radius == 0 {
        return Err(Error::argument("window radius must be >= 1"));
    }
    let mut counts = CooccurrenceCounts::new(vocab_size);
    for seq in sequences {
        for (p, &a) in seq.iter().enumerate() {
            if a as usize >= vocab_size {
                return Err(Error::argument(format!(
                    "token {a} outside vocabulary of size {vocab_size}"
                )));
            }
            let end = (p + window.radius + 1).min(seq.len());
            for &b in &seq[p + 1..end] {
                counts.add_pair(a, b);
            }
        }
    }
    Ok(counts)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct DepEntry {
    pub idx: u32,
    pub value: f64,
    pub log_value: f64,
}

/// The W x W word-pair dependency matrix C: nonnegative, positive diagonal,
/// rows normalized to sum 1 when built through [`build_dependency_matrix`].
///
/// Both row and column adjacency are kept, with logs precomputed, because
/// the fixed-point update walks rows while the topic reconstruction walks
/// columns.
#[derive(Debug, Clone)]
pub struct DependencyMatrix {
    size: usize,
    rows: Vec<Vec<DepEntry>>,
    cols: Vec<Vec<DepEntry>>,
}

impl DependencyMatrix {
    /// Validates nonnegativity and a strictly positive diagonal, then builds
    /// the column index.
    pub fn from_sparse(mat: &SparseMatrix) -> Result<Self> {
        let size = mat.size();
        let mut rows: Vec<Vec<DepEntry>> = Vec::with_capacity(size);
        for (i, row) in mat.rows().iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            let mut diag = 0.0;
            for &(j, v) in row {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::argument(format!(
                        "dependency entry ({i},{j}) = {v} must be finite and >= 0"
                    )));
                }
                if v == 0.0 {
                    continue;
                }
                if j as usize == i {
                    diag = v;
                }
                out.push(DepEntry {
                    idx: j,
                    value: v,
                    log_value: v.ln(),
                });
            }
            if diag <= 0.0 {
                return Err(Error::argument(format!(
                    "dependency matrix needs a positive diagonal, row {i} has none"
                )));
            }
            rows.push(out);
        }
        let mut cols: Vec<Vec<DepEntry>> = vec![Vec::new(); size];
        for (i, row) in rows.iter().enumerate() {
            for e in row {
                cols[e.idx as usize].push(DepEntry {
                    idx: i as u32,
                    value: e.value,
                    log_value: e.log_value,
                });
            }
        }
        Ok(DependencyMatrix { size, rows, cols })
    }

    pub fn identity(size: usize) -> Self {
        let entry = |i: usize| DepEntry {
            idx: i as u32,
            value: 1.0,
            log_value: 0.0,
        };
        DependencyMatrix {
            size,
            rows: (0..size).map(|i| vec![entry(i)]).collect(),
            cols: (0..size).map(|i| vec![entry(i)]).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub(crate) fn row(&self, i: usize) -> &[DepEntry] {
        &self.rows[i]
    }

    pub(crate) fn col(&self, j: usize) -> &[DepEntry] {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: u32) -> f64 {
        self.rows[i]
            .iter()
            .find(|e| e.idx == j)
            .map(|e| e.value)
            .unwrap_or(0.0)
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|e| e.value).sum()
    }

    pub fn is_row_stochastic(&self, tol: f64) -> bool {
        (0..self.size).all(|i| (self.row_sum(i) - 1.0).abs() <= tol)
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        let mut mat = SparseMatrix::zeros(self.size);
        for (i, row) in self.rows.iter().enumerate() {
            for e in row {
                mat.set(i, e.idx, e.value);
            }
        }
        mat
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_sparse().save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        DependencyMatrix::from_sparse(&SparseMatrix::load(path)?)
    }
}

/// Keeps off-diagonal PMI mass only between the `top_n` most frequent words
/// (ties broken toward the lower id), adds a unit diagonal to every row, and
/// row-normalizes unless `normalize` is false (ablation mode).
pub fn build_dependency_matrix(
    pmi_matrix: &SparseMatrix,
    top_n: usize,
    word_frequencies: &[u64],
    normalize: bool,
) -> Result<DependencyMatrix> {
    let w = pmi_matrix.size();
    if top_n == 0 {
        return Err(Error::argument("top_n must be >= 1"));
    }
    if top_n > w {
        return Err(Error::argument(format!(
            "top_n = {top_n} exceeds vocabulary size {w}"
        )));
    }
    if word_frequencies.len() != w {
        return Err(Error::shape(format!(
            "{} frequencies for a {w}-word matrix",
            word_frequencies.len()
        )));
    }

    let mut order: Vec<u32> = (0..w as u32).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(word_frequencies[i as usize]), i));
    let mut in_top = vec![false; w];
    for &i in &order[..top_n] {
        in_top[i as usize] = true;
    }

    let mut mat = SparseMatrix::zeros(w);
    for (i, row) in pmi_matrix.rows().iter().enumerate() {
        if in_top[i] {
            for &(j, v) in row {
                if j as usize != i && in_top[j as usize] && v > 0.0 {
                    mat.set(i, j, v);
                }
            }
        }
        mat.set(i, i as u32, 1.0);
        if normalize {
            let sum: f64 = mat.rows()[i].iter().map(|&(_, v)| v).sum();
            for e in &mut mat.rows[i] {
                e.1 /= sum;
            }
        }
    }
    DependencyMatrix::from_sparse(&mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn adjacent_pairs_counted_by_hand() {
        // Sequence (a, b, a) with radius 1: position pairs (0,1) and (1,2)
        // both relate words 0 and 1; positions 0 and 2 are too far apart.
        let counts =
            count_cooccurrences(&[vec![0, 1, 0]], 2, WindowSpec { radius: 1 }).unwrap();
        assert_eq!(counts.get(0, 1), 2);
        assert_eq!(counts.get(1, 0), 2);
        assert_eq!(counts.get(0, 0), 0);
        assert_eq!(counts.marginal(0), 2);
        assert_eq!(counts.marginal(1), 2);
        assert_eq!(counts.total(), 4);
    }

    #[test]
    fn single_token_yields_zero_counts() {
        let counts = count_cooccurrences(&[vec![3]], 5, WindowSpec { radius: 2 }).unwrap();
        assert_eq!(counts.total(), 0);
    }

    #[test]
    fn zero_radius_rejected() {
        assert!(count_cooccurrences(&[vec![0, 1]], 2, WindowSpec { radius: 0 }).is_err());
    }

    #[test]
    fn counts_symmetric_on_random_input() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let seqs: Vec<Vec<u32>> = (0..20)
            .map(|_| (0..50).map(|_| rng.random_range(0..8u32)).collect())
            .collect();
        let counts = count_cooccurrences(&seqs, 8, WindowSpec { radius: 3 }).unwrap();
        let mut grand = 0u64;
        for i in 0..8 {
            let mut row = 0u64;
            for j in 0..8 {
                assert_eq!(counts.get(i, j), counts.get(j, i));
                row += counts.get(i, j);
            }
            assert_eq!(row, counts.marginal(i));
            grand += row;
        }
        assert_eq!(grand, counts.total());
    }

    #[test]
    fn pmi_of_exclusive_pair_is_log_two() {
        // Four events, all between words 0 and 1: c = 4, marginals 4 and 4,
        // total 8, so PMI = ln(4 * 8 / 16) = ln 2.
        let mut counts = CooccurrenceCounts::new(2);
        for _ in 0..4 {
            counts.add_pair(0, 1);
        }
        let m = pmi(&counts).unwrap();
        assert_abs_diff_eq!(m.get(0, 1), std::f64::consts::LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(m.get(1, 0), std::f64::consts::LN_2, epsilon = 1e-12);
    }

    #[test]
    fn pmi_of_independent_pair_is_zero() {
        // Events (0,0), (0,1) x2, (1,1): every observed count equals its
        // expectation (c * total = m_i * m_j), so ln 1 = 0 and all entries
        // are dropped.
        let mut counts = CooccurrenceCounts::new(2);
        counts.add_pair(0, 0);
        counts.add_pair(0, 1);
        counts.add_pair(0, 1);
        counts.add_pair(1, 1);
        assert_eq!(counts.total(), 8);
        let m = pmi(&counts).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn pmi_clips_anticorrelated_pairs() {
        // c_01 = 1 against marginals 5 and 5 with total 10: ratio 0.4 < 1,
        // clipped; the over-represented diagonals stay.
        let mut counts = CooccurrenceCounts::new(2);
        counts.add_pair(0, 0);
        counts.add_pair(0, 0);
        counts.add_pair(1, 1);
        counts.add_pair(1, 1);
        counts.add_pair(0, 1);
        let m = pmi(&counts).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.nnz(), 2);
        assert!(m.get(0, 0) > 0.0 && m.get(1, 1) > 0.0);
    }

    #[test]
    fn pmi_needs_nonzero_total() {
        let counts = CooccurrenceCounts::new(3);
        assert!(pmi(&counts).is_err());
    }

    #[test]
    fn shuffled_independent_tokens_give_near_zero_pmi() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let seq: Vec<u32> = (0..20_000).map(|_| rng.random_range(0..5u32)).collect();
        let counts = count_cooccurrences(&[seq], 5, WindowSpec { radius: 1 }).unwrap();
        let total = counts.total() as f64;
        for (i, j, c) in counts.entries() {
            let raw = ((c as f64) * total
                / (counts.marginal(i) as f64 * counts.marginal(j) as f64))
                .ln();
            let sigma = (1.0 / c as f64
                + 1.0 / counts.marginal(i) as f64
                + 1.0 / counts.marginal(j) as f64)
                .sqrt();
            assert!(
                raw.abs() <= 3.0 * sigma + 1e-3,
                "pair ({i},{j}) pmi {raw} beyond 3 sigma {sigma}"
            );
        }
    }

    #[test]
    fn zero_pmi_builds_identity_matrix() {
        let m = SparseMatrix::zeros(4);
        let c = build_dependency_matrix(&m, 4, &[5, 4, 3, 2], true).unwrap();
        for i in 0..4 {
            assert_eq!(c.row(i).len(), 1);
            assert_abs_diff_eq!(c.get(i, i as u32), 1.0, epsilon = 0.0);
        }
    }

    #[test]
    fn single_edge_splits_row_mass_evenly() {
        // One PMI edge of weight 1 between words 0 and 1 out of 3 words:
        // row 0 becomes diagonal 0.5, neighbor 0.5.
        let mut m = SparseMatrix::zeros(3);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        let c = build_dependency_matrix(&m, 3, &[3, 2, 1], true).unwrap();
        assert_abs_diff_eq!(c.get(0, 0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c.get(0, 1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c.get(2, 2), 1.0, epsilon = 0.0);
        assert!(c.is_row_stochastic(1e-12));
    }

    #[test]
    fn rows_always_sum_to_one() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let w = 12;
        let mut m = SparseMatrix::zeros(w);
        for _ in 0..40 {
            let i = rng.random_range(0..w);
            let j = rng.random_range(0..w as u32);
            if j as usize != i {
                m.set(i, j, rng.random_range(0.1..2.0));
            }
        }
        let freqs: Vec<u64> = (0..w as u64).rev().collect();
        let c = build_dependency_matrix(&m, w, &freqs, true).unwrap();
        for i in 0..w {
            assert_abs_diff_eq!(c.row_sum(i), 1.0, epsilon = 1e-12);
            assert!(c.get(i, i as u32) > 0.0);
        }
    }

    #[test]
    fn top_n_cut_respects_frequency_and_ties() {
        // Words 0..3, PMI edges everywhere; only the top 2 by frequency keep
        // off-diagonal mass. Frequencies tie between 1 and 2: lower id wins.
        let mut m = SparseMatrix::zeros(4);
        for i in 0..4usize {
            for j in 0..4u32 {
                if i != j as usize {
                    m.set(i, j, 1.0);
                }
            }
        }
        let c = build_dependency_matrix(&m, 2, &[10, 7, 7, 1], true).unwrap();
        // Top set = {0, 1}.
        assert!(c.get(0, 1) > 0.0);
        assert!(c.get(1, 0) > 0.0);
        assert_eq!(c.get(0, 2), 0.0);
        assert_eq!(c.get(2, 0), 0.0);
        assert_abs_diff_eq!(c.get(2, 2), 1.0, epsilon = 0.0);

        assert!(build_dependency_matrix(&m, 0, &[1, 1, 1, 1], true).is_err());
        assert!(build_dependency_matrix(&m, 5, &[1, 1, 1, 1], true).is_err());
    }

    #[test]
    fn dependency_matrix_validation() {
        let mut m = SparseMatrix::zeros(2);
        m.set(0, 0, 1.0);
        // Missing diagonal in row 1.
        m.set(1, 0, 1.0);
        assert!(DependencyMatrix::from_sparse(&m).is_err());
        m.set(1, 1, -0.5);
        assert!(DependencyMatrix::from_sparse(&m).is_err());
        m.set(1, 1, 0.5);
        assert!(DependencyMatrix::from_sparse(&m).is_ok());
    }

    #[test]
    fn sparse_matrix_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        let mut m = SparseMatrix::zeros(3);
        m.set(0, 0, 0.25);
        m.set(0, 2, 0.75);
        m.set(2, 1, 1.5e-9);
        m.save(&path).unwrap();
        let loaded = SparseMatrix::load(&path).unwrap();
        assert_eq!(m, loaded);
    }

    #[test]
    fn cooccurrence_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cooc.txt");
        let counts =
            count_cooccurrences(&[vec![0, 1, 0, 2, 2]], 3, WindowSpec { radius: 2 }).unwrap();
        counts.save(&path).unwrap();
        let loaded = CooccurrenceCounts::load(&path).unwrap();
        assert_eq!(loaded.total(), counts.total());
        for i in 0..3 {
            assert_eq!(loaded.marginal(i), counts.marginal(i));
            for j in 0..3 {
                assert_eq!(loaded.get(i, j), counts.get(i, j));
            }
        }
    }
}
