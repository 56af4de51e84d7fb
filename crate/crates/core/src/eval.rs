//! Quantitative evaluation: coherence against a background topic, topic
//! change (GRT) between updates, Dirichlet concentration estimation per
//! group of documents, paired ratio tests, and topic alignment for
//! synthetic-recovery checks.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::math;

const PROB_FLOOR: f64 = 1e-12;

/// Mean per-topic KL distance from the uniform "background" distribution
/// over documents.
///
/// Each document's gamma row is normalized over topics, floored, then each
/// topic's column is normalized over documents; Ms is the mean over topics
/// of KL(theta_k || uniform).
pub fn background_distance(gammas: &Array2<f64>) -> Result<f64> {
    let (d, k) = gammas.dim();
    if d == 0 || k == 0 {
        return Err(Error::argument("gamma matrix must be non-empty"));
    }
    for &g in gammas.iter() {
        if !g.is_finite() || g <= 0.0 {
            return Err(Error::argument(format!(
                "gamma entries must be positive and finite, got {g}"
            )));
        }
    }
    let mut theta = gammas.clone();
    for mut row in theta.outer_iter_mut() {
        let sum = row.sum();
        row.mapv_inplace(|v| (v / sum).max(PROB_FLOOR));
    }
    let ln_d = (d as f64).ln();
    let mut total = 0.0;
    for t in 0..k {
        let col_sum: f64 = theta.column(t).sum();
        let mut kl = 0.0;
        for &v in theta.column(t) {
            let p = v / col_sum;
            kl += p * (p.ln() + ln_d);
        }
        total += kl;
    }
    Ok(total / k as f64)
}

/// Total L1 change between two topic-word matrices of the same shape.
pub fn grt(beta_t: &Array2<f64>, beta_prev: &Array2<f64>) -> Result<f64> {
    if beta_t.dim() != beta_prev.dim() {
        return Err(Error::shape(format!(
            "beta shapes {:?} and {:?} differ",
            beta_t.dim(),
            beta_prev.dim()
        )));
    }
    Ok(beta_t
        .iter()
        .zip(beta_prev.iter())
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// Maximum-likelihood Dirichlet concentration fitted to probability rows.
#[derive(Debug, Clone)]
pub struct DirichletEstimate {
    pub concentration: Vec<f64>,
    /// alpha_k / sum(alpha): the expected probability of each component.
    pub expected_probabilities: Vec<f64>,
    pub iterations: usize,
}

fn inverse_digamma(y: f64) -> f64 {
    // Minka's initialization followed by Newton steps.
    let mut x = if y >= -2.22 {
        y.exp() + 0.5
    } else {
        -1.0 / (y + math::EULER_GAMMA)
    };
    for _ in 0..8 {
        let f = math::digamma(x).expect("positive iterate") - y;
        let fp = math::trigamma(x).expect("positive iterate");
        let next = x - f / fp;
        x = if next > 0.0 { next } else { x / 2.0 };
    }
    x
}

/// Minka's fixed-point estimator on the digamma equation, iterated until the
/// largest parameter change is below 1e-8 (cap 1000 iterations).
pub fn dirichlet_mle(samples: &Array2<f64>) -> Result<DirichletEstimate> {
    let (n, k) = samples.dim();
    if n < 2 {
        return Err(Error::argument(format!(
            "need at least 2 probability rows, got {n}"
        )));
    }
    if k == 0 {
        return Err(Error::argument("zero components"));
    }

    // Sufficient statistics: mean log p with the documented floor.
    let mut mean_log = vec![0.0; k];
    let mut mean = vec![0.0; k];
    let mut mean_sq_first = 0.0;
    for row in samples.outer_iter() {
        for (t, &p) in row.iter().enumerate() {
            let p = p.max(PROB_FLOOR);
            mean_log[t] += p.ln();
            mean[t] += p;
        }
        mean_sq_first += row[0].max(PROB_FLOOR).powi(2);
    }
    for v in mean_log.iter_mut() {
        *v /= n as f64;
    }
    for v in mean.iter_mut() {
        *v /= n as f64;
    }
    mean_sq_first /= n as f64;

    // Moment-matched starting point; fall back to K when degenerate.
    let m0 = mean[0];
    let denom = mean_sq_first - m0 * m0;
    let s0 = if denom > 1e-12 {
        ((m0 - mean_sq_first) / denom).max(1e-3)
    } else {
        k as f64
    };
    let mut alpha: Vec<f64> = mean.iter().map(|&m| (s0 * m).max(1e-6)).collect();

    let mut iterations = 0;
    for iter in 0..1000 {
        iterations = iter + 1;
        let alpha_sum: f64 = alpha.iter().sum();
        let psi_sum = math::digamma(alpha_sum)?;
        let mut max_change = 0.0f64;
        for t in 0..k {
            let next = inverse_digamma(psi_sum + mean_log[t]);
            max_change = max_change.max((next - alpha[t]).abs());
            alpha[t] = next;
        }
        if max_change < 1e-8 {
            break;
        }
    }
    let alpha_sum: f64 = alpha.iter().sum();
    let expected = alpha.iter().map(|&a| a / alpha_sum).collect();
    Ok(DirichletEstimate {
        concentration: alpha,
        expected_probabilities: expected,
        iterations,
    })
}

/// Outcome of the paired ratio test between two groups of per-image topic
/// probabilities.
#[derive(Debug, Clone)]
pub struct TopicRatioTest {
    pub ratios_a: Vec<f64>,
    pub ratios_b: Vec<f64>,
    pub t_statistic: f64,
    pub p_value: f64,
    /// Pairs dropped because a denominator probability was zero.
    pub excluded: usize,
}

/// Per image: ratio of the probabilities of `topic_num` and `topic_den`;
/// then a paired two-sided t test on the A - B ratio differences.
pub fn topic_ratio_test(
    group_a: &[Vec<f64>],
    group_b: &[Vec<f64>],
    topic_num: usize,
    topic_den: usize,
) -> Result<TopicRatioTest> {
    if group_a.len() != group_b.len() {
        return Err(Error::argument(format!(
            "groups must pair up: {} vs {} images",
            group_a.len(),
            group_b.len()
        )));
    }
    let mut ratios_a = Vec::new();
    let mut ratios_b = Vec::new();
    let mut excluded = 0usize;
    for (a, b) in group_a.iter().zip(group_b) {
        let need = topic_num.max(topic_den);
        if a.len() <= need || b.len() <= need {
            return Err(Error::argument(format!(
                "topic index {need} out of range for probability vectors"
            )));
        }
        if a[topic_den] <= 0.0 || b[topic_den] <= 0.0 {
            excluded += 1;
            continue;
        }
        ratios_a.push(a[topic_num] / a[topic_den]);
        ratios_b.push(b[topic_num] / b[topic_den]);
    }
    let n = ratios_a.len();
    if n < 2 {
        return Err(Error::argument(format!(
            "need at least 2 usable pairs, have {n} ({excluded} excluded)"
        )));
    }
    let diffs: Vec<f64> = ratios_a.iter().zip(&ratios_b).map(|(a, b)| a - b).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();

    let (t_statistic, p_value) = if sd == 0.0 {
        if mean == 0.0 {
            (0.0, 1.0)
        } else {
            // Degenerate zero-variance shift: p below machine resolution.
            (f64::INFINITY * mean.signum(), 0.0)
        }
    } else {
        let t = mean / (sd / (n as f64).sqrt());
        (t, student_t_two_sided_p(t, (n - 1) as f64))
    };
    Ok(TopicRatioTest {
        ratios_a,
        ratios_b,
        t_statistic,
        p_value,
        excluded,
    })
}

/// Two-sided p-value of the Student t distribution via the regularized
/// incomplete beta function.
pub fn student_t_two_sided_p(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if !t.is_finite() {
        return 0.0;
    }
    incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
}

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
fn incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = math::ln_gamma(a + b).unwrap()
        - math::ln_gamma(a).unwrap()
        - math::ln_gamma(b).unwrap()
        + a * x.ln()
        + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    const EPS: f64 = 3e-15;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Result of matching estimated topics to reference topics.
#[derive(Debug, Clone)]
pub struct TopicAlignment {
    /// permutation[i] is the reference row matched to estimated row i.
    pub permutation: Vec<usize>,
    pub mean_similarity: f64,
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Matches estimated to reference topics maximizing total row cosine
/// similarity: optimal assignment up to K = 64, greedy beyond.
pub fn align_topics(beta_est: &Array2<f64>, beta_true: &Array2<f64>) -> Result<TopicAlignment> {
    if beta_est.dim() != beta_true.dim() {
        return Err(Error::shape(format!(
            "topic matrices {:?} and {:?} differ",
            beta_est.dim(),
            beta_true.dim()
        )));
    }
    let k = beta_est.nrows();
    if k == 0 {
        return Err(Error::argument("no topics to align"));
    }
    let mut sim = Array2::zeros((k, k));
    for i in 0..k {
        for j in 0..k {
            sim[[i, j]] = cosine(
                beta_est.row(i).to_slice().expect("standard layout"),
                beta_true.row(j).to_slice().expect("standard layout"),
            );
        }
    }
    let permutation = if k <= 64 {
        // Minimize negated similarity.
        let cost = sim.mapv(|v| -v);
        hungarian_min(&cost)
    } else {
        greedy_assignment(&sim)
    };
    let mean_similarity = permutation
        .iter()
        .enumerate()
        .map(|(i, &j)| sim[[i, j]])
        .sum::<f64>()
        / k as f64;
    Ok(TopicAlignment {
        permutation,
        mean_similarity,
    })
}

/// Exact minimum-cost assignment on a square matrix (shortest augmenting
/// path with potentials); returns the column picked for each row.
fn hungarian_min(cost: &Array2<f64>) -> Vec<usize> {
    let n = cost.nrows();
    // 1-based potentials and matching arrays.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1]; // row matched to each column
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[[i0 - 1, j - 1]] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            assignment[matched_row[j] - 1] = j - 1;
        }
    }
    assignment
}

fn greedy_assignment(sim: &Array2<f64>) -> Vec<usize> {
    let k = sim.nrows();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            pairs.push((sim[[i, j]], i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut row_done = vec![false; k];
    let mut col_done = vec![false; k];
    let mut out = vec![0usize; k];
    for (_, i, j) in pairs {
        if !row_done[i] && !col_done[j] {
            row_done[i] = true;
            col_done[j] = true;
            out[i] = j;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{rng_for, sample_dirichlet};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use ndarray::arr2;
    use rand::Rng;

    #[test]
    fn identical_documents_have_zero_background_distance() {
        let gammas = Array2::from_elem((6, 3), 2.5);
        let ms = background_distance(&gammas).unwrap();
        assert_abs_diff_eq!(ms, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn one_sided_topic_approaches_log_two() {
        // Two documents, two topics, each topic owned by one document:
        // columns are (almost) indicator vectors, KL to uniform ~ ln 2.
        let gammas = arr2(&[[1e9, 1e-3], [1e-3, 1e9]]);
        let ms = background_distance(&gammas).unwrap();
        assert_abs_diff_eq!(ms, std::f64::consts::LN_2, epsilon = 1e-6);
    }

    #[test]
    fn background_distance_nonnegative_and_invariant() {
        let mut rng = rng_for(1, 90);
        let gammas = Array2::from_shape_fn((12, 4), |_| rng.random_range(0.01..5.0f64));
        let ms = background_distance(&gammas).unwrap();
        assert!(ms >= 0.0);

        // Permute documents and topics: Ms unchanged.
        let mut doc_perm: Vec<usize> = (0..12).collect();
        doc_perm.reverse();
        let by_docs = Array2::from_shape_fn((12, 4), |(i, j)| gammas[[doc_perm[i], j]]);
        assert_relative_eq!(
            background_distance(&by_docs).unwrap(),
            ms,
            max_relative = 1e-12
        );
        let topic_perm = [2usize, 0, 3, 1];
        let by_topics = Array2::from_shape_fn((12, 4), |(i, j)| gammas[[i, topic_perm[j]]]);
        assert_relative_eq!(
            background_distance(&by_topics).unwrap(),
            ms,
            max_relative = 1e-12
        );
    }

    #[test]
    fn grt_basics() {
        let a = arr2(&[[0.6, 0.4]]);
        let b = arr2(&[[0.5, 0.5]]);
        assert_abs_diff_eq!(grt(&a, &a).unwrap(), 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(grt(&a, &b).unwrap(), 0.2, epsilon = 1e-15);
        // Triangle inequality and symmetry on random stochastic rows.
        let mut rng = rng_for(2, 91);
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut m = Array2::from_shape_fn((3, 5), |_| rng.random_range(0.0..1.0f64));
            for mut row in m.outer_iter_mut() {
                let s = row.sum();
                row.mapv_inplace(|v| v / s);
            }
            m
        };
        for _ in 0..50 {
            let (x, y, z) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            assert_relative_eq!(
                grt(&x, &y).unwrap(),
                grt(&y, &x).unwrap(),
                max_relative = 1e-12
            );
            assert!(grt(&x, &z).unwrap() <= grt(&x, &y).unwrap() + grt(&y, &z).unwrap() + 1e-12);
            // Rows are distributions, so the L1 distance is at most 2K.
            assert!(grt(&x, &y).unwrap() <= 2.0 * 3.0 + 1e-12);
        }
        assert!(grt(&a, &arr2(&[[1.0, 0.0, 0.0]])).is_err());
    }

    #[test]
    fn dirichlet_mle_recovers_concentration() {
        let alpha_true = [2.0, 5.0, 3.0];
        let mut rng = rng_for(3, 92);
        let n = 10_000;
        let mut samples = Array2::zeros((n, 3));
        for mut row in samples.outer_iter_mut() {
            let s = sample_dirichlet(&alpha_true, &mut rng).unwrap();
            for (r, v) in row.iter_mut().zip(s) {
                *r = v;
            }
        }
        let est = dirichlet_mle(&samples).unwrap();
        for (got, want) in est.concentration.iter().zip(alpha_true) {
            assert!(
                (got - want).abs() / want < 0.1,
                "estimated {got} for true {want}"
            );
        }
        let sum: f64 = est.expected_probabilities.iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        // The expected probabilities track the empirical mean.
        let mean = samples.mean_axis(ndarray::Axis(0)).unwrap();
        for (p, m) in est.expected_probabilities.iter().zip(mean.iter()) {
            assert_abs_diff_eq!(p, m, epsilon = 0.01);
        }
    }

    #[test]
    fn dirichlet_mle_near_uniform_samples() {
        let mut rng = rng_for(4, 93);
        let n = 500;
        let k = 4;
        let jitter = 1e-3;
        let mut samples = Array2::zeros((n, k));
        for mut row in samples.outer_iter_mut() {
            let mut vals: Vec<f64> = (0..k)
                .map(|_| 1.0 / k as f64 + rng.random_range(-jitter..jitter))
                .collect();
            let s: f64 = vals.iter().sum();
            for v in vals.iter_mut() {
                *v /= s;
            }
            for (r, v) in row.iter_mut().zip(vals) {
                *r = v;
            }
        }
        let est = dirichlet_mle(&samples).unwrap();
        for &p in &est.expected_probabilities {
            assert!((p - 0.25).abs() < jitter, "expected probability {p}");
        }
        assert!(dirichlet_mle(&samples.slice(ndarray::s![0..1, ..]).to_owned()).is_err());
    }

    #[test]
    fn ratio_test_matches_frozen_reference() {
        // Five paired images; t and p frozen from an independent
        // statistics-package evaluation of the same ratios.
        let a = vec![
            vec![0.6, 0.3, 0.1],
            vec![0.5, 0.4, 0.1],
            vec![0.7, 0.2, 0.1],
            vec![0.55, 0.35, 0.10],
            vec![0.65, 0.25, 0.10],
        ];
        let b = vec![
            vec![0.3, 0.5, 0.2],
            vec![0.35, 0.45, 0.2],
            vec![0.4, 0.5, 0.1],
            vec![0.30, 0.60, 0.10],
            vec![0.25, 0.55, 0.20],
        ];
        let out = topic_ratio_test(&a, &b, 0, 1).unwrap();
        assert_abs_diff_eq!(out.ratios_a[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.t_statistic, 3.963333811154052, epsilon = 1e-9);
        assert_abs_diff_eq!(out.p_value, 0.0166311652767715, epsilon = 1e-9);
        assert_eq!(out.excluded, 0);
    }

    #[test]
    fn ratio_test_degenerate_cases() {
        let a = vec![vec![0.5, 0.5], vec![0.4, 0.6], vec![0.3, 0.7]];
        let out = topic_ratio_test(&a, &a, 0, 1).unwrap();
        assert_eq!(out.t_statistic, 0.0);
        assert_eq!(out.p_value, 1.0);

        // Constant shift with exactly zero variance in the differences
        // (integer ratios keep the arithmetic exact).
        let g1 = vec![vec![3.0, 1.0], vec![4.0, 1.0], vec![6.0, 1.0]];
        let g2 = vec![vec![2.0, 1.0], vec![3.0, 1.0], vec![5.0, 1.0]];
        let out = topic_ratio_test(&g1, &g2, 0, 1).unwrap();
        assert!(out.t_statistic.is_infinite());
        assert_eq!(out.p_value, 0.0);

        // Zero denominators flag exclusions.
        let mut c = a.clone();
        c[0][1] = 0.0;
        let out = topic_ratio_test(&c, &a, 0, 1).unwrap();
        assert_eq!(out.excluded, 1);
        assert_eq!(out.ratios_a.len(), 2);
    }

    #[test]
    fn student_t_matches_frozen_reference() {
        // Frozen from an independent statistics package.
        assert_abs_diff_eq!(
            student_t_two_sided_p(1.0, 4.0),
            0.373900966300059,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            student_t_two_sided_p(2.5, 9.0),
            0.03386182768298571,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            student_t_two_sided_p(-1.3, 7.0),
            0.23476783539237717,
            epsilon = 1e-12
        );
        assert_eq!(student_t_two_sided_p(0.0, 5.0), 1.0);
        assert_abs_diff_eq!(
            student_t_two_sided_p(12.0, 2.0),
            0.00687293367715846,
            epsilon = 1e-12
        );
    }

    #[test]
    fn incomplete_beta_matches_frozen_reference() {
        assert_abs_diff_eq!(
            incomplete_beta(0.5, 0.5, 0.3),
            0.36901011956554536,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            incomplete_beta(2.0, 3.0, 0.4),
            0.5247999999999999,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            incomplete_beta(5.0, 1.5, 0.9),
            0.7761721343162159,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            incomplete_beta(4.5, 0.5, 0.99),
            0.7698749998921366,
            epsilon = 1e-12
        );
    }

    #[test]
    fn alignment_recovers_permutations() {
        let beta_true = arr2(&[
            [0.7, 0.1, 0.1, 0.1],
            [0.1, 0.7, 0.1, 0.1],
            [0.1, 0.1, 0.7, 0.1],
        ]);
        let perm = [2usize, 0, 1];
        let beta_est = Array2::from_shape_fn((3, 4), |(i, j)| beta_true[[perm[i], j]]);
        let out = align_topics(&beta_est, &beta_true).unwrap();
        assert_eq!(out.permutation, perm.to_vec());
        assert_abs_diff_eq!(out.mean_similarity, 1.0, epsilon = 1e-12);

        let self_align = align_topics(&beta_true, &beta_true).unwrap();
        assert_eq!(self_align.permutation, vec![0, 1, 2]);
    }

    #[test]
    fn alignment_of_indicators_against_uniform() {
        // Orthogonal indicator topics vs uniform rows: every cosine is
        // 1/sqrt(W).
        let w = 9;
        let mut est = Array2::zeros((3, w));
        for i in 0..3 {
            est[[i, i]] = 1.0;
        }
        let uniform = Array2::from_elem((3, w), 1.0 / w as f64);
        let out = align_topics(&est, &uniform).unwrap();
        assert_abs_diff_eq!(
            out.mean_similarity,
            1.0 / (w as f64).sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn hungarian_agrees_with_brute_force() {
        let mut rng = rng_for(5, 94);
        for n in 2..=6usize {
            for _ in 0..20 {
                let cost = Array2::from_shape_fn((n, n), |_| rng.random_range(-1.0..1.0f64));
                let got = hungarian_min(&cost);
                let got_cost: f64 = got.iter().enumerate().map(|(i, &j)| cost[[i, j]]).sum();

                // Exhaustive minimum over all permutations.
                let mut best = f64::INFINITY;
                let mut perm: Vec<usize> = (0..n).collect();
                permute(&mut perm, 0, &mut |p| {
                    let c: f64 = p.iter().enumerate().map(|(i, &j)| cost[[i, j]]).sum();
                    if c < best {
                        best = c;
                    }
                });
                assert_abs_diff_eq!(got_cost, best, epsilon = 1e-9);
            }
        }
    }

    fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            visit(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, visit);
            items.swap(k, i);
        }
    }
}
