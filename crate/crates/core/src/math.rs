//! Special functions and Dirichlet-expectation primitives shared by every
//! inference routine.
//!
//! Digamma, trigamma and log-gamma are computed by shifting the argument up
//! with the recurrence until it reaches the asymptotic region (x >= 6) and
//! then evaluating the Stirling-type series. Enough series terms are kept to
//! hold the documented tolerances at the shift threshold itself.

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const ASYMPTOTIC_THRESHOLD: f64 = 6.0;

fn check_positive(x: f64, name: &str) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!(
            "{name} requires a positive finite argument, got {x}"
        )));
    }
    Ok(())
}

/// Digamma function, the derivative of ln Gamma.
///
/// Absolute error <= 1e-12 for x >= 1e-3.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    // Series coefficients: -B_{2n}/(2n), n = 1..7.
    const C2: f64 = -1.0 / 12.0;
    const C4: f64 = 1.0 / 120.0;
    const C6: f64 = -1.0 / 252.0;
    const C8: f64 = 1.0 / 240.0;
    const C10: f64 = -1.0 / 132.0;
    const C12: f64 = 691.0 / 32760.0;
    const C14: f64 = -1.0 / 12.0;

    let mut result = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_THRESHOLD {
        result -= 1.0 / z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv2
        * (C2 + inv2 * (C4 + inv2 * (C6 + inv2 * (C8 + inv2 * (C10 + inv2 * (C12 + inv2 * C14))))));
    Ok(result + z.ln() - 0.5 * inv + series)
}

/// Trigamma function, the second derivative of ln Gamma.
///
/// Relative error <= 1e-10 for x >= 1e-3.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive(x, "trigamma")?;
    // Series coefficients: B_{2n}, n = 1..7.
    const B2: f64 = 1.0 / 6.0;
    const B4: f64 = -1.0 / 30.0;
    const B6: f64 = 1.0 / 42.0;
    const B8: f64 = -1.0 / 30.0;
    const B10: f64 = 5.0 / 66.0;
    const B12: f64 = -691.0 / 2730.0;
    const B14: f64 = 7.0 / 6.0;

    let mut result = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_THRESHOLD {
        result += 1.0 / (z * z);
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv2
        * inv
        * (B2 + inv2 * (B4 + inv2 * (B6 + inv2 * (B8 + inv2 * (B10 + inv2 * (B12 + inv2 * B14))))));
    Ok(result + inv + 0.5 * inv2 + series)
}

/// Natural log of the Gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive(x, "ln_gamma")?;
    const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;
    // Stirling coefficients B_{2n}/(2n(2n-1)), n = 1..5; shifting to
    // z >= 10 puts the truncation below 1e-13 relative.
    const STIRLING_THRESHOLD: f64 = 10.0;
    const S2: f64 = 1.0 / 12.0;
    const S4: f64 = -1.0 / 360.0;
    const S6: f64 = 1.0 / 1260.0;
    const S8: f64 = -1.0 / 1680.0;
    const S10: f64 = 1.0 / 1188.0;

    let mut shift = 0.0;
    let mut z = x;
    while z < STIRLING_THRESHOLD {
        shift -= z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv * (S2 + inv2 * (S4 + inv2 * (S6 + inv2 * (S8 + inv2 * S10))));
    Ok(shift + (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + series)
}

/// Componentwise Psi(v_i) - Psi(sum v) for a positive vector: the expectation
/// of log coordinates under a Dirichlet with parameters `v`.
pub fn dirichlet_log_expectation(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::domain("dirichlet_log_expectation of empty vector"));
    }
    let mut sum = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::domain(format!(
                "dirichlet_log_expectation component {i} must be positive, got {x}"
            )));
        }
        sum += x;
    }
    let psi_sum = digamma(sum)?;
    v.iter().map(|&x| Ok(digamma(x)? - psi_sum)).collect()
}

/// In-place variant used by the inner loops: writes Psi(v_i) - Psi(sum v)
/// into `out`. Inputs are trusted positive (model parameters stay > 0 by
/// construction).
pub(crate) fn dirichlet_log_expectation_into(v: &[f64], out: &mut [f64]) {
    debug_assert_eq!(v.len(), out.len());
    let sum: f64 = v.iter().sum();
    let psi_sum = digamma(sum).expect("positive parameter sum");
    for (o, &x) in out.iter_mut().zip(v) {
        *o = digamma(x).expect("positive parameter") - psi_sum;
    }
}

/// log(sum exp(v_i)), max-shifted so no intermediate overflows for |v_i| <= 700.
///
/// Entries of -inf are tolerated (they contribute zero mass); an all -inf
/// input yields -inf.
pub fn log_sum_exp(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::domain("log_sum_exp of empty vector"));
    }
    Ok(log_sum_exp_unchecked(v))
}

pub(crate) fn log_sum_exp_unchecked(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = v.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};

    // Oracle values computed once with mpmath at 50-digit precision and frozen.
    const DIGAMMA_ORACLE: &[(f64, f64)] = &[
        (0.001, -1000.5755719318103),
        (0.01, -100.56088545786867),
        (0.1, -10.423754940411077),
        (0.5, -1.9635100260214235),
        (1.0, -0.5772156649015329),
        (1.5, 0.036_489_973_978_576_52),
        (2.0, 0.42278433509846714),
        (3.75, 1.1825373886117962),
        (6.0, 1.7061176684318005),
        (10.5, 2.3030010342976864),
        (100.0, 4.600_161_852_738_087),
        (1.0e4, 9.210_290_371_142_849),
        (1.0e7, 16.118_095_600_958_32),
    ];

    const TRIGAMMA_ORACLE: &[(f64, f64)] = &[
        (0.001, 1000001.6425331959),
        (0.01, 10001.621213528313),
        (0.1, 101.43329915079276),
        (0.5, 4.934_802_200_544_679),
        (1.0, 1.6449340668482264),
        (1.5, 0.934_802_200_544_679_3),
        (2.0, 0.644_934_066_848_226_4),
        (3.75, 0.305_339_852_690_253_1),
        (6.0, 0.18132295573711533),
        (10.5, 0.099_916_956_059_126_73),
        (100.0, 0.010050166663333571),
        (1.0e4, 1.0000500016666667e-4),
        (1.0e7, 1.0000000500000017e-7),
    ];

    const LN_GAMMA_ORACLE: &[(f64, f64)] = &[
        (0.001, 6.907_178_885_383_853),
        (0.1, 2.252_712_651_734_206),
        (0.5, 0.572_364_942_924_700_1),
        (1.5, -0.12078223763524522),
        (2.5, 0.284_682_870_472_919_2),
        (6.0, 4.787_491_742_782_046),
        (10.5, 13.940625219403764),
        (100.0, 359.134_205_369_575_4),
        (12345.678, 103959.91990554606),
    ];

    #[test]
    fn digamma_matches_high_precision_oracle() {
        for &(x, want) in DIGAMMA_ORACLE {
            let got = digamma(x).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn digamma_at_one_and_two() {
        // psi(1) = -gamma, psi(2) = psi(1) + 1 by the recurrence; the
        // documented contract is 1e-12 absolute.
        assert_abs_diff_eq!(digamma(1.0).unwrap(), -EULER_GAMMA, epsilon = 1e-12);
        assert_abs_diff_eq!(
            digamma(2.0).unwrap(),
            -EULER_GAMMA + 1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn trigamma_matches_high_precision_oracle() {
        for &(x, want) in TRIGAMMA_ORACLE {
            let got = trigamma(x).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-10);
        }
    }

    #[test]
    fn trigamma_analytic_points() {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert_relative_eq!(trigamma(1.0).unwrap(), pi2 / 6.0, max_relative = 1e-12);
        assert_relative_eq!(trigamma(0.5).unwrap(), pi2 / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn ln_gamma_matches_high_precision_oracle() {
        for &(x, want) in LN_GAMMA_ORACLE {
            let got = ln_gamma(x).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn recurrence_identities_hold_over_random_arguments() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let x: f64 = rng.random_range(1e-3..100.0);
            let d = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert_relative_eq!(d, 1.0 / x, max_relative = 1e-10);
            let t = trigamma(x).unwrap() - trigamma(x + 1.0).unwrap();
            assert_relative_eq!(t, 1.0 / (x * x), max_relative = 1e-10);
        }
    }

    #[test]
    fn domain_errors_on_bad_arguments() {
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.0).is_err());
        assert!(digamma(f64::NAN).is_err());
        assert!(trigamma(0.0).is_err());
        assert!(trigamma(f64::INFINITY).is_err());
        assert!(ln_gamma(-3.0).is_err());
        assert!(dirichlet_log_expectation(&[1.0, 0.0]).is_err());
        assert!(log_sum_exp(&[]).is_err());
    }

    #[test]
    fn dirichlet_log_expectation_small_cases() {
        // (1, 1): psi(1) - psi(2) = -1 by the recurrence.
        let e = dirichlet_log_expectation(&[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(e[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], -1.0, epsilon = 1e-12);

        // (2, 1): exact recurrence chain gives (-1/2, -3/2).
        let e = dirichlet_log_expectation(&[2.0, 1.0]).unwrap();
        assert_abs_diff_eq!(e[0], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], -1.5, epsilon = 1e-12);

        // Symmetric input: all components equal.
        let e = dirichlet_log_expectation(&[0.3, 0.3, 0.3, 0.3]).unwrap();
        for &x in &e[1..] {
            assert_abs_diff_eq!(x, e[0], epsilon = 0.0);
        }
    }

    #[test]
    fn dirichlet_log_expectation_negative_components() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(2..8usize);
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..50.0f64)).collect();
            for x in dirichlet_log_expectation(&v).unwrap() {
                assert!(x < 0.0, "each v_i < sum v forces a negative expectation");
            }
        }
    }

    #[test]
    fn log_sum_exp_basics() {
        assert_abs_diff_eq!(log_sum_exp(&[0.0]).unwrap(), 0.0, epsilon = 0.0);
        let c = -3.7;
        assert_abs_diff_eq!(
            log_sum_exp(&[c, c]).unwrap(),
            c + std::f64::consts::LN_2,
            epsilon = 1e-14
        );
        // No overflow with large entries.
        assert_abs_diff_eq!(
            log_sum_exp(&[1000.0, 1000.0]).unwrap(),
            1000.0 + std::f64::consts::LN_2,
            epsilon = 1e-12
        );
        // -inf entries carry no mass.
        assert_abs_diff_eq!(
            log_sum_exp(&[f64::NEG_INFINITY, 2.0]).unwrap(),
            2.0,
            epsilon = 0.0
        );
        assert_eq!(
            log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn log_sum_exp_shift_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.random_range(1..12usize);
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0f64)).collect();
            let c: f64 = rng.random_range(-300.0..300.0);
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            assert_abs_diff_eq!(
                log_sum_exp(&shifted).unwrap(),
                log_sum_exp(&v).unwrap() + c,
                epsilon = 1e-12 * (1.0 + c.abs())
            );
        }
    }
}
