//! Discrete power-law fitting by maximum likelihood.
//!
//! For `P(x) = x^-β / ζ(β, x_min)` on `x >= x_min` the log-likelihood is
//! `-n ln ζ(β, x_min) - β Σ ln x_i`, which is strictly concave in β. Without a
//! fixed `x_min` the cutoff minimizing the Kolmogorov-Smirnov distance between
//! the tail and its fitted model is chosen.

use serde::Serialize;

use super::NetStatsError;

/// Smallest tail the estimator accepts.
pub const MIN_TAIL: usize = 10;
/// Upper end of the exponent search interval `(1, MAX_EXPONENT]`.
pub const MAX_EXPONENT: f64 = 6.0;
const MIN_EXPONENT: f64 = 1.0 + 1e-6;
const GRID_STEP: f64 = 1e-2;
const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub x_min: u64,
    pub n_tail: usize,
    pub ks_statistic: f64,
    pub log_likelihood: f64,
}

/// Terms summed explicitly before switching to the Euler-Maclaurin tail.
const ZETA_DIRECT_TERMS: usize = 16;

/// `B_2k / (2k)!` for k = 1..=7.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
];

/// Hurwitz zeta `ζ(s, q) = Σ_{k>=0} (q + k)^-s` for `s > 1`, `q > 0`.
///
/// The first terms are summed directly; the remainder uses the
/// Euler-Maclaurin expansion, accurate to roughly machine precision.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(s > 1.0 && q > 0.0);
    let mut sum = 0.0;
    for k in 0..ZETA_DIRECT_TERMS {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + ZETA_DIRECT_TERMS as f64;
    let a_pow = a.powf(-s);
    let mut tail = a * a_pow / (s - 1.0) + 0.5 * a_pow;
    // rising factorial s (s+1) ... (s+2k-2), times a^(-s-2k+1)
    let mut rising = s;
    let mut power = a_pow / a;
    let inv_a2 = 1.0 / (a * a);
    for (k, coeff) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if k > 0 {
            let m = 2.0 * k as f64;
            rising *= (s + m - 1.0) * (s + m);
            power *= inv_a2;
        }
        tail += coeff * rising * power;
    }
    sum + tail
}

struct Tail<'a> {
    x_min: u64,
    /// Sorted ascending, all `>= x_min`.
    samples: &'a [u64],
    sum_ln: f64,
}

impl Tail<'_> {
    fn log_likelihood(&self, beta: f64) -> f64 {
        let n = self.samples.len() as f64;
        -n * hurwitz_zeta(beta, self.x_min as f64).ln() - beta * self.sum_ln
    }

    /// Maximizes the concave log-likelihood: a coarse grid brackets the
    /// optimum, golden-section search refines it.
    fn mle(&self) -> (f64, f64) {
        let steps = ((MAX_EXPONENT - MIN_EXPONENT) / GRID_STEP).ceil() as usize;
        let grid = |i: usize| (MIN_EXPONENT + i as f64 * GRID_STEP).min(MAX_EXPONENT);
        let mut best_i = 0;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=steps {
            let ll = self.log_likelihood(grid(i));
            if ll > best {
                best = ll;
                best_i = i;
            } else if ll < best {
                // concave: past the peak
                break;
            }
        }
        let (mut lo, mut hi) = (grid(best_i.saturating_sub(1)), grid((best_i + 1).min(steps)));
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = hi - inv_phi * (hi - lo);
        let mut d = lo + inv_phi * (hi - lo);
        let (mut fc, mut fd) = (self.log_likelihood(c), self.log_likelihood(d));
        while hi - lo > GOLDEN_TOL {
            if fc > fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - inv_phi * (hi - lo);
                fc = self.log_likelihood(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + inv_phi * (hi - lo);
                fd = self.log_likelihood(d);
            }
        }
        let beta = 0.5 * (lo + hi);
        (beta, self.log_likelihood(beta))
    }

    /// Largest gap between the empirical and model CDFs over observed values.
    fn ks_statistic(&self, beta: f64) -> f64 {
        let n = self.samples.len() as f64;
        let norm = hurwitz_zeta(beta, self.x_min as f64);
        let mut d: f64 = 0.0;
        let mut i = 0;
        while i < self.samples.len() {
            let x = self.samples[i];
            let mut j = i;
            while j < self.samples.len() && self.samples[j] == x {
                j += 1;
            }
            let empirical = j as f64 / n;
            let model = 1.0 - hurwitz_zeta(beta, (x + 1) as f64) / norm;
            d = d.max((empirical - model).abs());
            i = j;
        }
        d
    }
}

fn make_tail(sorted: &[u64], x_min: u64) -> Result<Tail<'_>, NetStatsError> {
    let start = sorted.partition_point(|&x| x < x_min);
    let samples = &sorted[start..];
    if samples.len() < MIN_TAIL {
        return Err(NetStatsError::TooFewSamples {
            need: MIN_TAIL,
            got: samples.len(),
        });
    }
    if samples.first() == samples.last() {
        return Err(NetStatsError::DegenerateTail);
    }
    Ok(Tail {
        x_min,
        samples,
        sum_ln: samples.iter().map(|&x| (x as f64).ln()).sum(),
    })
}

fn fit_tail(tail: &Tail<'_>) -> PowerLawFit {
    let (exponent, log_likelihood) = tail.mle();
    PowerLawFit {
        exponent,
        x_min: tail.x_min,
        n_tail: tail.samples.len(),
        ks_statistic: tail.ks_statistic(exponent),
        log_likelihood,
    }
}

/// Fits a discrete power law to positive integer samples.
///
/// With `x_min` given, only the exponent is estimated. Otherwise every
/// observed value leaving at least [`MIN_TAIL`] non-identical samples is tried
/// as cutoff and the one with the smallest KS distance wins (smallest cutoff on
/// ties).
pub fn fit_power_law(samples: &[u64], x_min: Option<u64>) -> Result<PowerLawFit, NetStatsError> {
    if samples.contains(&0) {
        return Err(NetStatsError::NonPositiveSample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();

    if let Some(x_min) = x_min {
        if x_min == 0 {
            return Err(NetStatsError::NonPositiveSample);
        }
        return Ok(fit_tail(&make_tail(&sorted, x_min)?));
    }

    let mut candidates = sorted.clone();
    candidates.dedup();
    let mut best: Option<PowerLawFit> = None;
    let mut first_err = None;
    for &c in &candidates {
        let tail = match make_tail(&sorted, c) {
            Ok(t) => t,
            Err(e) => {
                first_err.get_or_insert(e);
                continue;
            }
        };
        let fit = fit_tail(&tail);
        if best.as_ref().is_none_or(|b| fit.ks_statistic < b.ks_statistic) {
            best = Some(fit);
        }
    }
    best.ok_or_else(|| first_err.unwrap_or(NetStatsError::TooFewSamples { need: MIN_TAIL, got: 0 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_zeta(s: f64, q: f64) -> f64 {
        // direct sum plus the integral of the remainder
        let n = 200_000;
        let mut sum = 0.0;
        for k in (0..n).rev() {
            sum += (q + k as f64).powf(-s);
        }
        let a = q + n as f64;
        sum + a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s)
    }

    #[test]
    fn zeta_known_values() {
        let pi = std::f64::consts::PI;
        assert!((hurwitz_zeta(2.0, 1.0) - pi * pi / 6.0).abs() < 1e-13);
        assert!((hurwitz_zeta(4.0, 1.0) - pi.powi(4) / 90.0).abs() < 1e-13);
        // ζ(2, 2) = π²/6 - 1
        assert!((hurwitz_zeta(2.0, 2.0) - (pi * pi / 6.0 - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn zeta_matches_brute_force() {
        for &s in &[1.05, 1.5, 2.5, 3.7, 6.0] {
            for &q in &[1.0, 3.0, 17.0, 250.0] {
                let (a, b) = (hurwitz_zeta(s, q), brute_zeta(s, q));
                assert!(((a - b) / b).abs() < 1e-9, "s={s} q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn all_equal_is_degenerate() {
        assert_eq!(fit_power_law(&[4; 50], Some(4)), Err(NetStatsError::DegenerateTail));
        assert!(fit_power_law(&[4; 50], None).is_err());
    }

    #[test]
    fn too_few_tail_samples() {
        let s: Vec<u64> = (1..=30).collect();
        assert_eq!(
            fit_power_law(&s, Some(25)),
            Err(NetStatsError::TooFewSamples { need: 10, got: 6 })
        );
    }

    #[test]
    fn zero_sample_rejected() {
        assert_eq!(fit_power_law(&[0, 1, 2], Some(1)), Err(NetStatsError::NonPositiveSample));
    }

    #[test]
    fn likelihood_maximum_is_stationary() {
        let samples: Vec<u64> = (0..400).map(|i| 1 + (i * i) % 37).collect();
        let fit = fit_power_law(&samples, Some(1)).unwrap();
        let mut sorted = samples.clone();
        sorted.sort_unstable();
        let tail = make_tail(&sorted, 1).unwrap();
        let h = 1e-4;
        assert!(tail.log_likelihood(fit.exponent) >= tail.log_likelihood(fit.exponent + h));
        assert!(tail.log_likelihood(fit.exponent) >= tail.log_likelihood(fit.exponent - h));
        assert!(fit.exponent > 1.0 && fit.ks_statistic >= 0.0 && fit.ks_statistic <= 1.0);
    }

    #[test]
    fn scan_picks_a_valid_cutoff() {
        let samples: Vec<u64> = (0..500).map(|i| 1 + (i * 7919) % 101).collect();
        let fit = fit_power_law(&samples, None).unwrap();
        assert!(fit.n_tail >= MIN_TAIL);
        assert!(samples.contains(&fit.x_min));
    }
}
