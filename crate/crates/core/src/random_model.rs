//! The unit-circle random model for the short-interval statistic: one
//! independent uniform phase per square-free q, with the index-n terms
//! grouped as n = q f^2. Monte-Carlo estimation of the moments of the
//! normalized sum.

use crate::arith::DivisorTable;
use crate::error::{Error, Result};
use crate::progressions::Coefficients;
use crate::rng::CounterRng;
use crate::short_intervals::sigma_sq_m;
use crate::stats::{pairwise_sum_by, EmpiricalDistribution};
use rayon::prelude::*;

/// Ceiling on the square-free sieve and model index range.
pub const MODEL_CEILING: u64 = 1 << 30;

/// Parameters of a random-model Monte-Carlo run.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub m: u64,
    pub l: f64,
    pub trials: u64,
    pub seed: u64,
    pub max_moment: u32,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.trials == 0 {
            return Err(Error::domain("model needs M >= 1 and trials >= 1".to_string()));
        }
        if !(self.l >= 2.0) {
            return Err(Error::domain(format!("model needs L >= 2, got {}", self.l)));
        }
        if self.max_moment == 0 || self.max_moment > 20 {
            return Err(Error::domain(format!("max moment {} outside 1..=20", self.max_moment)));
        }
        Ok(())
    }
}

/// Square-free integers up to m, by sieving out multiples of squared primes.
pub fn squarefree_sieve(m: u64) -> Result<Vec<u64>> {
    if m == 0 || m > MODEL_CEILING {
        return Err(Error::Capacity { what: "squarefree sieve", requested: m, limit: MODEL_CEILING });
    }
    let n = m as usize;
    let mut free = vec![true; n + 1];
    free[0] = false;
    let mut p = 2u64;
    while p * p <= m {
        // sieving by every square q^2 over-marks composites but keeps the
        // result identical; restricting to primes needs them first anyway
        let step = p * p;
        let mut i = step;
        while i <= m {
            free[i as usize] = false;
            i += step;
        }
        p += 1;
    }
    Ok((1..=m).filter(|&q| free[q as usize]).collect())
}

/// Precomputed per-(q, f) coefficients of the model sum; sampling a trial is
/// a single pass of complex rotations.
pub struct ModelSampler {
    cfg: ModelConfig,
    /// flattened groups: (q index base angle `2 pi sqrt q / L`, coefficient
    /// list over f)
    groups: Vec<(u64, f64, Vec<f64>)>,
    sigma_m: f64,
    rng: CounterRng,
}

impl ModelSampler {
    pub fn new(cfg: ModelConfig, table: &DivisorTable) -> Result<Self> {
        cfg.validate()?;
        if table.limit() < cfg.m {
            return Err(Error::Capacity { what: "model sampler", requested: cfg.m, limit: table.limit() });
        }
        let sigma_m = sigma_sq_m(cfg.m, cfg.l, &Coefficients::Divisor(table))?.sqrt();
        if !(sigma_m > 0.0) {
            return Err(Error::domain("sigma_M vanishes for this (M, L)".to_string()));
        }
        let qs = squarefree_sieve(cfg.m)?;
        let groups = qs
            .iter()
            .map(|&q| {
                let alpha = 2.0 * std::f64::consts::PI * (q as f64).sqrt() / cfg.l;
                let fmax = crate::arith::isqrt(cfg.m / q);
                let coeffs: Vec<f64> = (1..=fmax)
                    .map(|f| {
                        let ff = f as f64;
                        -2.0 / ((q as f64).powf(0.75) * std::f64::consts::PI * std::f64::consts::SQRT_2)
                            * table.value(q * f * f) as f64
                            / ff.powf(1.5)
                            * (alpha * ff).sin() // sin(2 pi f sqrt q / L)
                    })
                    .collect();
                (q, alpha, coeffs)
            })
            .collect();
        let rng = CounterRng::new(cfg.seed);
        Ok(ModelSampler { cfg, groups, sigma_m, rng })
    }

    pub fn sigma_m(&self) -> f64 {
        self.sigma_m
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    /// One trial: every square-free q gets an independent uniform phase
    /// theta(q) derived from (seed, trial, q); the output is
    /// `(1/sigma_M) sum_q Im Y(q)`.
    pub fn sample(&self, trial: u64) -> f64 {
        self.sample_with(|q| self.rng.uniform(trial + 1, q))
    }

    /// Test hook: sample with explicit phases theta(q) in [0, 1).
    pub fn sample_with(&self, theta: impl Fn(u64) -> f64) -> f64 {
        let mut total = 0.0f64;
        let mut comp = 0.0f64;
        for (q, alpha, coeffs) in &self.groups {
            let th = theta(*q);
            // angle step per f: alpha + 2 pi theta; start offset -pi/4
            let step = alpha + 2.0 * std::f64::consts::PI * th;
            let (sin_s, cos_s) = step.sin_cos();
            let (mut sin_a, mut cos_a) = (step - std::f64::consts::FRAC_PI_4).sin_cos();
            let mut acc = 0.0f64;
            for &c in coeffs {
                acc += c * sin_a;
                let s = sin_a * cos_s + cos_a * sin_s;
                cos_a = cos_a * cos_s - sin_a * sin_s;
                sin_a = s;
            }
            let y = acc - comp;
            let t = total + y;
            comp = (t - total) - y;
            total = t;
        }
        total / self.sigma_m
    }
}

/// Convenience one-shot sampler matching the spec operation; build a
/// [`ModelSampler`] once when drawing many trials.
pub fn sample_model_sum(cfg: &ModelConfig, table: &DivisorTable, trial: u64) -> Result<f64> {
    Ok(ModelSampler::new(cfg.clone(), table)?.sample(trial))
}

/// Moment estimates with Monte-Carlo standard errors and the Gaussian
/// targets.
#[derive(Debug, Clone)]
pub struct MomentReport {
    /// raw moments m = 1..=max_moment of the normalized model sum
    pub estimates: Vec<f64>,
    /// per-moment standard errors; None when trials < 2
    pub standard_errors: Option<Vec<f64>>,
    /// m!/(2^{m/2} (m/2)!) for even m, 0 for odd
    pub gaussian_targets: Vec<f64>,
    pub trials: u64,
}

/// Monte-Carlo moments of the normalized model sum.
pub fn model_moments_mc(cfg: &ModelConfig, table: &DivisorTable) -> Result<MomentReport> {
    let sampler = ModelSampler::new(cfg.clone(), table)?;
    let samples: Vec<f64> = (0..cfg.trials).into_par_iter().map(|t| sampler.sample(t)).collect();
    let dist = EmpiricalDistribution::from_samples(samples)?;
    let n = dist.n();
    let estimates = dist.sample_moments(cfg.max_moment);
    let standard_errors = if cfg.trials >= 2 {
        Some(
            (1..=cfg.max_moment)
                .map(|m| {
                    let mean_m = estimates[(m - 1) as usize];
                    let var = pairwise_sum_by(n, &|i| {
                        let p = dist.samples()[i].powi(m as i32);
                        (p - mean_m) * (p - mean_m)
                    }) / n as f64;
                    (var / n as f64).sqrt()
                })
                .collect(),
        )
    } else {
        None
    };
    let gaussian_targets = (1..=cfg.max_moment).map(|m| gaussian_moment(m).unwrap()).collect();
    Ok(MomentReport { estimates, standard_errors, gaussian_targets, trials: cfg.trials })
}

/// Standard normal raw moment: `m!/(2^{m/2} (m/2)!)` for even m, 0 for odd.
pub fn gaussian_moment(m: u32) -> Result<f64> {
    if m > 20 {
        return Err(Error::domain(format!("gaussian moment {m} > 20 overflows the exact product")));
    }
    if m % 2 == 1 {
        return Ok(0.0);
    }
    let mut v = 1.0f64;
    let mut k = 1u64;
    while k < m as u64 {
        v *= k as f64; // (m-1)!!
        k += 2;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_divisor_table;

    #[test]
    fn squarefree_small() {
        assert_eq!(squarefree_sieve(10).unwrap(), vec![1, 2, 3, 5, 6, 7, 10]);
        assert_eq!(squarefree_sieve(1).unwrap(), vec![1]);
        assert!(squarefree_sieve(0).is_err());
    }

    #[test]
    fn squarefree_count_against_moebius_oracle() {
        // direct mu^2 check per n; density approaches 6/pi^2
        let m = 100_000u64;
        let qs = squarefree_sieve(m).unwrap();
        let mut count = 0u64;
        for n in 1..=m {
            let mut x = n;
            let mut free = true;
            let mut d = 2u64;
            while d * d <= x {
                if x % (d * d) == 0 {
                    free = false;
                    break;
                }
                if x % d == 0 {
                    x /= d;
                }
                d += 1;
            }
            if free {
                count += 1;
            }
        }
        assert_eq!(qs.len() as u64, count);
        let density = count as f64 / m as f64;
        assert!((density - 6.0 / (std::f64::consts::PI * std::f64::consts::PI)).abs() < 1e-3);
    }

    #[test]
    fn gaussian_moments_table() {
        assert_eq!(gaussian_moment(2).unwrap(), 1.0);
        assert_eq!(gaussian_moment(3).unwrap(), 0.0);
        assert_eq!(gaussian_moment(4).unwrap(), 3.0);
        assert_eq!(gaussian_moment(6).unwrap(), 15.0);
        assert_eq!(gaussian_moment(20).unwrap(), 654_729_075.0);
        assert!(gaussian_moment(21).is_err());
    }

    fn cfg(m: u64, l: f64, trials: u64, seed: u64) -> ModelConfig {
        ModelConfig { m, l, trials, seed, max_moment: 6 }
    }

    #[test]
    fn single_q_phase_alignment_gives_zero() {
        // M=1: only q=1, f=1; theta = 1/8 - 1/L kills the imaginary part
        let table = build_divisor_table(8).unwrap();
        let c = cfg(1, 5.0, 1, 0);
        let s = ModelSampler::new(c, &table).unwrap();
        let v = s.sample_with(|_| 0.125 - 1.0 / 5.0 + 1.0); // wrapped into [0,1)
        assert!(v.abs() < 1e-12, "aligned phase gives {v}");
    }

    #[test]
    fn forced_unit_phases_match_direct_loop() {
        // X(q) = 1 for all q: oracle is a direct scalar loop over (q, f)
        let m = 400u64;
        let l = 7.0;
        let table = build_divisor_table(m).unwrap();
        let s = ModelSampler::new(cfg(m, l, 1, 0), &table).unwrap();
        let got = s.sample_with(|_| 0.0);
        let mut want = 0.0f64;
        for &q in &squarefree_sieve(m).unwrap() {
            let mut f = 1u64;
            while q * f * f <= m {
                let n = q * f * f;
                let rq = (q as f64).sqrt();
                let coeff = -2.0 / ((q as f64).powf(0.75) * std::f64::consts::PI * std::f64::consts::SQRT_2)
                    * table.value(n) as f64
                    / (f as f64).powf(1.5)
                    * (2.0 * std::f64::consts::PI * f as f64 * rq / l).sin();
                let angle = 2.0 * std::f64::consts::PI * (f as f64 * rq / l - 0.125);
                want += coeff * angle.sin();
                f += 1;
            }
        }
        want /= sigma_sq_m(m, l, &Coefficients::Divisor(&table)).unwrap().sqrt();
        assert!((got - want).abs() < 1e-12, "got {got} want {want}");
    }

    #[test]
    fn second_moment_identity() {
        // E[sample^2] = 1 by construction; MC estimate within 4 SE
        let table = build_divisor_table(2000).unwrap();
        let c = cfg(2000, 10.0, 4000, 7);
        let report = model_moments_mc(&c, &table).unwrap();
        let m2 = report.estimates[1];
        let se = report.standard_errors.as_ref().unwrap()[1];
        assert!((m2 - 1.0).abs() <= 4.0 * se, "m2 = {m2} +- {se}");
    }

    #[test]
    fn mean_symmetry() {
        let table = build_divisor_table(500).unwrap();
        let c = cfg(500, 9.0, 10_000, 21);
        let report = model_moments_mc(&c, &table).unwrap();
        let m1 = report.estimates[0];
        let se = report.standard_errors.as_ref().unwrap()[0];
        assert!(m1.abs() <= 3.0 * se + 1e-4, "m1 = {m1} +- {se}");
    }

    #[test]
    fn per_q_second_moment_decays_beyond_l_squared() {
        // E[(Im Y(q))^2] decreases along a log grid of q > L^2
        let m = 60_000u64;
        let l = 6.0; // L^2 = 36
        let table = build_divisor_table(m).unwrap();
        let trials = 3000u64;
        let rng = CounterRng::new(5);
        let mut prev = f64::INFINITY;
        for &q in &[37u64, 149, 599, 2399, 9601] {
            // single-q second moment, exact in expectation: (1/2) sum c_f^2
            let mut sum = 0.0;
            for t in 0..trials {
                let th = rng.uniform(q, t);
                let alpha = 2.0 * std::f64::consts::PI * (q as f64).sqrt() / l;
                let step = alpha + 2.0 * std::f64::consts::PI * th;
                let mut f = 1u64;
                let mut y = 0.0;
                while q * f * f <= m {
                    let coeff = -2.0
                        / ((q as f64).powf(0.75) * std::f64::consts::PI * std::f64::consts::SQRT_2)
                        * table.value(q * f * f) as f64
                        / (f as f64).powf(1.5)
                        * (alpha * f as f64).sin();
                    y += coeff * (f as f64 * step - std::f64::consts::FRAC_PI_4).sin();
                    f += 1;
                }
                sum += y * y;
            }
            let m2 = sum / trials as f64;
            assert!(m2 < prev * 1.15, "q = {q}: {m2} vs prev {prev}");
            prev = m2;
        }
    }

    #[test]
    fn independence_of_distinct_q() {
        // empirical covariance of Im Y(q1), Im Y(q2) compatible with 0
        let m = 1000u64;
        let l = 8.0;
        let table = build_divisor_table(m).unwrap();
        let s = ModelSampler::new(cfg(m, l, 1, 3), &table).unwrap();
        let trials = 20_000u64;
        let (q1, q2) = (2u64, 3u64);
        let one_q = |q: u64, th: f64| {
            let alpha = 2.0 * std::f64::consts::PI * (q as f64).sqrt() / l;
            let step = alpha + 2.0 * std::f64::consts::PI * th;
            let mut f = 1u64;
            let mut y = 0.0;
            while q * f * f <= m {
                let coeff = -2.0 / ((q as f64).powf(0.75) * std::f64::consts::PI * std::f64::consts::SQRT_2)
                    * table.value(q * f * f) as f64
                    / (f as f64).powf(1.5)
                    * (alpha * f as f64).sin();
                y += coeff * (f as f64 * step - std::f64::consts::FRAC_PI_4).sin();
                f += 1;
            }
            y
        };
        let mut cov = 0.0;
        let mut v1 = 0.0;
        let mut v2 = 0.0;
        for t in 0..trials {
            let y1 = one_q(q1, s.rng.uniform(t + 1, q1));
            let y2 = one_q(q2, s.rng.uniform(t + 1, q2));
            cov += y1 * y2;
            v1 += y1 * y1;
            v2 += y2 * y2;
        }
        cov /= trials as f64;
        let se = ((v1 / trials as f64) * (v2 / trials as f64) / trials as f64).sqrt();
        assert!(cov.abs() <= 4.0 * se, "cov {cov} vs se {se}");
    }

    #[test]
    fn determinism_and_se_flag() {
        let table = build_divisor_table(300).unwrap();
        let c = cfg(300, 5.0, 50, 12);
        let a = model_moments_mc(&c, &table).unwrap();
        let b = model_moments_mc(&c, &table).unwrap();
        assert_eq!(a.estimates, b.estimates);
        let single = model_moments_mc(&cfg(300, 5.0, 1, 12), &table).unwrap();
        assert!(single.standard_errors.is_none());
    }

    #[test]
    fn config_validation() {
        let table = build_divisor_table(10).unwrap();
        assert!(ModelSampler::new(cfg(0, 5.0, 1, 0), &table).is_err());
        assert!(ModelSampler::new(cfg(5, 1.0, 1, 0), &table).is_err());
        assert!(ModelSampler::new(cfg(5, 5.0, 0, 0), &table).is_err());
        assert!(ModelSampler::new(cfg(100, 5.0, 1, 0), &table).is_err()); // table too small
    }
}
