//! Short-interval statistics of the normalized remainders
//! `F(x) = Delta(x)/x^{1/4}` (divisor) and `F_f(x) = A_f(x)/x^{1/4}` (cusp
//! form): exact interval increments, their truncated trigonometric
//! approximations, truncated and asymptotic variances, and the sampling
//! experiments over `x` uniform on `[T, 2T]`.

use crate::arith::{delta_remainder, divisor_summatory, EULER_GAMMA};
use crate::error::{Error, Result};
use crate::progressions::{Coefficients, Mode};
use crate::rng::CounterRng;
use crate::stats::{pairwise_sum, pairwise_sum_by, EmpiricalDistribution};
use rayon::prelude::*;

/// Parameters of a short-interval sampling run.
#[derive(Debug, Clone)]
pub struct ShortIntervalConfig {
    pub t: f64,
    pub l: f64,
    pub samples: u64,
    pub seed: u64,
    pub mode: Mode,
    /// required in hecke mode
    pub cf_value: Option<f64>,
}

impl ShortIntervalConfig {
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.t >= 1.0e4) {
            return Err(Error::domain(format!("T = {} below 1e4", self.t)));
        }
        if !(self.l >= 2.0) {
            return Err(Error::domain(format!("L = {} below 2", self.l)));
        }
        if self.mode == Mode::Hecke && self.cf_value.is_none() {
            return Err(Error::domain("hecke mode needs cf_value"));
        }
        let mut warnings = Vec::new();
        if self.l > self.t.powf(0.2) {
            warnings.push(format!("L = {} exceeds T^0.2 = {:.1}; log L is not small against log T", self.l, self.t.powf(0.2)));
        }
        Ok(warnings)
    }

    /// Largest coefficient index any sample can touch (hecke mode):
    /// `2T + sqrt(2T)/L` with a one-step margin.
    pub fn hecke_reach(&self) -> u64 {
        (2.0 * self.t + (2.0 * self.t).sqrt() / self.l).ceil() as u64 + 1
    }
}

/// One sampled statistic value.
#[derive(Debug, Clone, Copy)]
pub struct ShortIntervalSample {
    pub x: f64,
    pub statistic: f64,
}

/// Normalized remainder `F(x)` for either coefficient family.
fn normalized_remainder(x: f64, table: &Coefficients) -> Result<f64> {
    match table {
        Coefficients::Divisor(_) => Ok(delta_remainder(x).remainder / x.powf(0.25)),
        Coefficients::Hecke(ht) => {
            let n = x as u64;
            if n > ht.limit() {
                return Err(Error::Capacity { what: "hecke remainder", requested: n, limit: ht.limit() });
            }
            Ok(ht.prefix_normalized(n) / x.powf(0.25))
        }
    }
}

/// Truncated oscillating-series approximation to `F(x)`:
/// `(1/(pi sqrt 2)) sum_{n<=N} c(n) n^{-3/4} cos(4 pi sqrt(n x) - pi/4)`
/// with `c = d` or `c = rho_f`. The hecke branch is already divided by
/// `x^{1/4}`, matching `F_f`.
pub fn remainder_series(x: f64, n_terms: u64, table: &Coefficients) -> Result<f64> {
    if n_terms == 0 {
        return Err(Error::domain("series needs at least one term".to_string()));
    }
    if n_terms > table.limit() {
        return Err(Error::Capacity { what: "remainder series", requested: n_terms, limit: table.limit() });
    }
    let quarter_pi = std::f64::consts::FRAC_PI_4;
    let sum = pairwise_sum_by(n_terms as usize, &|i| {
        let n = (i + 1) as f64;
        table.value((i + 1) as u64) * n.powf(-0.75) * (4.0 * std::f64::consts::PI * (n * x).sqrt() - quarter_pi).cos()
    });
    Ok(sum / (std::f64::consts::PI * std::f64::consts::SQRT_2))
}

/// Exact interval statistic `S(x, L) = F((sqrt x + 1/L)^2) - F(x)` from the
/// summatory functions (hyperbola method or prefix sums), not the series.
pub fn short_stat_exact(x: f64, l: f64, table: &Coefficients) -> Result<f64> {
    if !(x >= 1.0) || !(l >= 1.0) {
        return Err(Error::domain(format!("short statistic needs x >= 1, L >= 1; got ({x}, {l})")));
    }
    let x2 = (x.sqrt() + 1.0 / l).powi(2);
    Ok(normalized_remainder(x2, table)? - normalized_remainder(x, table)?)
}

/// Truncated trigonometric approximation to `S(x, L)`:
/// `(-2/(pi sqrt 2)) sum_{n<=M} c(n) n^{-3/4} sin(2 pi sqrt n / L)
///  sin(4 pi sqrt n (sqrt x + 1/(2L)) - pi/4)`.
pub fn short_sum(x: f64, l: f64, m: u64, table: &Coefficients) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("short sum needs at least one term".to_string()));
    }
    if m > table.limit() {
        return Err(Error::Capacity { what: "short sum", requested: m, limit: table.limit() });
    }
    let quarter_pi = std::f64::consts::FRAC_PI_4;
    let center = x.sqrt() + 0.5 / l;
    let sum = pairwise_sum_by(m as usize, &|i| {
        let n = (i + 1) as f64;
        let rn = n.sqrt();
        table.value((i + 1) as u64)
            * n.powf(-0.75)
            * (2.0 * std::f64::consts::PI * rn / l).sin()
            * (4.0 * std::f64::consts::PI * rn * center - quarter_pi).sin()
    });
    Ok(-2.0 / (std::f64::consts::PI * std::f64::consts::SQRT_2) * sum)
}

/// Truncated variance
/// `sigma_M^2 = (1/pi^2) sum_{n<=M} c^2(n) n^{-3/2} sin^2(2 pi sqrt n / L)`.
pub fn sigma_sq_m(m: u64, l: f64, table: &Coefficients) -> Result<f64> {
    if m == 0 || m > table.limit() {
        return Err(Error::Capacity { what: "sigma_M", requested: m, limit: table.limit() });
    }
    let sum = pairwise_sum_by(m as usize, &|i| {
        let n = (i + 1) as f64;
        let c = table.value((i + 1) as u64);
        c * c * n.powf(-1.5) * (2.0 * std::f64::consts::PI * n.sqrt() / l).sin().powi(2)
    });
    Ok(sum / (std::f64::consts::PI * std::f64::consts::PI))
}

/// Asymptotic variance of `S(x, L)`: `(16/pi^2) log^3(L)/L` in divisor
/// mode, `2 c_f / L` in hecke mode.
pub fn sigma_sq_asymptotic(l: f64, mode: Mode, cf_value: Option<f64>) -> Result<f64> {
    if !(l > 1.0) {
        return Err(Error::domain(format!("asymptotic variance needs L > 1, got {l}")));
    }
    match mode {
        Mode::Divisor => Ok(16.0 / (std::f64::consts::PI * std::f64::consts::PI) * l.ln().powi(3) / l),
        Mode::Hecke => {
            let cf = cf_value.ok_or_else(|| Error::domain("hecke mode needs cf_value"))?;
            Ok(2.0 * cf / l)
        }
    }
}

/// The interval-statistic of the limit theorems: increment of the remainder
/// over `[x, x + sqrt(x)/L]`, normalized by `x^{1/4}` and the exact variance
/// constant of that interval length.
///
/// The `[x, x + sqrt x / L]` step is half the `S(x, L)` step, i.e. the same
/// statistic as `S(x, 2L)`, so the variance constant is `sigma^2(2L)`:
/// `(8/pi^2) log^3(2L)/L` (divisor; the limit-theorem form `(8/pi^2)
/// log^3(L)/L` is its `L -> inf` simplification) and `c_f/L` (hecke, exact).
pub fn theorem_statistic(x: f64, l: f64, table: &Coefficients, cf_value: Option<f64>) -> Result<f64> {
    if !(x >= 1.0) || !(l >= 1.0) {
        return Err(Error::domain(format!("statistic needs x >= 1, L >= 1; got ({x}, {l})")));
    }
    let x2 = x + x.sqrt() / l;
    let numerator = match table {
        Coefficients::Divisor(_) => {
            let d2 = divisor_summatory(x2) as f64 - x2 * (x2.ln() + 2.0 * EULER_GAMMA - 1.0);
            let d1 = delta_remainder(x).remainder;
            d2 - d1
        }
        Coefficients::Hecke(ht) => {
            let reach = x2 as u64;
            if reach > ht.limit() {
                return Err(Error::Capacity { what: "theorem statistic", requested: reach, limit: ht.limit() });
            }
            ht.prefix_normalized(x2 as u64) - ht.prefix_normalized(x as u64)
        }
    };
    let variance = sigma_sq_asymptotic(2.0 * l, table.mode(), cf_value)? / 2.0;
    Ok(numerator / (x.powf(0.25) * variance.sqrt()))
}

/// Outcome of the variance sampling experiment.
#[derive(Debug, Clone, Copy)]
pub struct VarianceReport {
    pub sample_variance: f64,
    pub ratio_to_asymptotic: f64,
    /// set when fewer than two samples were drawn
    pub degenerate: bool,
}

fn sample_points(cfg: &ShortIntervalConfig) -> Vec<f64> {
    let rng = CounterRng::new(cfg.seed);
    (0..cfg.samples).map(|i| cfg.t * (1.0 + rng.uniform(0, i))).collect()
}

/// Sample `S(x, L)` on `[T, 2T]` and compare its variance with the
/// asymptotic `(16/pi^2) log^3(L)/L` (or `2 c_f/L`).
pub fn variance_experiment(cfg: &ShortIntervalConfig, table: &Coefficients) -> Result<VarianceReport> {
    cfg.validate()?;
    if cfg.samples == 0 {
        return Err(Error::EmptySamples);
    }
    check_reach(cfg, table)?;
    let xs = sample_points(cfg);
    let vals: Vec<f64> = xs
        .par_iter()
        .map(|&x| short_stat_exact(x, cfg.l, table))
        .collect::<Result<_>>()?;
    let n = vals.len();
    let mean = pairwise_sum(&vals) / n as f64;
    let variance = pairwise_sum_by(n, &|i| (vals[i] - mean).powi(2)) / n as f64;
    let asym = sigma_sq_asymptotic(cfg.l, cfg.mode, cfg.cf_value)?;
    Ok(VarianceReport {
        sample_variance: variance,
        ratio_to_asymptotic: variance / asym,
        degenerate: n < 2,
    })
}

fn check_reach(cfg: &ShortIntervalConfig, table: &Coefficients) -> Result<()> {
    if table.mode() != cfg.mode {
        return Err(Error::domain("coefficient table does not match the configured mode"));
    }
    if cfg.mode == Mode::Hecke {
        let reach = cfg.hecke_reach();
        if reach > table.limit() {
            return Err(Error::Capacity { what: "short-interval run", requested: reach, limit: table.limit() });
        }
    }
    Ok(())
}

/// Sample the theorem statistic on `[T, 2T]` and wrap the values in an
/// empirical distribution.
pub fn distribution_experiment(
    cfg: &ShortIntervalConfig,
    table: &Coefficients,
) -> Result<(EmpiricalDistribution, Vec<ShortIntervalSample>)> {
    cfg.validate()?;
    if cfg.samples == 0 {
        return Err(Error::EmptySamples);
    }
    check_reach(cfg, table)?;
    let xs = sample_points(cfg);
    let stats: Vec<f64> = xs
        .par_iter()
        .map(|&x| theorem_statistic(x, cfg.l, table, cfg.cf_value))
        .collect::<Result<_>>()?;
    let samples: Vec<ShortIntervalSample> = xs
        .iter()
        .zip(&stats)
        .map(|(&x, &statistic)| ShortIntervalSample { x, statistic })
        .collect();
    Ok((EmpiricalDistribution::from_samples(stats)?, samples))
}
