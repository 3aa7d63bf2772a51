//! Residue-class statistics of coefficient sums mod p: sharp and smoothed
//! centered values E(a), the dual-sum evaluation through Kloosterman sums
//! and window transforms, the sharp-vs-smooth gap, and the distribution
//! experiment over a in F_p^x.

use crate::arith::{DivisorTable, HeckeTable, EULER_GAMMA};
use crate::error::{Error, Result};
use crate::kloosterman::{is_prime, KloostermanTable};
use crate::special::adaptive_quad_osc;
use crate::stats::{pairwise_sum_by, EmpiricalDistribution};
use crate::windows::{transform_d, transform_f, window_eval, EnvelopeKernel, TransformValue, WindowSpec};
use rayon::prelude::*;

/// Which coefficient family a computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Divisor,
    Hecke,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Divisor => write!(f, "divisor"),
            Mode::Hecke => write!(f, "hecke"),
        }
    }
}

/// Borrowed coefficient source matching a `Mode`.
#[derive(Clone, Copy)]
pub enum Coefficients<'a> {
    Divisor(&'a DivisorTable),
    Hecke(&'a HeckeTable),
}

impl<'a> Coefficients<'a> {
    pub fn mode(&self) -> Mode {
        match self {
            Coefficients::Divisor(_) => Mode::Divisor,
            Coefficients::Hecke(_) => Mode::Hecke,
        }
    }

    pub fn limit(&self) -> u64 {
        match self {
            Coefficients::Divisor(t) => t.limit(),
            Coefficients::Hecke(t) => t.limit(),
        }
    }

    /// tau(n) as a float: d(n) or rho_f(n).
    #[inline]
    pub fn value(&self, n: u64) -> f64 {
        match self {
            Coefficients::Divisor(t) => t.value(n) as f64,
            Coefficients::Hecke(t) => t.normalized(n),
        }
    }
}

/// Parameters of one progressions run. `X = p^2 / phi`.
#[derive(Debug, Clone)]
pub struct ProgressionConfig {
    pub p: u64,
    pub phi: f64,
    pub mode: Mode,
    pub window: Option<WindowSpec>,
    /// second-moment constant of the form; required in hecke mode
    pub cf_value: Option<f64>,
}

impl ProgressionConfig {
    pub fn x(&self) -> f64 {
        self.p as f64 * self.p as f64 / self.phi
    }

    /// Dual-side scale `Y = p^2 / X = phi`.
    pub fn y(&self) -> f64 {
        self.phi
    }

    fn validate(&self, table: &Coefficients) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::domain(format!("modulus {} is not prime", self.p)));
        }
        if !(self.phi >= 1.0) {
            return Err(Error::domain(format!("phi {} must be >= 1", self.phi)));
        }
        if self.x() < self.p as f64 {
            return Err(Error::domain(format!(
                "X = p^2/phi = {:.1} below p = {}; every class must be populated",
                self.x(),
                self.p
            )));
        }
        if table.mode() != self.mode {
            return Err(Error::domain("coefficient table does not match the configured mode"));
        }
        if self.mode == Mode::Hecke && self.cf_value.is_none() {
            return Err(Error::domain("hecke mode needs cf_value"));
        }
        let need = self.x() as u64;
        if need > table.limit() {
            return Err(Error::Capacity { what: "progression table", requested: need, limit: table.limit() });
        }
        Ok(())
    }
}

/// Full vector of centered, normalized class sums.
#[derive(Debug, Clone)]
pub struct ProgressionResult {
    /// E(a) for a = 1..p-1
    pub values: Vec<f64>,
    /// raw class sums S(a) for a = 1..p-1
    pub sums: Vec<f64>,
    /// exact integer class sums, sharp divisor mode only
    pub sums_exact: Option<Vec<u64>>,
    pub mean_term_used: f64,
    pub normalization_used: f64,
    pub p: u64,
    pub phi: f64,
    pub mode: Mode,
    pub smoothed: bool,
}

/// Sharp-cutoff class statistics: sums over `n <= X`, `n = a mod p`.
pub fn sharp_progression_values(cfg: &ProgressionConfig, table: &Coefficients) -> Result<ProgressionResult> {
    cfg.validate(table)?;
    let x = cfg.x();
    let nmax = x as u64;
    let p = cfg.p;
    match (table, cfg.mode) {
        (Coefficients::Divisor(dt), Mode::Divisor) => {
            let mut class = vec![0u64; p as usize];
            for n in 1..=nmax {
                class[(n % p) as usize] += dt.value(n) as u64;
            }
            let total = dt.prefix(nmax) as f64;
            let mean_term =
                total / p as f64 - x / (p as f64 * p as f64) * (x.ln() - 1.0 + 2.0 * EULER_GAMMA - 2.0 * (p as f64).ln());
            let norm = sharp_normalization(cfg)?;
            let values: Vec<f64> = (1..p).map(|a| (class[a as usize] as f64 - mean_term) / norm).collect();
            Ok(ProgressionResult {
                values,
                sums: class[1..].iter().map(|&s| s as f64).collect(),
                sums_exact: Some(class[1..].to_vec()),
                mean_term_used: mean_term,
                normalization_used: norm,
                p,
                phi: cfg.phi,
                mode: cfg.mode,
                smoothed: false,
            })
        }
        (Coefficients::Hecke(ht), Mode::Hecke) => {
            let mut class = vec![0.0f64; p as usize];
            for n in 1..=nmax {
                class[(n % p) as usize] += ht.normalized(n);
            }
            let mean_term = ht.prefix_normalized(nmax) / p as f64;
            let norm = sharp_normalization(cfg)?;
            let values: Vec<f64> = (1..p).map(|a| (class[a as usize] - mean_term) / norm).collect();
            Ok(ProgressionResult {
                values,
                sums: class[1..].to_vec(),
                sums_exact: None,
                mean_term_used: mean_term,
                normalization_used: norm,
                p,
                phi: cfg.phi,
                mode: cfg.mode,
                smoothed: false,
            })
        }
        _ => Err(Error::domain("coefficient table does not match the configured mode")),
    }
}

fn sharp_normalization(cfg: &ProgressionConfig) -> Result<f64> {
    let x = cfg.x();
    let p = cfg.p as f64;
    Ok(match cfg.mode {
        Mode::Divisor => (2.0 / (std::f64::consts::PI * std::f64::consts::PI) * (x / p)
            * (cfg.phi + 2.0).ln().powi(3))
        .sqrt(),
        Mode::Hecke => {
            let cf = cfg.cf_value.ok_or_else(|| Error::domain("hecke mode needs cf_value"))?;
            (cf * x / p).sqrt()
        }
    })
}

/// Window moments used by the smoothed statistics: integrals of w, w log u,
/// and w^2 over the support.
struct WindowMoments {
    int_w: f64,
    int_w_log: f64,
    l2_norm: f64,
}

fn window_moments(w: &WindowSpec) -> Result<WindowMoments> {
    let (lo, hi) = w.support();
    let panel = w.delta() / 2.0;
    let int_w = adaptive_quad_osc(|u| window_eval(w, u), lo, hi, 1e-12, panel)?.value;
    let int_w_log = adaptive_quad_osc(|u| window_eval(w, u) * u.ln(), lo, hi, 1e-12, panel)?.value;
    let l2 = adaptive_quad_osc(|u| window_eval(w, u).powi(2), lo, hi, 1e-12, panel)?.value;
    Ok(WindowMoments { int_w, int_w_log, l2_norm: l2.sqrt() })
}

fn smoothed_normalization(cfg: &ProgressionConfig, l2_norm: f64) -> Result<f64> {
    Ok(l2_norm * sharp_normalization(cfg)?)
}

/// Smoothed class statistics with weight `w(n/X)`.
///
/// The divisor-mode mean term subtracts
/// `(1/p^2) int (log y + 2 gamma - 2 log p) w(y/X) dy`; the hecke-mode mean
/// term is the plain average `(1/p) sum rho(n) w(n/X)` (a cusp form has no
/// residue main term).
pub fn smoothed_progression_values(cfg: &ProgressionConfig, table: &Coefficients) -> Result<ProgressionResult> {
    cfg.validate(table)?;
    let w = cfg.window.ok_or_else(|| Error::domain("smoothed statistics need a window"))?;
    let x = cfg.x();
    let nmax = x as u64;
    let p = cfg.p;
    let n_lo = ((w.support().0 * x).floor() as u64).max(1);

    let mut class = vec![0.0f64; p as usize];
    let mut total = 0.0f64;
    for n in n_lo..=nmax {
        let v = table.value(n) * window_eval(&w, n as f64 / x);
        class[(n % p) as usize] += v;
        total += v;
    }
    let moments = window_moments(&w)?;
    let mean_term = match cfg.mode {
        Mode::Divisor => {
            let integral = x
                * ((x.ln() + 2.0 * EULER_GAMMA - 2.0 * (p as f64).ln()) * moments.int_w + moments.int_w_log);
            total / p as f64 - integral / (p as f64 * p as f64)
        }
        Mode::Hecke => total / p as f64,
    };
    let norm = smoothed_normalization(cfg, moments.l2_norm)?;
    let values: Vec<f64> = (1..p).map(|a| (class[a as usize] - mean_term) / norm).collect();
    Ok(ProgressionResult {
        values,
        sums: class[1..].to_vec(),
        sums_exact: None,
        mean_term_used: mean_term,
        normalization_used: norm,
        p,
        phi: cfg.phi,
        mode: cfg.mode,
        smoothed: true,
    })
}

/// One dual-sum value with its recorded error terms.
#[derive(Debug, Clone, Copy)]
pub struct DualValue {
    pub value: f64,
    /// envelope bound on the truncated mass (absolute, on the E scale)
    pub tail_bound: f64,
    /// accumulated quadrature error (absolute, on the E scale)
    pub quad_error: f64,
}

/// Shared state for evaluating the dual sum at every residue: transform
/// values at n/Y, coefficient weights, Kloosterman lookup table, and the
/// truncation bookkeeping.
pub struct DualSumEvaluator {
    p: u64,
    prefactor: f64,
    tau_pos: Vec<f64>,
    b_pos: Vec<f64>,
    tau_neg: Vec<f64>,
    b_neg: Vec<f64>,
    kl: KloostermanTable,
    pub tail_bound: f64,
    pub quad_error: f64,
    /// tail target that was requested; the achieved bound is `tail_bound`
    pub tol_requested: f64,
}

/// Hard cap on dual-sum terms per sign.
pub const DUAL_TERM_BUDGET: u64 = 200_000;

/// Give up when even the budgeted truncation leaves this much mass.
const DUAL_FAIL_CEILING: f64 = 0.1;

impl DualSumEvaluator {
    /// Build the evaluator: pick the positive-side truncation from the A=3
    /// decay envelope (calibrated at the cutoff) so the estimated tail is
    /// at most `tol` when the term budget allows, compute all transform
    /// values, and record the achieved tail bound.
    pub fn new(cfg: &ProgressionConfig, table: &Coefficients, tol: f64) -> Result<Self> {
        cfg.validate(table)?;
        let w = cfg.window.ok_or_else(|| Error::domain("dual evaluation needs a window"))?;
        let y = cfg.y();
        if !(y > 2.0) {
            return Err(Error::domain(format!("dual evaluation needs Y = p^2/X > 2, got {y}")));
        }
        if !(tol > 0.0) {
            return Err(Error::domain("tolerance must be positive".to_string()));
        }
        let moments = window_moments(&w)?;
        let norm = smoothed_normalization(cfg, moments.l2_norm)?;
        let prefactor = cfg.x() / (cfg.p as f64).powf(1.5) / norm;
        let delta = w.delta();
        let kernel = match cfg.mode {
            Mode::Divisor => EnvelopeKernel::Divisor,
            Mode::Hecke => EnvelopeKernel::CuspForm,
        };

        // grow the positive cutoff until the envelope tail estimate meets
        // the target or the budget is reached
        let mut n_pos = ((64.0 * y) as u64).clamp(512, DUAL_TERM_BUDGET);
        let mut tail;
        loop {
            let xi_cut = n_pos as f64 / y;
            let c3 = crate::windows::envelope_constant(3, &w, kernel, xi_cut, 3.0 * xi_cut, 10)?;
            tail = 2.0 * prefactor * c3 / (delta * delta) * y.powf(1.75) * tail_integral_d(n_pos as f64);
            if tail <= tol || n_pos >= DUAL_TERM_BUDGET {
                break;
            }
            n_pos = (n_pos * 2).min(DUAL_TERM_BUDGET);
        }
        if tail > DUAL_FAIL_CEILING {
            return Err(Error::Accuracy {
                context: "dual-sum tail bound did not reach a usable level within budget",
                estimate: f64::NAN,
                error_bound: tail,
            });
        }

        // negative side (divisor mode only): the kernel decays exponentially;
        // cut where the exact kernel envelope is negligible
        let n_neg = match cfg.mode {
            Mode::Divisor => {
                let arg_target: f64 = 50.0; // K0(50) ~ 3e-23
                let xi = (arg_target / (4.0 * std::f64::consts::PI)).powi(2) / delta;
                ((xi * y).ceil() as u64).max(64)
            }
            Mode::Hecke => 0,
        };

        let transform_tol = 1e-11;
        let b_pos: Vec<TransformValue> = (1..=n_pos)
            .into_par_iter()
            .map(|n| match cfg.mode {
                Mode::Divisor => transform_d(&w, n as f64 / y, transform_tol),
                Mode::Hecke => transform_f(&w, 12, n as f64 / y, transform_tol),
            })
            .collect::<Result<_>>()?;
        let b_neg: Vec<TransformValue> = (1..=n_neg)
            .into_par_iter()
            .map(|n| transform_d(&w, -(n as f64) / y, transform_tol))
            .collect::<Result<_>>()?;

        let tau_pos: Vec<f64> = (1..=n_pos).map(|n| table.value(n)).collect();
        let tau_neg: Vec<f64> = match table {
            Coefficients::Divisor(dt) => (1..=n_neg).map(|n| dt.value(n) as f64).collect(),
            Coefficients::Hecke(_) => Vec::new(),
        };

        // quadrature errors and the exponентial negative tail enter the
        // recorded error terms
        let quad_error = prefactor
            * 2.0
            * (pairwise_sum_by(b_pos.len(), &|i| tau_pos[i].abs() * b_pos[i].quad_error)
                + pairwise_sum_by(b_neg.len(), &|i| tau_neg[i] * b_neg[i].quad_error));
        if n_neg > 0 {
            // remaining negative mass under 4 K0(...) <= 4 e^{-z}: bounded by
            // a crude geometric majorant on d(n) e^{-4 pi sqrt(n delta / y)}
            let z = 4.0 * std::f64::consts::PI * ((n_neg as f64) * delta / y).sqrt();
            tail += prefactor * 2.0 * 8.0 * (n_neg as f64) * (n_neg as f64).ln().max(1.0) * (-z).exp();
        }

        Ok(DualSumEvaluator {
            p: cfg.p,
            prefactor,
            tau_pos,
            b_pos: b_pos.iter().map(|t| t.value).collect(),
            tau_neg,
            b_neg: b_neg.iter().map(|t| t.value).collect(),
            kl: KloostermanTable::new(cfg.p)?,
            tail_bound: tail,
            quad_error,
            tol_requested: tol,
        })
    }

    /// Dual value at residue a (1 <= a < p).
    pub fn eval(&self, a: u64) -> Result<DualValue> {
        if a == 0 || a >= self.p {
            return Err(Error::domain(format!("residue {a} outside 1..{}", self.p)));
        }
        let pos = pairwise_sum_by(self.b_pos.len(), &|i| {
            self.tau_pos[i] * self.b_pos[i] * self.kl.kl2(a as i64, (i + 1) as i64)
        });
        let neg = pairwise_sum_by(self.b_neg.len(), &|i| {
            self.tau_neg[i] * self.b_neg[i] * self.kl.kl2(a as i64, -((i + 1) as i64))
        });
        Ok(DualValue {
            value: self.prefactor * (pos + neg),
            tail_bound: self.tail_bound,
            quad_error: self.quad_error,
        })
    }

    /// Dual values at every residue 1..p-1.
    pub fn eval_all(&self) -> Result<Vec<DualValue>> {
        (1..self.p).map(|a| self.eval(a)).collect()
    }
}

/// `int_N^inf (log t + 2 gamma) t^{-7/4} dt / Y-free part`: the coefficient
/// density majorant for the positive tail.
fn tail_integral_d(n: f64) -> f64 {
    n.powf(-0.75) * ((n.ln() + 2.0 * EULER_GAMMA) / 0.75 + 1.0 / (0.75 * 0.75))
}

/// Dual-sum evaluation of E(a) via the Voronoi route. Convenience wrapper
/// over [`DualSumEvaluator`]; build the evaluator directly when several
/// residues are needed.
pub fn voronoi_dual_eval(
    cfg: &ProgressionConfig,
    table: &Coefficients,
    a: u64,
    tol: f64,
) -> Result<DualValue> {
    DualSumEvaluator::new(cfg, table, tol)?.eval(a)
}

/// Mean absolute gap between sharp and smoothed E-vectors at window scale
/// `delta`. Requires the regime bound `2p/X <= delta`.
pub fn sharp_smooth_gap(cfg: &ProgressionConfig, table: &Coefficients, delta: f64) -> Result<f64> {
    if 2.0 * cfg.p as f64 / cfg.x() > delta {
        return Err(Error::domain(format!(
            "delta {delta} below the regime bound 2p/X = {:.3e}",
            2.0 * cfg.p as f64 / cfg.x()
        )));
    }
    let sharp = sharp_progression_values(cfg, table)?;
    let mut smooth_cfg = cfg.clone();
    smooth_cfg.window = Some(WindowSpec::single(delta)?);
    let smooth = smoothed_progression_values(&smooth_cfg, table)?;
    Ok(pairwise_sum_by(sharp.values.len(), &|i| (sharp.values[i] - smooth.values[i]).abs())
        / sharp.values.len() as f64)
}

/// The sharp distribution experiment: E(a) over a in F_p^x as an empirical
/// distribution.
pub fn progression_experiment(
    cfg: &ProgressionConfig,
    table: &Coefficients,
) -> Result<(EmpiricalDistribution, ProgressionResult)> {
    let result = sharp_progression_values(cfg, table)?;
    let dist = EmpiricalDistribution::from_samples(result.values.clone())?;
    Ok((dist, result))
}

/// Exact mass conservation for sharp divisor mode:
/// `sum_a S(a) + (class 0) = sum_{n<=X} d(n)`.
pub fn mass_conservation_check(cfg: &ProgressionConfig, table: &DivisorTable) -> Result<bool> {
    let coeffs = Coefficients::Divisor(table);
    cfg.validate(&coeffs)?;
    let nmax = cfg.x() as u64;
    let mut class0 = 0u64;
    let mut n = cfg.p;
    while n <= nmax {
        class0 += table.value(n) as u64;
        n += cfg.p;
    }
    let result = sharp_progression_values(cfg, &coeffs)?;
    let total: u64 = result.sums_exact.as_ref().unwrap().iter().sum::<u64>() + class0;
    Ok(total == table.prefix(nmax))
}
