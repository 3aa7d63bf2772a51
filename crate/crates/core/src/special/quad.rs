//! Adaptive Simpson quadrature with oscillation-aware pre-partitioning.

use crate::error::{Error, Result};

/// Outcome of a quadrature call.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: f64,
    /// Accumulated Richardson error estimate (conservative, absolute).
    pub error_estimate: f64,
    pub evaluations: u64,
}

const MAX_DEPTH: u32 = 45;
const MAX_PANELS: usize = 4_000_000;

struct Worker<'a> {
    f: &'a dyn Fn(f64) -> f64,
    evaluations: u64,
    error: f64,
    exhausted: bool,
}

impl Worker<'_> {
    fn eval(&mut self, x: f64) -> f64 {
        self.evaluations += 1;
        (self.f)(x)
    }

    // one panel [a,b] with cached endpoint/midpoint values and its Simpson sum
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        fa: f64,
        m: f64,
        fm: f64,
        b: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm);
        let frm = self.eval(rm);
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let refined = left + right;
        let diff = refined - whole;
        if depth == 0 {
            self.exhausted = true;
            self.error += diff.abs();
            return refined;
        }
        if diff.abs() <= 15.0 * tol {
            self.error += diff.abs() / 15.0;
            return refined + diff / 15.0;
        }
        self.refine(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1)
            + self.refine(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1)
    }

    fn panel(&mut self, a: f64, b: f64, tol: f64) -> f64 {
        let m = 0.5 * (a + b);
        let fa = self.eval(a);
        let fm = self.eval(m);
        let fb = self.eval(b);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        self.refine(a, fa, m, fm, b, fb, whole, tol, MAX_DEPTH)
    }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_quad(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    adaptive_quad_osc(f, a, b, tol, b - a)
}

/// Integrate an oscillatory `f`: the interval is pre-split into panels no
/// wider than `osc_len / 2` (at least eight points per oscillation before
/// any adaptive refinement), then each panel is refined independently with
/// a proportional share of the tolerance.
pub fn adaptive_quad_osc(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    osc_len: f64,
) -> Result<QuadratureResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("bad interval [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance {tol} must be positive")));
    }
    if !(osc_len > 0.0) {
        return Err(Error::domain(format!(
            "oscillation scale {osc_len} must be positive"
        )));
    }
    let width = b - a;
    let n_panels = ((width / (0.5 * osc_len)).ceil() as usize).clamp(1, MAX_PANELS);
    let mut worker = Worker {
        f: &f,
        evaluations: 0,
        error: 0.0,
        exhausted: false,
    };
    let panel_tol = tol / n_panels as f64;
    let mut sum = 0.0;
    for i in 0..n_panels {
        let pa = a + width * i as f64 / n_panels as f64;
        let pb = a + width * (i + 1) as f64 / n_panels as f64;
        sum += worker.panel(pa, pb, panel_tol);
    }
    let result = QuadratureResult {
        value: sum,
        error_estimate: worker.error,
        evaluations: worker.evaluations,
    };
    if worker.exhausted && worker.error > 8.0 * tol {
        return Err(Error::Accuracy {
            context: "adaptive quadrature ran out of subdivisions",
            estimate: result.value,
            error_bound: result.error_estimate,
        });
    }
    Ok(result)
}
