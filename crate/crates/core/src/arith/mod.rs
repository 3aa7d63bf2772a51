//! Exact arithmetic tables and summatory functions for the divisor function,
//! plus Hecke eigenvalue tables (submodule `hecke`).

mod hecke;
mod ntt;

pub use hecke::{
    build_hecke_table, estimate_cf, hecke_summatory, CfEstimate, HeckeTable,
    DEFAULT_HECKE_LIMIT, HECKE_TABLE_CEILING,
};

use crate::error::{Error, Result};
pub use crate::special::EULER_GAMMA;

/// Memory ceiling for dense divisor tables (10 bytes per entry).
pub const DIVISOR_TABLE_CEILING: u64 = 1 << 26;

/// Ceiling for the streaming d^2 summatory sieve.
pub const D2_SIEVE_CEILING: u64 = 1 << 32;

/// Sieved table of d(n) with prefix sums, immutable after construction.
#[derive(Debug, Clone)]
pub struct DivisorTable {
    limit: u64,
    values: Vec<u16>,
    prefix: Vec<u64>,
}

impl DivisorTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// d(n) for 1 <= n <= limit.
    #[inline]
    pub fn value(&self, n: u64) -> u32 {
        self.values[n as usize] as u32
    }

    /// Sum of d(m) for m <= n.
    #[inline]
    pub fn prefix(&self, n: u64) -> u64 {
        self.prefix[n as usize]
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn prefix_sums(&self) -> &[u64] {
        &self.prefix
    }

    pub(crate) fn from_parts(limit: u64, values: Vec<u16>, prefix: Vec<u64>) -> Self {
        DivisorTable { limit, values, prefix }
    }
}

/// Sieve d(n) for n <= limit by divisor pairs (a, b) with a <= b, so the
/// work is about N log sqrt(N) increments.
pub fn build_divisor_table(limit: u64) -> Result<DivisorTable> {
    if limit == 0 {
        return Err(Error::Capacity { what: "divisor table", requested: 0, limit: DIVISOR_TABLE_CEILING });
    }
    if limit > DIVISOR_TABLE_CEILING {
        return Err(Error::Capacity { what: "divisor table", requested: limit, limit: DIVISOR_TABLE_CEILING });
    }
    let n = limit as usize;
    let mut values = vec![0u16; n + 1];
    let r = isqrt(limit);
    for a in 1..=r {
        values[(a * a) as usize] += 1;
        let mut m = a * (a + 1);
        while m <= limit {
            values[m as usize] += 2;
            m += a;
        }
    }
    let mut prefix = vec![0u64; n + 1];
    let mut acc = 0u64;
    for i in 1..=n {
        acc += values[i] as u64;
        prefix[i] = acc;
    }
    Ok(DivisorTable { limit, values, prefix })
}

/// Integer square root: the largest r with r*r <= n.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |rr| rr > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |rr| rr <= n) {
        r += 1;
    }
    r
}

/// Exact `sum_{n <= x} d(n)` by the hyperbola method in O(sqrt x) time:
/// `2 sum_{k <= sqrt x} floor(x/k) - floor(sqrt x)^2`.
///
/// Takes a real `x` and uses `floor(x)` internally; returns 0 for x < 1.
pub fn divisor_summatory(x: f64) -> u64 {
    if x < 1.0 {
        return 0;
    }
    let n = x as u64;
    let r = isqrt(n);
    let mut s = 0u64;
    for k in 1..=r {
        s += n / k;
    }
    2 * s - r * r
}

/// x, remainder, and the main term of the divisor summatory function.
#[derive(Debug, Clone, Copy)]
pub struct SummatoryRemainder {
    pub x: f64,
    /// `sum_{n<=x} d(n) - x(log x + 2 gamma - 1)`
    pub remainder: f64,
    pub main_term: f64,
}

/// Remainder of the divisor summatory function at real x >= 1.
pub fn delta_remainder(x: f64) -> SummatoryRemainder {
    let exact = divisor_summatory(x) as f64;
    let main_term = x * (x.ln() + 2.0 * EULER_GAMMA - 1.0);
    SummatoryRemainder { x, remainder: exact - main_term, main_term }
}

/// Exact `sum_{n <= t} d^2(n)` by a segmented pair sieve; O(sqrt t) memory.
pub fn d2_summatory(t: f64) -> Result<u64> {
    Ok(d2_summatory_many(&[t])?[0])
}

/// The d^2 summatory function at several points in one sieve sweep.
/// Points may come in any order; the result matches the input order.
pub fn d2_summatory_many(ts: &[f64]) -> Result<Vec<u64>> {
    let mut targets: Vec<(usize, u64)> = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        if !t.is_finite() || t < 1.0 {
            return Err(Error::domain(format!("d2 summatory needs t >= 1, got {t}")));
        }
        let n = t as u64;
        if n > D2_SIEVE_CEILING {
            return Err(Error::Capacity { what: "d2 sieve", requested: n, limit: D2_SIEVE_CEILING });
        }
        targets.push((i, n));
    }
    targets.sort_by_key(|&(_, n)| n);
    let max_n = targets.last().unwrap().1;

    let block = 1usize << 20;
    let mut counts = vec![0u16; block];
    let mut out = vec![0u64; ts.len()];
    let mut acc = 0u64;
    let mut next = 0usize; // next target to satisfy
    let mut lo = 1u64;
    while lo <= max_n {
        let hi = (lo + block as u64 - 1).min(max_n); // inclusive
        let len = (hi - lo + 1) as usize;
        counts[..len].fill(0);
        let r = isqrt(hi);
        for a in 1..=r {
            // b >= a with lo <= a*b <= hi
            let b0 = ((lo + a - 1) / a).max(a);
            let mut m = a * b0;
            if m == a * a && m >= lo {
                counts[(m - lo) as usize] += 1;
                m += a;
            }
            while m <= hi {
                counts[(m - lo) as usize] += 2;
                m += a;
            }
        }
        // fold squares into the running sum, stopping at each target inside
        let mut pos = lo;
        while next < targets.len() && targets[next].1 <= hi {
            let (idx, n) = targets[next];
            while pos <= n {
                let c = counts[(pos - lo) as usize] as u64;
                acc += c * c;
                pos += 1;
            }
            out[idx] = acc;
            next += 1;
        }
        while pos <= hi {
            let c = counts[(pos - lo) as usize] as u64;
            acc += c * c;
            pos += 1;
        }
        lo = hi + 1;
    }
    Ok(out)
}

/// Least-squares fit of `sum_{n<=t} d^2(n)` to
/// `t (a3 log^3 t + a2 log^2 t + a1 log t + a0)`; returns `a3`.
///
/// The grid must hold at least 4 points spanning at least two decades.
/// No accuracy promise is made for grids that stay below ~1e5.
pub fn fit_c3(t_grid: &[f64]) -> Result<f64> {
    if t_grid.len() < 4 {
        return Err(Error::Fit(format!("need >= 4 grid points, got {}", t_grid.len())));
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &t in t_grid {
        lo = lo.min(t);
        hi = hi.max(t);
    }
    if !(hi / lo >= 100.0) {
        return Err(Error::Fit(format!("grid spans {:.2} decades, need >= 2", (hi / lo).log10())));
    }
    let sums = d2_summatory_many(t_grid)?;
    // normal equations for y = S(t)/t against powers of u = log t
    let mut ata = [[0.0f64; 4]; 4];
    let mut atb = [0.0f64; 4];
    for (&t, &s) in t_grid.iter().zip(&sums) {
        let u = t.ln();
        let row = [u * u * u, u * u, u, 1.0];
        let y = s as f64 / t;
        for i in 0..4 {
            for j in 0..4 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    solve4(ata, atb).map(|a| a[0]).ok_or_else(|| Error::Fit("degenerate design matrix".into()))
}

/// 4x4 linear solve with partial pivoting; None when singular.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    let scale: f64 = a.iter().flatten().fold(0.0f64, |m, &v| m.max(v.abs()));
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 4];
    for row in (0..4).rev() {
        let mut s = b[row];
        for k in row + 1..4 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_small_values() {
        let t = build_divisor_table(12).unwrap();
        assert_eq!(t.value(1), 1);
        assert_eq!(t.value(12), 6);
        let t1 = build_divisor_table(1).unwrap();
        assert_eq!(t1.values()[1..], [1]);
        assert_eq!(t1.prefix_sums()[1..], [1]);
        let t10 = build_divisor_table(10).unwrap();
        assert_eq!(t10.prefix(10), 27); // 1+2+2+3+2+4+2+4+3+4
    }

    #[test]
    fn table_invariants_by_trial_division() {
        let n = 3000u64;
        let t = build_divisor_table(n).unwrap();
        for m in 1..=n {
            let direct = (1..=m).filter(|d| m % d == 0).count() as u32;
            assert_eq!(t.value(m), direct, "d({m})");
            assert_eq!(t.prefix(m) - t.prefix(m - 1), t.value(m) as u64);
        }
        for p in [2u64, 3, 5, 7, 11, 13, 971, 997, 2999] {
            assert_eq!(t.value(p), 2);
        }
    }

    #[test]
    fn capacity_errors() {
        assert!(build_divisor_table(0).is_err());
        assert!(build_divisor_table(DIVISOR_TABLE_CEILING + 1).is_err());
    }

    #[test]
    fn hyperbola_matches_sieve_exhaustively() {
        let n = 100_000u64;
        let t = build_divisor_table(n).unwrap();
        for x in 1..=n {
            if x <= 1000 || x % 97 == 0 {
                assert_eq!(divisor_summatory(x as f64), t.prefix(x), "x = {x}");
            }
        }
        assert_eq!(divisor_summatory(n as f64), t.prefix(n));
    }

    #[test]
    fn hyperbola_small_and_floor_convention() {
        assert_eq!(divisor_summatory(1.0), 1);
        assert_eq!(divisor_summatory(10.0), 27);
        assert_eq!(divisor_summatory(10.9), 27);
        assert_eq!(divisor_summatory(0.5), 0);
    }

    #[test]
    fn million_prefix_pinned_by_sieve() {
        let t = build_divisor_table(1_000_000).unwrap();
        assert_eq!(divisor_summatory(1e6), t.prefix(1_000_000));
    }

    #[test]
    fn delta_remainder_examples() {
        let r = delta_remainder(10.0);
        assert!((r.remainder - 2.4298358).abs() < 1e-6, "{}", r.remainder);
        let r1 = delta_remainder(1.0);
        assert!((r1.remainder - (1.0 - (2.0 * EULER_GAMMA - 1.0))).abs() < 1e-12);
        assert!((r1.remainder - (-0.1544313)).abs() < 1e-6);
    }

    #[test]
    fn delta_remainder_envelope() {
        // |Delta(x)| <= 10 x^{1/3} on a log-spread sample (regression bound)
        let mut x = 1e3;
        while x <= 1e8 {
            let r = delta_remainder(x);
            assert!(r.remainder.abs() <= 10.0 * x.powf(1.0 / 3.0), "x={x} delta={}", r.remainder);
            x *= 3.7;
        }
    }

    #[test]
    fn d2_small_values() {
        assert_eq!(d2_summatory(1.0).unwrap(), 1);
        assert_eq!(d2_summatory(2.0).unwrap(), 5);
        assert_eq!(d2_summatory(10.0).unwrap(), 83);
    }

    #[test]
    fn d2_matches_table() {
        let n = 30_000u64;
        let t = build_divisor_table(n).unwrap();
        let direct: u64 = (1..=n).map(|m| (t.value(m) as u64).pow(2)).sum();
        assert_eq!(d2_summatory(n as f64).unwrap(), direct);
        // many-point sweep agrees with single calls, in scrambled order
        let pts = [7.0, 29999.0, 2.0, 12345.0];
        let many = d2_summatory_many(&pts).unwrap();
        for (i, &p) in pts.iter().enumerate() {
            assert_eq!(many[i], d2_summatory(p).unwrap());
        }
    }

    #[test]
    fn fit_rejects_degenerate_grids() {
        assert!(fit_c3(&[1e5, 1e5, 1e5, 1e5]).is_err());
        assert!(fit_c3(&[1e5, 1e6]).is_err());
        assert!(fit_c3(&[1e5, 2e5, 3e5, 4e5]).is_err());
    }

    #[test]
    fn fit_small_grid_regression() {
        // no accuracy promise at small t; recorded as a regression baseline
        let a3 = fit_c3(&[10.0, 100.0, 1000.0, 10000.0]).unwrap();
        assert!(a3.is_finite());
        assert!((a3 - 0.0485).abs() < 0.02, "small-t fit drifted: {a3}");
    }

    #[test]
    fn isqrt_edges() {
        for n in 0..2000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt(u64::MAX), (1u64 << 32) - 1);
    }
}
