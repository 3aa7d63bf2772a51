//! Fourier coefficients of the weight-12 level-1 cusp form, exactly.
//!
//! The coefficient series is the 8th power of the sparse series
//! `sum_j (-1)^j (2j+1) q^{j(j+1)/2}` (a cube of the eta product), shifted
//! by one. The first squaring is sparse*sparse; the two dense squarings run
//! through the exact NTT. Coefficients are stored as arbitrary-precision
//! integers; normalization to n^{-(k-1)/2} happens once, in doubles.

use super::ntt;
use crate::error::{Error, Result};
use num_bigint::BigInt;

pub const DEFAULT_HECKE_LIMIT: u64 = 1_000_000;

/// Above this the exact coefficients outgrow both the two-prime CRT headroom
/// and the signed-128-bit cache encoding.
pub const HECKE_TABLE_CEILING: u64 = 2_000_000;

/// Exact and normalized Hecke eigenvalues up to a limit, with prefix sums of
/// the normalized values. Immutable after construction.
#[derive(Debug, Clone)]
pub struct HeckeTable {
    weight: u32,
    limit: u64,
    exact: Vec<BigInt>,
    normalized: Vec<f64>,
    prefix_normalized: Vec<f64>,
}

impl HeckeTable {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// a_f(n) as an exact integer, 1 <= n <= limit.
    pub fn exact(&self, n: u64) -> &BigInt {
        &self.exact[n as usize]
    }

    /// rho_f(n) = a_f(n) / n^{(k-1)/2}.
    #[inline]
    pub fn normalized(&self, n: u64) -> f64 {
        self.normalized[n as usize]
    }

    /// A_f(n) = sum_{m<=n} rho_f(m).
    #[inline]
    pub fn prefix_normalized(&self, n: u64) -> f64 {
        self.prefix_normalized[n as usize]
    }

    pub fn normalized_values(&self) -> &[f64] {
        &self.normalized
    }

    pub fn exact_values(&self) -> &[BigInt] {
        &self.exact
    }

    pub fn prefix_values(&self) -> &[f64] {
        &self.prefix_normalized
    }

    pub(crate) fn from_parts(
        weight: u32,
        limit: u64,
        exact: Vec<BigInt>,
        normalized: Vec<f64>,
        prefix_normalized: Vec<f64>,
    ) -> Self {
        HeckeTable { weight, limit, exact, normalized, prefix_normalized }
    }
}

/// Build the coefficient table for the weight-12 level-1 form. Other weights
/// are rejected: level 1 has no cusp form below weight 12, and higher-weight
/// generators are out of scope.
pub fn build_hecke_table(weight: u32, limit: u64) -> Result<HeckeTable> {
    if weight != 12 {
        return Err(Error::domain(format!(
            "unsupported weight {weight}: only the weight-12 level-1 form is implemented"
        )));
    }
    if limit == 0 || limit > HECKE_TABLE_CEILING {
        return Err(Error::Capacity {
            what: "hecke table",
            requested: limit,
            limit: HECKE_TABLE_CEILING,
        });
    }
    let len = limit as usize; // series terms 0..len-1 hold a_f(1..=limit)

    // sparse cube of the eta series: index j(j+1)/2, value (-1)^j (2j+1)
    let mut sparse: Vec<(usize, i64)> = Vec::new();
    let mut j = 0u64;
    while j * (j + 1) / 2 < limit {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        sparse.push(((j * (j + 1) / 2) as usize, sign * (2 * j as i64 + 1)));
        j += 1;
    }

    // 6th power of eta: square the sparse series directly
    let mut pow6 = vec![0i64; len];
    for (i, &(e1, c1)) in sparse.iter().enumerate() {
        if 2 * e1 < len {
            pow6[2 * e1] += c1 * c1;
        }
        for &(e2, c2) in &sparse[i + 1..] {
            let e = e1 + e2;
            if e >= len {
                break;
            }
            pow6[e] += 2 * c1 * c2;
        }
    }

    let pow6: Vec<i128> = pow6.into_iter().map(i128::from).collect();
    let pow12 = ntt::square_series(&pow6, len);
    let pow24 = ntt::square_series(&pow12, len);

    let mut exact = Vec::with_capacity(len + 1);
    exact.push(BigInt::from(0)); // unused slot 0
    for n in 1..=len {
        exact.push(BigInt::from(pow24[n - 1]));
    }

    let mut normalized = vec![0.0f64; len + 1];
    let mut prefix_normalized = vec![0.0f64; len + 1];
    let exponent = (weight as f64 - 1.0) / 2.0;
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for n in 1..=len {
        let rho = pow24[n - 1] as f64 / (n as f64).powf(exponent);
        normalized[n] = rho;
        let y = rho - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        prefix_normalized[n] = acc;
    }

    Ok(HeckeTable { weight, limit, exact, normalized, prefix_normalized })
}

/// A_f(x) = sum_{n <= x} rho_f(n), floor semantics; 0 for x < 1.
pub fn hecke_summatory(table: &HeckeTable, x: f64) -> Result<f64> {
    if x < 1.0 {
        return Ok(0.0);
    }
    let n = x as u64;
    if n > table.limit {
        return Err(Error::Capacity { what: "hecke summatory", requested: n, limit: table.limit });
    }
    Ok(table.prefix_normalized(n))
}

/// Empirical second-moment constant with a low-precision flag.
#[derive(Debug, Clone, Copy)]
pub struct CfEstimate {
    pub value: f64,
    /// set when X < 1e3, where the running value is still unsettled
    pub low_precision: bool,
}

/// `sum_{n <= X} rho_f(n)^2 / X` — the working second-moment constant of
/// the form.
pub fn estimate_cf(table: &HeckeTable, x: f64) -> Result<CfEstimate> {
    if x < 1.0 {
        return Err(Error::domain(format!("cf estimate needs X >= 1, got {x}")));
    }
    let n = x as u64;
    if n > table.limit {
        return Err(Error::Capacity { what: "cf estimate", requested: n, limit: table.limit });
    }
    let sum = crate::stats::pairwise_sum_by(n as usize, &|i| {
        let r = table.normalized((i + 1) as u64);
        r * r
    });
    Ok(CfEstimate { value: sum / x, low_precision: x < 1e3 })
}
