//! Exact Kloosterman sums `S(a,b;c) = sum_{(x,c)=1} e((xa + x_bar b)/c)`,
//! their sqrt(c)-normalization, and the orthogonality average over the
//! first argument.
//!
//! Sums are evaluated by direct summation with batched modular inverses.
//! Real-valuedness is built in: the terms at x and -x are conjugate, so the
//! sum collapses to cosines and no imaginary part ever enters.

use crate::error::{Error, Result};

/// Largest modulus accepted for direct summation.
pub const DIRECT_SUM_CEILING: u64 = 10_000_000;

/// Largest prime accepted by the exhaustive orthogonality path.
pub const ORTHOGONALITY_CEILING: u64 = 10_000;

/// Deterministic Miller-Rabin, certified for n below 3.3e14.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Range limit of the primality certificate for the witness set used here.
pub const PRIMALITY_CERTIFIED_BELOW: u64 = 330_000_000_000_000;

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended gcd inverse of a mod m, for (a, m) = 1, m >= 2.
fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(m as i128) as u64
}

/// Exact-to-rounding Kloosterman sum, any integers a, b, modulus c >= 1.
pub fn kloosterman_sum(a: i64, b: i64, c: u64) -> Result<f64> {
    if c == 0 {
        return Err(Error::domain("kloosterman modulus must be positive"));
    }
    if c > DIRECT_SUM_CEILING {
        return Err(Error::Capacity { what: "kloosterman direct sum", requested: c, limit: DIRECT_SUM_CEILING });
    }
    if c == 1 {
        return Ok(1.0);
    }
    let ar = a.rem_euclid(c as i64) as u64;
    let br = b.rem_euclid(c as i64) as u64;
    let two_pi_over_c = 2.0 * std::f64::consts::PI / c as f64;

    // batch inversion in chunks: prefix products, one extended-gcd
    // inversion, unwind
    const CHUNK: usize = 1 << 14;
    let mut units: Vec<u64> = Vec::with_capacity(CHUNK);
    let mut prods: Vec<u64> = Vec::with_capacity(CHUNK);
    let mut partials: Vec<f64> = Vec::new();
    let mut chunk_sum = 0.0f64;
    let mut x = 1u64;
    while x < c {
        units.clear();
        prods.clear();
        let mut run = 1u64;
        while x < c && units.len() < CHUNK {
            if gcd(x, c) == 1 {
                units.push(x);
                run = mul_mod(run, x, c);
                prods.push(run);
            }
            x += 1;
        }
        if units.is_empty() {
            continue;
        }
        let mut inv_run = inv_mod(run, c);
        for i in (0..units.len()).rev() {
            let inv_x = if i == 0 { inv_run } else { mul_mod(inv_run, prods[i - 1], c) };
            inv_run = mul_mod(inv_run, units[i], c);
            let r = (mul_mod(units[i], ar, c) + mul_mod(inv_x, br, c)) % c;
            chunk_sum += (two_pi_over_c * r as f64).cos();
        }
        partials.push(chunk_sum);
        chunk_sum = 0.0;
    }
    Ok(crate::stats::pairwise_sum(&partials))
}

/// Normalized sum `S(a,b;p)/sqrt(p)` for prime p.
pub fn kl2(a: i64, b: i64, p: u64) -> Result<f64> {
    check_prime(p)?;
    Ok(kloosterman_sum(a, b, p)? / (p as f64).sqrt())
}

fn check_prime(p: u64) -> Result<()> {
    if p >= PRIMALITY_CERTIFIED_BELOW {
        return Err(Error::domain(format!("{p} is beyond the certified primality range")));
    }
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(())
}

/// All normalized Kloosterman sums for a fixed prime, O(p^2) once and O(1)
/// per lookup through the scaling `S(a,b;p) = S(1, ab; p)`.
pub struct KloostermanTable {
    p: u64,
    /// vals[t] = S(1, t; p) / sqrt(p)
    vals: Vec<f64>,
}

impl KloostermanTable {
    pub fn new(p: u64) -> Result<Self> {
        check_prime(p)?;
        if p > ORTHOGONALITY_CEILING {
            return Err(Error::Capacity { what: "kloosterman table", requested: p, limit: ORTHOGONALITY_CEILING });
        }
        let n = p as usize;
        // inverses by the standard linear recurrence, then one cosine table
        let mut inv = vec![0u64; n];
        if n > 1 {
            inv[1] = 1;
        }
        for i in 2..n {
            inv[i] = mul_mod(p - p / i as u64, inv[(p % i as u64) as usize], p);
        }
        let two_pi_over_p = 2.0 * std::f64::consts::PI / p as f64;
        let cos_tab: Vec<f64> = (0..n).map(|r| (two_pi_over_p * r as f64).cos()).collect();
        let sqrt_p = (p as f64).sqrt();
        let vals = (0..n)
            .map(|t| {
                let mut s = 0.0;
                for x in 1..n {
                    s += cos_tab[((x as u64 + mul_mod(t as u64, inv[x], p)) % p) as usize];
                }
                s / sqrt_p
            })
            .collect();
        Ok(KloostermanTable { p, vals })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Kl2(a, b; p) by table lookup.
    #[inline]
    pub fn kl2(&self, a: i64, b: i64) -> f64 {
        let ar = a.rem_euclid(self.p as i64) as u64;
        let br = b.rem_euclid(self.p as i64) as u64;
        self.vals[mul_mod(ar, br, self.p) as usize]
    }
}

/// `(1/(p-1)) sum_{1<=a<p} Kl2(a,m;p) Kl2(a,n;p)` by direct computation.
pub fn orthogonality_average(p: u64, m: i64, n: i64) -> Result<f64> {
    let table = KloostermanTable::new(p)?;
    let sum = crate::stats::pairwise_sum_by((p - 1) as usize, &|i| {
        let a = (i + 1) as i64;
        table.kl2(a, m) * table.kl2(a, n)
    });
    Ok(sum / (p - 1) as f64)
}
