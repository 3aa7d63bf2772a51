//! Empirical distributions, Kolmogorov-Smirnov distance to the standard
//! normal, and raw sample moments.

use crate::error::{Error, Result};
use crate::special::{normal_cdf, normal_pdf};
use std::io::Write;

/// Order-independent sum: recursive pairwise reduction. Keeps relative error
/// near machine precision on large sample sets and gives bit-identical
/// results for any fixed input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Pairwise reduction of `f(i)` over `0..n` without allocating.
pub fn pairwise_sum_by(n: usize, f: &dyn Fn(usize) -> f64) -> f64 {
    fn go(lo: usize, hi: usize, f: &dyn Fn(usize) -> f64) -> f64 {
        if hi - lo <= 32 {
            let mut s = 0.0;
            for i in lo..hi {
                s += f(i);
            }
            return s;
        }
        let mid = lo + (hi - lo) / 2;
        go(lo, mid, f) + go(mid, hi, f)
    }
    go(0, n, f)
}

/// A sorted sample set.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Sorts and stores the samples. Errors on an empty set or any
    /// non-finite value.
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("sample set contains a non-finite value"));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDistribution { samples })
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Kolmogorov-Smirnov distance to the standard normal:
    /// `D = max_i max(i/n - Phi(x_i), Phi(x_i) - (i-1)/n)`.
    pub fn ks_to_normal(&self) -> f64 {
        let n = self.samples.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in self.samples.iter().enumerate() {
            let cdf = normal_cdf(x);
            d = d.max((i + 1) as f64 / n - cdf).max(cdf - i as f64 / n);
        }
        d
    }

    /// Raw moments `(1/n) sum x_i^m` for `m = 1..=max_m`.
    pub fn sample_moments(&self, max_m: u32) -> Vec<f64> {
        let n = self.samples.len();
        (1..=max_m)
            .map(|m| pairwise_sum_by(n, &|i| self.samples[i].powi(m as i32)) / n as f64)
            .collect()
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.samples) / self.samples.len() as f64
    }

    /// Population variance (divides by n).
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        pairwise_sum_by(self.samples.len(), &|i| {
            let d = self.samples[i] - m;
            d * d
        }) / self.samples.len() as f64
    }

    /// Histogram rows `(binLeft, binRight, count, empiricalDensity,
    /// normalDensity)`, bin width by the Freedman-Diaconis rule.
    pub fn histogram(&self) -> Vec<(f64, f64, u64, f64, f64)> {
        let n = self.samples.len();
        let q1 = self.samples[n / 4];
        let q3 = self.samples[(3 * n) / 4];
        let lo = self.samples[0];
        let hi = self.samples[n - 1];
        let iqr = (q3 - q1).max(f64::MIN_POSITIVE);
        let width = (2.0 * iqr / (n as f64).cbrt()).max((hi - lo) / 1000.0);
        let bins = (((hi - lo) / width).ceil() as usize).clamp(1, 100_000);
        let mut counts = vec![0u64; bins];
        for &x in &self.samples {
            let b = (((x - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        counts
            .iter()
            .enumerate()
            .map(|(b, &c)| {
                let left = lo + b as f64 * width;
                let right = left + width;
                let density = c as f64 / (n as f64 * width);
                (left, right, c, density, normal_pdf(0.5 * (left + right)))
            })
            .collect()
    }

    pub fn write_histogram_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "binLeft,binRight,count,empiricalDensity,normalDensity")?;
        for (l, r, c, d, nd) in self.histogram() {
            writeln!(w, "{l},{r},{c},{d},{nd}")?;
        }
        Ok(())
    }
}
