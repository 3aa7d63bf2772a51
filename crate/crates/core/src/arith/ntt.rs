//! Exact integer convolution by number-theoretic transforms over two 62-bit
//! primes with CRT reconstruction into balanced i128.
//!
//! Capacity: results are exact while every true coefficient satisfies
//! |c| < P1*P2/2 ~ 4.07e36, which covers eta-power coefficients through
//! series length ~2e6 (Deligne-type growth n^{11/2+eps}).

/// 29 * 2^57 + 1, primitive root 3.
const P1: u64 = 4_179_340_454_199_820_289;
/// 27 * 2^56 + 1, primitive root 5.
const P2: u64 = 1_945_555_039_024_054_273;
const G1: u64 = 3;
const G2: u64 = 5;

/// Montgomery arithmetic modulo a fixed odd 62-bit prime.
#[derive(Clone, Copy)]
struct Mont {
    m: u64,
    neg_inv: u64, // -m^{-1} mod 2^64
    r2: u64,      // 2^128 mod m
}

impl Mont {
    fn new(m: u64) -> Self {
        // Newton iteration for m^{-1} mod 2^64
        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        }
        let r = (u128::from(u64::MAX) + 1) % u128::from(m); // 2^64 mod m
        let r2 = (r * r % u128::from(m)) as u64;
        Mont { m, neg_inv: inv.wrapping_neg(), r2 }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let q = (t as u64).wrapping_mul(self.neg_inv);
        let a = ((t + u128::from(q) * u128::from(self.m)) >> 64) as u64;
        if a >= self.m {
            a - self.m
        } else {
            a
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(u128::from(a) * u128::from(b))
    }

    #[inline]
    fn to_mont(&self, a: u64) -> u64 {
        self.mul(a, self.r2)
    }

    #[inline]
    fn from_mont(&self, a: u64) -> u64 {
        self.redc(u128::from(a))
    }

    fn pow(&self, base_mont: u64, mut e: u64) -> u64 {
        let mut acc = self.to_mont(1);
        let mut b = base_mont;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }
}

/// In-place iterative radix-2 NTT (DIT with bit-reversed input ordering).
fn ntt(mont: &Mont, a: &mut [u64], root_mont: u64) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    // bit reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let w_len = mont.pow(root_mont, ((mont.m - 1) / len as u64) as u64);
        for start in (0..n).step_by(len) {
            let mut w = mont.to_mont(1);
            for k in 0..len / 2 {
                let u = a[start + k];
                let v = mont.mul(a[start + k + len / 2], w);
                a[start + k] = mont.add(u, v);
                a[start + k + len / 2] = mont.sub(u, v);
                w = mont.mul(w, w_len);
            }
        }
        len <<= 1;
    }
}

fn square_mod(coeffs: &[i128], out_len: usize, p: u64, g: u64) -> Vec<u64> {
    let mont = Mont::new(p);
    let conv_len = (2 * coeffs.len() - 1).next_power_of_two();
    let mut a = vec![0u64; conv_len];
    for (i, &c) in coeffs.iter().enumerate() {
        a[i] = mont.to_mont(c.rem_euclid(i128::from(p)) as u64);
    }
    let g_mont = mont.to_mont(g);
    ntt(&mont, &mut a, g_mont);
    for x in a.iter_mut() {
        *x = mont.mul(*x, *x);
    }
    // inverse transform with g^{-1} = g^{p-2}, then scale by n^{-1}
    let g_inv = mont.pow(g_mont, p - 2);
    ntt(&mont, &mut a, g_inv);
    let n_inv = mont.pow(mont.to_mont(conv_len as u64), p - 2);
    a.truncate(out_len);
    for x in a.iter_mut() {
        *x = mont.from_mont(mont.mul(*x, n_inv));
    }
    a
}

/// Exact square of an integer power series, truncated to `out_len` terms.
pub fn square_series(coeffs: &[i128], out_len: usize) -> Vec<i128> {
    assert!(!coeffs.is_empty());
    let r1 = square_mod(coeffs, out_len, P1, G1);
    let r2 = square_mod(coeffs, out_len, P2, G2);
    let p1 = u128::from(P1);
    let p2 = u128::from(P2);
    let big = p1 * p2;
    let half = big / 2;
    // inv of P1 mod P2 by Fermat
    let m2 = Mont::new(P2);
    let p1_inv = m2.from_mont(m2.pow(m2.to_mont(P1 % P2), P2 - 2));
    r1.iter()
        .zip(&r2)
        .map(|(&a, &b)| {
            let d = if b >= a % P2 { b - a % P2 } else { b + P2 - a % P2 };
            let c = (u128::from(d) * u128::from(p1_inv)) % p2;
            let x = u128::from(a) + p1 * c; // in [0, P1*P2)
            if x > half {
                -((big - x) as i128)
            } else {
                x as i128
            }
        })
        .collect()
}
