//! Integer helpers shared by the exact layers: gcds, square roots,
//! bounded trial factorization and checked `i128` arithmetic.

use crate::error::{Error, Result};

#[inline]
pub fn ck_mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

#[inline]
pub fn ck_add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow)
}

#[inline]
pub fn ck_sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i128
}

pub fn lcm(a: i128, b: i128) -> Result<i128> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    ck_mul((a / gcd(a, b)).abs(), b.abs())
}

/// Returns `(g, s, t)` with `s*a + t*b = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n as u128);
    r * r == n as u128
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (g, s, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| s.rem_euclid(m))
}

/// Primes up to `n` inclusive.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &p)| p.then_some(k as u64))
        .collect()
}

/// Result of trial division of `|n|` by all primes up to a bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub factors: Vec<(u128, u32)>,
    /// Part of `|n|` without prime factors below the bound.
    pub cofactor: u128,
}

impl Factorization {
    /// Primes `q` with `q^2 | n`, including a prime square root of the
    /// cofactor. `Err(Incomplete)` when the cofactor may still hide a square
    /// factor that trial division could not reach.
    pub fn square_primes(&self, bound: u64) -> Result<Vec<u128>> {
        let mut out: Vec<u128> = self
            .factors
            .iter()
            .filter(|(_, e)| *e >= 2)
            .map(|(p, _)| *p)
            .collect();
        let r = self.cofactor;
        if r > 1 {
            let s = isqrt(r);
            let b = bound as u128;
            if s * s == r {
                // s has no factor <= bound; s is prime once s < bound^2
                if s <= b.saturating_mul(b) && s <= u64::MAX as u128 && is_prime(s as u64) {
                    out.push(s);
                } else {
                    return Err(Error::Incomplete { bound });
                }
            } else if r > b.saturating_mul(b).saturating_mul(b) {
                // r could be q^2 * s with q > bound
                return Err(Error::Incomplete { bound });
            }
            // r < bound^3 with no factor <= bound has at most two prime
            // factors, and r is not a square, so no square divides it.
        }
        out.sort_unstable();
        Ok(out)
    }
}

pub fn trial_factor(n: i128, bound: u64) -> Factorization {
    let mut m = n.unsigned_abs();
    let mut factors = Vec::new();
    if m == 0 {
        return Factorization {
            factors,
            cofactor: 0,
        };
    }
    let mut d: u128 = 2;
    while d <= bound as u128 && d * d <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 && (m <= (bound as u128) || (d * d > m)) {
        factors.push((m, 1));
        m = 1;
    }
    Factorization {
        factors,
        cofactor: m,
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(12, 18), (-7, 3), (0, 5), (5, 0), (-4, -6)] {
            let (g, s, t) = ext_gcd(a, b);
            assert_eq!(g, gcd(a, b));
            assert_eq!(s * a + t * b, g);
        }
    }

    #[test]
    fn square_parts() {
        let f = trial_factor(148, 1000);
        assert_eq!(f.square_primes(1000).unwrap(), vec![2]);
        let f = trial_factor(81, 1000);
        assert_eq!(f.square_primes(1000).unwrap(), vec![3]);
        // 1009^2 * 7 with bound 100: cofactor 1009^2 is a prime square
        let f = trial_factor(1009 * 1009 * 7, 100);
        assert_eq!(f.square_primes(100).unwrap(), vec![1009]);
        let f = trial_factor(1009i128 * 1009 * 1013, 100);
        assert!(matches!(
            f.square_primes(100),
            Err(Error::Incomplete { .. })
        ));
    }

    #[test]
    fn primality() {
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
