//! Closed intervals with exact rational endpoints.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq)]
pub struct RealInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

pub fn rat(n: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact rational value of a finite double.
pub fn rat_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // very large numerator/denominator pairs: scale first
        let n = q.numer().bits() as i64;
        let d = q.denom().bits() as i64;
        let shift = (n - d).clamp(-1000, 1000);
        let scaled = if shift >= 0 {
            q / BigRational::from_integer(BigInt::one() << shift as usize)
        } else {
            q * BigRational::from_integer(BigInt::one() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    })
}

/// Decimal rendering with `digits` significant digits, e.g. `3.59604e+0`.
/// The last digit is truncated, not rounded.
pub fn fmt_sig(q: &BigRational, digits: usize) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let neg = q.is_negative();
    let q = q.abs();
    let approx = rat_to_f64(&q);
    let mut e = approx.log10().floor() as i64;
    // scaled = q * 10^(digits-1-e) must land in [10^(digits-1), 10^digits)
    let ten = BigInt::from(10);
    let lo = ten.pow(digits as u32 - 1);
    let hi = ten.pow(digits as u32);
    let mut scaled;
    loop {
        let k = digits as i64 - 1 - e;
        let s = if k >= 0 {
            &q * BigRational::from_integer(ten.pow(k as u32))
        } else {
            &q / BigRational::from_integer(ten.pow((-k) as u32))
        };
        scaled = s.to_integer();
        if scaled < lo {
            e -= 1;
        } else if scaled >= hi {
            e += 1;
        } else {
            break;
        }
    }
    let s = scaled.to_string();
    let (head, tail) = s.split_at(1);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(head);
    if !tail.is_empty() {
        out.push('.');
        out.push_str(tail);
    }
    out.push_str(&format!("e{e:+}"));
    out
}

impl RealInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RealInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RealInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Width < 2^(−bits).
    pub fn narrower_than_bits(&self, bits: u32) -> bool {
        let w = self.width();
        w * BigRational::from_integer(BigInt::one() << bits as usize) < BigRational::one()
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / rat(2)
    }

    pub fn mid_f64(&self) -> f64 {
        rat_to_f64(&self.mid())
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        x.is_finite() && self.contains(&rat_from_f64(x))
    }

    /// Sign of every point of the interval, or `None` if it contains zero.
    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_positive() {
            Some(Sign::Plus)
        } else if self.hi.is_negative() {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    /// Certified comparison with a rational; `None` if `x` lies inside.
    pub fn cmp_rat(&self, x: &BigRational) -> Option<Ordering> {
        if &self.hi < x {
            Some(Ordering::Less)
        } else if &self.lo > x {
            Some(Ordering::Greater)
        } else if self.lo == self.hi {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        RealInterval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Self) -> Self {
        RealInterval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> Self {
        RealInterval::new(-&self.hi, -&self.lo)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RealInterval::new(lo, hi)
    }

    pub fn abs(&self) -> Self {
        match self.sign() {
            Some(Sign::Plus) => self.clone(),
            Some(_) => self.neg(),
            None => {
                let m = std::cmp::max(-&self.lo, self.hi.clone());
                RealInterval::new(BigRational::zero(), m)
            }
        }
    }

    pub fn square(&self) -> Self {
        let a = self.abs();
        RealInterval::new(&a.lo * &a.lo, &a.hi * &a.hi)
    }

    /// `None` when the divisor contains zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        o.sign()?;
        let inv = RealInterval::new(o.hi.recip(), o.lo.recip());
        Some(self.mul(&inv))
    }

    pub fn disjoint(&self, o: &Self) -> bool {
        self.hi < o.lo || o.hi < self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        let q = BigRational::new(BigInt::from(22), BigInt::from(7));
        assert_eq!(fmt_sig(&q, 5), "3.1428e+0");
        assert_eq!(fmt_sig(&-q, 3), "-3.14e+0");
        let small = BigRational::new(BigInt::from(1), BigInt::from(800));
        assert_eq!(fmt_sig(&small, 2), "1.2e-3");
        assert_eq!(fmt_sig(&rat(1000), 1), "1e+3");
    }

    #[test]
    fn arithmetic() {
        let a = RealInterval::new(rat(-1), rat(2));
        let b = RealInterval::new(rat(3), rat(4));
        let p = a.mul(&b);
        assert_eq!((p.lo, p.hi), (rat(-4), rat(8)));
        assert!(a.div(&a).is_none());
        assert_eq!(a.abs().lo, rat(0));
        assert_eq!(a.square().hi, rat(4));
    }
}
