//! Monic integer cubics x³ + a·x² + b·x + c and their exact invariants.

use crate::arith::is_square;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CubicPoly {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl CubicPoly {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        CubicPoly { a, b, c }
    }

    /// p(x) for integer x.
    pub fn eval(&self, x: i128) -> i128 {
        ((x + self.a as i128) * x + self.b as i128) * x + self.c as i128
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        ((x + self.a as f64) * x + self.b as f64) * x + self.c as f64
    }

    /// 18abc − 4a³c + a²b² − 4b³ − 27c².
    pub fn discriminant(&self) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        18 * a * b * c - 4 * a * a * a * c + a * a * b * b - 4 * b * b * b - 27 * c * c
    }

    /// Unit constant term, irreducible, three distinct real roots.
    pub fn is_admissible_unit_poly(&self) -> bool {
        self.c.abs() == 1 && self.eval(1) != 0 && self.eval(-1) != 0 && self.discriminant() > 0
    }

    /// Same checks as [`is_admissible_unit_poly`](Self::is_admissible_unit_poly),
    /// reporting the first one that fails.
    pub fn check_admissible(&self) -> Result<()> {
        if self.c.abs() != 1 {
            return Err(Error::NotUnit(self.c));
        }
        if self.eval(1) == 0 || self.eval(-1) == 0 {
            return Err(Error::Reducible);
        }
        let d = self.discriminant();
        if d <= 0 {
            return Err(Error::NotTotallyReal(d));
        }
        Ok(())
    }

    /// trη = (u²−1)(v²−1)(w²−1) over the roots, which is p(1)·p(−1).
    pub fn eta(&self) -> i128 {
        self.eval(1) * self.eval(-1)
    }

    /// Characteristic polynomial of λ⁻¹: x³·p(1/x)/c.
    pub fn reciprocal(&self) -> Result<CubicPoly> {
        if self.c.abs() != 1 {
            return Err(Error::NotUnit(self.c));
        }
        let c = self.c;
        Ok(CubicPoly::new(self.b * c, self.a * c, c))
    }

    /// Characteristic polynomial of −λ.
    pub fn mirror(&self) -> CubicPoly {
        CubicPoly::new(-self.a, self.b, -self.c)
    }

    /// The representative of {p, mirror(p)} that is smaller in (a, then c).
    pub fn canonical(&self) -> CubicPoly {
        let m = self.mirror();
        if (m.a, m.c) < (self.a, self.c) {
            m
        } else {
            *self
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }

    /// 3 when the discriminant is a square (cyclic field), otherwise 1.
    pub fn galois_multiplicity(&self) -> u32 {
        if is_square(self.discriminant()) {
            3
        } else {
            1
        }
    }

    /// True when some two roots satisfy ρᵢ = −ρⱼ. Writing out the common
    /// root condition for p(x) and −p(−x) gives c = a·b, and then
    /// p = (x + a)(x² + b).
    pub fn has_opposite_roots(&self) -> bool {
        self.c == self.a * self.b
    }
}

impl fmt::Display for CubicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^3")?;
        for (coef, mono) in [(self.a, "x^2"), (self.b, "x"), (self.c, "")] {
            if coef == 0 {
                continue;
            }
            let sign = if coef < 0 { '-' } else { '+' };
            let mag = coef.unsigned_abs();
            if mag == 1 && !mono.is_empty() {
                write!(f, " {sign} {mono}")?;
            } else {
                write!(f, " {sign} {mag}{mono}")?;
            }
        }
        Ok(())
    }
}

/// Parses three integers `a b c`, separated by whitespace or commas.
impl FromStr for CubicPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .split(|ch: char| ch.is_whitespace() || ch == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if parts.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "expected three coefficients, got {}",
                parts.len()
            )));
        }
        let mut v = [0i64; 3];
        for (slot, t) in v.iter_mut().zip(&parts) {
            *slot = t
                .parse::<i64>()
                .map_err(|e| Error::InvalidInput(format!("coefficient {t:?}: {e}")))?;
            // keep every derived quantity inside i128
            if slot.unsigned_abs() > 1 << 30 {
                return Err(Error::InvalidInput(format!("coefficient {t} out of range")));
            }
        }
        Ok(CubicPoly::new(v[0], v[1], v[2]))
    }
}
