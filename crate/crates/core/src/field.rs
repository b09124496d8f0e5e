//! Exact arithmetic in F = Q[t]/(p) on the power basis {1, t, t²}.

use crate::arith::{ck_add, ck_mul, ck_sub, gcd};
use crate::cubic::CubicPoly;
use crate::error::{Error, Result};
use crate::interval::{rat_from_f64, rat_to_f64};
use crate::roots::{isolate_real_roots, EmbeddingTriple, DEFAULT_PRECISION};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// A field element (n₀ + n₁t + n₂t²)/d with d > 0 and gcd(n, d) = 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Elem {
    pub n: [i128; 3],
    pub d: i128,
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}t + {}t^2)/{}",
            self.n[0], self.n[1], self.n[2], self.d
        )
    }
}

impl Elem {
    pub fn new(n: [i128; 3], d: i128) -> Result<Elem> {
        if d == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut g = gcd(gcd(n[0], n[1]), gcd(n[2], d));
        if d < 0 {
            g = -g;
        }
        Ok(Elem {
            n: [n[0] / g, n[1] / g, n[2] / g],
            d: d / g,
        })
    }

    pub fn int(n: [i128; 3]) -> Elem {
        Elem { n, d: 1 }
    }

    pub fn one() -> Elem {
        Elem::int([1, 0, 0])
    }

    pub fn gen() -> Elem {
        Elem::int([0, 1, 0])
    }

    pub fn zero() -> Elem {
        Elem::int([0, 0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.n == [0, 0, 0]
    }

    pub fn is_integral_coords(&self) -> bool {
        self.d == 1
    }

    pub fn neg(&self) -> Elem {
        Elem {
            n: [-self.n[0], -self.n[1], -self.n[2]],
            d: self.d,
        }
    }

    pub fn add(&self, o: &Elem) -> Result<Elem> {
        let mut n = [0i128; 3];
        for (k, slot) in n.iter_mut().enumerate() {
            *slot = ck_add(ck_mul(self.n[k], o.d)?, ck_mul(o.n[k], self.d)?)?;
        }
        Elem::new(n, ck_mul(self.d, o.d)?)
    }

    pub fn sub(&self, o: &Elem) -> Result<Elem> {
        self.add(&o.neg())
    }

    pub fn scale(&self, num: i128, den: i128) -> Result<Elem> {
        Elem::new(
            [
                ck_mul(self.n[0], num)?,
                ck_mul(self.n[1], num)?,
                ck_mul(self.n[2], num)?,
            ],
            ck_mul(self.d, den)?,
        )
    }
}

/// Reduces a product polynomial of degree ≤ 4 modulo p.
fn reduce5(p: &CubicPoly, z: &mut [i128; 5]) -> Result<()> {
    let (a, b, c) = (p.a as i128, p.b as i128, p.c as i128);
    for k in (3..5).rev() {
        let zk = z[k];
        if zk == 0 {
            continue;
        }
        z[k - 1] = ck_sub(z[k - 1], ck_mul(a, zk)?)?;
        z[k - 2] = ck_sub(z[k - 2], ck_mul(b, zk)?)?;
        z[k - 3] = ck_sub(z[k - 3], ck_mul(c, zk)?)?;
        z[k] = 0;
    }
    Ok(())
}

/// The cubic field Q[t]/(p) with certified embeddings of t.
#[derive(Debug, Clone)]
pub struct NumberFieldCubic {
    pub poly: CubicPoly,
    /// Roots ρ₁, ρ₂, ρ₃ sorted by decreasing absolute value; the i-th
    /// embedding sends t to `roots[i]`.
    pub roots: [f64; 3],
    /// roots[i] + roots_lo[i] agrees with ρᵢ to about 2⁻¹⁰⁵ relative.
    pub roots_lo: [f64; 3],
    pub embeddings: EmbeddingTriple,
}

impl NumberFieldCubic {
    pub fn new(p: CubicPoly) -> Result<NumberFieldCubic> {
        p.check_admissible()?;
        let embeddings = isolate_real_roots(&p, DEFAULT_PRECISION)?;
        let mut roots = [0.0; 3];
        let mut roots_lo = [0.0; 3];
        for i in 0..3 {
            let m = embeddings.rho[i].mid();
            roots[i] = rat_to_f64(&m);
            roots_lo[i] = rat_to_f64(&(m - rat_from_f64(roots[i])));
        }
        Ok(NumberFieldCubic {
            poly: p,
            roots,
            roots_lo,
            embeddings,
        })
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Result<Elem> {
        let mut z = [0i128; 5];
        for i in 0..3 {
            if x.n[i] == 0 {
                continue;
            }
            for j in 0..3 {
                z[i + j] = ck_add(z[i + j], ck_mul(x.n[i], y.n[j])?)?;
            }
        }
        reduce5(&self.poly, &mut z)?;
        Elem::new([z[0], z[1], z[2]], ck_mul(x.d, y.d)?)
    }

    /// Integer matrix whose row j holds the numerator coordinates of
    /// x·tʲ (denominator x.d).
    pub fn mul_matrix(&self, x: &Elem) -> Result<[[i128; 3]; 3]> {
        let mut rows = [[0i128; 3]; 3];
        let mut cur = Elem::int(x.n);
        for row in rows.iter_mut() {
            *row = cur.n;
            cur = self.mul(&cur, &Elem::gen())?;
        }
        Ok(rows)
    }

    pub fn norm(&self, x: &Elem) -> Result<(i128, i128)> {
        let m = self.mul_matrix(x)?;
        let det = det3(&m)?;
        let d3 = ck_mul(ck_mul(x.d, x.d)?, x.d)?;
        let g = gcd(det, d3);
        Ok((det / g, d3 / g))
    }

    pub fn trace(&self, x: &Elem) -> Result<(i128, i128)> {
        // Tr(1) = 3, Tr(t) = −a, Tr(t²) = a² − 2b
        let (a, b) = (self.poly.a as i128, self.poly.b as i128);
        let t = ck_add(
            ck_add(ck_mul(3, x.n[0])?, ck_mul(-a, x.n[1])?)?,
            ck_mul(ck_sub(ck_mul(a, a)?, 2 * b)?, x.n[2])?,
        )?;
        let g = gcd(t, x.d);
        Ok((t / g, x.d / g))
    }

    /// Trace form Tr(tⁱ·tʲ) on the power basis.
    pub fn trace_matrix(&self) -> [[i128; 3]; 3] {
        let (a, b, c) = (
            self.poly.a as i128,
            self.poly.b as i128,
            self.poly.c as i128,
        );
        // power sums s_k of the roots via Newton's identities
        let s0 = 3;
        let s1 = -a;
        let s2 = a * a - 2 * b;
        let s3 = -a * s2 - b * s1 - 3 * c;
        let s4 = -a * s3 - b * s2 - c * s1;
        let s = [s0, s1, s2, s3, s4];
        let mut m = [[0i128; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = s[i + j];
            }
        }
        m
    }

    pub fn inverse(&self, x: &Elem) -> Result<Elem> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // y·M = d·e₀ where row j of M is x·tʲ numerators; solve via adjugate
        let m = self.mul_matrix(x)?;
        let det = det3(&m)?;
        let adj = adjugate3(&m)?;
        // y = d·e₀·M⁻¹ = d·(row 0 of adj)/det
        let row = adj[0];
        Elem::new(
            [
                ck_mul(row[0], x.d)?,
                ck_mul(row[1], x.d)?,
                ck_mul(row[2], x.d)?,
            ],
            det,
        )
    }

    pub fn pow(&self, x: &Elem, mut e: u64) -> Result<Elem> {
        let mut base = *x;
        let mut acc = Elem::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Characteristic polynomial of multiplication by an integral-looking
    /// element, as (a, b, c) with rational entries scaled by d³.
    pub fn charpoly(&self, x: &Elem) -> Result<Option<CubicPoly>> {
        let m = self.mul_matrix(x)?;
        // char poly of M/d: t³ − tr t² + e2 t − det, over d
        let tr = m[0][0] + m[1][1] + m[2][2];
        let e2 = ck_sub(
            ck_add(
                ck_sub(ck_mul(m[0][0], m[1][1])?, ck_mul(m[0][1], m[1][0])?)?,
                ck_sub(ck_mul(m[0][0], m[2][2])?, ck_mul(m[0][2], m[2][0])?)?,
            )?,
            ck_sub(ck_mul(m[1][2], m[2][1])?, ck_mul(m[1][1], m[2][2])?)?,
        )?;
        let det = det3(&m)?;
        let d = x.d;
        let d2 = ck_mul(d, d)?;
        let d3 = ck_mul(d2, d)?;
        if tr % d != 0 || e2 % d2 != 0 || det % d3 != 0 {
            return Ok(None);
        }
        let to64 = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow);
        Ok(Some(CubicPoly::new(
            to64(-tr / d)?,
            to64(e2 / d2)?,
            to64(-det / d3)?,
        )))
    }

    /// Image of x under the i-th embedding (double precision).
    pub fn embed(&self, x: &Elem, i: usize) -> f64 {
        let r = self.roots[i];
        ((x.n[2] as f64 * r + x.n[1] as f64) * r + x.n[0] as f64) / x.d as f64
    }

    /// σᵢ(x) evaluated in double-double arithmetic, so cancellation
    /// between large coordinates does not cost accuracy.
    pub fn embed_precise(&self, x: &Elem, i: usize) -> f64 {
        let r = Dd(self.roots[i], self.roots_lo[i]);
        let v = Dd::from_i128(x.n[2])
            .mul(r)
            .add(Dd::from_i128(x.n[1]))
            .mul(r)
            .add(Dd::from_i128(x.n[0]));
        v.div_f64(x.d as f64)
    }

    pub fn embed_all_precise(&self, x: &Elem) -> [f64; 3] {
        [
            self.embed_precise(x, 0),
            self.embed_precise(x, 1),
            self.embed_precise(x, 2),
        ]
    }

    pub fn embed_all(&self, x: &Elem) -> [f64; 3] {
        [self.embed(x, 0), self.embed(x, 1), self.embed(x, 2)]
    }

    pub fn log_embedding(&self, x: &Elem) -> [f64; 3] {
        self.embed_all(x).map(|v| v.abs().ln())
    }

    /// Sign of x under the i-th embedding, certified by refining the root
    /// enclosure. x must be nonzero.
    pub fn sign_at(&self, x: &Elem, i: usize) -> Result<i8> {
        use crate::interval::{rat, RealInterval};
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut bits = self.embeddings.precision;
        let mut emb = self.embeddings.clone();
        loop {
            let r = &emb.rho[i];
            let v = RealInterval::point(rat(x.n[2]))
                .mul(r)
                .add(&RealInterval::point(rat(x.n[1])))
                .mul(r)
                .add(&RealInterval::point(rat(x.n[0])));
            match v.sign() {
                Some(num_bigint::Sign::Plus) => return Ok(1),
                Some(_) => return Ok(-1),
                None => {}
            }
            if bits >= crate::roots::MAX_PRECISION {
                return Err(Error::UndecidableAtBound {
                    bound: 0.0,
                    precision: bits,
                });
            }
            bits *= 2;
            emb = isolate_real_roots(&self.poly, bits)?;
        }
    }

    /// Certified comparison |σᵢ(x)| < |σᵢ(y)|, for x ≠ ±y.
    pub fn abs_less_at(&self, x: &Elem, y: &Elem, i: usize) -> Result<bool> {
        let x2 = self.mul(x, x)?;
        let y2 = self.mul(y, y)?;
        Ok(self.sign_at(&y2.sub(&x2)?, i)? > 0)
    }
}

pub fn det3(m: &[[i128; 3]; 3]) -> Result<i128> {
    let t0 = ck_mul(
        m[0][0],
        ck_sub(ck_mul(m[1][1], m[2][2])?, ck_mul(m[1][2], m[2][1])?)?,
    )?;
    let t1 = ck_mul(
        m[0][1],
        ck_sub(ck_mul(m[1][0], m[2][2])?, ck_mul(m[1][2], m[2][0])?)?,
    )?;
    let t2 = ck_mul(
        m[0][2],
        ck_sub(ck_mul(m[1][0], m[2][1])?, ck_mul(m[1][1], m[2][0])?)?,
    )?;
    ck_add(ck_sub(t0, t1)?, t2)
}

/// adj(M) with M·adj(M) = det(M)·I.
pub fn adjugate3(m: &[[i128; 3]; 3]) -> Result<[[i128; 3]; 3]> {
    let mut adj = [[0i128; 3]; 3];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            // cofactor of m[j][i]
            let r: Vec<usize> = (0..3).filter(|&k| k != j).collect();
            let c: Vec<usize> = (0..3).filter(|&k| k != i).collect();
            let minor = ck_sub(
                ck_mul(m[r[0]][c[0]], m[r[1]][c[1]])?,
                ck_mul(m[r[0]][c[1]], m[r[1]][c[0]])?,
            )?;
            *v = if (i + j) % 2 == 0 { minor } else { -minor };
        }
    }
    Ok(adj)
}

/// Unevaluated sum hi + lo of two doubles.
#[derive(Debug, Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn from_i128(v: i128) -> Dd {
        let hi = v as f64;
        let lo = (v - hi as i128) as f64;
        Dd(hi, lo)
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.0, o.0);
        let lo = s.1 + self.1 + o.1;
        let hi = s.0 + lo;
        Dd(hi, lo - (hi - s.0))
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        let lo = e + self.0 * o.1 + self.1 * o.0;
        let hi = p + lo;
        Dd(hi, lo - (hi - p))
    }

    fn div_f64(self, d: f64) -> f64 {
        let q = self.0 / d;
        let r = (-q).mul_add(d, self.0) + self.1;
        q + r / d
    }
}

/// Field element with arbitrary-size coordinates, used for units whose
/// coefficients outgrow `i128`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigElem {
    pub n: [BigInt; 3],
    pub d: BigInt,
}

impl BigElem {
    pub fn from_elem(x: &Elem) -> BigElem {
        BigElem {
            n: x.n.map(BigInt::from),
            d: BigInt::from(x.d),
        }
    }

    pub fn one() -> BigElem {
        BigElem::from_elem(&Elem::one())
    }

    fn normalize(mut self) -> BigElem {
        let mut g = self.d.gcd(&self.n[0]).gcd(&self.n[1]).gcd(&self.n[2]);
        if self.d.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for v in self.n.iter_mut() {
                *v = &*v / &g;
            }
            self.d = &self.d / &g;
        }
        self
    }

    pub fn to_elem(&self) -> Option<Elem> {
        Some(Elem {
            n: [
                self.n[0].to_i128()?,
                self.n[1].to_i128()?,
                self.n[2].to_i128()?,
            ],
            d: self.d.to_i128()?,
        })
    }

    pub fn mul(&self, o: &BigElem, p: &CubicPoly) -> BigElem {
        let mut z: [BigInt; 5] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                z[i + j] += &self.n[i] * &o.n[j];
            }
        }
        let (a, b, c) = (BigInt::from(p.a), BigInt::from(p.b), BigInt::from(p.c));
        for k in (3..5).rev() {
            let zk = std::mem::take(&mut z[k]);
            z[k - 1] -= &a * &zk;
            z[k - 2] -= &b * &zk;
            z[k - 3] -= &c * &zk;
        }
        let [z0, z1, z2, _, _] = z;
        BigElem {
            n: [z0, z1, z2],
            d: &self.d * &o.d,
        }
        .normalize()
    }

    pub fn pow(&self, mut e: u64, p: &CubicPoly) -> BigElem {
        let mut base = self.clone();
        let mut acc = BigElem::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, p);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, p);
            }
        }
        acc
    }

    fn mul_matrix(&self, p: &CubicPoly) -> [[BigInt; 3]; 3] {
        let t = BigElem::from_elem(&Elem::gen());
        let mut cur = BigElem {
            n: self.n.clone(),
            d: BigInt::one(),
        };
        let mut rows: [[BigInt; 3]; 3] = Default::default();
        for row in rows.iter_mut() {
            *row = cur.n.clone();
            let mut z: [BigInt; 5] = Default::default();
            for i in 0..3 {
                for j in 0..3 {
                    z[i + j] += &cur.n[i] * &t.n[j];
                }
            }
            let (a, b, c) = (BigInt::from(p.a), BigInt::from(p.b), BigInt::from(p.c));
            for k in (3..5).rev() {
                let zk = std::mem::take(&mut z[k]);
                z[k - 1] -= &a * &zk;
                z[k - 2] -= &b * &zk;
                z[k - 3] -= &c * &zk;
            }
            let [z0, z1, z2, _, _] = z;
            cur = BigElem {
                n: [z0, z1, z2],
                d: BigInt::one(),
            };
        }
        rows
    }

    /// Norm as a reduced fraction (num, den).
    pub fn norm(&self, p: &CubicPoly) -> (BigInt, BigInt) {
        let m = self.mul_matrix(p);
        let det = big_det3(&m);
        let d3 = &self.d * &self.d * &self.d;
        let g = det.gcd(&d3);
        (det / &g, d3 / g)
    }

    pub fn inverse(&self, p: &CubicPoly) -> Option<BigElem> {
        let m = self.mul_matrix(p);
        let det = big_det3(&m);
        if det.is_zero() {
            return None;
        }
        let c = |r0: usize, r1: usize, c0: usize, c1: usize| {
            &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]
        };
        // first row of the adjugate
        let adj0 = [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)];
        Some(
            BigElem {
                n: adj0.map(|v| v * &self.d),
                d: det,
            }
            .normalize(),
        )
    }
}

fn big_det3(m: &[[BigInt; 3]; 3]) -> BigInt {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}
