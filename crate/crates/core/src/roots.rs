//! Certified real roots of admissible cubics and the chamber invariants
//! derived from them.

use crate::cubic::CubicPoly;
use crate::error::{Error, Result};
use crate::interval::{rat, rat_from_f64, RealInterval};
use num_bigint::Sign;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

pub const DEFAULT_PRECISION: u32 = 128;
pub const MAX_PRECISION: u32 = 4096;

fn eval_rat(p: &CubicPoly, x: &BigRational) -> BigRational {
    let mut acc = x + rat(p.a as i128);
    acc = acc * x + rat(p.b as i128);
    acc * x + rat(p.c as i128)
}

fn sign_at(p: &CubicPoly, x: &BigRational) -> Sign {
    let v = eval_rat(p, x);
    if v.is_zero() {
        Sign::NoSign
    } else if v.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Real roots of the cubic in increasing order, from the trigonometric
/// formula, polished by Newton steps. Only meaningful when Δ > 0.
pub fn approx_roots(p: &CubicPoly) -> [f64; 3] {
    let (a, b, c) = (p.a as f64, p.b as f64, p.c as f64);
    // depressed cubic t³ + P t + Q with x = t − a/3
    let pp = b - a * a / 3.0;
    let qq = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let mut r = [0.0f64; 3];
    if pp < 0.0 {
        let m = 2.0 * (-pp / 3.0).sqrt();
        let arg = (3.0 * qq / (pp * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        for (k, slot) in r.iter_mut().enumerate() {
            *slot = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - a / 3.0;
        }
    } else {
        r = [-a / 3.0; 3];
    }
    for x in r.iter_mut() {
        for _ in 0..3 {
            let f = p.eval_f64(*x);
            let df = (3.0 * *x + 2.0 * a) * *x + b;
            if df != 0.0 {
                let nx = *x - f / df;
                if nx.is_finite() {
                    *x = nx;
                }
            }
        }
    }
    r.sort_by(|x, y| x.partial_cmp(y).unwrap());
    r
}

/// Sturm sequence of a squarefree rational polynomial given by
/// coefficients in increasing degree.
pub fn sturm_chain(poly: &[BigRational]) -> Vec<Vec<BigRational>> {
    fn deriv(f: &[BigRational]) -> Vec<BigRational> {
        f.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat(i as i128))
            .collect()
    }
    fn trim(mut f: Vec<BigRational>) -> Vec<BigRational> {
        while f.last().is_some_and(|c| c.is_zero()) {
            f.pop();
        }
        f
    }
    fn rem(f: &[BigRational], g: &[BigRational]) -> Vec<BigRational> {
        let mut r = f.to_vec();
        let dg = g.len() - 1;
        let lead = g[dg].clone();
        while r.len() > dg && !r.is_empty() {
            let k = r.len() - 1 - dg;
            let q = r.last().unwrap() / &lead;
            for (i, gc) in g.iter().enumerate() {
                r[k + i] = &r[k + i] - &q * gc;
            }
            r.pop();
            r = trim(r);
        }
        r
    }
    let mut chain = vec![trim(poly.to_vec())];
    chain.push(trim(deriv(poly)));
    loop {
        let n = chain.len();
        if chain[n - 1].len() <= 1 {
            break;
        }
        let r = rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn sturm_changes(chain: &[Vec<BigRational>], x: &BigRational) -> usize {
    let mut last = Sign::NoSign;
    let mut count = 0;
    for f in chain {
        let mut acc = BigRational::zero();
        for c in f.iter().rev() {
            acc = acc * x + c;
        }
        let s = if acc.is_zero() {
            Sign::NoSign
        } else if acc.is_positive() {
            Sign::Plus
        } else {
            Sign::Minus
        };
        if s != Sign::NoSign {
            if last != Sign::NoSign && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Isolating intervals (l, r] for the real roots, in increasing order, by
/// Sturm counting and bisection. Slow; the fast path in
/// [`isolate_real_roots`] falls back to it.
pub fn sturm_isolate(p: &CubicPoly) -> Vec<(BigRational, BigRational)> {
    let coeffs = vec![rat(p.c as i128), rat(p.b as i128), rat(p.a as i128), rat(1)];
    let chain = sturm_chain(&coeffs);
    let bound = 1 + p.a.abs().max(p.b.abs()).max(p.c.abs()) as i128;
    let mut stack = vec![(rat(-bound), rat(bound))];
    let mut out = Vec::new();
    while let Some((l, r)) = stack.pop() {
        let n = sturm_changes(&chain, &l) - sturm_changes(&chain, &r);
        match n {
            0 => {}
            1 => out.push((l, r)),
            _ => {
                let m = (&l + &r) / rat(2);
                stack.push((l, m.clone()));
                stack.push((m, r));
            }
        }
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

fn brackets_from_f64(p: &CubicPoly, r: &[f64; 3]) -> Option<Vec<(BigRational, BigRational)>> {
    let mut scale = 2f64.powi(-40);
    'widen: for _ in 0..4 {
        let mut out = Vec::with_capacity(3);
        for &x in r {
            let d = scale * x.abs().max(1.0);
            let lo = rat_from_f64(x - d);
            let hi = rat_from_f64(x + d);
            let (sl, sh) = (sign_at(p, &lo), sign_at(p, &hi));
            if sl == Sign::NoSign || sh == Sign::NoSign || sl == sh {
                scale *= 256.0;
                continue 'widen;
            }
            out.push((lo, hi));
        }
        if out[0].1 < out[1].0 && out[1].1 < out[2].0 {
            return Some(out);
        }
        scale *= 256.0;
    }
    None
}

fn bisect(p: &CubicPoly, lo: &mut BigRational, hi: &mut BigRational, bits: u32) {
    let target = RealInterval::new(lo.clone(), hi.clone());
    if target.narrower_than_bits(bits) {
        return;
    }
    let s_lo = sign_at(p, lo);
    loop {
        let m = (&*lo + &*hi) / rat(2);
        match sign_at(p, &m) {
            Sign::NoSign => {
                *lo = m.clone();
                *hi = m;
                return;
            }
            s if s == s_lo => *lo = m,
            _ => *hi = m,
        }
        let w = RealInterval::new(lo.clone(), hi.clone());
        if w.narrower_than_bits(bits) {
            return;
        }
    }
}

/// Three certified root enclosures ordered by decreasing absolute value.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTriple {
    pub poly: CubicPoly,
    pub rho: [RealInterval; 3],
    pub precision: u32,
}

impl EmbeddingTriple {
    pub fn signs(&self) -> [i8; 3] {
        self.rho.each_ref().map(|r| match r.sign() {
            Some(Sign::Minus) => -1,
            _ => 1,
        })
    }

    pub fn mid_f64(&self) -> [f64; 3] {
        [
            self.rho[0].mid_f64(),
            self.rho[1].mid_f64(),
            self.rho[2].mid_f64(),
        ]
    }
}

/// Certified enclosures of width < 2^(−precision), sorted by decreasing
/// absolute value. Precision escalates until the absolute values separate.
pub fn isolate_real_roots(p: &CubicPoly, precision: u32) -> Result<EmbeddingTriple> {
    p.check_admissible()?;
    if p.has_opposite_roots() {
        return Err(Error::NotSplitRegular);
    }
    let approx = approx_roots(p);
    let mut br = brackets_from_f64(p, &approx).unwrap_or_else(|| sturm_isolate(p));
    if br.len() != 3 {
        return Err(Error::NotTotallyReal(p.discriminant()));
    }
    let mut bits = precision.max(1);
    loop {
        for (lo, hi) in br.iter_mut() {
            bisect(p, lo, hi, bits);
        }
        let iv: Vec<RealInterval> = br
            .iter()
            .map(|(l, h)| RealInterval::new(l.clone(), h.clone()))
            .collect();
        let abs: Vec<RealInterval> = iv.iter().map(|r| r.abs()).collect();
        let separated = (0..3).all(|i| (i + 1..3).all(|j| abs[i].disjoint(&abs[j])));
        if separated {
            let mut idx = [0usize, 1, 2];
            idx.sort_by(|&i, &j| {
                if abs[i].lo > abs[j].hi {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            });
            return Ok(EmbeddingTriple {
                poly: *p,
                rho: idx.map(|i| iv[i].clone()),
                precision: bits,
            });
        }
        if bits >= MAX_PRECISION {
            return Err(Error::NotSplitRegular);
        }
        bits = (bits * 2).min(MAX_PRECISION);
    }
}

/// Chamber coordinates of a split regular element.
#[derive(Debug, Clone, PartialEq)]
pub struct ChamberPoint {
    pub poly: CubicPoly,
    pub alpha1: RealInterval,
    pub alpha2: RealInterval,
    /// log α₁
    pub c1: f64,
    /// (log α₂)/2
    pub c2: f64,
    /// 2·c1·c2
    pub l_value: f64,
    pub precision: u32,
}

impl ChamberPoint {
    pub fn alpha1_f64(&self) -> f64 {
        self.alpha1.mid_f64()
    }

    pub fn alpha2_f64(&self) -> f64 {
        self.alpha2.mid_f64()
    }

    /// The sorted moduli (|ρ₁|, |ρ₂|, |ρ₃|) recovered from α₁, α₂.
    pub fn moduli(&self) -> [f64; 3] {
        let (a1, a2) = (self.alpha1_f64(), self.alpha2_f64());
        [
            a1.powf(2.0 / 3.0) * a2.sqrt(),
            a1.powf(-1.0 / 3.0),
            a1.powf(-1.0 / 3.0) / a2.sqrt(),
        ]
    }
}

pub fn alpha_invariants(e: &EmbeddingTriple) -> ChamberPoint {
    let [r1, r2, r3] = &e.rho;
    let r2sq = r2.square();
    let alpha1 = r1
        .mul(r3)
        .abs()
        .div(&r2sq)
        .expect("admissible roots are nonzero");
    let alpha2 = r2sq
        .div(&r3.square())
        .expect("admissible roots are nonzero");
    let c1 = alpha1.mid_f64().ln();
    let c2 = alpha2.mid_f64().ln() / 2.0;
    ChamberPoint {
        poly: e.poly,
        alpha1,
        alpha2,
        c1,
        c2,
        l_value: 2.0 * c1 * c2,
        precision: e.precision,
    }
}

pub fn chamber_point(p: &CubicPoly, precision: u32) -> Result<ChamberPoint> {
    Ok(alpha_invariants(&isolate_real_roots(p, precision)?))
}

fn decide(cp: &ChamberPoint, t1: &BigRational, t2: &BigRational) -> std::result::Result<bool, f64> {
    let one = rat(1);
    for (alpha, t) in [(&cp.alpha1, t1), (&cp.alpha2, t2)] {
        match alpha.cmp_rat(&one) {
            Some(Ordering::Greater) => {}
            Some(_) => return Ok(false),
            // α = 1 is impossible for an admissible unit; refine
            None => return Err(1.0),
        }
        match alpha.cmp_rat(t) {
            Some(Ordering::Greater) => return Ok(false),
            Some(_) => {}
            None => return Err(crate::interval::rat_to_f64(t)),
        }
    }
    Ok(true)
}

/// 1 < α₁ ≤ T₁ and 1 < α₂ ≤ T₂, certified. Straddling enclosures are
/// refined up to [`MAX_PRECISION`] bits before giving up.
pub fn in_chamber(cp: &ChamberPoint, t1: f64, t2: f64) -> Result<bool> {
    if !(t1 > 1.0 && t2 > 1.0) {
        return Err(Error::InvalidInput(format!(
            "thresholds must exceed 1, got ({t1}, {t2})"
        )));
    }
    let (q1, q2) = (rat_from_f64(t1), rat_from_f64(t2));
    let mut current = cp.clone();
    loop {
        match decide(&current, &q1, &q2) {
            Ok(v) => return Ok(v),
            Err(bound) => {
                if current.precision >= MAX_PRECISION {
                    return Err(Error::UndecidableAtBound {
                        bound,
                        precision: current.precision,
                    });
                }
                let bits = (current.precision * 2).min(MAX_PRECISION);
                current = chamber_point(&current.poly, bits)?;
            }
        }
    }
}

/// Plain double-precision α₁, α₂ for prefiltering; `None` when the roots
/// are not real.
pub fn approx_alphas(p: &CubicPoly) -> Option<(f64, f64)> {
    let mut r = approx_roots(p);
    if r.iter().any(|x| !x.is_finite()) {
        return None;
    }
    r.sort_by(|x, y| y.abs().partial_cmp(&x.abs()).unwrap());
    let a1 = (r[0] * r[2]).abs() / (r[1] * r[1]);
    let a2 = (r[1] / r[2]).powi(2);
    Some((a1, a2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignVector(pub [i8; 3]);

impl SignVector {
    pub fn new(e1: i8, e2: i8, e3: i8) -> Result<Self> {
        for e in [e1, e2, e3] {
            if e != 1 && e != -1 {
                return Err(Error::InvalidInput(format!("sign entry {e} is not ±1")));
            }
        }
        Ok(SignVector([e1, e2, e3]))
    }
}

/// Π_{i<j} (1 − eᵢeⱼ·xⱼ/xᵢ) for moduli x₁ > x₂ > x₃ > 0.
pub fn det_nilpotent_factor(moduli: [f64; 3], signs: SignVector) -> f64 {
    let e = signs.0;
    let mut acc = 1.0;
    for i in 0..3 {
        for j in i + 1..3 {
            acc *= 1.0 - (e[i] * e[j]) as f64 * moduli[j] / moduli[i];
        }
    }
    acc
}

/// λ_flat / det(1 − (at)⁻¹ | n).
pub fn index_factor(lambda_flat: f64, moduli: [f64; 3], signs: SignVector) -> Result<f64> {
    let d = det_nilpotent_factor(moduli, signs);
    if d == 0.0 {
        return Err(Error::DivisionByZero);
    }
    Ok(lambda_flat / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn roots_of_anchor_polys() {
        let e = isolate_real_roots(&CubicPoly::new(-3, 0, 1), 128).unwrap();
        let m = e.mid_f64();
        assert_abs_diff_eq!(m[0], 2.8794, epsilon = 1e-4);
        assert_abs_diff_eq!(m[1], 0.6527, epsilon = 1e-4);
        assert_abs_diff_eq!(m[2], -0.5321, epsilon = 1e-4);
        assert!(e.rho.iter().all(|r| r.narrower_than_bits(128)));

        let m = isolate_real_roots(&CubicPoly::new(1, -2, -1), 64)
            .unwrap()
            .mid_f64();
        assert_abs_diff_eq!(m[0], -1.8019, epsilon = 1e-4);
        assert_abs_diff_eq!(m[1], 1.2470, epsilon = 1e-4);
        assert_abs_diff_eq!(m[2], -0.4450, epsilon = 1e-4);

        let m = isolate_real_roots(&CubicPoly::new(2, -1, -1), 64)
            .unwrap()
            .mid_f64();
        assert_abs_diff_eq!(m[0], -2.2470, epsilon = 1e-4);
        assert_abs_diff_eq!(m[1], 0.8019, epsilon = 1e-4);
        assert_abs_diff_eq!(m[2], -0.5550, epsilon = 1e-4);
    }

    #[test]
    fn sturm_matches_fast_path() {
        for p in [
            CubicPoly::new(-3, 0, 1),
            CubicPoly::new(1, -2, -1),
            CubicPoly::new(-50, 7, 1),
        ] {
            let iso = sturm_isolate(&p);
            assert_eq!(iso.len(), 3);
            let e = isolate_real_roots(&p, 80).unwrap();
            for r in &e.rho {
                let m = r.mid();
                assert!(iso.iter().any(|(l, h)| l < &m && &m <= h));
            }
        }
    }

    #[test]
    fn chamber_examples() {
        let cp = chamber_point(&CubicPoly::new(-3, 0, 1), 128).unwrap();
        assert_abs_diff_eq!(cp.alpha1_f64(), 3.5963, epsilon = 1e-4);
        assert_abs_diff_eq!(cp.alpha2_f64(), 1.50475, epsilon = 1e-4);
        assert!(in_chamber(&cp, 10.0, 10.0).unwrap());
        assert!(!in_chamber(&cp, 2.0, 10.0).unwrap());
        let cp = chamber_point(&CubicPoly::new(1, -2, -1), 128).unwrap();
        assert_abs_diff_eq!(cp.alpha1_f64(), 0.5157, epsilon = 1e-4);
        assert_abs_diff_eq!(cp.alpha2_f64(), 7.8509, epsilon = 1e-4);
        assert!(!in_chamber(&cp, 10.0, 10.0).unwrap());
        let cp = chamber_point(&CubicPoly::new(2, -1, -1), 128).unwrap();
        assert_abs_diff_eq!(cp.alpha1_f64(), 1.9390, epsilon = 1e-4);
        assert_abs_diff_eq!(cp.alpha2_f64(), 2.0881, epsilon = 1e-4);
    }

    #[test]
    fn l_value_of_anchor() {
        let cp = chamber_point(&CubicPoly::new(-3, 0, 1), 128).unwrap();
        assert_abs_diff_eq!(cp.l_value, 0.5230, epsilon = 1e-3);
    }

    #[test]
    fn nilpotent_factor_examples() {
        let plus = SignVector::new(1, 1, 1).unwrap();
        let d = det_nilpotent_factor([4.0, 1.0, 0.25], plus);
        assert_abs_diff_eq!(d, 135.0 / 256.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            index_factor(1.0, [4.0, 1.0, 0.25], plus).unwrap(),
            256.0 / 135.0,
            epsilon = 1e-12
        );
        assert_eq!(index_factor(0.0, [4.0, 1.0, 0.25], plus).unwrap(), 0.0);
        assert!(SignVector::new(1, 0, 1).is_err());
        assert_eq!(
            index_factor(1.0, [1.0, 1.0, 1.0], plus),
            Err(Error::DivisionByZero)
        );
    }
}
