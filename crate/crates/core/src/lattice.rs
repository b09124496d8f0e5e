//! Full-rank Z-lattices in F, stored as (1/d)·H with H a lower-triangular
//! Hermite normal form over the power basis and d minimal.

use crate::arith::{ck_add, ck_mul, ck_sub, gcd, lcm};
use crate::error::{Error, Result};
use crate::field::{adjugate3, Elem, NumberFieldCubic};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lattice {
    pub d: i128,
    /// Row i has support in columns 0..=i, H[i][i] > 0 and
    /// 0 ≤ H[k][i] < H[i][i] for k > i.
    pub h: [[i128; 3]; 3],
}

/// Lower-triangular HNF of the row span of `rows`. When `modulus` is given
/// the span must contain modulus·Z³; intermediate entries are reduced
/// modulo it.
pub fn hnf(rows: &[[i128; 3]], modulus: Option<i128>) -> Result<[[i128; 3]; 3]> {
    let mut pool: Vec<[i128; 3]> = rows.iter().copied().filter(|r| *r != [0; 3]).collect();
    if let Some(m) = modulus {
        for r in pool.iter_mut() {
            for v in r.iter_mut() {
                *v = v.rem_euclid(m);
            }
        }
        for j in 0..3 {
            let mut r = [0i128; 3];
            r[j] = m;
            pool.push(r);
        }
    }
    let mut out = [[0i128; 3]; 3];
    for col in (0..3).rev() {
        loop {
            let mut piv: Option<usize> = None;
            for (k, r) in pool.iter().enumerate() {
                if r[col] != 0 && piv.is_none_or(|p| r[col].abs() < pool[p][col].abs()) {
                    piv = Some(k);
                }
            }
            let Some(p) = piv else {
                return Err(Error::InvalidInput("lattice is not of full rank".into()));
            };
            let prow = pool[p];
            let mut done = true;
            for (k, r) in pool.iter_mut().enumerate() {
                if k == p || r[col] == 0 {
                    continue;
                }
                let q = r[col].div_euclid(prow[col]);
                for j in 0..=col {
                    r[j] = ck_sub(r[j], ck_mul(q, prow[j])?)?;
                    if let Some(m) = modulus {
                        if j != col {
                            r[j] = r[j].rem_euclid(m);
                        }
                    }
                }
                if r[col] != 0 {
                    done = false;
                }
            }
            pool.retain(|r| *r != [0; 3]);
            if done {
                let p = pool.iter().position(|r| *r == prow).unwrap();
                let mut row = pool.swap_remove(p);
                if row[col] < 0 {
                    for v in row.iter_mut() {
                        *v = -*v;
                    }
                }
                if let Some(m) = modulus {
                    for v in row.iter_mut().take(col) {
                        *v = v.rem_euclid(m);
                    }
                }
                out[col] = row;
                break;
            }
        }
    }
    // reduce below-diagonal entries
    for i in 0..3 {
        for j in (0..i).rev() {
            let q = out[i][j].div_euclid(out[j][j]);
            if q != 0 {
                for k in 0..=j {
                    out[i][k] = ck_sub(out[i][k], ck_mul(q, out[j][k])?)?;
                }
            }
        }
    }
    Ok(out)
}

impl Lattice {
    /// Lattice spanned by the given elements (at least three, full rank).
    pub fn from_elems(gens: &[Elem]) -> Result<Lattice> {
        let mut den = 1i128;
        for g in gens {
            den = lcm(den, g.d)?;
        }
        let rows: Vec<[i128; 3]> = gens
            .iter()
            .map(|g| {
                let s = den / g.d;
                Ok([ck_mul(g.n[0], s)?, ck_mul(g.n[1], s)?, ck_mul(g.n[2], s)?])
            })
            .collect::<Result<_>>()?;
        Lattice::from_int_rows(&rows, den)
    }

    /// (1/den)·span(rows).
    pub fn from_int_rows(rows: &[[i128; 3]], den: i128) -> Result<Lattice> {
        let h = hnf(rows, None)?;
        Ok(Lattice::normalize(h, den))
    }

    fn normalize(h: [[i128; 3]; 3], den: i128) -> Lattice {
        let mut g = den;
        for row in &h {
            for v in row {
                g = gcd(g, *v);
            }
        }
        if g <= 1 {
            return Lattice { d: den, h };
        }
        let mut h2 = h;
        for row in h2.iter_mut() {
            for v in row.iter_mut() {
                *v /= g;
            }
        }
        Lattice { d: den / g, h: h2 }
    }

    pub fn basis(&self) -> [Elem; 3] {
        [0, 1, 2].map(|i| Elem::new(self.h[i], self.d).expect("d > 0"))
    }

    /// Integer coordinates of x in the basis, if x lies in the lattice.
    pub fn coords(&self, x: &Elem) -> Result<Option<[i128; 3]>> {
        // x = v / x.d must equal k·H / d, i.e. k·H = v·d / x.d
        let mut v = [0i128; 3];
        for j in 0..3 {
            let t = ck_mul(x.n[j], self.d)?;
            if t % x.d != 0 {
                return Ok(None);
            }
            v[j] = t / x.d;
        }
        let mut k = [0i128; 3];
        for col in (0..3).rev() {
            if v[col] % self.h[col][col] != 0 {
                return Ok(None);
            }
            k[col] = v[col] / self.h[col][col];
            for j in 0..col {
                v[j] = ck_sub(v[j], ck_mul(k[col], self.h[col][j])?)?;
            }
        }
        Ok(Some(k))
    }

    pub fn contains(&self, x: &Elem) -> Result<bool> {
        Ok(self.coords(x)?.is_some())
    }

    pub fn contains_lattice(&self, other: &Lattice) -> Result<bool> {
        for b in other.basis() {
            if !self.contains(&b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Covolume relative to Z[t] as a reduced fraction (num, den).
    pub fn det(&self) -> Result<(i128, i128)> {
        let n = ck_mul(ck_mul(self.h[0][0], self.h[1][1])?, self.h[2][2])?;
        let d = ck_mul(ck_mul(self.d, self.d)?, self.d)?;
        let g = gcd(n, d);
        Ok((n / g, d / g))
    }

    /// [self : sub] for sub ⊆ self; `None` if the ratio is not an integer.
    pub fn index_of(&self, sub: &Lattice) -> Result<Option<i128>> {
        let (a, b) = sub.det()?;
        let (c, d) = self.det()?;
        // (a/b)/(c/d) = a·d/(b·c)
        let num = ck_mul(a, d)?;
        let den = ck_mul(b, c)?;
        if num % den != 0 {
            return Ok(None);
        }
        Ok(Some(num / den))
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        let mut gens = self.basis().to_vec();
        gens.extend(other.basis());
        Lattice::from_elems(&gens)
    }

    pub fn scale_elem(&self, f: &NumberFieldCubic, x: &Elem) -> Result<Lattice> {
        let gens: Vec<Elem> = self
            .basis()
            .iter()
            .map(|b| f.mul(b, x))
            .collect::<Result<_>>()?;
        Lattice::from_elems(&gens)
    }

    pub fn scale_int(&self, k: i128) -> Result<Lattice> {
        let g = gcd(k, self.d);
        let mut h = self.h;
        for row in h.iter_mut() {
            for v in row.iter_mut() {
                *v = ck_mul(*v, k / g)?;
            }
        }
        Ok(Lattice {
            d: self.d / g,
            h: hnf(&h, None)?,
        })
    }

    /// Product lattice spanned by all x·y.
    pub fn product(&self, f: &NumberFieldCubic, other: &Lattice) -> Result<Lattice> {
        let mut gens = Vec::with_capacity(9);
        for x in self.basis() {
            for y in other.basis() {
                gens.push(f.mul(&x, &y)?);
            }
        }
        Lattice::from_elems(&gens)
    }

    /// {x : x·v ∈ Z for all v} under the coordinate dot product.
    pub fn dual_std(&self) -> Result<Lattice> {
        // L = {kH/d}; x ∈ L* iff H·xᵀ ∈ d·Z³, so L* has basis rows
        // d·adj(H)ᵀ / det(H)
        let adj = adjugate3(&self.h)?;
        let det = ck_mul(ck_mul(self.h[0][0], self.h[1][1])?, self.h[2][2])?;
        let mut rows = [[0i128; 3]; 3];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = ck_mul(adj[j][i], self.d)?;
            }
        }
        Lattice::from_int_rows(&rows, det)
    }

    /// (self : other) = {x ∈ F : x·other ⊆ self}.
    pub fn colon(&self, f: &NumberFieldCubic, other: &Lattice) -> Result<Lattice> {
        // x·b ∈ self iff x·M_b·A⁻¹ is integral, A = H/d; A⁻¹ = d·adj(H)/det(H)
        let adj = adjugate3(&self.h)?;
        let det = ck_mul(ck_mul(self.h[0][0], self.h[1][1])?, self.h[2][2])?;
        let mut cols: Vec<Elem> = Vec::with_capacity(9);
        for b in other.basis() {
            let m = f.mul_matrix(&b)?;
            // C = M_b·adj(H) · d / (b.d · det)
            for col in 0..3 {
                let mut v = [0i128; 3];
                for (i, slot) in v.iter_mut().enumerate() {
                    let mut s = 0i128;
                    for k in 0..3 {
                        s = ck_add(s, ck_mul(m[i][k], adj[k][col])?)?;
                    }
                    *slot = ck_mul(s, self.d)?;
                }
                cols.push(Elem::new(v, ck_mul(b.d, det)?)?);
            }
        }
        Lattice::from_elems(&cols)?.dual_std()
    }

    /// Multiplier ring (self : self).
    pub fn multiplier_ring(&self, f: &NumberFieldCubic) -> Result<Lattice> {
        self.colon(f, self)
    }

    pub fn is_ring(&self, f: &NumberFieldCubic) -> Result<bool> {
        if !self.contains(&Elem::one())? {
            return Ok(false);
        }
        let b = self.basis();
        for i in 0..3 {
            for j in i..3 {
                if !self.contains(&f.mul(&b[i], &b[j])?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Closed under multiplication by every element of `ring`.
    pub fn is_module_over(&self, f: &NumberFieldCubic, ring: &Lattice) -> Result<bool> {
        for r in ring.basis() {
            for x in self.basis() {
                if !self.contains(&f.mul(&r, &x)?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::CubicPoly;

    #[test]
    fn hnf_is_canonical() {
        let a = hnf(&[[2, 0, 0], [1, 3, 0], [5, 7, 4]], None).unwrap();
        let b = hnf(&[[5, 7, 4], [3, 3, 0], [2, 0, 0], [7, 7, 4]], None).unwrap();
        assert_eq!(a, b);
        let c = hnf(&[[5, 7, 4], [3, 3, 0], [2, 0, 0]], Some(24)).unwrap();
        assert_eq!(a, c);
        for i in 0..3 {
            assert!(a[i][i] > 0);
            for j in 0..i {
                assert!(0 <= a[i][j] && a[i][j] < a[j][j]);
            }
        }
    }

    #[test]
    fn membership_and_index() {
        let zt = Lattice::from_elems(&[Elem::one(), Elem::gen(), Elem::int([0, 0, 1])]).unwrap();
        assert!(zt.contains(&Elem::gen()).unwrap());
        assert!(!zt.contains(&Elem::new([0, 1, 0], 2).unwrap()).unwrap());
        let sub = zt.scale_int(2).unwrap();
        assert_eq!(zt.index_of(&sub).unwrap(), Some(8));
        let half = zt.scale_elem(
            &NumberFieldCubic::new(CubicPoly::new(-3, 0, 1)).unwrap(),
            &Elem::new([1, 0, 0], 2).unwrap(),
        );
        assert_eq!(half.unwrap().d, 2);
    }

    #[test]
    fn colon_of_order_is_itself() {
        let f = NumberFieldCubic::new(CubicPoly::new(1, -2, -1)).unwrap();
        let zt = Lattice::from_elems(&[Elem::one(), Elem::gen(), Elem::int([0, 0, 1])]).unwrap();
        assert_eq!(zt.multiplier_ring(&f).unwrap(), zt);
        // (O : 2O) = (1/2)O
        let two = zt.scale_int(2).unwrap();
        let c = zt.colon(&f, &two).unwrap();
        assert_eq!(
            c,
            zt.scale_elem(&f, &Elem::new([1, 0, 0], 2).unwrap())
                .unwrap()
        );
        assert!(zt.is_ring(&f).unwrap());
        assert!(!two.is_ring(&f).unwrap());
    }

    #[test]
    fn dual_of_scaled_lattice() {
        let l = Lattice::from_int_rows(&[[2, 0, 0], [0, 3, 0], [0, 0, 5]], 1).unwrap();
        let d = l.dual_std().unwrap();
        assert_eq!(
            d,
            Lattice::from_int_rows(&[[15, 0, 0], [0, 10, 0], [0, 0, 6]], 30).unwrap()
        );
    }
}
