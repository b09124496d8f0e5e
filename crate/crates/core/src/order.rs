//! Orders of a cubic field: Z[t], the maximal order, the rings in between,
//! conductors and the finite quotient rings entering the class number
//! formula.

use crate::arith::{ck_add, ck_mul, divisors, trial_factor};
use crate::error::{Error, Result};
use crate::field::{Elem, NumberFieldCubic};
use crate::lattice::{hnf, Lattice};
use serde::{Deserialize, Serialize};

pub const DEFAULT_FACTOR_BOUND: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderLattice {
    pub lat: Lattice,
    pub disc: i128,
    /// [O_F : O], once the maximal order is known.
    pub index_in_maximal: Option<i128>,
}

impl OrderLattice {
    pub fn from_lattice(f: &NumberFieldCubic, lat: Lattice) -> Result<OrderLattice> {
        let (n, d) = lat.det()?;
        let disc_p = f.poly.discriminant();
        let num = ck_mul(ck_mul(disc_p, n)?, n)?;
        let den = ck_mul(d, d)?;
        if num % den != 0 {
            return Err(Error::InvalidInput(
                "lattice discriminant is not an integer".into(),
            ));
        }
        Ok(OrderLattice {
            lat,
            disc: num / den,
            index_in_maximal: None,
        })
    }

    pub fn basis(&self) -> [Elem; 3] {
        self.lat.basis()
    }

    pub fn contains_element(&self, x: &Elem) -> Result<bool> {
        self.lat.contains(x)
    }

    pub fn is_ring(&self, f: &NumberFieldCubic) -> Result<bool> {
        self.lat.is_ring(f)
    }

    /// c[i][j][k]: coordinates of ωᵢωⱼ on the basis ω.
    pub fn structure_constants(&self, f: &NumberFieldCubic) -> Result<[[[i128; 3]; 3]; 3]> {
        let b = self.basis();
        let mut c = [[[0i128; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let prod = f.mul(&b[i], &b[j])?;
                c[i][j] = self
                    .lat
                    .coords(&prod)?
                    .ok_or_else(|| Error::InvalidInput("lattice is not a ring".into()))?;
            }
        }
        Ok(c)
    }

    /// Coordinates of a sublattice's basis on this order's basis.
    pub fn coords_of(&self, sub: &Lattice) -> Result<[[i128; 3]; 3]> {
        let mut m = [[0i128; 3]; 3];
        for (row, b) in m.iter_mut().zip(sub.basis()) {
            *row = self
                .lat
                .coords(&b)?
                .ok_or_else(|| Error::InvalidInput("not a sublattice".into()))?;
        }
        Ok(m)
    }

    /// Element with the given integer coordinates.
    pub fn elem(&self, k: &[i128; 3]) -> Result<Elem> {
        let mut n = [0i128; 3];
        for (i, ki) in k.iter().enumerate() {
            for (j, slot) in n.iter_mut().enumerate() {
                *slot = ck_add(*slot, ck_mul(*ki, self.lat.h[i][j])?)?;
            }
        }
        Elem::new(n, self.lat.d)
    }
}

/// Multiplication of coordinate vectors with structure constants, mod m.
pub fn mul_coords(c: &[[[i128; 3]; 3]; 3], x: &[i128; 3], y: &[i128; 3], m: i128) -> [i128; 3] {
    let mut z = [0i128; 3];
    for i in 0..3 {
        if x[i] == 0 {
            continue;
        }
        for j in 0..3 {
            let s = x[i] * y[j] % m;
            if s == 0 {
                continue;
            }
            for k in 0..3 {
                z[k] = (z[k] + s * c[i][j][k]) % m;
            }
        }
    }
    z.map(|v| v.rem_euclid(m))
}

fn pow_coords(
    c: &[[[i128; 3]; 3]; 3],
    x: &[i128; 3],
    mut e: u128,
    m: i128,
    one: &[i128; 3],
) -> [i128; 3] {
    let mut acc = *one;
    let mut base = x.map(|v| v.rem_euclid(m));
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_coords(c, &acc, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = mul_coords(c, &base, &base, m);
        }
    }
    acc
}

pub fn equation_order(f: &NumberFieldCubic) -> OrderLattice {
    OrderLattice {
        lat: Lattice {
            d: 1,
            h: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        },
        disc: f.poly.discriminant(),
        index_in_maximal: None,
    }
}

/// Basis of the kernel of x ↦ x·m over F_q (row vectors).
fn left_kernel_mod(m: &[[i128; 3]; 3], q: i128) -> Vec<[i128; 3]> {
    // transpose, then row-reduce to find null space of mᵀ acting on columns
    let mut a = [[0i128; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = m[j][i].rem_euclid(q);
        }
    }
    let inv = |v: i128| crate::arith::inv_mod(v, q).expect("q prime");
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..3 {
        let Some(p) = (r..3).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(r, p);
        let iv = inv(a[r][col]);
        for v in a[r].iter_mut() {
            *v = *v * iv % q;
        }
        for i in 0..3 {
            if i != r && a[i][col] != 0 {
                let t = a[i][col];
                for j in 0..3 {
                    a[i][j] = (a[i][j] - t * a[r][j]).rem_euclid(q);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..3).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &fc in &free {
        let mut v = [0i128; 3];
        v[fc] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = (-a[row][fc]).rem_euclid(q);
        }
        out.push(v);
    }
    out
}

/// One round-2 step at q: the multiplier ring of the q-radical of O.
fn enlarge_at(f: &NumberFieldCubic, o: &OrderLattice, q: i128) -> Result<OrderLattice> {
    let c = o.structure_constants(f)?;
    let one = o
        .lat
        .coords(&Elem::one())?
        .ok_or_else(|| Error::InvalidInput("order lacks 1".into()))?;
    let mut e: u128 = q as u128;
    while e < 3 {
        e *= q as u128;
    }
    let mut frob = [[0i128; 3]; 3];
    for (k, row) in frob.iter_mut().enumerate() {
        let mut x = [0i128; 3];
        x[k] = 1;
        *row = pow_coords(&c, &x, e, q, &one);
    }
    let ker = left_kernel_mod(&frob, q);
    let mut gens: Vec<Elem> = o
        .basis()
        .iter()
        .map(|b| b.scale(q, 1))
        .collect::<Result<_>>()?;
    for k in &ker {
        gens.push(o.elem(k)?);
    }
    let radical = Lattice::from_elems(&gens)?;
    let ring = radical.multiplier_ring(f)?;
    OrderLattice::from_lattice(f, ring)
}

/// Ring of integers by round-2 saturation at every prime whose square
/// divides the discriminant of Z[t].
pub fn maximal_order(f: &NumberFieldCubic, factor_bound: u64) -> Result<OrderLattice> {
    let eq = equation_order(f);
    let fac = trial_factor(eq.disc, factor_bound);
    let primes = fac.square_primes(factor_bound)?;
    let mut o = eq;
    for q in primes {
        let q = q as i128;
        loop {
            if o.disc % (q * q) != 0 {
                break;
            }
            let next = enlarge_at(f, &o, q)?;
            if next.lat == o.lat {
                break;
            }
            o = next;
        }
    }
    o.index_in_maximal = Some(1);
    Ok(o)
}

/// [O_F : Z[t]] for a computed maximal order.
pub fn index_of_equation_order(f: &NumberFieldCubic, of: &OrderLattice) -> Result<i128> {
    of.lat
        .index_of(&equation_order(f).lat)?
        .ok_or_else(|| Error::InvalidInput("Z[t] is not inside the order".into()))
}

/// Diagonal of the Smith form of an integer matrix together with the
/// inverse of the column transform: A·V = U⁻¹·D, so the rows of V⁻¹ form
/// a basis adapted to the row span of A.
fn smith(a: &[[i128; 3]; 3]) -> Result<([i128; 3], [[i128; 3]; 3])> {
    let mut m = *a;
    // track V⁻¹ directly: a column op C on m corresponds to V ← V·C and
    // V⁻¹ ← C⁻¹·V⁻¹, i.e. the inverse row op on vinv
    let mut vinv = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    for t in 0..3 {
        loop {
            // smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..3 {
                for j in t..3 {
                    if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return Err(Error::InvalidInput("singular matrix".into()));
            };
            m.swap(t, bi);
            if bj != t {
                for row in m.iter_mut() {
                    row.swap(t, bj);
                }
                vinv.swap(t, bj);
            }
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..3 {
                let qf = m[i][t].div_euclid(p);
                for j in t..3 {
                    m[i][j] -= qf * m[t][j];
                }
                if m[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..3 {
                let qf = m[t][j].div_euclid(p);
                if qf != 0 {
                    for row in m.iter_mut() {
                        row[j] -= qf * row[t];
                    }
                    // column j −= qf·column t  ⇒  V⁻¹ row t += qf·row j
                    for k in 0..3 {
                        vinv[t][k] += qf * vinv[j][k];
                    }
                }
                if m[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the remaining block
            let mut bad = None;
            for i in t + 1..3 {
                for j in t + 1..3 {
                    if m[i][j] % p != 0 {
                        bad = Some(i);
                    }
                }
            }
            match bad {
                Some(i) => {
                    for j in t..3 {
                        m[t][j] += m[i][j];
                    }
                }
                None => break,
            }
        }
    }
    let d = [m[0][0].abs(), m[1][1].abs(), m[2][2].abs()];
    Ok((d, vinv))
}

/// All rings O with o_min ⊆ O ⊆ o_max, sorted by index in o_max
/// (o_max first).
pub fn intermediate_orders(
    f: &NumberFieldCubic,
    o_min: &OrderLattice,
    o_max: &OrderLattice,
) -> Result<Vec<OrderLattice>> {
    let a = o_max.coords_of(&o_min.lat)?;
    let (d, vinv) = smith(&a)?;
    // adapted basis of o_max
    let omax_basis = o_max.basis();
    let mut adapted = [Elem::zero(); 3];
    for (i, slot) in adapted.iter_mut().enumerate() {
        let mut acc = Elem::zero();
        for k in 0..3 {
            acc = acc.add(&omax_basis[k].scale(vinv[i][k], 1)?)?;
        }
        *slot = acc;
    }
    let mut out = Vec::new();
    for h00 in divisors(d[0] as u64) {
        for h11 in divisors(d[1] as u64) {
            for h22 in divisors(d[2] as u64) {
                let (h00, h11, h22) = (h00 as i128, h11 as i128, h22 as i128);
                for h10 in 0..h00 {
                    // d1·e1 ∈ L
                    if (d[1] / h11 * h10) % h00 != 0 {
                        continue;
                    }
                    for h21 in 0..h11 {
                        let k2 = d[2] / h22;
                        if (k2 * h21) % h11 != 0 {
                            continue;
                        }
                        let k1 = -(k2 * h21) / h11;
                        for h20 in 0..h00 {
                            if (-k2 * h20 - k1 * h10) % h00 != 0 {
                                continue;
                            }
                            let rows = [[h00, 0, 0], [h10, h11, 0], [h20, h21, h22]];
                            let mut gens = Vec::with_capacity(3);
                            for r in rows {
                                let mut acc = Elem::zero();
                                for k in 0..3 {
                                    acc = acc.add(&adapted[k].scale(r[k], 1)?)?;
                                }
                                gens.push(acc);
                            }
                            let lat = Lattice::from_elems(&gens)?;
                            if lat.is_ring(f)? {
                                let mut o = OrderLattice::from_lattice(f, lat)?;
                                let idx = o_max.lat.index_of(&lat)?.ok_or(Error::Overflow)?;
                                o.index_in_maximal = o_max.index_in_maximal.map(|i| i * idx);
                                out.push(o);
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|o| (o.disc.abs(), o.lat));
    out.dedup_by_key(|o| o.lat);
    Ok(out)
}

/// Reference enumeration: every lattice between o_min and o_max with
/// index dividing [o_max : o_min], filtered by the ring condition.
pub fn intermediate_orders_bruteforce(
    f: &NumberFieldCubic,
    o_min: &OrderLattice,
    o_max: &OrderLattice,
) -> Result<Vec<OrderLattice>> {
    let n = o_max.lat.index_of(&o_min.lat)?.ok_or(Error::Overflow)?;
    let a = o_max.coords_of(&o_min.lat)?;
    let b = o_max.basis();
    let mut out = Vec::new();
    for idx in divisors(n as u64) {
        for h00 in divisors(idx) {
            for h11 in divisors(idx / h00) {
                let h22 = (idx / h00 / h11) as i128;
                let (h00, h11) = (h00 as i128, h11 as i128);
                for h10 in 0..h00 {
                    for h20 in 0..h00 {
                        for h21 in 0..h11 {
                            let h = [[h00, 0, 0], [h10, h11, 0], [h20, h21, h22]];
                            let l = Lattice { d: 1, h };
                            let inside = a
                                .iter()
                                .all(|r| l.contains(&Elem::int(*r)).unwrap_or(false));
                            if !inside {
                                continue;
                            }
                            let mut gens = Vec::with_capacity(3);
                            for r in h {
                                let mut acc = Elem::zero();
                                for k in 0..3 {
                                    acc = acc.add(&b[k].scale(r[k], 1)?)?;
                                }
                                gens.push(acc);
                            }
                            let lat = Lattice::from_elems(&gens)?;
                            if lat.is_ring(f)? {
                                out.push(OrderLattice::from_lattice(f, lat)?);
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|o| (o.disc.abs(), o.lat));
    Ok(out)
}

/// The conductor {x ∈ O_F : x·O_F ⊆ O}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conductor {
    pub lat: Lattice,
    /// [O_F : 𝔣]
    pub norm: i128,
}

pub fn conductor(f: &NumberFieldCubic, o: &OrderLattice, of: &OrderLattice) -> Result<Conductor> {
    let lat = o.lat.colon(f, &of.lat)?;
    let norm = of.lat.index_of(&lat)?.ok_or(Error::Overflow)?;
    Ok(Conductor { lat, norm })
}

/// #(A/I)^× by testing every residue x for xA + I = A.
pub fn finite_unit_count_literal(
    f: &NumberFieldCubic,
    a: &OrderLattice,
    i: &Lattice,
) -> Result<u128> {
    let c = a.structure_constants(f)?;
    let ic = a.coords_of(i)?;
    let ih = hnf(&ic, None)?;
    let n = ih[0][0] * ih[1][1] * ih[2][2];
    let mut count = 0u128;
    for k0 in 0..ih[0][0] {
        for k1 in 0..ih[1][1] {
            for k2 in 0..ih[2][2] {
                let x = [k0, k1, k2];
                let mut rows: Vec<[i128; 3]> = ih.to_vec();
                for j in 0..3 {
                    let mut e = [0i128; 3];
                    e[j] = 1;
                    rows.push(mul_coords(&c, &x, &e, n.max(1)));
                }
                let h = hnf(&rows, Some(n.max(1)))?;
                if h[0][0] * h[1][1] * h[2][2] == 1 {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

fn det_mod(m: &[Vec<i128>], q: i128) -> i128 {
    let k = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|v| v.rem_euclid(q)).collect())
        .collect();
    let mut det = 1i128;
    for col in 0..k {
        let Some(p) = (col..k).find(|&i| a[i][col] != 0) else {
            return 0;
        };
        if p != col {
            a.swap(p, col);
            det = (q - det) % q;
        }
        det = det * a[col][col] % q;
        let inv = crate::arith::inv_mod(a[col][col], q).expect("q prime");
        for i in col + 1..k {
            let t = a[i][col] * inv % q;
            if t == 0 {
                continue;
            }
            for j in col..k {
                a[i][j] = (a[i][j] - t * a[col][j]).rem_euclid(q);
            }
        }
    }
    det
}

/// #(A/I)^×, split into q-primary parts; each part is counted by
/// enumerating its residue algebra A/(I + qA) with a determinant test.
pub fn finite_unit_count(f: &NumberFieldCubic, a: &OrderLattice, i: &Lattice) -> Result<u128> {
    let n = a.lat.index_of(i)?.ok_or(Error::Overflow)?;
    if n == 1 {
        return Ok(1);
    }
    let c = a.structure_constants(f)?;
    let fac = trial_factor(n, u64::MAX);
    let mut total: u128 = 1;
    for (q, v) in fac.factors {
        let q = q as i128;
        let qpart = q.pow(v);
        // residue algebra A/(I + qA) in A-coordinates
        let mut rows = a.coords_of(i)?.to_vec();
        for j in 0..3 {
            let mut e = [0i128; 3];
            e[j] = q;
            rows.push(e);
        }
        let h = hnf(&rows, Some(q))?;
        let free: Vec<usize> = (0..3).filter(|&j| h[j][j] == q).collect();
        let k = free.len();
        let size = q.pow(k as u32);
        // reduce a coordinate vector to its triangular residue
        let reduce = |mut x: [i128; 3]| -> [i128; 3] {
            for col in (0..3).rev() {
                let t = x[col].div_euclid(h[col][col]);
                for j in 0..=col {
                    x[j] -= t * h[col][j];
                }
            }
            x.map(|v| v.rem_euclid(q))
        };
        let mut units = 0u128;
        let mut x = [0i128; 3];
        for idx in 0..size {
            let mut r = idx;
            for &fj in &free {
                x[fj] = r % q;
                r /= q;
            }
            let mut m = vec![vec![0i128; k]; k];
            for (row, &bj) in free.iter().enumerate() {
                let mut e = [0i128; 3];
                e[bj] = 1;
                let y = reduce(mul_coords(&c, &x, &e, q));
                for (col, &fj) in free.iter().enumerate() {
                    m[row][col] = y[fj];
                }
            }
            if det_mod(&m, q) != 0 {
                units += 1;
            }
        }
        let lift = (qpart / size) as u128;
        total = total.checked_mul(units * lift).ok_or(Error::Overflow)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::CubicPoly;

    fn field(a: i64, b: i64, c: i64) -> NumberFieldCubic {
        NumberFieldCubic::new(CubicPoly::new(a, b, c)).unwrap()
    }

    #[test]
    fn equation_order_discs() {
        assert_eq!(equation_order(&field(-3, 0, 1)).disc, 81);
        assert_eq!(equation_order(&field(1, -2, -1)).disc, 49);
        assert_eq!(equation_order(&field(-1, -3, 1)).disc, 148);
    }

    #[test]
    fn maximal_orders_of_small_fields() {
        for (p, disc) in [((-3, 0, 1), 81), ((1, -2, -1), 49), ((-1, -3, 1), 148)] {
            let f = field(p.0, p.1, p.2);
            let of = maximal_order(&f, 1000).unwrap();
            assert_eq!(of.disc, disc);
            assert_eq!(index_of_equation_order(&f, &of).unwrap(), 1);
        }
    }

    #[test]
    fn maximal_order_of_non_monogenic_generator() {
        for (p, idx) in [((-9, -1, 1), 8), ((-8, 5, 1), 7), ((-11, 27, -1), 8)] {
            let f = field(p.0, p.1, p.2);
            let of = maximal_order(&f, 1000).unwrap();
            assert_eq!(index_of_equation_order(&f, &of).unwrap(), idx);
            assert_eq!(of.disc * idx * idx, f.poly.discriminant());
            let q = if idx == 7 { 7 } else { 2 };
            let again = enlarge_at(&f, &of, q).unwrap();
            assert_eq!(again.lat, of.lat);
        }
    }

    #[test]
    fn intermediate_orders_match_bruteforce() {
        for p in [(-9, -1, 1), (-8, 5, 1), (-11, 27, -1), (-6, 3, 1)] {
            let f = field(p.0, p.1, p.2);
            let of = maximal_order(&f, 1000).unwrap();
            let zt = equation_order(&f);
            let fast = intermediate_orders(&f, &zt, &of).unwrap();
            let slow = intermediate_orders_bruteforce(&f, &zt, &of).unwrap();
            let a: Vec<_> = fast.iter().map(|o| o.lat).collect();
            let b: Vec<_> = slow.iter().map(|o| o.lat).collect();
            assert_eq!(a, b);
            assert!(a.contains(&zt.lat) && a.contains(&of.lat));
            for o in &fast {
                let idx = of.lat.index_of(&o.lat).unwrap().unwrap();
                assert_eq!(o.disc, idx * idx * of.disc);
            }
        }
    }

    #[test]
    fn unit_counts_agree() {
        for p in [(-9, -1, 1), (-8, 5, 1), (-6, 3, 1)] {
            let f = field(p.0, p.1, p.2);
            let of = maximal_order(&f, 1000).unwrap();
            let zt = equation_order(&f);
            for o in intermediate_orders(&f, &zt, &of).unwrap() {
                let cond = conductor(&f, &o, &of).unwrap();
                assert!(o.lat.contains_lattice(&cond.lat).unwrap());
                for ring in [&of, &o] {
                    let lit = finite_unit_count_literal(&f, ring, &cond.lat).unwrap();
                    let fast = finite_unit_count(&f, ring, &cond.lat).unwrap();
                    assert_eq!(lit, fast);
                }
            }
        }
    }
}
