//! Unit groups of cubic orders: fundamental pairs, regulators, unit
//! indices and roots of a characteristic polynomial inside an order.

use crate::enumerate::short_vectors;
use crate::error::{Error, Result};
use crate::field::{BigElem, Elem, NumberFieldCubic};
use crate::lattice::{hnf, Lattice};
use crate::minima::{reduce_units, EmbeddedLattice, LoggedUnit, MinimaGraph};
use crate::order::{mul_coords, OrderLattice};
use crate::roots::approx_roots;
use crate::CubicPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub const DEFAULT_SEARCH_CAP: u64 = 5_000_000;

#[derive(Debug, Clone)]
pub struct UnitGroupData {
    pub order: OrderLattice,
    pub fundamental_pair: [BigElem; 2],
    /// log|σⱼ(εᵢ)| in the field's embedding order.
    pub log_matrix: [[f64; 3]; 2],
    pub regulator: f64,
}

impl UnitGroupData {
    fn from_logged(order: &OrderLattice, u: &[LoggedUnit]) -> Result<UnitGroupData> {
        if u.len() != 2 {
            return Err(Error::SearchExhausted(format!("unit rank {}", u.len())));
        }
        let log_matrix = [u[0].log, u[1].log];
        Ok(UnitGroupData {
            order: *order,
            fundamental_pair: [u[0].elem.clone(), u[1].elem.clone()],
            regulator: minor_det(&log_matrix, 2),
            log_matrix,
        })
    }

    /// Regulator computed with embedding `drop` left out.
    pub fn regulator_dropping(&self, drop: usize) -> f64 {
        minor_det(&self.log_matrix, drop)
    }

    /// Exact checks: both units lie in the order and have norm ±1.
    pub fn verify(&self, f: &NumberFieldCubic) -> Result<()> {
        for e in &self.fundamental_pair {
            let (n, d) = e.norm(&f.poly);
            if !d.is_one() || !(n.is_one() || (-n).is_one()) {
                return Err(Error::InvalidInput("unit of norm other than ±1".into()));
            }
            if big_coords(&self.order.lat, e)?.is_none() {
                return Err(Error::InvalidInput("unit outside the order".into()));
            }
        }
        Ok(())
    }
}

fn minor_det(m: &[[f64; 3]; 2], drop: usize) -> f64 {
    let (i, j) = match drop {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    (m[0][i] * m[1][j] - m[0][j] * m[1][i]).abs()
}

/// Integer coordinates of a big element on the lattice basis.
pub fn big_coords(lat: &Lattice, x: &BigElem) -> Result<Option<[BigInt; 3]>> {
    let ld = BigInt::from(lat.d);
    let mut v: [BigInt; 3] = Default::default();
    for j in 0..3 {
        let t = &x.n[j] * &ld;
        let (q, r) = t.div_rem(&x.d);
        if !r.is_zero() {
            return Ok(None);
        }
        v[j] = q;
    }
    let mut k: [BigInt; 3] = Default::default();
    for col in (0..3).rev() {
        let h = BigInt::from(lat.h[col][col]);
        let (q, r) = v[col].div_rem(&h);
        if !r.is_zero() {
            return Ok(None);
        }
        for j in 0..col {
            v[j] -= &q * BigInt::from(lat.h[col][j]);
        }
        k[col] = q;
    }
    Ok(Some(k))
}

/// Fundamental units and regulator from the graph of reduced principal
/// ideals.
pub fn fundamental_units(
    f: &NumberFieldCubic,
    o: &OrderLattice,
    vertex_cap: usize,
) -> Result<(UnitGroupData, MinimaGraph)> {
    let g = MinimaGraph::explore(f, &o.lat, vertex_cap)?;
    let data = UnitGroupData::from_logged(o, &g.units)?;
    data.verify(f)?;
    Ok((data, g))
}

/// All units u of O (one of each ±u) with max |log|σⱼ(u)|| ≤ log_bound.
pub fn unit_search(
    f: &NumberFieldCubic,
    o: &OrderLattice,
    log_bound: f64,
    cap: u64,
) -> Result<Vec<Elem>> {
    if log_bound <= 0.0 || !log_bound.is_finite() {
        return Err(Error::InvalidInput("log bound must be positive".into()));
    }
    let el = EmbeddedLattice::new(f, o.lat)?;
    let side = log_bound.exp();
    // points of the ellipsoid containing the box, over the covolume
    let estimate = 4.0 / 3.0 * std::f64::consts::PI * 3f64.powf(1.5) * side.powi(3) / el.covol;
    if estimate > cap as f64 {
        return Err(Error::BoxTooLarge { estimate, cap });
    }
    let mut scaled = el.emb;
    for row in scaled.iter_mut() {
        for v in row.iter_mut() {
            *v /= side;
        }
    }
    let mut out = Vec::new();
    for k in short_vectors(&scaled, 3.0 * (1.0 + 1e-9)) {
        let x = el.elem(&k)?;
        let (n, d) = f.norm(&x)?;
        if d != 1 || n.abs() != 1 {
            continue;
        }
        let logs = f.embed_all_precise(&x).map(|v| v.abs().ln());
        if logs.iter().all(|l| l.abs() <= log_bound * (1.0 + 1e-12)) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Fundamental units by exhaustive unit search. The bound grows until the
/// fundamental parallelogram of the reduced pair lies inside the searched
/// box and every unit found is an integer combination of the pair.
pub fn fundamental_units_by_search(
    f: &NumberFieldCubic,
    o: &OrderLattice,
    cap: u64,
) -> Result<UnitGroupData> {
    let mut bound = 0.5;
    for _ in 0..64 {
        let found = unit_search(f, o, bound, cap)?;
        let logged: Vec<LoggedUnit> = found
            .iter()
            .map(|x| LoggedUnit {
                log: f.embed_all_precise(x).map(|v| v.abs().ln()),
                elem: BigElem::from_elem(x),
            })
            .collect();
        let basis = reduce_units(logged.clone(), f)?;
        if basis.len() < 2 {
            bound *= 1.5;
            continue;
        }
        let (a, b) = (&basis[0].log, &basis[1].log);
        let cert = (0..3).map(|i| a[i].abs() + b[i].abs()).fold(0.0, f64::max);
        if cert > bound {
            bound = cert * 1.01;
            continue;
        }
        // every unit of the box must be a word in the pair
        let det = a[0] * b[1] - a[1] * b[0];
        for u in &logged {
            let x = (u.log[0] * b[1] - u.log[1] * b[0]) / det;
            let y = (a[0] * u.log[1] - a[1] * u.log[0]) / det;
            if (x - x.round()).abs() > 1e-6 || (y - y.round()).abs() > 1e-6 {
                return Err(Error::SearchExhausted(
                    "unit outside the lattice of the reduced pair".into(),
                ));
            }
        }
        let data = UnitGroupData::from_logged(o, &basis)?;
        data.verify(f)?;
        return Ok(data);
    }
    Err(Error::SearchExhausted(
        "no certified fundamental pair".into(),
    ))
}

/// Reduction of elements of a maximal order modulo n·O_F, with membership
/// in a suborder O ⊇ n·O_F.
struct ModRing {
    n: i128,
    c: [[[i128; 3]; 3]; 3],
    sub: [[i128; 3]; 3],
    one: [i128; 3],
}

impl ModRing {
    fn new(f: &NumberFieldCubic, of: &OrderLattice, o: &OrderLattice, n: i128) -> Result<ModRing> {
        let c = of.structure_constants(f)?;
        let sub = hnf(&of.coords_of(&o.lat)?, Some(n))?;
        let one = of
            .lat
            .coords(&Elem::one())?
            .ok_or_else(|| Error::InvalidInput("order lacks 1".into()))?;
        Ok(ModRing { n, c, sub, one })
    }

    fn reduce(&self, x: &[BigInt; 3]) -> [i128; 3] {
        let n = BigInt::from(self.n);
        x.each_ref()
            .map(|v| v.mod_floor(&n).to_i128().expect("reduced"))
    }

    fn mul(&self, x: &[i128; 3], y: &[i128; 3]) -> [i128; 3] {
        mul_coords(&self.c, x, y, self.n)
    }

    fn pow(&self, x: &[i128; 3], mut e: u64) -> [i128; 3] {
        let mut acc = self.one.map(|v| v.rem_euclid(self.n));
        let mut base = *x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn in_sub(&self, x: &[i128; 3]) -> bool {
        let mut v = *x;
        for col in (0..3).rev() {
            let h = self.sub[col][col];
            if v[col].rem_euclid(h) != 0 {
                return false;
            }
            let q = v[col].div_euclid(h);
            for j in 0..=col {
                v[j] -= q * self.sub[col][j];
            }
        }
        true
    }
}

/// Result of comparing the unit groups of O_F and a suborder.
#[derive(Debug, Clone)]
pub struct UnitIndex {
    pub index: u64,
    /// Exponent pairs (a, b) with ε₁^a·ε₂^b generating the units of the
    /// suborder modulo ±1.
    pub basis: [[i64; 2]; 2],
}

/// [O_F^× : O^×] for O ⊆ O_F, with the maximal order's fundamental pair.
pub fn unit_index(
    f: &NumberFieldCubic,
    of: &OrderLattice,
    units: &UnitGroupData,
    o: &OrderLattice,
    cap: u64,
) -> Result<UnitIndex> {
    let n = of
        .lat
        .index_of(&o.lat)?
        .ok_or_else(|| Error::InvalidInput("not a suborder".into()))?;
    if n == 1 {
        return Ok(UnitIndex {
            index: 1,
            basis: [[1, 0], [0, 1]],
        });
    }
    let ring = ModRing::new(f, of, o, n)?;
    let e = units
        .fundamental_pair
        .each_ref()
        .map(|u| big_coords(&of.lat, u).map(|k| k.map(|k| ring.reduce(&k))));
    let e1 = e[0]
        .clone()?
        .ok_or_else(|| Error::InvalidInput("unit outside O_F".into()))?;
    let e2 = e[1]
        .clone()?
        .ok_or_else(|| Error::InvalidInput("unit outside O_F".into()))?;
    // order of ε₁ modulo O^×
    let mut n1 = 1u64;
    let mut p = e1;
    while !ring.in_sub(&p) {
        n1 += 1;
        if n1 > cap {
            return Err(Error::CapExceeded("unit index search".into()));
        }
        p = ring.mul(&p, &e1);
    }
    let powers: Vec<[i128; 3]> = (0..n1).map(|a| ring.pow(&e1, a)).collect();
    let mut q = ring.one.map(|v| v.rem_euclid(n));
    let mut b = 0u64;
    loop {
        b += 1;
        if b.saturating_mul(n1) > cap {
            return Err(Error::CapExceeded("unit index search".into()));
        }
        q = ring.mul(&q, &e2);
        for (a, pa) in powers.iter().enumerate() {
            if ring.in_sub(&ring.mul(pa, &q)) {
                return Ok(UnitIndex {
                    index: n1 * b,
                    basis: [[n1 as i64, 0], [a as i64, b as i64]],
                });
            }
        }
    }
}

/// Units of the suborder: ε₁^a·ε₂^b for the rows of the index basis.
pub fn suborder_units(
    f: &NumberFieldCubic,
    maximal: &UnitGroupData,
    idx: &UnitIndex,
    o: &OrderLattice,
) -> Result<UnitGroupData> {
    let [e1, e2] = &maximal.fundamental_pair;
    let pw = |e: &BigElem, k: i64| -> Result<BigElem> {
        let base = if k < 0 {
            e.inverse(&f.poly).ok_or(Error::DivisionByZero)?
        } else {
            e.clone()
        };
        Ok(base.pow(k.unsigned_abs(), &f.poly))
    };
    let mut out = Vec::new();
    for [a, b] in idx.basis {
        let elem = pw(e1, a)?.mul(&pw(e2, b)?, &f.poly);
        let log = [0, 1, 2]
            .map(|i| a as f64 * maximal.log_matrix[0][i] + b as f64 * maximal.log_matrix[1][i]);
        out.push(LoggedUnit { log, elem });
    }
    let data = UnitGroupData::from_logged(o, &out)?;
    data.verify(f)?;
    Ok(data)
}

/// Elements x of O with characteristic polynomial p, i.e. the roots of p
/// lying in O.
pub fn roots_in_order(f: &NumberFieldCubic, o: &OrderLattice, p: &CubicPoly) -> Result<Vec<Elem>> {
    let r = approx_roots(p);
    let t = f.roots;
    // power-basis coordinates c with c₀ + c₁tᵢ + c₂tᵢ² = r_π(i)
    let vinv = {
        let m = [
            [1.0, t[0], t[0] * t[0]],
            [1.0, t[1], t[1] * t[1]],
            [1.0, t[2], t[2] * t[2]],
        ];
        invert3(&m)
    };
    let disc = f.poly.discriminant();
    let mut out: Vec<Elem> = Vec::new();
    for perm in [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ] {
        let target = perm.map(|k| r[k]);
        let mut n = [0i128; 3];
        let mut ok = true;
        for j in 0..3 {
            let c = (0..3).map(|i| vinv[j][i] * target[i]).sum::<f64>() * disc as f64;
            if !c.is_finite() || c.abs() > 1e30 {
                ok = false;
                break;
            }
            n[j] = c.round() as i128;
        }
        if !ok {
            continue;
        }
        let x = Elem::new(n, disc)?;
        if f.charpoly(&x)? == Some(*p) && o.contains_element(&x)? && !out.contains(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Number of roots of p lying in O.
pub fn units_with_charpoly(f: &NumberFieldCubic, o: &OrderLattice, p: &CubicPoly) -> Result<usize> {
    p.check_admissible()?;
    Ok(roots_in_order(f, o, p)?.len())
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{equation_order, intermediate_orders, maximal_order};

    fn field(a: i64, b: i64, c: i64) -> NumberFieldCubic {
        NumberFieldCubic::new(CubicPoly::new(a, b, c)).unwrap()
    }

    #[test]
    fn search_and_graph_agree_on_small_fields() {
        for p in [
            (1, -2, -1),
            (-3, 0, 1),
            (-1, -3, 1),
            (-1, -4, -1),
            (-4, 1, 1),
        ] {
            let f = field(p.0, p.1, p.2);
            let of = maximal_order(&f, 1000).unwrap();
            let (g, _) = fundamental_units(&f, &of, 100_000).unwrap();
            let s = fundamental_units_by_search(&f, &of, DEFAULT_SEARCH_CAP).unwrap();
            assert!(
                (g.regulator - s.regulator).abs() < 1e-9 * g.regulator,
                "{p:?}"
            );
            for drop in 0..3 {
                assert!((g.regulator_dropping(drop) - g.regulator).abs() < 1e-10 * g.regulator);
            }
        }
    }

    #[test]
    fn generator_of_disc_49_field_is_found() {
        let f = field(1, -2, -1);
        let of = maximal_order(&f, 1000).unwrap();
        let units = unit_search(&f, &of, 1.0, DEFAULT_SEARCH_CAP).unwrap();
        assert!(units
            .iter()
            .any(|u| *u == Elem::gen() || *u == Elem::gen().neg()));
        let one = units
            .iter()
            .filter(|u| **u == Elem::one() || **u == Elem::one().neg())
            .count();
        assert_eq!(one, 1);
    }

    #[test]
    fn index_matches_graph_on_suborders() {
        for p in [(-9, -1, 1), (-8, 5, 1), (-6, 3, 1)] {
            let f = field(p.0, p.1, p.2);
            let of = maximal_order(&f, 1000).unwrap();
            let (uf, _) = fundamental_units(&f, &of, 100_000).unwrap();
            for o in intermediate_orders(&f, &equation_order(&f), &of).unwrap() {
                let idx = unit_index(&f, &of, &uf, &o, 1 << 24).unwrap();
                let (direct, _) = fundamental_units(&f, &o, 1_000_000).unwrap();
                let want = idx.index as f64 * uf.regulator;
                assert!((direct.regulator - want).abs() < 1e-9 * want, "{p:?}");
                let sub = suborder_units(&f, &uf, &idx, &o).unwrap();
                assert!((sub.regulator - want).abs() < 1e-9 * want);
            }
        }
    }

    #[test]
    fn roots_in_orders() {
        let f = field(-3, 0, 1);
        let of = maximal_order(&f, 1000).unwrap();
        assert_eq!(units_with_charpoly(&f, &of, &f.poly).unwrap(), 3);
        let f = field(-1, -3, 1);
        let of = maximal_order(&f, 1000).unwrap();
        assert_eq!(units_with_charpoly(&f, &of, &f.poly).unwrap(), 1);
        let f = field(1, -2, -1);
        assert_eq!(
            units_with_charpoly(&f, &equation_order(&f), &f.poly).unwrap(),
            3
        );
    }
}
