//! Class numbers of cubic orders: the class group of O_F from prime ideals
//! below the Minkowski bound, the conductor formula for suborders, and a
//! direct count of ideal classes used as an independent check.

use crate::arith::{isqrt, primes_up_to};
use crate::error::{Error, Result};
use crate::field::{Elem, NumberFieldCubic};
use crate::lattice::{hnf, Lattice};
use crate::minima::{reduce, MinimaGraph};
use crate::order::{conductor, finite_unit_count, mul_coords, OrderLattice};
use serde::{Deserialize, Serialize};

/// Largest integer ≤ (2/9)·√|disc|.
pub fn minkowski_bound(disc: i128) -> u64 {
    // ⌊2√d/9⌋ = ⌊√(4d)/9⌋, computed exactly
    (isqrt(4 * disc.unsigned_abs()) / 9) as u64
}

/// An integral ideal of O_F of prime norm q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub q: u64,
    pub lat: Lattice,
}

fn lattice_from_coords(o: &OrderLattice, rows: &[[i128; 3]]) -> Result<Lattice> {
    let h = hnf(rows, None)?;
    let gens: Vec<Elem> = h.iter().map(|r| o.elem(r)).collect::<Result<_>>()?;
    Lattice::from_elems(&gens)
}

/// Prime ideals of residue degree 1 above q. For q prime to the index of
/// Z[t] these are (q, t − r) for the roots r of p mod q; otherwise they are
/// found as kernels of the ring maps O_F → F_q.
pub fn degree_one_primes(
    f: &NumberFieldCubic,
    of: &OrderLattice,
    q: u64,
) -> Result<Vec<PrimeIdeal>> {
    let qi = q as i128;
    let p = f.poly;
    let roots: Vec<i128> = (0..qi)
        .filter(|&r| {
            let v = ((r + p.a as i128) * r % qi + p.b as i128) * r % qi + p.c as i128;
            v.rem_euclid(qi) == 0
        })
        .collect();
    let zt_index = isqrt((p.discriminant() / of.disc).unsigned_abs()) as i128;
    let mut out: Vec<PrimeIdeal> = Vec::new();
    if zt_index % qi != 0 {
        for r in roots {
            let lat = of.lat.scale_int(qi)?.sum(
                &of.lat
                    .scale_elem(f, &Elem::gen().sub(&Elem::int([r, 0, 0]))?)?,
            )?;
            out.push(PrimeIdeal { q, lat });
        }
        return Ok(out);
    }
    let c = of.structure_constants(f)?;
    let one = of
        .lat
        .coords(&Elem::one())?
        .ok_or_else(|| Error::InvalidInput("order lacks 1".into()))?;
    let t = of
        .lat
        .coords(&Elem::gen())?
        .ok_or_else(|| Error::InvalidInput("t outside the order".into()))?;
    let basis = [[1i128, 0, 0], [0, 1, 0], [0, 0, 1]];
    for r in roots {
        // a ring map is fixed by its values on two basis vectors once φ(1) = 1
        for v1 in 0..qi {
            for v2 in 0..qi {
                let v0 = phi_of(&one, v1, v2, qi);
                let vals = [v0, v1, v2];
                let phi = |x: &[i128; 3]| {
                    (x[0] * vals[0] + x[1] * vals[1] + x[2] * vals[2]).rem_euclid(qi)
                };
                if phi(&one) != 1 || phi(&t) != r {
                    continue;
                }
                let multiplicative = basis.iter().all(|ei| {
                    basis.iter().all(|ej| {
                        (phi(ei) * phi(ej) - phi(&mul_coords(&c, ei, ej, qi))).rem_euclid(qi) == 0
                    })
                });
                if !multiplicative {
                    continue;
                }
                let mut rows = vec![[qi, 0, 0], [0, qi, 0], [0, 0, qi]];
                for (j, e) in basis.iter().enumerate() {
                    let mut row = *e;
                    for k in 0..3 {
                        row[k] -= vals[j] * one[k];
                    }
                    rows.push(row);
                }
                let lat = lattice_from_coords(of, &rows)?;
                if !out.iter().any(|pi| pi.lat == lat) {
                    out.push(PrimeIdeal { q, lat });
                }
            }
        }
    }
    Ok(out)
}

// φ(ω₀) forced by φ(1) = 1
fn phi_of(one: &[i128; 3], v1: i128, v2: i128, q: i128) -> i128 {
    let inv = crate::arith::inv_mod(one[0].rem_euclid(q), q).unwrap_or(0);
    ((1 - one[1] * v1 - one[2] * v2) * inv).rem_euclid(q)
}

/// Ideal classes of O_F, given by representatives (reduced lattices).
#[derive(Debug, Clone)]
pub struct ClassGroup {
    pub reps: Vec<Lattice>,
    pub generators: usize,
}

impl ClassGroup {
    pub fn order(&self) -> u64 {
        self.reps.len() as u64
    }
}

fn same_class(f: &NumberFieldCubic, g: &MinimaGraph, x: &Lattice, y_inv: &Lattice) -> Result<bool> {
    g.is_principal(f, &x.product(f, y_inv)?)
}

/// The class group of O_F from degree-1 primes up to the Minkowski bound.
/// `graph` must be the minima graph of O_F.
pub fn class_group_maximal(
    f: &NumberFieldCubic,
    of: &OrderLattice,
    graph: &MinimaGraph,
) -> Result<ClassGroup> {
    let m = minkowski_bound(of.disc);
    let mut reps = vec![of.lat];
    let mut invs = vec![of.lat];
    let mut generators = 0;
    for q in primes_up_to(m) {
        for pr in degree_one_primes(f, of, q)? {
            generators += 1;
            let find = |x: &Lattice, invs: &[Lattice]| -> Result<Option<usize>> {
                for (k, ci) in invs.iter().enumerate() {
                    if same_class(f, graph, x, ci)? {
                        return Ok(Some(k));
                    }
                }
                Ok(None)
            };
            if find(&pr.lat, &invs)?.is_some() {
                continue;
            }
            // smallest k with P^k in the current subgroup
            let mut power = reduce(f, &pr.lat)?;
            let mut layers = vec![power];
            loop {
                power = reduce(f, &power.product(f, &pr.lat)?)?;
                if find(&power, &invs)?.is_some() {
                    break;
                }
                layers.push(power);
                if layers.len() as u64 * reps.len() as u64 > 1 << 20 {
                    return Err(Error::CapExceeded("class group too large".into()));
                }
            }
            let mut new_reps = reps.clone();
            for pk in &layers {
                for c in &reps {
                    new_reps.push(reduce(f, &c.product(f, pk)?)?);
                }
            }
            invs = new_reps
                .iter()
                .map(|c| of.lat.colon(f, c))
                .collect::<Result<_>>()?;
            reps = new_reps;
        }
    }
    Ok(ClassGroup { reps, generators })
}

/// h(O) = h(O_F)·#(O_F/𝔣)^× / (#(O/𝔣)^×·[O_F^× : O^×]).
pub fn class_number_order(
    f: &NumberFieldCubic,
    o: &OrderLattice,
    of: &OrderLattice,
    h_max: u64,
    unit_idx: u64,
) -> Result<u64> {
    if o.lat == of.lat {
        return Ok(h_max);
    }
    let cond = conductor(f, o, of)?;
    let big = finite_unit_count(f, of, &cond.lat)?;
    let small = finite_unit_count(f, o, &cond.lat)?;
    let num = (h_max as u128).checked_mul(big).ok_or(Error::Overflow)?;
    let den = small.checked_mul(unit_idx as u128).ok_or(Error::Overflow)?;
    if den == 0 || num % den != 0 {
        return Err(Error::NonIntegralResult { num, den });
    }
    u64::try_from(num / den).map_err(|_| Error::Overflow)
}

/// Deliberate defects that validation runs must detect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mutation {
    /// Drop the unit index from the conductor formula.
    ConductorFormula,
}

/// The conductor formula with the given defect applied.
pub fn class_number_order_mutated(
    f: &NumberFieldCubic,
    o: &OrderLattice,
    of: &OrderLattice,
    h_max: u64,
    unit_idx: u64,
    mutation: Option<Mutation>,
) -> Result<u64> {
    match mutation {
        None => class_number_order(f, o, of, h_max, unit_idx),
        Some(Mutation::ConductorFormula) => class_number_order(f, o, of, h_max, 1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectClassCount {
    /// Classes of invertible ideals.
    pub picard: u64,
    /// Classes of all ideals met among integral ideals up to the bound.
    pub all_ideals: u64,
    pub ideals_examined: u64,
}

/// Counts ideal classes of O by listing every integral O-ideal of index at
/// most the Minkowski bound and sorting them into classes with minima
/// graphs.
pub fn class_number_order_direct(
    f: &NumberFieldCubic,
    o: &OrderLattice,
    ideal_cap: u64,
    vertex_cap: usize,
) -> Result<DirectClassCount> {
    let m = minkowski_bound(o.disc).max(1);
    let c = o.structure_constants(f)?;
    let mut classes: Vec<(MinimaGraph, bool)> = Vec::new();
    let mut examined = 0u64;
    for n in 1..=m as i128 {
        for h00 in 1..=n {
            if n % h00 != 0 {
                continue;
            }
            for h11 in 1..=n / h00 {
                if (n / h00) % h11 != 0 {
                    continue;
                }
                let h22 = n / h00 / h11;
                for h10 in 0..h00 {
                    for h20 in 0..h00 {
                        for h21 in 0..h11 {
                            let rows = [[h00, 0, 0], [h10, h11, 0], [h20, h21, h22]];
                            if !is_ideal(&c, &rows) {
                                continue;
                            }
                            examined += 1;
                            if examined > ideal_cap {
                                return Err(Error::CapExceeded("direct class count".into()));
                            }
                            let lat = lattice_from_coords(o, &rows)?;
                            let red = reduce(f, &lat)?;
                            if classes.iter().any(|(g, _)| g.index.contains_key(&red)) {
                                continue;
                            }
                            let inv = o.lat.colon(f, &lat)?;
                            let invertible = lat.product(f, &inv)? == o.lat;
                            classes.push((MinimaGraph::explore(f, &red, vertex_cap)?, invertible));
                        }
                    }
                }
            }
        }
    }
    Ok(DirectClassCount {
        picard: classes.iter().filter(|(_, inv)| *inv).count() as u64,
        all_ideals: classes.len() as u64,
        ideals_examined: examined,
    })
}

/// Whether the lattice with the given HNF rows (order coordinates) is
/// closed under multiplication by the order.
fn is_ideal(c: &[[[i128; 3]; 3]; 3], rows: &[[i128; 3]; 3]) -> bool {
    let inside = |mut v: [i128; 3]| -> bool {
        for col in (0..3).rev() {
            let h = rows[col][col];
            if v[col].rem_euclid(h) != 0 {
                return false;
            }
            let q = v[col].div_euclid(h);
            for j in 0..=col {
                v[j] -= q * rows[col][j];
            }
        }
        true
    };
    for r in rows {
        for i in 0..3 {
            let mut z = [0i128; 3];
            for a in 0..3 {
                for k in 0..3 {
                    z[k] += r[a] * c[a][i][k];
                }
            }
            if !inside(z) {
                return false;
            }
        }
    }
    true
}
