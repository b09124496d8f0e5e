//! The graph of reduced principal ideals of an order. Vertices are the
//! lattices θ⁻¹O in which 1 is a minimum; edges join 1 to its Voronoi
//! neighbours. Cycles in the graph produce units, and the vertex set
//! decides principality.

use crate::enumerate::{lll, short_vectors, shortest_vector};
use crate::error::{Error, Result};
use crate::field::{BigElem, Elem, NumberFieldCubic};
use crate::lattice::Lattice;
use std::collections::{HashMap, VecDeque};

pub const DEFAULT_VERTEX_CAP: usize = 2_000_000;

/// Relative slack below which float comparisons are re-done exactly.
const TIE: f64 = 1e-9;
/// Log-vectors shorter than this are torsion.
const TRIVIAL_LOG: f64 = 1e-6;

/// A lattice with an LLL-reduced exact basis and its embeddings.
#[derive(Debug, Clone)]
pub struct EmbeddedLattice {
    pub lat: Lattice,
    pub basis: [Elem; 3],
    pub emb: [[f64; 3]; 3],
    pub covol: f64,
}

fn combine(basis: &[Elem; 3], k: &[i64; 3]) -> Result<Elem> {
    let mut acc = Elem::zero();
    for j in 0..3 {
        if k[j] != 0 {
            acc = acc.add(&basis[j].scale(k[j] as i128, 1)?)?;
        }
    }
    Ok(acc)
}

impl EmbeddedLattice {
    pub fn new(f: &NumberFieldCubic, lat: Lattice) -> Result<EmbeddedLattice> {
        let hb = lat.basis();
        let mut emb = hb.map(|b| f.embed_all_precise(&b));
        let mut u = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
        lll(&mut emb, &mut u);
        let mut basis = [Elem::zero(); 3];
        for j in 0..3 {
            basis[j] = combine(&hb, &u[j])?;
        }
        let emb = basis.map(|b| f.embed_all_precise(&b));
        let covol = det3f(&emb).abs();
        Ok(EmbeddedLattice {
            lat,
            basis,
            emb,
            covol,
        })
    }

    fn embed_coords(&self, k: &[i64; 3]) -> [f64; 3] {
        let mut v = [0.0; 3];
        for j in 0..3 {
            for t in 0..3 {
                v[t] += k[j] as f64 * self.emb[j][t];
            }
        }
        v
    }

    pub fn elem(&self, k: &[i64; 3]) -> Result<Elem> {
        combine(&self.basis, k)
    }

    /// A minimum μ of the lattice (a Euclidean shortest vector).
    pub fn minimum(&self) -> Result<Elem> {
        self.elem(&shortest_vector(&self.emb))
    }
}

fn det3f(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[derive(Debug, Clone)]
pub struct Neighbour {
    pub nu: Elem,
    pub emb: [f64; 3],
}

struct Candidate {
    k: [i64; 3],
    emb: [f64; 3],
}

/// |x| < m, with m ≥ 1 either 1 or |σᵢ(ν)|; near-ties are decided exactly.
fn strictly_below(
    f: &NumberFieldCubic,
    el: &EmbeddedLattice,
    x: &Candidate,
    nu: &Candidate,
    i: usize,
    m: f64,
) -> Result<bool> {
    let a = x.emb[i].abs();
    if a < m * (1.0 - TIE) {
        return Ok(true);
    }
    if a > m * (1.0 + TIE) {
        return Ok(false);
    }
    let xe = el.elem(&x.k)?;
    let target = if nu.emb[i].abs() > 1.0 {
        el.elem(&nu.k)?
    } else {
        Elem::one()
    };
    if xe == target || xe == target.neg() {
        return Ok(false);
    }
    f.abs_less_at(&xe, &target, i)
}

/// Minima of the lattice adjacent to 1 (1 must itself be a minimum).
/// One representative of each pair ±ν is returned.
pub fn neighbours(f: &NumberFieldCubic, el: &EmbeddedLattice) -> Result<Vec<Neighbour>> {
    let big_k = el.covol.log2().floor().max(0.0) as i32 + 2;
    let mut seen: HashMap<[i64; 3], usize> = HashMap::new();
    let mut cands: Vec<Candidate> = Vec::new();
    for c in 0..3 {
        let (a, b) = ((c + 1) % 3, (c + 2) % 3);
        for k1 in 0..=big_k {
            let mut s = [1.0; 3];
            s[a] = 2f64.powi(k1);
            s[b] = 2f64.powi(big_k - k1);
            let mut scaled = el.emb;
            for row in scaled.iter_mut() {
                for t in 0..3 {
                    row[t] /= s[t];
                }
            }
            for k in short_vectors(&scaled, 3.0 * (1.0 + TIE)) {
                if seen.contains_key(&k) {
                    continue;
                }
                seen.insert(k, cands.len());
                cands.push(Candidate {
                    emb: el.embed_coords(&k),
                    k,
                });
            }
        }
    }
    let mut out = Vec::new();
    for (ni, nu) in cands.iter().enumerate() {
        let m = nu.emb.map(|v| v.abs().max(1.0));
        let small = nu.emb.iter().filter(|v| v.abs() < 1.0).count();
        if small == 0 || small == 3 {
            // ±1, or an element dominating 1
            continue;
        }
        // the box must lie inside one of the enumerated regions
        let mut logs: Vec<i32> = m.iter().map(|v| v.log2().ceil() as i32).collect();
        logs.sort();
        if logs[1] + logs[2] > big_k {
            continue;
        }
        let mut empty = true;
        for (xi, x) in cands.iter().enumerate() {
            if xi == ni {
                continue;
            }
            // cheap rejection before the careful test
            if (0..3).any(|i| x.emb[i].abs() > m[i] * (1.0 + TIE)) {
                continue;
            }
            let mut inside = true;
            for i in 0..3 {
                if !strictly_below(f, el, x, nu, i, m[i])? {
                    inside = false;
                    break;
                }
            }
            if inside {
                empty = false;
                break;
            }
        }
        if empty {
            let e = el.elem(&nu.k)?;
            out.push(Neighbour {
                emb: f.embed_all_precise(&e),
                nu: e,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub lat: Lattice,
    /// log|σᵢ(θ)| for the generator θ with lat = θ⁻¹O.
    pub log: [f64; 3],
    pub sign: [i8; 3],
    pub theta: BigElem,
}

/// A unit together with its log vector.
#[derive(Debug, Clone)]
pub struct LoggedUnit {
    pub log: [f64; 3],
    pub elem: BigElem,
}

#[derive(Debug, Clone)]
pub struct MinimaGraph {
    pub order: Lattice,
    pub vertices: Vec<Vertex>,
    pub index: HashMap<Lattice, usize>,
    pub edges: usize,
    /// A basis of the unit group modulo ±1.
    pub units: Vec<LoggedUnit>,
}

fn norm2(v: &[f64; 3]) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit_pow(u: &LoggedUnit, k: i64, f: &NumberFieldCubic) -> Result<LoggedUnit> {
    let base = if k < 0 {
        u.elem.inverse(&f.poly).ok_or(Error::DivisionByZero)?
    } else {
        u.elem.clone()
    };
    Ok(LoggedUnit {
        log: u.log.map(|v| v * k as f64),
        elem: base.pow(k.unsigned_abs(), &f.poly),
    })
}

fn unit_mul(a: &LoggedUnit, b: &LoggedUnit, f: &NumberFieldCubic) -> LoggedUnit {
    LoggedUnit {
        log: [
            a.log[0] + b.log[0],
            a.log[1] + b.log[1],
            a.log[2] + b.log[2],
        ],
        elem: a.elem.mul(&b.elem, &f.poly),
    }
}

/// b ← b·a^(−k)
fn reduce_by(b: &mut LoggedUnit, a: &LoggedUnit, k: i64, f: &NumberFieldCubic) -> Result<()> {
    if k != 0 {
        let t = unit_pow(a, -k, f)?;
        *b = unit_mul(b, &t, f);
    }
    Ok(())
}

fn gauss_reduce(a: &mut LoggedUnit, b: &mut LoggedUnit, f: &NumberFieldCubic) -> Result<()> {
    for _ in 0..10_000 {
        if norm2(&a.log) > norm2(&b.log) {
            std::mem::swap(a, b);
        }
        let r = dot3(&a.log, &b.log) / norm2(&a.log);
        if r.abs() <= 0.5 + 1e-9 {
            return Ok(());
        }
        reduce_by(b, a, r.round() as i64, f)?;
    }
    Err(Error::SearchExhausted(
        "lattice reduction did not settle".into(),
    ))
}

fn independent(a: &[f64; 3], b: &[f64; 3]) -> bool {
    let cr = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    norm2(&cr) > 1e-12 * norm2(a) * norm2(b)
}

/// Reduced basis of the rank ≤ 2 lattice spanned by the given log vectors,
/// carrying the exact units along.
pub fn reduce_units(mut vs: Vec<LoggedUnit>, f: &NumberFieldCubic) -> Result<Vec<LoggedUnit>> {
    for _ in 0..100_000 {
        vs.retain(|u| norm2(&u.log).sqrt() > TRIVIAL_LOG);
        vs.sort_by(|x, y| norm2(&x.log).total_cmp(&norm2(&y.log)));
        match vs.len() {
            0 | 1 => return Ok(vs),
            2 => {
                let (mut a, mut b) = (vs[0].clone(), vs[1].clone());
                if independent(&a.log, &b.log) {
                    gauss_reduce(&mut a, &mut b, f)?;
                    return Ok(vec![a, b]);
                }
                let k = (dot3(&a.log, &b.log) / norm2(&a.log)).round() as i64;
                reduce_by(&mut b, &a, k, f)?;
                vs = vec![a, b];
            }
            _ => {
                let (mut a, mut b) = (vs[0].clone(), vs[1].clone());
                let mut rest: Vec<LoggedUnit> = vs[2..].to_vec();
                if !independent(&a.log, &b.log) {
                    let k = (dot3(&a.log, &b.log) / norm2(&a.log)).round() as i64;
                    reduce_by(&mut b, &a, k, f)?;
                    rest.push(a);
                    rest.push(b);
                    vs = rest;
                    continue;
                }
                gauss_reduce(&mut a, &mut b, f)?;
                let mut c = rest.pop().expect("three vectors");
                // c = x·a + y·b in the plane of a, b
                let (aa, ab, bb) = (norm2(&a.log), dot3(&a.log, &b.log), norm2(&b.log));
                let (ca, cb) = (dot3(&c.log, &a.log), dot3(&c.log, &b.log));
                let det = aa * bb - ab * ab;
                let x = ((ca * bb - cb * ab) / det).round() as i64;
                let y = ((cb * aa - ca * ab) / det).round() as i64;
                reduce_by(&mut c, &a, x, f)?;
                reduce_by(&mut c, &b, y, f)?;
                rest.push(a);
                rest.push(b);
                rest.push(c);
                vs = rest;
            }
        }
    }
    Err(Error::SearchExhausted(
        "unit reduction did not settle".into(),
    ))
}

impl MinimaGraph {
    /// Breadth-first exploration from O itself.
    pub fn explore(f: &NumberFieldCubic, order: &Lattice, cap: usize) -> Result<MinimaGraph> {
        let mut g = MinimaGraph {
            order: *order,
            vertices: vec![Vertex {
                lat: *order,
                log: [0.0; 3],
                sign: [1; 3],
                theta: BigElem::one(),
            }],
            index: HashMap::from([(*order, 0)]),
            edges: 0,
            units: Vec::new(),
        };
        let mut queue = VecDeque::from([0usize]);
        let mut found: Vec<LoggedUnit> = Vec::new();
        let mut keys: HashMap<(i64, i64), ()> = HashMap::new();
        while let Some(v) = queue.pop_front() {
            let el = EmbeddedLattice::new(f, g.vertices[v].lat)?;
            for nb in neighbours(f, &el)? {
                g.edges += 1;
                let inv = f.inverse(&nb.nu)?;
                let lat = g.vertices[v].lat.scale_elem(f, &inv)?;
                let vv = &g.vertices[v];
                let log = [0, 1, 2].map(|i| vv.log[i] + nb.emb[i].abs().ln());
                let sign = [0, 1, 2].map(|i| vv.sign[i] * if nb.emb[i] < 0.0 { -1 } else { 1 });
                match g.index.get(&lat) {
                    None => {
                        if g.vertices.len() >= cap {
                            return Err(Error::CapExceeded(format!(
                                "more than {cap} reduced principal ideals"
                            )));
                        }
                        let theta = vv.theta.mul(&BigElem::from_elem(&nb.nu), &f.poly);
                        g.index.insert(lat, g.vertices.len());
                        queue.push_back(g.vertices.len());
                        g.vertices.push(Vertex {
                            lat,
                            log,
                            sign,
                            theta,
                        });
                    }
                    Some(&w) => {
                        let ww = &g.vertices[w];
                        let mut ul = [0, 1, 2].map(|i| log[i] - ww.log[i]);
                        if norm2(&ul).sqrt() < TRIVIAL_LOG {
                            continue;
                        }
                        let flip = ul[0] < 0.0 || (ul[0] == 0.0 && ul[1] < 0.0);
                        if flip {
                            ul = ul.map(|x| -x);
                        }
                        let key = ((ul[0] * 1e6).round() as i64, (ul[1] * 1e6).round() as i64);
                        if keys.insert(key, ()).is_some() {
                            continue;
                        }
                        // θ_v·ν/θ_w
                        let winv = ww.theta.inverse(&f.poly).ok_or(Error::DivisionByZero)?;
                        let mut e = vv
                            .theta
                            .mul(&BigElem::from_elem(&nb.nu), &f.poly)
                            .mul(&winv, &f.poly);
                        if flip {
                            e = e.inverse(&f.poly).ok_or(Error::DivisionByZero)?;
                        }
                        found.push(LoggedUnit { log: ul, elem: e });
                        if found.len() > 8 {
                            found = reduce_units(std::mem::take(&mut found), f)?;
                        }
                    }
                }
            }
        }
        g.units = reduce_units(found, f)?;
        if g.units.len() != 2 {
            return Err(Error::SearchExhausted(format!(
                "unit rank {} from the minima graph",
                g.units.len()
            )));
        }
        Ok(g)
    }

    /// |det| of the log vectors of the unit basis, first two coordinates.
    pub fn regulator(&self) -> f64 {
        let (a, b) = (&self.units[0].log, &self.units[1].log);
        (a[0] * b[1] - a[1] * b[0]).abs()
    }

    /// Whether the lattice (a fractional ideal of the order) is principal.
    pub fn is_principal(&self, f: &NumberFieldCubic, lat: &Lattice) -> Result<bool> {
        Ok(self.reduced_key(f, lat)?.is_some())
    }

    /// The vertex equal to μ⁻¹·lat for a minimum μ, if there is one.
    pub fn reduced_key(&self, f: &NumberFieldCubic, lat: &Lattice) -> Result<Option<usize>> {
        let red = reduce(f, lat)?;
        Ok(self.index.get(&red).copied())
    }
}

/// μ⁻¹·lat for a minimum μ of lat; the result has 1 as a minimum.
pub fn reduce(f: &NumberFieldCubic, lat: &Lattice) -> Result<Lattice> {
    let el = EmbeddedLattice::new(f, *lat)?;
    let mu = el.minimum()?;
    lat.scale_elem(f, &f.inverse(&mu)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::CubicPoly;

    fn zt() -> Lattice {
        Lattice {
            d: 1,
            h: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        }
    }

    #[test]
    fn regulators_of_smallest_fields() {
        for (p, reg) in [
            ((1, -2, -1), 0.525454682122572),
            ((-3, 0, 1), 0.849287450646193),
        ] {
            let f = NumberFieldCubic::new(CubicPoly::new(p.0, p.1, p.2)).unwrap();
            let g = MinimaGraph::explore(&f, &zt(), 10_000).unwrap();
            assert!(
                (g.regulator() - reg).abs() < 1e-9,
                "{} vs {reg}",
                g.regulator()
            );
            for u in &g.units {
                let (n, d) = u.elem.norm(&f.poly);
                assert_eq!(d, num_bigint::BigInt::from(1));
                assert_eq!(n.magnitude(), &num_bigint::BigUint::from(1u32));
            }
        }
    }

    #[test]
    fn generator_lattice_is_principal() {
        let f = NumberFieldCubic::new(CubicPoly::new(-1, -3, 1)).unwrap();
        let g = MinimaGraph::explore(&f, &zt(), 10_000).unwrap();
        let x = Elem::new([3, 1, 2], 1).unwrap();
        let lat = zt().scale_elem(&f, &x).unwrap();
        assert!(g.is_principal(&f, &lat).unwrap());
    }
}
