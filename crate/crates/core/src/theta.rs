//! Enumeration of admissible unit polynomials in the chamber box, the
//! per-polynomial class number dossiers, the summatory function θ and
//! partial sums of the associated Dirichlet series.

use crate::classgroup::{
    class_group_maximal, class_number_order_direct, class_number_order_mutated, DirectClassCount,
    Mutation,
};
use crate::cubic::CubicPoly;
use crate::error::{Error, Result};
use crate::field::NumberFieldCubic;
use crate::interval::fmt_sig;
use crate::order::{equation_order, intermediate_orders, maximal_order, DEFAULT_FACTOR_BOUND};
use crate::roots::{
    approx_alphas, chamber_point, in_chamber, index_factor, isolate_real_roots, ChamberPoint,
    SignVector, DEFAULT_PRECISION,
};
use crate::units::{fundamental_units, unit_index, units_with_charpoly};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Significant digits used when rendering certified reals.
pub const REAL_DIGITS: usize = 30;

/// Limits on the expensive sub-computations. Hitting one flags the
/// polynomial instead of dropping it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Caps {
    /// Vertices per minima graph (units and principality).
    pub vertices: usize,
    /// Exponent pairs tried when computing unit indices.
    pub unit_index: u64,
    /// Integral ideals examined by the direct class count.
    pub direct_ideals: u64,
    /// Trial division bound for the square part of the discriminant.
    pub factor_bound: u64,
    /// Polynomials in the coefficient box.
    pub box_size: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            vertices: crate::minima::DEFAULT_VERTEX_CAP,
            unit_index: 1 << 26,
            direct_ideals: 1 << 22,
            factor_bound: DEFAULT_FACTOR_BOUND,
            box_size: 1 << 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaQuery {
    pub t1: f64,
    pub t2: f64,
    pub precision: u32,
    pub caps: Caps,
    /// 0 means the rayon default.
    pub threads: usize,
    /// Run the direct class count on every order with |disc| up to this.
    pub direct_check_disc: Option<i128>,
    /// Test hook for validation runs.
    pub mutation: Option<Mutation>,
}

impl ThetaQuery {
    pub fn new(t1: f64, t2: f64) -> ThetaQuery {
        ThetaQuery {
            t1,
            t2,
            precision: DEFAULT_PRECISION,
            caps: Caps::default(),
            threads: 0,
            direct_check_disc: None,
            mutation: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t1 > 1.0 && self.t2 > 1.0) || !self.t1.is_finite() || !self.t2.is_finite() {
            return Err(Error::InvalidInput(format!(
                "thresholds must be finite and exceed 1, got ({}, {})",
                self.t1, self.t2
            )));
        }
        Ok(())
    }
}

pub(crate) mod decimal {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &i128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i128, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Class number data of one order containing Z[λ].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderClassData {
    #[serde(with = "decimal")]
    pub disc: i128,
    /// [O_F : O]
    #[serde(with = "decimal")]
    pub index: i128,
    pub h: u64,
    pub regulator: f64,
    /// [O_F^× : O^×]
    pub unit_index: u64,
    /// Roots of the polynomial lying in O.
    pub roots_in_order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct: Option<DirectClassCount>,
}

/// Certified real rendered as a decimal string together with the working
/// precision of its enclosure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedReal {
    pub value: String,
    pub precision: u32,
}

impl CertifiedReal {
    pub fn to_f64(&self) -> f64 {
        self.value.parse().unwrap_or(f64::NAN)
    }
}

/// Everything computed for one canonical admissible polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyClassRecord {
    pub poly: CubicPoly,
    #[serde(with = "decimal")]
    pub disc_poly: i128,
    #[serde(with = "decimal")]
    pub disc_field: i128,
    /// [O_F : Z[λ]]
    #[serde(with = "decimal")]
    pub index: i128,
    /// ρ₁, ρ₂, ρ₃ by decreasing absolute value.
    pub roots: [CertifiedReal; 3],
    pub alpha1: CertifiedReal,
    pub alpha2: CertifiedReal,
    pub multiplicity: u32,
    #[serde(with = "decimal")]
    pub eta: i128,
    pub class_number_field: u64,
    pub regulator_field: f64,
    pub orders: Vec<OrderClassData>,
    /// m·Σ h(O)·R(O) over the orders containing Z[λ].
    pub contribution: f64,
}

impl PolyClassRecord {
    pub fn alphas(&self) -> (f64, f64) {
        (self.alpha1.to_f64(), self.alpha2.to_f64())
    }

    pub fn roots_f64(&self) -> [f64; 3] {
        self.roots.each_ref().map(|r| r.to_f64())
    }

    /// Σ h·R over the orders, without the multiplicity.
    pub fn order_sum(&self) -> f64 {
        self.orders.iter().map(|o| o.h as f64 * o.regulator).sum()
    }

    pub fn recompute_contribution(&self) -> f64 {
        self.multiplicity as f64 * self.order_sum()
    }

    /// Σ over orders of (roots in O)·h·R, summed over the orders containing
    /// Z[λ] only.
    pub fn root_weighted_sum(&self) -> f64 {
        self.orders
            .iter()
            .map(|o| o.roots_in_order as f64 * o.h as f64 * o.regulator)
            .sum()
    }

    /// Orders whose two class number computations disagree.
    pub fn class_number_mismatches(&self) -> Vec<&OrderClassData> {
        self.orders
            .iter()
            .filter(|o| o.direct.is_some_and(|d| d.picard != o.h))
            .collect()
    }
}

/// Integer ranges |a| ≤ a_max, |b| ≤ b_max that contain every admissible
/// polynomial with chamber point in (1,T₁]×(1,T₂].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientBox {
    pub a_max: i64,
    pub b_max: i64,
}

impl CoefficientBox {
    pub fn size(&self) -> u64 {
        2 * (2 * self.a_max as u64 + 1) * (2 * self.b_max as u64 + 1)
    }
}

pub fn coefficient_box(t1: f64, t2: f64) -> CoefficientBox {
    let x = t1.powf(2.0 / 3.0) * t2.sqrt();
    // the bound on |ρ₁| is rounded outward slightly
    let x = x * (1.0 + 1e-12);
    CoefficientBox {
        a_max: (x + 2.0).floor() as i64,
        b_max: (2.0 * x + 1.0).floor() as i64,
    }
}

/// A polynomial that passed admissibility and the chamber test but could
/// not be processed within the caps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub poly: CubicPoly,
    pub reason: String,
    pub cap_exceeded: bool,
}

/// Source of previously computed records, consulted before the dossier is
/// rebuilt.
pub trait RecordStore: Sync {
    fn load(&self, p: &CubicPoly, precision: u32) -> Option<PolyClassRecord>;
}

pub struct NoStore;

impl RecordStore for NoStore {
    fn load(&self, _: &CubicPoly, _: u32) -> Option<PolyClassRecord> {
        None
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Enumeration {
    pub records: Vec<PolyClassRecord>,
    pub flagged: Vec<Flagged>,
    /// Records built in this run (not loaded from the store).
    pub fresh: Vec<usize>,
    pub warnings: Vec<String>,
}

enum Candidate {
    Record(Box<PolyClassRecord>, bool),
    Flag(Flagged),
    Warning(String),
}

fn flag(p: CubicPoly, e: Error) -> Flagged {
    Flagged {
        poly: p,
        cap_exceeded: matches!(
            e,
            Error::CapExceeded(_) | Error::BoxTooLarge { .. } | Error::Incomplete { .. }
        ),
        reason: e.to_string(),
    }
}

/// Builds the dossier of an admissible, split regular polynomial.
pub fn build_record(p: &CubicPoly, q: &ThetaQuery) -> Result<PolyClassRecord> {
    let emb = isolate_real_roots(p, q.precision)?;
    let cp = crate::roots::alpha_invariants(&emb);
    let f = NumberFieldCubic::new(*p)?;
    let of = maximal_order(&f, q.caps.factor_bound)?;
    let zt = equation_order(&f);
    let index = of
        .lat
        .index_of(&zt.lat)?
        .ok_or_else(|| Error::InvalidInput("Z[t] not inside the maximal order".into()))?;
    let (uf, graph) = fundamental_units(&f, &of, q.caps.vertices)?;
    let hf = class_group_maximal(&f, &of, &graph)?.order();
    let mut orders = Vec::new();
    for o in intermediate_orders(&f, &zt, &of)? {
        let idx = unit_index(&f, &of, &uf, &o, q.caps.unit_index)?;
        let h = class_number_order_mutated(&f, &o, &of, hf, idx.index, q.mutation)?;
        let direct = match q.direct_check_disc {
            Some(bound) if o.disc.abs() <= bound => Some(class_number_order_direct(
                &f,
                &o,
                q.caps.direct_ideals,
                q.caps.vertices,
            )?),
            _ => None,
        };
        orders.push(OrderClassData {
            disc: o.disc,
            index: of.lat.index_of(&o.lat)?.unwrap_or(0),
            h,
            regulator: idx.index as f64 * uf.regulator,
            unit_index: idx.index,
            roots_in_order: units_with_charpoly(&f, &o, p)? as u32,
            direct,
        });
    }
    let real = |x: &crate::interval::RealInterval| CertifiedReal {
        value: fmt_sig(&x.mid(), REAL_DIGITS),
        precision: cp.precision,
    };
    let mut rec = PolyClassRecord {
        poly: *p,
        disc_poly: p.discriminant(),
        disc_field: of.disc,
        index,
        roots: emb.rho.each_ref().map(real),
        alpha1: real(&cp.alpha1),
        alpha2: real(&cp.alpha2),
        multiplicity: p.galois_multiplicity(),
        eta: p.eta(),
        class_number_field: hf,
        regulator_field: uf.regulator,
        orders,
        contribution: 0.0,
    };
    rec.contribution = rec.recompute_contribution();
    Ok(rec)
}

/// Whether p enters the enumeration: canonical, admissible, split regular
/// and inside the chamber box. Errors are undecidable chamber tests.
pub fn selects(p: &CubicPoly, q: &ThetaQuery) -> Result<Option<ChamberPoint>> {
    if !p.is_canonical() || !p.is_admissible_unit_poly() || p.has_opposite_roots() {
        return Ok(None);
    }
    // cheap rejection far from the chamber boundary
    if let Some((a1, a2)) = approx_alphas(p) {
        let slack = 1e-6;
        if a1 < 1.0 - slack
            || a2 < 1.0 - slack
            || a1 > q.t1 * (1.0 + slack)
            || a2 > q.t2 * (1.0 + slack)
        {
            return Ok(None);
        }
    }
    let cp = match chamber_point(p, q.precision) {
        Ok(cp) => cp,
        Err(Error::NotSplitRegular) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(if in_chamber(&cp, q.t1, q.t2)? {
        Some(cp)
    } else {
        None
    })
}

/// As [`selects`], but a chamber point still undecided at the precision
/// cap counts as inside (α ≤ T is closed). The second value reports that
/// case.
pub fn selects_closed(
    p: &CubicPoly,
    q: &ThetaQuery,
) -> Result<(Option<ChamberPoint>, Option<String>)> {
    match selects(p, q) {
        Ok(s) => Ok((s, None)),
        Err(Error::UndecidableAtBound { bound, precision }) => {
            let cp = chamber_point(p, q.precision)?;
            let w = format!("{p}: alpha within {precision}-bit resolution of {bound}, included");
            log::warn!("{w}");
            Ok((Some(cp), Some(w)))
        }
        Err(e) => Err(e),
    }
}

fn stripe(a: i64, bx: &CoefficientBox, q: &ThetaQuery, store: &dyn RecordStore) -> Vec<Candidate> {
    let mut out = Vec::new();
    for b in -bx.b_max..=bx.b_max {
        for c in [-1, 1] {
            let p = CubicPoly::new(a, b, c);
            match selects_closed(&p, q) {
                Ok((None, _)) => {}
                Ok((Some(_), warning)) => {
                    if let Some(w) = warning {
                        out.push(Candidate::Warning(w));
                    }
                    if let Some(r) = store.load(&p, q.precision) {
                        out.push(Candidate::Record(Box::new(r), false));
                        continue;
                    }
                    match build_record(&p, q) {
                        Ok(r) => out.push(Candidate::Record(Box::new(r), true)),
                        Err(e) => out.push(Candidate::Flag(flag(p, e))),
                    }
                }
                Err(e) => out.push(Candidate::Flag(flag(p, e))),
            }
        }
    }
    out
}

/// All records of the query, sorted by (a, b, c).
pub fn enumerate_admissible(q: &ThetaQuery, store: &dyn RecordStore) -> Result<Enumeration> {
    enumerate_in_box(q, coefficient_box(q.t1, q.t2), store)
}

/// As [`enumerate_admissible`], scanning the given box instead of the one
/// derived from the thresholds.
pub fn enumerate_in_box(
    q: &ThetaQuery,
    bx: CoefficientBox,
    store: &dyn RecordStore,
) -> Result<Enumeration> {
    q.validate()?;
    if bx.size() > q.caps.box_size {
        return Err(Error::CapExceeded(format!(
            "coefficient box holds {} polynomials (cap {})",
            bx.size(),
            q.caps.box_size
        )));
    }
    let run = || -> Vec<Vec<Candidate>> {
        (-bx.a_max..=bx.a_max)
            .into_par_iter()
            .map(|a| stripe(a, &bx, q, store))
            .collect()
    };
    let stripes = if q.threads == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(q.threads)
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?
            .install(run)
    };
    let mut en = Enumeration::default();
    for cand in stripes.into_iter().flatten() {
        match cand {
            Candidate::Record(r, fresh) => {
                if fresh {
                    en.fresh.push(en.records.len());
                }
                for o in r.class_number_mismatches() {
                    en.warnings.push(format!(
                        "{}: order of disc {} has h = {} by the conductor formula but {} directly",
                        r.poly,
                        o.disc,
                        o.h,
                        o.direct.map_or(0, |d| d.picard)
                    ));
                }
                en.records.push(*r);
            }
            Candidate::Warning(w) => en.warnings.push(w),
            Candidate::Flag(fl) => {
                en.warnings
                    .push(format!("{} flagged: {}", fl.poly, fl.reason));
                en.flagged.push(fl);
            }
        }
    }
    Ok(en)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaResult {
    pub t1: f64,
    pub t2: f64,
    pub theta: f64,
    pub term_count: usize,
    pub ratio: f64,
    pub records: Vec<PolyClassRecord>,
    pub flagged: Vec<Flagged>,
    pub fresh: Vec<usize>,
    pub warnings: Vec<String>,
}

/// (16/√3)·T₁·T₂
pub fn main_term(t1: f64, t2: f64) -> f64 {
    16.0 / 3f64.sqrt() * t1 * t2
}

/// Sum of the contributions in record order.
pub fn theta_of(records: &[PolyClassRecord]) -> f64 {
    records.iter().fold(0.0, |s, r| s + r.contribution)
}

pub fn theta(q: &ThetaQuery, store: &dyn RecordStore) -> Result<ThetaResult> {
    let en = enumerate_admissible(q, store)?;
    let theta = theta_of(&en.records);
    Ok(ThetaResult {
        t1: q.t1,
        t2: q.t2,
        theta,
        term_count: en.records.len(),
        ratio: theta / main_term(q.t1, q.t2),
        records: en.records,
        flagged: en.flagged,
        fresh: en.fresh,
        warnings: en.warnings,
    })
}

/// The records of a larger run that fall in (1,T₁]×(1,T₂]. Values within
/// 1e−12 of a threshold are re-decided with certified intervals.
pub fn restrict(
    records: &[PolyClassRecord],
    t1: f64,
    t2: f64,
    precision: u32,
) -> Result<Vec<PolyClassRecord>> {
    let mut out = Vec::new();
    for r in records {
        let (a1, a2) = r.alphas();
        let near = |a: f64, t: f64| ((a - t) / t).abs() < 1e-12;
        let keep = if near(a1, t1) || near(a2, t2) {
            match in_chamber(&chamber_point(&r.poly, precision)?, t1, t2) {
                Err(Error::UndecidableAtBound { .. }) => true,
                other => other?,
            }
        } else {
            a1 <= t1 && a2 <= t2
        };
        if keep {
            out.push(r.clone());
        }
    }
    Ok(out)
}

/// Weight attached to each record in the Dirichlet series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightMode {
    /// m·Σ h·R, the record's contribution.
    Theta,
    /// ind(γ) = λ_flat / det(1 − (at)⁻¹ | n) with a caller supplied λ_flat.
    Index { lambda_flat: f64 },
}

/// η·α₁^(−4/3)·α₂^(−1), which equals η/ρ₁².
pub fn eta_normalized(eta: f64, alpha1: f64, alpha2: f64) -> f64 {
    eta * alpha1.powf(-4.0 / 3.0) / alpha2
}

/// l(a) = 2·log α₁·(log α₂)/2.
pub fn l_value(alpha1: f64, alpha2: f64) -> f64 {
    alpha1.ln() * alpha2.ln()
}

/// One term of the series for a record.
pub fn dirichlet_term(
    r: &PolyClassRecord,
    j: u32,
    s1: f64,
    s2: f64,
    mode: WeightMode,
) -> Result<f64> {
    let (a1, a2) = r.alphas();
    let w = match mode {
        WeightMode::Theta => r.contribution,
        WeightMode::Index { lambda_flat } => {
            let roots = r.roots_f64();
            let moduli = roots.map(f64::abs);
            let signs = roots.map(|x| if x < 0.0 { -1i8 } else { 1 });
            r.multiplicity as f64 * index_factor(lambda_flat, moduli, SignVector(signs))?
        }
    };
    Ok(w * eta_normalized(r.eta as f64, a1, a2)
        * l_value(a1, a2).powi(j as i32 + 1)
        * a1.powf(-s1)
        * a2.powf(-s2))
}

/// Σ over records of the series terms.
pub fn dirichlet_partial(
    records: &[PolyClassRecord],
    j: u32,
    s1: f64,
    s2: f64,
    mode: WeightMode,
) -> Result<f64> {
    let mut acc = 0.0;
    for r in records {
        acc += dirichlet_term(r, j, s1, s2, mode)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_examples() {
        let b = coefficient_box(100.0, 100.0);
        assert_eq!((b.a_max, b.b_max), (217, 431));
        let b = coefficient_box(1.0 + 1e-9, 1.0 + 1e-9);
        assert_eq!((b.a_max, b.b_max), (3, 3));
    }

    #[test]
    fn disc81_record() {
        let r = build_record(&CubicPoly::new(-3, 0, 1), &ThetaQuery::new(10.0, 10.0)).unwrap();
        assert_eq!(r.disc_field, 81);
        assert_eq!(r.multiplicity, 3);
        assert_eq!(r.eta, 3);
        assert_eq!(r.orders.len(), 1);
        assert_eq!(r.orders[0].h, 1);
        assert_eq!(r.orders[0].roots_in_order, 3);
        assert!((r.regulator_field - 0.849287450646193).abs() < 1e-12);
        assert!((r.contribution - 3.0 * 0.849287450646193).abs() < 1e-12);
        let (a1, a2) = r.alphas();
        assert!((a1 - 3.596).abs() < 1e-3 && (a2 - 1.50475).abs() < 1e-5);
    }

    #[test]
    fn small_query_membership() {
        let q = ThetaQuery::new(10.0, 10.0);
        let en = enumerate_admissible(&q, &NoStore).unwrap();
        let polys: Vec<CubicPoly> = en.records.iter().map(|r| r.poly).collect();
        assert!(en.flagged.is_empty());
        assert!(polys.contains(&CubicPoly::new(-3, 0, 1)));
        assert!(polys.contains(&CubicPoly::new(2, -1, -1).canonical()));
        assert!(!polys.contains(&CubicPoly::new(1, -2, -1).canonical()));
        for p in &polys {
            assert!(!polys.contains(&p.mirror()) || p.mirror() == *p);
        }
        let mut sorted = polys.clone();
        sorted.sort_by_key(|p| (p.a, p.b, p.c));
        assert_eq!(sorted, polys);
    }

    #[test]
    fn single_term_composition() {
        let r = build_record(&CubicPoly::new(-3, 0, 1), &ThetaQuery::new(10.0, 10.0)).unwrap();
        let (a1, a2) = r.alphas();
        let l = 2.0 * a1.ln() * (a2.ln() / 2.0);
        assert!((l - 0.5230).abs() < 1e-3);
        let expect =
            r.contribution * 3.0 * a1.powf(-4.0 / 3.0) / a2 * l * a1.powi(-3) * a2.powi(-3);
        let got =
            dirichlet_partial(std::slice::from_ref(&r), 0, 3.0, 3.0, WeightMode::Theta).unwrap();
        assert!((got - expect).abs() < 1e-15);
        let next =
            dirichlet_partial(std::slice::from_ref(&r), 1, 3.0, 3.0, WeightMode::Theta).unwrap();
        assert!((next - got * l).abs() < 1e-15);
    }

    #[test]
    fn empty_box() {
        let t = theta(&ThetaQuery::new(1.01, 1.01), &NoStore).unwrap();
        assert_eq!(t.theta, 0.0);
        assert_eq!(t.term_count, 0);
    }
}
