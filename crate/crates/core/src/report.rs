//! Rendering of θ runs and single-polynomial dossiers as JSON, CSV or
//! plain text.

use crate::theta::{Flagged, PolyClassRecord, ThetaResult};
use serde::Serialize;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Human,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "human" => Ok(Format::Human),
            _ => Err(format!("unknown format {s:?} (json, csv, human)")),
        }
    }
}

pub const CSV_HEADER: &str =
    "a,b,c,disc_poly,disc_field,index,alpha1,alpha2,m,eta,n_orders,contribution";

#[derive(Serialize)]
struct ThetaJson<'a> {
    t1: f64,
    t2: f64,
    theta: f64,
    ratio: f64,
    terms: usize,
    warnings: &'a [String],
    flagged: &'a [Flagged],
    records: &'a [PolyClassRecord],
}

pub fn csv_row(r: &PolyClassRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        r.poly.a,
        r.poly.b,
        r.poly.c,
        r.disc_poly,
        r.disc_field,
        r.index,
        r.alpha1.value,
        r.alpha2.value,
        r.multiplicity,
        r.eta,
        r.orders.len(),
        r.contribution
    )
}

pub fn csv(records: &[PolyClassRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

pub fn theta_json(t: &ThetaResult, with_records: bool) -> String {
    let doc = ThetaJson {
        t1: t.t1,
        t2: t.t2,
        theta: t.theta,
        ratio: t.ratio,
        terms: t.term_count,
        warnings: &t.warnings,
        flagged: &t.flagged,
        records: if with_records { &t.records } else { &[] },
    };
    serde_json::to_string_pretty(&doc).expect("reports serialize")
}

pub fn theta_human(t: &ThetaResult, with_records: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "T = ({}, {})", t.t1, t.t2);
    let _ = writeln!(s, "theta  = {:.12e}", t.theta);
    let _ = writeln!(s, "terms  = {}", t.term_count);
    let _ = writeln!(s, "ratio  = {:.6} (theta / (16/sqrt 3 * T1 * T2))", t.ratio);
    if with_records && !t.records.is_empty() {
        let _ = writeln!(
            s,
            "\n{:>6} {:>6} {:>3} {:>12} {:>10} {:>10} {:>2} {:>8} {:>14}",
            "a", "b", "c", "disc_field", "alpha1", "alpha2", "m", "orders", "contribution"
        );
        for r in &t.records {
            let (a1, a2) = r.alphas();
            let _ = writeln!(
                s,
                "{:>6} {:>6} {:>3} {:>12} {:>10.4} {:>10.4} {:>2} {:>8} {:>14.6}",
                r.poly.a,
                r.poly.b,
                r.poly.c,
                r.disc_field,
                a1,
                a2,
                r.multiplicity,
                r.orders.len(),
                r.contribution
            );
        }
    }
    for w in &t.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

pub fn theta_report(t: &ThetaResult, format: Format, with_records: bool) -> String {
    match format {
        Format::Json => theta_json(t, with_records),
        Format::Csv => csv(&t.records),
        Format::Human => theta_human(t, with_records),
    }
}

pub fn record_human(r: &PolyClassRecord) -> String {
    let mut s = String::new();
    let (a1, a2) = r.alphas();
    let _ = writeln!(s, "polynomial     {}", r.poly);
    let _ = writeln!(
        s,
        "disc           {} (field {}, index {})",
        r.disc_poly, r.disc_field, r.index
    );
    for (i, root) in r.roots.iter().enumerate() {
        let _ = writeln!(s, "rho{}           {}", i + 1, root.value);
    }
    let _ = writeln!(s, "alpha          ({a1:.6}, {a2:.6})");
    let _ = writeln!(s, "m              {}", r.multiplicity);
    let _ = writeln!(s, "eta            {}", r.eta);
    let _ = writeln!(
        s,
        "h(O_F), R(O_F) {}, {:.10}",
        r.class_number_field, r.regulator_field
    );
    let _ = writeln!(s, "orders         {}", r.orders.len());
    for o in &r.orders {
        let _ = writeln!(
            s,
            "  index {:>6}  disc {:>14}  h {:>4}  R {:>16.10}  unit index {:>4}  roots {}",
            o.index, o.disc, o.h, o.regulator, o.unit_index, o.roots_in_order
        );
    }
    let _ = writeln!(s, "contribution   {:.12}", r.contribution);
    s
}

pub fn record_report(r: &PolyClassRecord, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(r).expect("records serialize"),
        Format::Csv => csv(std::slice::from_ref(r)),
        Format::Human => record_human(r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{theta, NoStore, ThetaQuery};

    #[test]
    fn csv_columns() {
        let t = theta(&ThetaQuery::new(5.0, 5.0), &NoStore).unwrap();
        let text = csv(&t.records);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        for l in lines {
            assert_eq!(l.split(',').count(), 12);
        }
    }

    #[test]
    fn json_fields() {
        let t = theta(&ThetaQuery::new(5.0, 5.0), &NoStore).unwrap();
        let v: serde_json::Value = serde_json::from_str(&theta_json(&t, true)).unwrap();
        for k in ["theta", "ratio", "terms", "records"] {
            assert!(v.get(k).is_some());
        }
        assert_eq!(v["terms"].as_u64(), Some(t.term_count as u64));
    }
}
