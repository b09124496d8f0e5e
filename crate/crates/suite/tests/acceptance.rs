//! Exit criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use pgt_core::cache::{RecordCache, SCHEMA_VERSION};
use pgt_core::theta::{
    dirichlet_partial, main_term, restrict, theta, NoStore, PolyClassRecord, ThetaQuery,
    ThetaResult, WeightMode,
};
use pgt_core::validate::{
    abel_errors, completeness, dual_class_numbers, eta_antisymmetry, eta_normalized_min,
    field_anchor, grid_monotone, parabolic_vanishing, records_json, theta_grid,
};
use pgt_core::CubicPoly;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1() -> Verdict {
    eta_antisymmetry(50)
}

fn c2() -> Verdict {
    parabolic_vanishing(50)
}

fn c3() -> Verdict {
    let lo100 = eta_normalized_min(100.0, 1000, 3);
    let lo1e4 = eta_normalized_min(1e4, 1000, 4);
    check(
        (0.9..=1.0).contains(&lo100) && (0.999..=1.0).contains(&lo1e4),
        format!("min normalized eta: {lo100:.6} for alpha >= 100 (need >= 0.9), {lo1e4:.6} for alpha >= 1e4 (need >= 0.999)"),
    )
}

fn c4() -> Verdict {
    let (fwd, e1, e2) = abel_errors(200).map_err(|e| e.to_string())?;
    check(
        fwd <= 1e-8 && e1 <= 1e-6 && e2 <= 1e-6,
        format!(
            "forward {fwd:.2e} (<= 1e-8); round trip e^-x {e1:.2e}, (1+x)^-3 {e2:.2e} (<= 1e-6)"
        ),
    )
}

fn c5() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (p, disc, reg) in [
        (CubicPoly::new(1, -2, -1), 49, 0.5255),
        (CubicPoly::new(-3, 0, 1), 81, 0.8492),
    ] {
        let (d, h, r_graph, r_search) = field_anchor(p).map_err(|e| e.to_string())?;
        ok &= d == disc
            && h == 1
            && (r_search - reg).abs() <= 1e-3
            && (r_graph - r_search).abs() <= 1e-9;
        parts.push(format!(
            "disc {d}: h = {h}, R = {r_search:.6} by search, {r_graph:.6} by minima"
        ));
    }
    check(ok, parts.join("; "))
}

fn c6() -> Verdict {
    let (n, problems) = dual_class_numbers(15.0, 20_000, 0, None).map_err(|e| e.to_string())?;
    check(
        problems.is_empty() && n > 0,
        format!(
            "{n} orders with |disc| <= 20000 at T = (15, 15), {} mismatches {:?}",
            problems.len(),
            problems.first()
        ),
    )
}

fn c7(t20: &ThetaResult) -> Verdict {
    let rows = completeness(20.0, &t20.records).map_err(|e| e.to_string())?;
    let d = rows
        .iter()
        .map(|(disc, a, b, _)| format!("disc {disc}: {a} from pair, {b} from box"))
        .collect::<Vec<_>>()
        .join("; ");
    check(t20.flagged.is_empty() && rows.iter().all(|r| r.3), d)
}

fn c8(grid_vals: &[((f64, f64), f64, usize)], t80: &ThetaResult) -> Verdict {
    let grid = [5.0, 10.0, 20.0, 40.0];
    let mono = grid_monotone(&grid, grid_vals);
    let nonpos = t80
        .records
        .iter()
        .filter(|r| !(r.contribution > 0.0))
        .count();
    let one = records_json(20.0, 1).map_err(|e| e.to_string())?;
    let many = records_json(20.0, 4).map_err(|e| e.to_string())?;
    check(
        mono && nonpos == 0 && one == many,
        format!(
            "monotone on 4x4 grid: {mono}; non-positive terms at T = 80: {nonpos}; 1 vs 4 threads identical: {}",
            one == many
        ),
    )
}

fn pari_t80() -> BTreeMap<CubicPoly, (i128, u64, f64)> {
    include_str!("data/pari_t80.csv")
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<&str> = l.split(',').collect();
            let n = |i: usize| v[i].parse::<i64>().unwrap();
            (
                CubicPoly::new(n(0), n(1), n(2)),
                (
                    v[3].parse().unwrap(),
                    v[5].parse().unwrap(),
                    v[6].parse().unwrap(),
                ),
            )
        })
        .collect()
}

fn c9(
    grid_vals: &[((f64, f64), f64, usize)],
    t80: &ThetaResult,
    cold: Duration,
    warm: Duration,
) -> Verdict {
    let mut rows: Vec<(f64, f64, usize)> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&t| {
            let (_, th, n) = grid_vals
                .iter()
                .find(|(k, _, _)| *k == (t, t))
                .copied()
                .unwrap();
            (t, th, n)
        })
        .collect();
    rows.push((80.0, t80.theta, t80.term_count));
    let mut table = String::new();
    let mut ok = true;
    for (t, th, n) in &rows {
        let ratio = th / main_term(*t, *t);
        ok &= ratio.is_finite() && ratio > 0.0;
        table.push_str(&format!("T={t}: {n} terms, ratio {ratio:.4}; "));
    }
    let refs = pari_t80();
    let same_set =
        t80.records.len() == refs.len() && t80.records.iter().all(|r| refs.contains_key(&r.poly));
    let fields_agree = t80.records.iter().all(|r| {
        refs.get(&r.poly).is_some_and(|&(d, h, reg)| {
            d == r.disc_field
                && h == r.class_number_field
                && (reg - r.regulator_field).abs() <= 1e-9 * reg
        })
    });
    ok &= t80.flagged.is_empty() && same_set && fields_agree && warm <= Duration::from_secs(7200);
    table.push_str(&format!(
        "T=80 cold {:.0}s, warm {:.1}s; field data vs reference: {}",
        cold.as_secs_f64(),
        warm.as_secs_f64(),
        same_set && fields_agree
    ));
    check(ok, table)
}

fn c10(t80: &ThetaResult) -> Verdict {
    let mut sums = Vec::new();
    for t in [40.0, 50.0, 60.0, 70.0, 80.0] {
        let recs: Vec<PolyClassRecord> =
            restrict(&t80.records, t, t, 128).map_err(|e| e.to_string())?;
        sums.push((
            t,
            dirichlet_partial(&recs, 0, 3.0, 3.0, WeightMode::Theta).map_err(|e| e.to_string())?,
        ));
    }
    let worst = sums
        .windows(2)
        .map(|w| (w[1].1 - w[0].1).abs())
        .fold(0.0, f64::max);
    let listed = sums
        .iter()
        .map(|(t, s)| format!("S({t}) = {s:.6e}"))
        .collect::<Vec<_>>()
        .join(", ");
    check(
        worst <= 1e-6,
        format!("{listed}; largest step {worst:.3e} (<= 1e-6)"),
    )
}

fn main() {
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    let mut run = |n: u32, name: &'static str, v: Verdict| {
        let (tag, detail) = match &v {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} criterion {n} ({name}): {detail}");
        results.push((n, name, v));
    };

    run(1, "eta antisymmetry", c1());
    run(2, "parabolic vanishing", c2());
    run(3, "normalized eta limit", c3());
    run(4, "abel round trip", c4());
    run(5, "regulator and class number anchors", c5());
    run(6, "dual-algorithm class numbers", c6());

    let t20 = theta(&ThetaQuery::new(20.0, 20.0), &NoStore).expect("T = 20 sweep");
    run(7, "unit enumeration completeness", c7(&t20));

    let grid_vals = theta_grid(&[5.0, 10.0, 20.0, 40.0], 0, &NoStore).expect("grid");
    let dir = tempfile::tempdir().expect("temp dir");
    let cache = RecordCache::open(dir.path()).expect("cache");
    let q80 = ThetaQuery::new(80.0, 80.0);
    let start = Instant::now();
    let t80 = theta(&q80, &cache).expect("T = 80 sweep");
    let cold = start.elapsed();
    for &i in &t80.fresh {
        cache.store(&t80.records[i]).expect("cache write");
    }
    let start = Instant::now();
    let warm80 = theta(&q80, &cache).expect("T = 80 warm sweep");
    let warm = start.elapsed();
    assert_eq!(cache.version, SCHEMA_VERSION);
    assert!(warm80.fresh.is_empty() && warm80.theta.to_bits() == t80.theta.to_bits());

    run(8, "theta structure", c8(&grid_vals, &t80));
    run(
        9,
        "asymptotic ratio table",
        c9(&grid_vals, &t80, cold, warm),
    );
    run(10, "dirichlet partial sums", c10(&t80));

    let failed: Vec<u32> = results
        .iter()
        .filter(|r| r.2.is_err())
        .map(|r| r.0)
        .collect();
    println!(
        "{} of {} criteria pass",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        println!("failing: {failed:?}");
        std::process::exit(1);
    }
}
