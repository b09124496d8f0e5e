use pgt_core::abel::{abel_forward, cubic_decay, exp_decay, SampledFunction};
use pgt_core::classgroup::{class_group_maximal, class_number_order, class_number_order_direct};
use pgt_core::field::NumberFieldCubic;
use pgt_core::order::{
    equation_order, finite_unit_count, finite_unit_count_literal, intermediate_orders,
    intermediate_orders_bruteforce, maximal_order,
};
use pgt_core::roots::{approx_roots, chamber_point, isolate_real_roots};
use pgt_core::units::{fundamental_units, fundamental_units_by_search, unit_index};
use pgt_core::CubicPoly;
use pgt_core::Error;
use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, RngSeed};

fn admissible(a: i64, b: i64, c: i64) -> Option<CubicPoly> {
    let p = CubicPoly::new(a, b, c);
    (p.is_admissible_unit_poly() && !p.has_opposite_roots()).then_some(p)
}

fn unit_poly(range: i64) -> impl Strategy<Value = CubicPoly> {
    (
        -range..=range,
        -2 * range..=2 * range,
        prop_oneof![Just(-1i64), Just(1i64)],
    )
        .prop_filter_map("inadmissible", |(a, b, c)| admissible(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, rng_algorithm: RngAlgorithm::ChaCha,
        rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn discriminant_is_product_of_root_differences(p in unit_poly(12)) {
        let r = approx_roots(&p);
        let v = ((r[0] - r[1]) * (r[0] - r[2]) * (r[1] - r[2])).powi(2);
        let d = p.discriminant() as f64;
        prop_assert!((v - d).abs() <= 1e-6 * d.abs().max(1.0));
    }

    #[test]
    fn eta_is_odd_under_inversion(a in -60i64..60, b in -60i64..60, c in prop_oneof![Just(-1i64), Just(1i64)]) {
        let p = CubicPoly::new(a, b, c);
        let q = p.reciprocal().unwrap();
        prop_assert_eq!(q.eta(), -p.eta());
        prop_assert_eq!(q.reciprocal().unwrap(), p);
    }

    #[test]
    fn canonical_representatives(a in -60i64..60, b in -60i64..60, c in prop_oneof![Just(-1i64), Just(1i64)]) {
        let p = CubicPoly::new(a, b, c);
        prop_assert_eq!(p.mirror().mirror(), p);
        prop_assert_eq!(p.canonical(), p.mirror().canonical());
        prop_assert!(p.canonical().is_canonical());
        // p(1)p(−1) is even under λ ↦ −λ
        prop_assert_eq!(p.mirror().eta(), p.eta());
    }

    #[test]
    fn chamber_coordinates(p in unit_poly(15)) {
        let e = isolate_real_roots(&p, 128).unwrap();
        let cp = chamber_point(&p, 128).unwrap();
        let rho = e.mid_f64();
        let (a1, a2) = (cp.alpha1_f64(), cp.alpha2_f64());
        let tol = 1e-10;
        prop_assert!((a1.powf(4.0 / 3.0) * a2 / (rho[0] * rho[0]) - 1.0).abs() < tol);
        prop_assert!((a1.powf(-2.0 / 3.0) / (rho[1] * rho[1]) - 1.0).abs() < tol);
        prop_assert!((a1.powf(-2.0 / 3.0) / a2 / (rho[2] * rho[2]) - 1.0).abs() < tol);
        // ρ₁ρ₂ρ₃ = −c
        let prod = e.rho[0].mul(&e.rho[1]).mul(&e.rho[2]);
        prop_assert!(prod.contains_f64(-(p.c as f64)));
        prop_assert!(rho[0].abs() >= rho[1].abs() && rho[1].abs() >= rho[2].abs());
        // −λ has the same chamber point
        let m = chamber_point(&p.mirror(), 128).unwrap();
        prop_assert!((m.alpha1_f64() - a1).abs() < 1e-12 * a1);
        prop_assert!((m.alpha2_f64() - a2).abs() < 1e-12 * a2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, rng_algorithm: RngAlgorithm::ChaCha,
        rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn orders_between_equation_order_and_maximal(p in unit_poly(25)) {
        let f = NumberFieldCubic::new(p).unwrap();
        let of = maximal_order(&f, 1 << 20).unwrap();
        let zt = equation_order(&f);
        let idx = of.lat.index_of(&zt.lat).unwrap().unwrap();
        prop_assert_eq!(p.discriminant(), of.disc * idx * idx);
        prop_assume!(idx <= 64);
        let fast = intermediate_orders(&f, &zt, &of).unwrap();
        let slow = intermediate_orders_bruteforce(&f, &zt, &of).unwrap();
        prop_assert_eq!(fast.len(), slow.len());
        for o in &fast {
            prop_assert!(slow.iter().any(|s| s.lat == o.lat));
            prop_assert!(o.is_ring(&f).unwrap());
            let i = of.lat.index_of(&o.lat).unwrap().unwrap();
            prop_assert_eq!(o.disc, of.disc * i * i);
        }
    }

    #[test]
    fn regulators_agree_across_methods(p in unit_poly(6)) {
        let f = NumberFieldCubic::new(p).unwrap();
        let of = maximal_order(&f, 1 << 20).unwrap();
        let (g, _) = fundamental_units(&f, &of, 1_000_000).unwrap();
        // the box search grows like exp(R); skip what it refuses
        let s = match fundamental_units_by_search(&f, &of, 50_000_000) {
            Err(Error::BoxTooLarge { .. }) => return Err(TestCaseError::reject("search box too large")),
            other => other.unwrap(),
        };
        prop_assert!((g.regulator - s.regulator).abs() < 1e-9 * g.regulator);
        for k in 0..3 {
            prop_assert!((g.regulator_dropping(k) - g.regulator).abs() < 1e-9 * g.regulator);
        }
    }
}

#[test]
fn class_numbers_two_ways_on_nonmaximal_orders() {
    // polynomials whose equation order has index > 1
    let mut checked = 0;
    for a in -12i64..=12 {
        for b in -20i64..=20 {
            for c in [-1, 1] {
                let Some(p) = admissible(a, b, c) else {
                    continue;
                };
                if !p.is_canonical() {
                    continue;
                }
                let f = NumberFieldCubic::new(p).unwrap();
                let of = maximal_order(&f, 1 << 20).unwrap();
                let zt = equation_order(&f);
                if zt.lat == of.lat || zt.disc.abs() > 40_000 {
                    continue;
                }
                let (uf, g) = fundamental_units(&f, &of, 1_000_000).unwrap();
                let hf = class_group_maximal(&f, &of, &g).unwrap().order();
                for o in intermediate_orders(&f, &zt, &of).unwrap() {
                    let idx = unit_index(&f, &of, &uf, &o, 1 << 26).unwrap();
                    let h = class_number_order(&f, &o, &of, hf, idx.index).unwrap();
                    let d = class_number_order_direct(&f, &o, 1 << 24, 1_000_000).unwrap();
                    assert_eq!(h, d.picard, "{p} order disc {}", o.disc);
                    assert!(d.all_ideals >= d.picard);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 20, "only {checked} orders");
}

#[test]
fn finite_unit_counts_by_crt_and_by_listing() {
    for (a, b, c) in [
        (-9, -1, 1),
        (-8, 5, 1),
        (-6, 3, 1),
        (-11, 27, -1),
        (-21, -13, 1),
    ] {
        let f = NumberFieldCubic::new(CubicPoly::new(a, b, c)).unwrap();
        let of = maximal_order(&f, 1 << 20).unwrap();
        for o in intermediate_orders(&f, &equation_order(&f), &of).unwrap() {
            let cond = pgt_core::order::conductor(&f, &o, &of).unwrap();
            if cond.norm > 4096 {
                continue;
            }
            for ring in [&o, &of] {
                assert_eq!(
                    finite_unit_count(&f, ring, &cond.lat).unwrap(),
                    finite_unit_count_literal(&f, ring, &cond.lat).unwrap()
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, rng_algorithm: RngAlgorithm::ChaCha,
        rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn abel_is_linear(s in -3.0f64..3.0, t in -3.0f64..3.0, y in 0.0f64..8.0) {
        let (e, c) = (exp_decay(), cubic_decay());
        let (e2, c2) = (e.clone(), c.clone());
        let mix = SampledFunction::new(move |x| s * e2.at(x) + t * c2.at(x))
            .with_decay(3.0, s.abs() * 256.0 * (-3.0f64).exp() + t.abs());
        let lhs = abel_forward(&mix, y).unwrap().value;
        let rhs = s * abel_forward(&e, y).unwrap().value + t * abel_forward(&c, y).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn abel_translation(shift in 0.0f64..5.0, y in 0.0f64..5.0) {
        let c = cubic_decay();
        let c2 = c.clone();
        // (1 + x + t)^(−3) ≤ (1 + x)^(−3)
        let moved = SampledFunction::new(move |x| c2.at(x + shift)).with_decay(3.0, 1.0);
        let lhs = abel_forward(&moved, y).unwrap().value;
        let rhs = abel_forward(&c, y + shift).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn abel_preserves_decrease(y in 0.0f64..20.0, dy in 0.01f64..3.0) {
        for phi in [exp_decay(), cubic_decay()] {
            let a = abel_forward(&phi, y).unwrap().value;
            let b = abel_forward(&phi, y + dy).unwrap().value;
            prop_assert!(b < a);
        }
    }
}
