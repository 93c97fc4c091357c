use std::collections::{BTreeMap, BTreeSet};

use gradperc::arms::{
    arm_counts, has_polychromatic_arms, has_two_arms, sample_annulus, ArmQuery, TwoArmQuery,
};
use gradperc::front::{
    extract_front, front_stats, outer_boundary, spanning_clusters, BoundarySide, DualPath,
};
use gradperc::scaling::{fit_exponent, fit_exponent_weighted, EllRule, FitOptions};
use gradperc::{box_region, sample, ProbabilityField, SiteCoord, StripSpec};
use proptest::prelude::*;

fn strip() -> impl Strategy<Value = (StripSpec, u64)> {
    (2u32..14, 1u32..24, any::<u64>()).prop_map(|(n, ell, seed)| (StripSpec::new(n, ell).unwrap(), seed))
}

/// Lowest and highest edge height of `path` in each column.
fn column_span(path: &DualPath) -> BTreeMap<i64, (f64, f64)> {
    let mut out: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for e in path.dual_edges() {
        let h = e.mid_height();
        let span = out.entry(e.lo().i).or_insert((h, h));
        span.0 = span.0.min(h);
        span.1 = span.1.max(h);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn front_edges_join_the_two_spanning_clusters((spec, seed) in strip()) {
        let c = sample(&spec.field(), spec.region(), seed, 0);
        let f = extract_front(&c).unwrap();
        let (bottom, top) = spanning_clusters(&c);
        let r = spec.region();
        prop_assert_eq!(f.length, f.edges.len());
        for e in &f.edges {
            let (a, b) = (r.index(e.lo()), r.index(e.hi()));
            prop_assert!((bottom[a] && top[b]) || (bottom[b] && top[a]));
        }
        prop_assert_eq!(f.length > 0, f.unique);
        if f.unique {
            prop_assert_eq!(&f.rho_upper, &f.rho_lower);
            let walk: BTreeSet<_> = f.rho_upper.dual_edges().collect();
            prop_assert_eq!(walk, f.edges.iter().copied().collect::<BTreeSet<_>>());
            prop_assert!(f.length >= spec.ell as usize);
        }
    }

    #[test]
    fn lowest_vacant_crossing_is_below_highest_occupied((spec, seed) in strip()) {
        let c = sample(&spec.field(), spec.region(), seed, 0);
        let f = extract_front(&c).unwrap();
        let upper = column_span(&f.rho_upper);
        for (i, (lo, hi)) in column_span(&f.rho_lower) {
            if let Some(&(ulo, uhi)) = upper.get(&i) {
                prop_assert!(lo <= ulo && hi <= uhi, "column {}", i);
            }
        }
    }

    #[test]
    fn front_stats_are_ordered((spec, seed) in strip(), delta in 0.0f64..0.3) {
        let c = sample(&spec.field(), spec.region(), seed, 0);
        let f = extract_front(&c).unwrap();
        if let Ok(s) = front_stats(&f, &spec, delta) {
            prop_assert!(s.min_height <= s.mean_height && s.mean_height <= s.max_height);
            let mut last = 1.0;
            for b in 0..=2 * spec.half_width {
                let x = s.fraction_outside(b as f64 / 2.0);
                prop_assert!((0.0..=last).contains(&x));
                last = x;
            }
            prop_assert!(s.outer_band >= s.inner_band);
        }
    }

    #[test]
    fn outer_boundaries_are_ordered_crossings((spec, seed) in strip()) {
        let c = sample(&spec.field(), spec.region(), seed, 0);
        let up = outer_boundary(&c, BoundarySide::Upper).unwrap();
        let down = outer_boundary(&c, BoundarySide::Lower).unwrap();
        for b in [&up, &down] {
            prop_assert_eq!(b.sites.iter().collect::<BTreeSet<_>>().len(), b.length);
            prop_assert_eq!(b.sites.first().unwrap().i, 0);
            prop_assert_eq!(b.sites.last().unwrap().i, spec.ell as i64);
            prop_assert!(b.sites.windows(2).all(|w| w[0].is_adjacent(w[1])));
        }
        let top_of = |sites: &[SiteCoord]| {
            let mut m: BTreeMap<i64, i64> = BTreeMap::new();
            for z in sites {
                let e = m.entry(z.i).or_insert(z.j);
                *e = (*e).max(z.j);
            }
            m
        };
        if !extract_front(&c).unwrap().unique {
            return Ok(());
        }
        let (hu, hd) = (top_of(&up.sites), top_of(&down.sites));
        for (i, j) in hd {
            prop_assert!(hu[&i] >= j, "column {}", i);
        }
    }

    #[test]
    fn arm_events_nest_and_are_colour_symmetric(seed in any::<u64>(), m in 4u32..6, extra in 1u32..6) {
        let n = m + extra;
        let c = sample_annulus(0.5, SiteCoord::ORIGIN, m, n, seed, 0).unwrap();
        let swapped = c.swapped();
        let mut previous = true;
        for j in 2..=4 {
            let q = ArmQuery::new(SiteCoord::ORIGIN, m, n, j).unwrap();
            let a = has_polychromatic_arms(&c, &q).unwrap();
            prop_assert!(previous || !a, "A^{} without A^{}", j, j - 1);
            prop_assert_eq!(a, has_polychromatic_arms(&swapped, &q).unwrap());
            previous = a;
        }
        let counts = arm_counts(&c, SiteCoord::ORIGIN, m, n, 4).unwrap();
        let swapped_counts = arm_counts(&swapped, SiteCoord::ORIGIN, m, n, 4).unwrap();
        prop_assert_eq!((counts.occupied, counts.vacant), (swapped_counts.vacant, swapped_counts.occupied));
    }

    #[test]
    fn arm_counts_shrink_with_outer_radius(seed in any::<u64>(), m in 2u32..5, extra in 2u32..8) {
        let n = m + extra;
        let c = sample_annulus(0.5, SiteCoord::ORIGIN, m, n, seed, 0).unwrap();
        let far = arm_counts(&c, SiteCoord::ORIGIN, m, n, 6).unwrap();
        let near = arm_counts(&c, SiteCoord::ORIGIN, m, n - 1, 6).unwrap();
        prop_assert!(far.occupied <= near.occupied && far.vacant <= near.vacant);
    }

    #[test]
    fn two_arms_to_a_large_box_imply_smaller_boxes(seed in any::<u64>(), p in 0.2f64..0.8, n in 2u32..8) {
        let field = ProbabilityField::homogeneous(p).unwrap();
        let c = sample(&field, box_region(SiteCoord::ORIGIN, n), seed, 0);
        let q = |k| TwoArmQuery::new(SiteCoord::ORIGIN, box_region(SiteCoord::ORIGIN, k)).unwrap();
        if has_two_arms(&c, &q(n)).unwrap() {
            for k in 1..n {
                prop_assert!(has_two_arms(&c, &q(k)).unwrap());
            }
        }
    }

    #[test]
    fn power_laws_are_recovered_exactly(exponent in -3.0f64..3.0, prefactor in 0.01f64..100.0, k in 3usize..9) {
        let pts: Vec<(f64, f64)> = (0..k).map(|i| {
            let x = 2f64.powi(i as i32 + 1);
            (x, prefactor * x.powf(exponent))
        }).collect();
        let opts = FitOptions { bootstrap: 200, ..FitOptions::default() };
        let f = fit_exponent(&pts, &opts).unwrap();
        prop_assert!((f.slope - exponent).abs() < 1e-9);
        prop_assert!((f.intercept - prefactor.ln()).abs() < 1e-8);
        prop_assert!(f.ci_contains(f.slope));
    }

    #[test]
    fn bootstrap_interval_contains_the_slope(ys in prop::collection::vec(0.1f64..10.0, 3..10), seed in any::<u64>()) {
        let pts: Vec<(f64, f64, f64)> = ys.iter().enumerate().map(|(i, &y)| ((i + 1) as f64, y, 0.1 * y)).collect();
        let opts = FitOptions { bootstrap: 200, seed, ..FitOptions::default() };
        let f = fit_exponent_weighted(&pts, &opts).unwrap();
        prop_assert!(f.bootstrap_ci.0 <= f.slope && f.slope <= f.bootstrap_ci.1);
        let scaled: Vec<(f64, f64, f64)> = pts.iter().map(|&(x, y, s)| (x, 3.0 * y, 3.0 * s)).collect();
        let g = fit_exponent_weighted(&scaled, &opts).unwrap();
        prop_assert!((f.slope - g.slope).abs() < 1e-9);
    }

    #[test]
    fn ell_rules_meet_the_width_bound(factor in 0.1f64..4.0, exponent in 0.58f64..1.5, n in 1u32..4096) {
        for rule in [EllRule::Linear { factor }, EllRule::Power { exponent, factor }] {
            if rule.validate(&[n]).is_ok() {
                prop_assert!(rule.ell(n) as f64 >= (n as f64).powf(4.0 / 7.0));
            }
        }
        let sqrt = EllRule::Power { exponent: 0.5, factor };
        let constant = EllRule::Constant { value: n };
        prop_assert!(sqrt.validate(&[n]).is_err());
        prop_assert!(constant.validate(&[n]).is_err());
    }
}
