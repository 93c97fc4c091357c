//! Fast detectors against the brute-force references in `gradperc::oracle`.

use std::collections::BTreeSet;

use gradperc::arms::{arm_counts, has_polychromatic_arms, has_two_arms, ArmQuery, TwoArmQuery};
use gradperc::front::{outer_boundary, BoundarySide};
use gradperc::oracle;
use gradperc::sampling::sample_masked;
use gradperc::{
    box_region, has_crossing, sample, Color, Configuration, CrossingQuery, Orientation, ProbabilityField,
    Region, SiteCoord, StripSpec,
};
use proptest::prelude::*;

fn bits(region: Region) -> impl Strategy<Value = Configuration> {
    proptest::collection::vec(any::<bool>(), region.len())
        .prop_map(move |b| Configuration::from_bits(region, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn crossing_matches_path_search(
        (c, horizontal, occupied) in (1i64..6, 1i64..6).prop_flat_map(|(w, h)| {
            (bits(Region::new(0, w, 0, h).unwrap()), any::<bool>(), any::<bool>())
        })
    ) {
        let orientation = if horizontal { Orientation::Horizontal } else { Orientation::Vertical };
        let q = CrossingQuery::new(*c.region(), orientation, Color::of(occupied)).unwrap();
        prop_assert_eq!(
            has_crossing(&c, &q).unwrap(),
            oracle::crossing_by_search(&c, *c.region(), horizontal, occupied)
        );
    }

    #[test]
    fn two_arms_match_path_search(c in bits(box_region(SiteCoord::ORIGIN, 3))) {
        let q = TwoArmQuery::new(SiteCoord::ORIGIN, *c.region()).unwrap();
        prop_assert_eq!(
            has_two_arms(&c, &q).unwrap(),
            oracle::two_arms_by_search(&c, SiteCoord::ORIGIN, *c.region())
        );
    }

    #[test]
    fn arm_counts_match_chordless_packing(seed in any::<u64>(), p in 0.3f64..0.7) {
        let field = ProbabilityField::homogeneous(p).unwrap();
        let c = sample_masked(&field, box_region(SiteCoord::ORIGIN, 4), seed, 0, |z| z.norm() >= 2);
        let counts = arm_counts(&c, SiteCoord::ORIGIN, 2, 4, 4).unwrap();
        let occ = oracle::max_disjoint(&oracle::chordless_arms(&c, SiteCoord::ORIGIN, 2, 4, true), 4);
        let vac = oracle::max_disjoint(&oracle::chordless_arms(&c, SiteCoord::ORIGIN, 2, 4, false), 4);
        prop_assert_eq!((counts.occupied, counts.vacant), (occ, vac));
    }
}

#[test]
fn arm_events_match_oracle_on_offset_centres() {
    let field = ProbabilityField::homogeneous(0.5).unwrap();
    let center = SiteCoord::new(7, -3);
    for rep in 0..300 {
        let c = sample(&field, box_region(center, 5), 99, rep);
        for (m, n, j) in [(2, 4, 2), (3, 5, 3), (4, 5, 4), (2, 5, 2)] {
            let q = ArmQuery::new(center, m, n, j).unwrap();
            assert_eq!(
                has_polychromatic_arms(&c, &q).unwrap(),
                oracle::polychromatic_arms_by_search(&c, center, m, n, j),
                "rep {rep} m {m} n {n} j {j}"
            );
        }
    }
}

#[test]
fn arm_events_match_oracle_exhaustively() {
    // Sixteen free sites across the annulus on fixed random backgrounds.
    let free: Vec<SiteCoord> = (2..=4)
        .flat_map(|i| (-2..=3).map(move |j| SiteCoord::new(i, j)))
        .filter(|z| z.norm() >= 2)
        .take(16)
        .collect();
    assert_eq!(free.len(), 16);
    let field = ProbabilityField::homogeneous(0.5).unwrap();
    for background in 0..2 {
        let mut c = sample_masked(&field, box_region(SiteCoord::ORIGIN, 4), 7, background, |z| {
            z.norm() >= 2
        });
        for bits in 0u32..1 << 16 {
            for (k, &z) in free.iter().enumerate() {
                c.set(z, bits >> k & 1 == 1);
            }
            for j in [2, 3] {
                let q = ArmQuery::new(SiteCoord::ORIGIN, j, 4, j).unwrap();
                assert_eq!(
                    has_polychromatic_arms(&c, &q).unwrap(),
                    oracle::polychromatic_arms_by_search(&c, SiteCoord::ORIGIN, j, 4, j)
                );
            }
        }
    }
}

#[test]
fn outer_boundaries_match_three_arm_characterisation() {
    let spec = StripSpec::new(3, 5).unwrap();
    for rep in 0..120 {
        let c = sample(&spec.field(), spec.region(), 5, rep);
        for (side, upper) in [(BoundarySide::Upper, true), (BoundarySide::Lower, false)] {
            let b = outer_boundary(&c, side).unwrap();
            let walk: BTreeSet<SiteCoord> = b.sites.iter().copied().collect();
            assert_eq!(
                walk,
                oracle::boundary_by_arms(&c, upper),
                "replica {rep} {side:?}"
            );
        }
    }
}
