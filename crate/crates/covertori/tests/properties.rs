//! Property tests for the exact algebraic invariants.

use covertori::cohomology;
use covertori::cover::{CoverConfiguration, EtalePullbackFactor, ProductQuotient};
use covertori::group::{pairing, FiniteAbelianGroup, GroupElement, Subgroup};
use covertori::search::{enumerate_factor_data, FactorTemplate};
use covertori::verdicts::ApplicabilityMode;
use proptest::prelude::*;

fn moduli_strategy() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(prop_oneof![Just(2u64), Just(3), Just(4), Just(6), Just(9)], 1..=4)
}

fn element_strategy(moduli: Vec<u64>) -> impl Strategy<Value = GroupElement> {
    let ranges: Vec<_> = moduli.iter().map(|&d| 0..d).collect();
    (ranges, Just(moduli)).prop_map(|(coords, moduli)| GroupElement::from_coords(&moduli, coords))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pairing_is_bilinear(
        (moduli, chi1, chi2, x) in moduli_strategy().prop_flat_map(|m| {
            (
                Just(m.clone()),
                element_strategy(m.clone()),
                element_strategy(m.clone()),
                element_strategy(m),
            )
        })
    ) {
        let sum = chi1.add(&chi2, &moduli);
        let a = pairing(&moduli, &chi1, &x).unwrap();
        let b = pairing(&moduli, &chi2, &x).unwrap();
        let c = pairing(&moduli, &sum, &x).unwrap();
        // a + b ≡ c mod 1, checked exactly over the common denominator
        let m: u64 = moduli.iter().fold(1, |acc, &d| {
            let g = { let (mut a, mut b) = (acc, d); while b != 0 { let t = a % b; a = b; b = t; } a };
            acc / g * d
        });
        let total = (a.numerator as u128 * (m / a.denominator) as u128
            + b.numerator as u128 * (m / b.denominator) as u128)
            % m as u128;
        prop_assert_eq!(total as u64, c.numerator * (m / c.denominator));
        // pairing with zero vanishes
        let zero = GroupElement::from_coords(&moduli, vec![0; moduli.len()]);
        prop_assert!(pairing(&moduli, &zero, &x).unwrap().is_zero());
    }

    #[test]
    fn subgroup_canonical_form_is_generating_set_independent(
        (moduli, gens, seed) in moduli_strategy().prop_flat_map(|m| {
            (
                Just(m.clone()),
                prop::collection::vec(element_strategy(m), 0..4),
                any::<u64>(),
            )
        })
    ) {
        let rows: Vec<Vec<i64>> =
            gens.iter().map(|g| g.coords().iter().map(|&v| v as i64).collect()).collect();
        let h = Subgroup::from_generators(&moduli, &rows).unwrap();
        // pick a different generating set: all elements, shuffled
        // deterministically by the seed, plus random sums
        let elements = h.elements();
        let mut alt: Vec<GroupElement> = Vec::new();
        let mut state = seed | 1;
        for _ in 0..elements.len().min(6) {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let i = (state >> 33) as usize % elements.len();
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % elements.len();
            alt.push(elements[i].add(&elements[j], &moduli));
        }
        alt.extend(gens.iter().cloned());
        let regenerated = Subgroup::from_elements_basis(&moduli, &alt);
        // the alt set generates a subgroup of h containing possibly fewer
        // elements; adding the original generators makes it equal
        prop_assert_eq!(&regenerated, &h);
        prop_assert_eq!(regenerated.basis(), h.basis());
    }

    #[test]
    fn annihilator_orders_and_involution(
        (moduli, gens) in moduli_strategy().prop_flat_map(|m| {
            (Just(m.clone()), prop::collection::vec(element_strategy(m), 0..4))
        })
    ) {
        let rows: Vec<Vec<i64>> =
            gens.iter().map(|g| g.coords().iter().map(|&v| v as i64).collect()).collect();
        let h = Subgroup::from_generators(&moduli, &rows).unwrap();
        let perp = h.annihilator();
        let ambient: u64 = moduli.iter().product();
        prop_assert_eq!(h.order() * perp.order(), ambient);
        prop_assert_eq!(&perp.annihilator(), &h);
        // every annihilator element pairs to zero with every subgroup element
        for chi in perp.elements().iter().take(8) {
            for x in h.elements().iter().take(8) {
                prop_assert!(pairing(&moduli, chi, x).unwrap().is_zero());
            }
        }
    }
}

fn curve_templates() -> Vec<FactorTemplate> {
    vec![
        FactorTemplate { group: vec![2], torsion_group: vec![2, 2], degree_bound: 2, ample_tags: false },
        FactorTemplate { group: vec![3], torsion_group: vec![3, 3], degree_bound: 2, ample_tags: false },
        FactorTemplate { group: vec![2, 2], torsion_group: vec![2, 2], degree_bound: 2, ample_tags: true },
    ]
}

fn random_pq_strategy() -> impl Strategy<Value = ProductQuotient> {
    let templates = curve_templates();
    let data: Vec<Vec<covertori::cover::FactorDatum>> = templates
        .iter()
        .map(|t| enumerate_factor_data(t).unwrap())
        .collect();
    (prop::collection::vec(0usize..templates.len(), 1..=3), any::<u64>()).prop_map(
        move |(picks, seed)| {
            let mut state = seed | 1;
            let factors: Vec<covertori::cover::FactorDatum> = picks
                .iter()
                .map(|&t| {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    let i = (state >> 33) as usize % data[t].len();
                    data[t][i].clone()
                })
                .collect();
            let moduli: Vec<u64> = factors
                .iter()
                .flat_map(|f| f.group.invariant_factors().iter().copied())
                .collect();
            // a random subgroup from up to two random elements
            let mut gens: Vec<Vec<i64>> = Vec::new();
            for _ in 0..2 {
                state =
                    state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let mut g = Vec::with_capacity(moduli.len());
                let mut s = state;
                for &d in &moduli {
                    s = s.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
                    g.push(((s >> 33) % d as u64) as i64);
                }
                gens.push(g);
            }
            let subgroup = Subgroup::from_generators(&moduli, &gens).unwrap();
            ProductQuotient { factors, subgroup }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diamond_symmetries_hold_on_random_quotients(pq in random_pq_strategy()) {
        let config = CoverConfiguration::ProductQuotient(pq.clone());
        prop_assert!(config.validate().is_valid());
        let diamond = cohomology::hodge_diamond(&pq).unwrap();
        let n = diamond.n;
        for p in 0..=n {
            for q in 0..=n {
                prop_assert_eq!(diamond.h[p][q], diamond.h[q][p]);
                prop_assert_eq!(diamond.h[p][q], diamond.h[n - p][n - q]);
            }
        }
        prop_assert_eq!(diamond.h[0][0], 1);
        // chi consistency across the three routes
        let h = cohomology::h_omega(&config).unwrap();
        let alt: i64 = h.iter().enumerate()
            .map(|(q, &v)| if q % 2 == 0 { v as i64 } else { -(v as i64) })
            .sum();
        prop_assert_eq!(alt, cohomology::euler_char_omega(&config));
        prop_assert_eq!(&diamond.h[n], &h);
        // rank of the pushforward equals the covering degree
        let summands = cohomology::omega_pushforward(&config);
        prop_assert_eq!(summands.len() as u64, config.degree_albanese());
    }

    #[test]
    fn box_cover_agrees_with_quotient_at_omega_level(pq in random_pq_strategy()) {
        let config = CoverConfiguration::ProductQuotient(pq.clone());
        let bx = pq.to_box_cover();
        let box_config = CoverConfiguration::DirectBoxCover(bx.clone());
        prop_assert_eq!(
            bx.group.order(),
            pq.product_group().order() / pq.subgroup.order()
        );
        prop_assert_eq!(
            cohomology::h_omega(&config).unwrap(),
            cohomology::h_omega(&box_config).unwrap()
        );
        prop_assert_eq!(
            cohomology::euler_char_omega(&config),
            cohomology::euler_char_omega(&box_config)
        );
        prop_assert_eq!(
            cohomology::torsion_factor_criterion(&config),
            cohomology::torsion_factor_criterion(&box_config)
        );
        // the loci agree as well
        let a = covertori::loci::v_locus(&config, 0).unwrap();
        let b = covertori::loci::v_locus(&box_config, 0).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn twist_preserves_euler_characteristic_and_degrees(
        (pq, picks) in (random_pq_strategy(), prop::collection::vec(0u64..4, 8))
    ) {
        let bx = pq.to_box_cover();
        if bx.group.is_trivial() {
            return Ok(());
        }
        // a twist built from arbitrary torsion elements killed by the
        // character orders
        let qmod: Vec<u64> = bx.group.invariant_factors().to_vec();
        let images: Vec<Vec<GroupElement>> = (0..qmod.len())
            .map(|i| {
                bx.factors
                    .iter()
                    .enumerate()
                    .map(|(j, f)| {
                        let tmod = f.torsion_group.invariant_factors();
                        let pick = picks[(i * 3 + j) % picks.len()];
                        let coords: Vec<i64> = tmod
                            .iter()
                            .map(|&d| {
                                // an element killed by qmod[i]
                                let step = d / covertori::group::gcd(d, qmod[i]);
                                ((pick % d) * step % d) as i64
                            })
                            .collect();
                        f.torsion_group.element(&coords).unwrap()
                    })
                    .collect()
            })
            .collect();
        let Ok(twisted) = bx.twist(&images) else {
            // the twist may break validity (e.g. collide with an etale tag);
            // that is a rejected input, not an invariant violation
            return Ok(());
        };
        let before = CoverConfiguration::DirectBoxCover(bx.clone());
        let after = CoverConfiguration::DirectBoxCover(twisted.clone());
        prop_assert_eq!(
            cohomology::euler_char_omega(&before),
            cohomology::euler_char_omega(&after)
        );
        for (tau, tuple) in &twisted.classes {
            let orig = &bx.classes[tau];
            for (a, b) in tuple.iter().zip(orig) {
                prop_assert_eq!(a.degree, b.degree);
            }
        }
    }

    #[test]
    fn etale_pullback_kills_exactly_the_kernel_classes(pq in random_pq_strategy()) {
        let bx = pq.to_box_cover();
        if bx.group.is_trivial() {
            return Ok(());
        }
        // quotient every torsion group to the trivial group
        let per: Vec<EtalePullbackFactor> = bx
            .factors
            .iter()
            .map(|f| EtalePullbackFactor {
                index: f.torsion_group.order(),
                target: FiniteAbelianGroup::trivial(),
                images: vec![FiniteAbelianGroup::trivial().zero(); f.torsion_group.rank()],
            })
            .collect();
        let (pulled, disconnected) = bx.etale_pullback(&per).unwrap();
        let all_torsion_only = bx.classes.values().any(|tuple| {
            tuple.iter().all(|c| c.degree == 0)
        });
        prop_assert_eq!(disconnected, all_torsion_only);
        for (tau, tuple) in &pulled.classes {
            let orig = &bx.classes[tau];
            for (j, (a, b)) in tuple.iter().zip(orig).enumerate() {
                let k = bx.factors[j].torsion_group.order();
                prop_assert_eq!(a.degree, b.degree * k as i64);
                prop_assert!(a.torsion.is_zero());
            }
        }
    }

    #[test]
    fn factor_genus_dichotomy(pq in random_pq_strategy()) {
        for f in &pq.factors {
            let g = f.genus().unwrap();
            let has_ample = f.classes.values().any(|c| c.degree > 0);
            if has_ample {
                prop_assert!(g >= 2);
            } else {
                prop_assert_eq!(g, 1);
            }
        }
    }

    #[test]
    fn analysis_report_json_round_trips(pq in random_pq_strategy()) {
        let config = CoverConfiguration::ProductQuotient(pq);
        let file = covertori::config::ConfigFile::from_configuration(&config);
        let report = covertori::report::analyze(&file, ApplicabilityMode::Chi0).unwrap();
        let json = report.to_json_compact();
        let parsed: covertori::report::AnalysisReport = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(parsed.to_json_compact(), json);
        // the configuration echo round-trips to the same configuration
        let back = parsed.config.to_configuration().unwrap();
        prop_assert_eq!(back, config);
    }
}
