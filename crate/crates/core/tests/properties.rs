//! Structural invariants of the dynamics, checked on random inputs.

use boxball::continuum::{pl_pitman, PlPath, Rational};
use boxball::harness::render_path_svg;
use boxball::lattice::{
    carrier, decode_cyclic, decode_path, encode_path, evolve_finite, inverse, periodic_transform, pitman_transform,
    reverse_configuration, running_max, transform, BinaryConfiguration, LeftPolicy,
};
use boxball::solitons::soliton_counts;
use boxball::toda::{toda_invariants, toda_step_via_path, TodaState};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = BinaryConfiguration> {
    (-6i64..6, prop::collection::vec(0u8..=1, 1..40))
        .prop_map(|(first, sites)| BinaryConfiguration::finite(first, sites).unwrap())
}

fn ring() -> impl Strategy<Value = BinaryConfiguration> {
    prop::collection::vec(0u8..=1, 1..40)
        .prop_filter("density below 1/2", |s| 2 * s.iter().filter(|&&b| b == 1).count() < s.len())
        .prop_map(|s| BinaryConfiguration::cyclic(s).unwrap())
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i128..=12, prop::sample::select(vec![1i128, 2, 3, 4, 6])).prop_map(|(n, d)| Rational::new(n, d))
}

fn finite_toda() -> impl Strategy<Value = TodaState<Rational>> {
    (1usize..6).prop_flat_map(|j| {
        (prop::collection::vec(positive_rational(), j), prop::collection::vec(positive_rational(), j - 1))
            .prop_map(|(q, e)| TodaState::finite(q, e).unwrap())
    })
}

fn periodic_toda() -> impl Strategy<Value = TodaState<Rational>> {
    (1usize..6).prop_flat_map(|j| {
        (prop::collection::vec(positive_rational(), j), prop::collection::vec(positive_rational(), j)).prop_map(
            |(q, mut e)| {
                let (sq, se) = (q.iter().sum::<Rational>(), e.iter().sum::<Rational>());
                if se <= sq {
                    e[0] += sq - se + Rational::new(1, 2);
                }
                TodaState::periodic_closed(q, e).unwrap()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn encoding_round_trips(x in finite(), y in ring()) {
        prop_assert_eq!(decode_path(&encode_path(&x)?)?.particle_positions(), x.particle_positions());
        prop_assert_eq!(decode_cyclic(&encode_path(&y)?)?, y);
    }

    #[test]
    fn step_is_invertible_and_conserves_balls(x in finite()) {
        let tx = transform(&x)?;
        prop_assert_eq!(tx.particle_count(), x.particle_count());
        prop_assert_eq!(inverse(&tx)?.particle_positions(), x.particle_positions());
        prop_assert_eq!(transform(&inverse(&x)?)?.particle_positions(), x.particle_positions());
    }

    #[test]
    fn path_route_equals_carrier_sweep(x in finite()) {
        prop_assert_eq!(transform(&x)?.particle_positions(), evolve_finite(&x)?.particle_positions());
    }

    #[test]
    fn reversal_conjugates_step_to_inverse(x in finite()) {
        let back = reverse_configuration(&transform(&reverse_configuration(&x))?);
        prop_assert_eq!(back.particle_positions(), inverse(&x)?.particle_positions());
    }

    #[test]
    fn periodic_step_conserves_solitons(x in ring()) {
        let tx = periodic_transform(&x)?;
        prop_assert_eq!(soliton_counts(&tx), soliton_counts(&x));
        prop_assert_eq!(inverse(&tx)?, x);
    }

    #[test]
    fn carrier_is_max_minus_path(x in finite()) {
        let s = encode_path(&x)?;
        let m = running_max(&s, LeftPolicy::FiniteSupport)?;
        let w = carrier(&s, LeftPolicy::FiniteSupport)?;
        for (i, (&mx, &v)) in m.iter().zip(s.values()).enumerate() {
            prop_assert!(mx >= v);
            prop_assert_eq!(w.at(s.start() + i as i64), (mx - v) as u64);
        }
    }

    #[test]
    fn continuous_transform_extends_lattice_one(x in finite()) {
        let s = encode_path(&x)?;
        let ts = pitman_transform(&s, LeftPolicy::FiniteSupport)?;
        let pl = pl_pitman(&PlPath::<f64>::from_lattice(&s), LeftPolicy::FiniteSupport)?;
        for n in s.start()..=s.end() {
            prop_assert!((pl.at(n as f64)? - ts.at(n) as f64).abs() < 1e-9, "n = {}", n);
        }
    }

    #[test]
    fn toda_direct_step_matches_path_route(s in finite_toda(), p in periodic_toda()) {
        prop_assert_eq!(s.step()?, toda_step_via_path(&s)?.0);
        prop_assert_eq!(p.step()?, toda_step_via_path(&p)?.0);
    }

    #[test]
    fn toda_step_conserves_invariants(s in finite_toda(), p in periodic_toda()) {
        for x in [s, p] {
            let before = toda_invariants(&x)?;
            let after = toda_invariants(&x.step()?)?;
            prop_assert_eq!(before.blocks, after.blocks);
            prop_assert_eq!(before.total_q, after.total_q);
            prop_assert_eq!(before.length, after.length);
            prop_assert_eq!(after.local_maxima, after.blocks);
            if x.periodic {
                prop_assert_eq!(before.total_e, after.total_e);
            }
        }
    }

    #[test]
    fn svg_is_deterministic(x in finite()) {
        let s = PlPath::<f64>::from_lattice(&encode_path(&x)?);
        prop_assert_eq!(render_path_svg(std::slice::from_ref(&s), &[])?, render_path_svg(&[s], &[])?);
    }
}
