use proptest::prelude::*;
use stretch_fpp::chain::{delta_init, delta_step, generic_step, GenericFrontier};
use stretch_fpp::density::{kernel_k, kernel_q, p_sum, DensityGrid};
use stretch_fpp::graph::{frontier_oracle, sample_ladder};
use stretch_fpp::mc::{recursion_frontier, subadditivity_probe};
use stretch_fpp::output::{fmt_sig15, round_sig15};
use stretch_fpp::{GraphFamily, LayerWeights, WeightedLadder};

fn nontrivial() -> impl Strategy<Value = GraphFamily> {
    prop::sample::select(GraphFamily::NONTRIVIAL.to_vec())
}

fn close(a: f64, b: f64) -> bool {
    (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kernel_is_point_symmetric(delta in -15.0..15.0f64, d in -15.0..15.0f64) {
        prop_assume!(d != 0.0);
        prop_assert_eq!(kernel_k(delta, d), kernel_k(-delta, -d));
    }

    #[test]
    fn kernels_are_subprobability_densities(delta in -15.0..15.0f64, t in -15.0..15.0f64) {
        let k = kernel_k(delta, t);
        prop_assert!((0.0..=1.0).contains(&k));
        prop_assert!(kernel_q(delta, t) >= 0.0);
    }

    #[test]
    fn increment_cdf_is_monotone(delta in -10.0..10.0f64, l in -10.0..10.0f64, step in 0.0..3.0f64) {
        let (a, b) = (p_sum(delta, l), p_sum(delta, l + step));
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn recursion_equals_dijkstra(family in nontrivial(), n in 1usize..60, seed in any::<u64>()) {
        let ladder = sample_ladder(family, n, seed).unwrap();
        let (r0, r1) = recursion_frontier(&ladder);
        let (o0, o1) = frontier_oracle(&ladder);
        prop_assert!(close(r0, o0) && close(r1, o1), "{} {} vs {} {}", r0, r1, o0, o1);
    }

    #[test]
    fn delta_chain_tracks_generic_frontier(
        layers in prop::collection::vec((0.001..6.0f64, 0.001..6.0f64, 0.001..6.0f64), 1..80),
        z0 in 0.001..6.0f64,
    ) {
        let mut state = delta_init(z0);
        let mut front = GenericFrontier::origin(Some(z0));
        for (x, y, z) in layers {
            let w = LayerWeights { v: None, w: None, x: Some(x), y: Some(y), z: Some(z) };
            state = delta_step(state, &w);
            front = generic_step(front, &w, GraphFamily::XYZ);
            prop_assert!((state.l - front.d0()).abs() < 1e-9);
            prop_assert!((state.delta - front.delta()).abs() < 1e-9);
        }
    }

    #[test]
    fn first_passage_times_are_subadditive(
        family in nontrivial(),
        n in 1usize..40,
        split in 0.0..=1.0f64,
        seed in any::<u64>(),
    ) {
        let m = (split * n as f64).round() as usize;
        let r = subadditivity_probe(family, 3, n, m, seed).unwrap();
        prop_assert_eq!(r.violations, 0);
    }

    #[test]
    fn family_syntax_is_an_unordered_letter_set(bits in 1u8..32, rotate in 0usize..5, lower in any::<bool>()) {
        let f = GraphFamily::new(bits & 1 != 0, bits & 2 != 0, bits & 4 != 0, bits & 8 != 0, bits & 16 != 0);
        let mut letters: Vec<char> = f.letters().chars().collect();
        let len = letters.len();
        letters.rotate_left(rotate % len);
        letters.reverse();
        let mut text: String = letters.into_iter().collect();
        if lower {
            text = text.to_lowercase();
        }
        let parsed: GraphFamily = text.parse().unwrap();
        prop_assert_eq!(parsed, f);
        prop_assert_eq!(parsed.to_string(), f.letters());
    }

    #[test]
    fn ladder_json_roundtrips(family in nontrivial(), n in 1usize..20, seed in any::<u64>()) {
        let ladder = sample_ladder(family, n, seed).unwrap();
        let back = WeightedLadder::from_json(&ladder.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, ladder);
    }

    #[test]
    fn fifteen_digit_formatting_roundtrips(x in prop::num::f64::NORMAL) {
        let printed = fmt_sig15(x);
        let parsed: f64 = printed.parse().unwrap();
        prop_assert_eq!(parsed, round_sig15(x));
        prop_assert!(((parsed - x) / x).abs() <= 5e-15);
        let mantissa = printed.split('e').next().unwrap();
        let digits = mantissa
            .chars()
            .filter(char::is_ascii_digit)
            .skip_while(|&c| c == '0')
            .count();
        prop_assert!(digits <= 15, "{}", printed);
    }

    #[test]
    fn symmetric_grids_mirror_exactly(half in 1usize..2000, hi in 0.5..50.0f64) {
        let g = DensityGrid::symmetric(hi, 2 * half + 1, |_| 0.0).unwrap();
        let m = g.m();
        for i in 0..m {
            prop_assert_eq!(g.abscissa(i), -g.abscissa(m - 1 - i));
        }
        prop_assert_eq!(g.abscissa(half), 0.0);
    }
}
