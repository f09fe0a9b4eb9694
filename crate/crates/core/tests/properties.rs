use iifs_dim::cover::{box_count_points, fit_dim_theta, log_spaced};
use iifs_dim::curves::{combine_max, lattice_dim_theta, seq_curve, seq_dim_theta, theta_grid};
use iifs_dim::emit::{curve_csv, read_curve_csv};
use iifs_dim::generic::fixed_point_lemma_check;
use iifs_dim::{
    evaluate_point, hausdorff_bracket, pressure_estimate, similarity_h, word_norm_bounds, DigitSet,
    DimBracket, RatioFamily, Similarity, SystemSpec, Word,
};
use proptest::prelude::*;

fn digit_set() -> impl Strategy<Value = DigitSet> {
    prop::collection::btree_set(1u64..12, 1..4).prop_map(|s| DigitSet::Explicit {
        digits: s.into_iter().collect(),
    })
}

fn letters_of(digits: &DigitSet) -> usize {
    SystemSpec::cf_real(digits.clone())
        .alphabet(usize::MAX)
        .unwrap()
        .len()
}

fn word_in(n: usize, len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..n, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_bounds_are_submultiplicative(
        (digits, u, v) in digit_set().prop_flat_map(|d| {
            let n = letters_of(&d);
            (Just(d), word_in(n, 1..5), word_in(n, 1..5))
        })
    ) {
        let sys = SystemSpec::cf_real(digits);
        let bu = word_norm_bounds(&sys, &Word::new(u.clone()).unwrap()).unwrap();
        let bv = word_norm_bounds(&sys, &Word::new(v.clone()).unwrap()).unwrap();
        let uv = Word::new(u).unwrap().concat(&Word::new(v).unwrap());
        let b = word_norm_bounds(&sys, &uv).unwrap();
        prop_assert!(b.lower <= b.upper);
        prop_assert!(b.upper <= bu.upper * bv.upper * (1.0 + 1e-12));
        prop_assert!(b.lower >= bu.lower * bv.lower * (1.0 - 1e-12));
    }

    #[test]
    fn cylinder_diameter_within_derivative_bounds(
        (digits, w) in digit_set().prop_flat_map(|d| {
            let n = letters_of(&d);
            (Just(d), word_in(n, 1..6))
        })
    ) {
        let sys = SystemSpec::cf_real(digits);
        let word = Word::new(w).unwrap();
        let b = word_norm_bounds(&sys, &word).unwrap();
        let a = evaluate_point(&sys, &word, &[0.0]).unwrap()[0];
        let c = evaluate_point(&sys, &word, &[1.0]).unwrap()[0];
        let diam = (a - c).abs();
        prop_assert!(diam <= b.upper * (1.0 + 1e-9));
        prop_assert!(diam >= b.lower * (1.0 - 1e-9));
    }

    #[test]
    fn brackets_are_ordered(digits in digit_set(), level in 1usize..4) {
        let b = hausdorff_bracket(&SystemSpec::cf_real(digits), level, 1, 1e-8).unwrap();
        prop_assert!(b.lower <= b.upper);
        prop_assert!(b.lower >= 0.0 && b.upper <= 1.0);
    }

    #[test]
    fn similarity_pressure_is_additive(
        ratios in prop::collection::vec(0.05f64..0.45, 2..5),
        t in 0.2f64..1.5,
        level in 2usize..4,
    ) {
        let sys = SystemSpec::similarity(&ratios).unwrap();
        let one = pressure_estimate(&sys, t, 1, 1000).unwrap();
        let n = pressure_estimate(&sys, t, level, 1000).unwrap();
        let exact = ratios.iter().map(|r| r.powf(t)).sum::<f64>().ln();
        prop_assert!((one.upper_value - exact).abs() < 1e-9);
        prop_assert!(n.upper_value <= one.upper_value + 1e-9);
        prop_assert!((n.upper_value - one.upper_value).abs() < 1e-9);
    }

    #[test]
    fn adding_a_map_never_lowers_similarity_dim(
        ratios in prop::collection::vec(0.01f64..0.3, 2..6),
        extra in 0.01f64..0.3,
    ) {
        let a = similarity_h(&RatioFamily::Finite { ratios: ratios.clone() }, 1).unwrap();
        let mut more = ratios;
        more.push(extra);
        let b = similarity_h(&RatioFamily::Finite { ratios: more }, 1).unwrap();
        prop_assert!(b.value >= a.value - 1e-12);
    }

    #[test]
    fn box_counts_monotone_and_subadditive(
        a in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..60),
        b in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..60),
        k in 1u32..6,
        m in 2u32..4,
    ) {
        let delta = 0.5f64.powi(k as i32);
        let fine = delta / m as f64;
        let na = box_count_points(&a, delta).unwrap();
        prop_assert!(na <= box_count_points(&a, fine).unwrap());
        let nb = box_count_points(&b, delta).unwrap();
        let mut ab = a.clone();
        ab.extend(b.iter().cloned());
        let nab = box_count_points(&ab, delta).unwrap();
        prop_assert!(nab <= na + nb);
        prop_assert!(nab >= na.max(nb));
    }

    #[test]
    fn lemma_sides_agree(
        r in 0.01f64..0.99,
        g in prop::collection::vec(-1.0f64..1.0, 2),
        u in prop::collection::vec(-1.0f64..1.0, 2),
        q in prop::collection::vec(-2.0f64..2.0, 2),
        delta in 0.01f64..2.0,
    ) {
        let c = fixed_point_lemma_check(&Similarity::new(r, g).unwrap(), &u, &q, delta).unwrap();
        prop_assert_eq!(c.left, c.right);
    }

    #[test]
    fn family_curves_increase_and_are_concave(p in 0.2f64..5.0, d in 1usize..4) {
        let g = theta_grid(257, &[]);
        let v: Vec<f64> = g.iter().map(|&t| lattice_dim_theta(p, d, t).unwrap()).collect();
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(v.windows(3).all(|w| w[0] + w[2] - 2.0 * w[1] <= 1e-12));
        let s: Vec<f64> = g.iter().map(|&t| seq_dim_theta(p, t).unwrap()).collect();
        prop_assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn combined_curve_is_monotone(p in 0.5f64..4.0, h in 0.0f64..1.0) {
        let c = combine_max(&DimBracket::point(h), &seq_curve(p, &theta_grid(129, &[])).unwrap());
        let u = c.uppers();
        prop_assert!(u.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(c.values.iter().all(|b| b.lower <= b.upper));
    }

    #[test]
    fn curve_csv_round_trips(
        vals in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..40)
    ) {
        let n = vals.len();
        let theta: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let values = vals.iter().map(|(a, b)| DimBracket::new(a.min(*b), a.max(*b))).collect();
        let c = iifs_dim::curves::DimCurve::new(theta, values, "test").unwrap();
        let back = read_curve_csv(&curve_csv(&c).unwrap()).unwrap();
        prop_assert_eq!(back.theta, c.theta);
        prop_assert_eq!(back.values, c.values);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fit_is_monotone_in_theta(p in 1.0f64..3.0, d in 1usize..3, a in 0.1f64..1.0, b in 0.1f64..1.0) {
        let deltas = log_spaced(1e-3, 1e-120, 1);
        let (lo, hi) = (a.min(b), a.max(b));
        let f_lo = fit_dim_theta(p, d, lo, &deltas).unwrap();
        let f_hi = fit_dim_theta(p, d, hi, &deltas).unwrap();
        prop_assert!(f_lo <= f_hi + 0.01, "fit({lo}) = {f_lo} > fit({hi}) = {f_hi}");
    }
}
