use iifs_dim::cf::{cf_report, cf_sample_points, search_power_l, CfReportOptions};
use iifs_dim::curves::{continuity_at_zero_check, default_eps_grid};
use iifs_dim::generic::{
    density_fraction, generic_box_dim_experiment, realize_system, sample_attractor,
    seed_experiment, ExperimentConfig, RandomSystemSpec,
};
use iifs_dim::{hausdorff_bracket, DigitSet, RatioFamily, Similarity, SystemSpec};

fn power_upper(l: u64) -> f64 {
    hausdorff_bracket(
        &SystemSpec::cf_real(DigitSet::Power { p: 2.0, l }),
        1,
        10_000,
        1e-10,
    )
    .unwrap()
    .upper
}

#[test]
fn power_family_bracket_falls_with_l() {
    let u: Vec<f64> = [2, 4, 8, 16].iter().map(|&l| power_upper(l)).collect();
    assert!(u.windows(2).all(|w| w[1] < w[0]), "{u:?}");
    assert!(u.iter().all(|v| *v > 0.25));
}

#[test]
fn full_truncated_bracket_grows_with_n() {
    let mut prev = 0.0;
    for n in [2u64, 5, 10, 20, 100] {
        let b = hausdorff_bracket(
            &SystemSpec::cf_real(DigitSet::FullTruncated { n }),
            3,
            1,
            1e-10,
        )
        .unwrap();
        assert!(b.lower > 0.0 && b.upper <= 1.0);
        // level-3 distortion slack lifts the upper end to 1 for large N
        if n <= 20 {
            assert!(b.upper < 1.0, "N = {n}: {b:?}");
        }
        assert!(b.lower > prev, "N = {n}: {b:?}");
        prev = b.lower;
    }
}

#[test]
fn l_search_reaches_target() {
    let s = search_power_l(2.0, 1, 10_000, 0.01).unwrap();
    assert!(s.bracket.upper < 1.0 / 3.0 - 0.01);
    assert!(s.l.is_power_of_two() && s.l >= 4);
    let d = DigitSet::Power { p: 2.0, l: s.l };
    let mut o = CfReportOptions::for_digits(&d);
    o.h_override = None;
    let r = cf_report(&d, &o).unwrap();
    let t = r.phase_transition.expect("h below the box dimension");
    assert!(t.lower > 0.0 && t.upper < 1.0);
    assert!(continuity_at_zero_check(&r.curve, &r.h_bracket, &default_eps_grid(), 1e-3).passed);
}

#[test]
fn samples_stay_in_first_cylinder() {
    let digits = DigitSet::Power { p: 2.0, l: 2 };
    let sys = SystemSpec::cf_real(digits.clone());
    let letters = sys.truncated_alphabet(200).unwrap();
    for s in cf_sample_points(&digits, 500, 6, 200, 11).unwrap() {
        let b = letters[s.word[0]].raw_real_digits()[0] as f64;
        let x = s.point[0];
        assert!(x > 1.0 / (b + 1.0) && x <= 1.0 / b, "digit {b}, point {x}");
    }
}

#[test]
fn digit_one_samples_use_rewritten_letters() {
    let digits = DigitSet::Explicit { digits: vec![1, 2] };
    let sys = SystemSpec::cf_real(digits.clone());
    let letters = sys.truncated_alphabet(1).unwrap();
    for s in cf_sample_points(&digits, 200, 8, 1, 3).unwrap() {
        let raw = letters[s.word[0]].raw_real_digits();
        let x = s.point[0];
        if raw[0] == 1 {
            assert!((0.5..=1.0).contains(&x));
        } else {
            assert!(x > 1.0 / 3.0 && x <= 0.5);
        }
    }
}

#[test]
fn one_dimensional_ensemble() {
    let rs = RandomSystemSpec {
        ambient_dim: 1,
        ..Default::default()
    };
    let r = generic_box_dim_experiment(&rs, &ExperimentConfig::for_dim(1)).unwrap();
    let pass = r.per_seed.iter().filter(|s| s.bracket.upper >= 0.9).count();
    assert!(pass >= 9, "{pass}/10");
}

#[test]
fn zero_translations_collapse_to_a_point() {
    let maps = (0..50)
        .map(|i| Similarity::new(2f64.powi(-(i + 2)), vec![0.0, 0.0]).unwrap())
        .collect();
    let sys = SystemSpec::Similarity {
        maps,
        ambient_dim: 2,
        domain_side: 2.0,
    };
    let r = seed_experiment(&sys, 1.0, &ExperimentConfig::for_dim(2), 1).unwrap();
    assert!(r.bracket.upper < 0.05, "{:?}", r.bracket);
    assert!(r.density.fraction_hit < 0.01);
}

#[test]
fn sampled_points_stay_in_domain_and_density_grows() {
    let rs = RandomSystemSpec {
        truncation: 200,
        window: 0.5,
        seed: 4,
        ..Default::default()
    };
    let sys = realize_system(&rs).unwrap();
    let pts = sample_attractor(&sys, 40_000, 40, 9).unwrap();
    assert!(pts.iter().flatten().all(|x| (0.0..=1.5).contains(x)));
    let z = [0.0, 0.0];
    let mut prev = 0.0;
    for n in [1_000, 10_000, 40_000] {
        let f = density_fraction(&pts[..n], &z, 1.0 / 32.0, 0.5)
            .unwrap()
            .fraction_hit;
        assert!(f >= prev);
        prev = f;
    }
}

#[test]
fn ensemble_density_grows_with_samples() {
    let rs = RandomSystemSpec {
        truncation: 200,
        ..Default::default()
    };
    let mut cfg = ExperimentConfig::for_dim(2);
    cfg.seeds = (0..4).collect();
    cfg.num_samples = 10_000;
    cfg.scales = vec![0.5, 0.25, 0.125];
    let small = generic_box_dim_experiment(&rs, &cfg).unwrap();
    cfg.num_samples = 100_000;
    let big = generic_box_dim_experiment(&rs, &cfg).unwrap();
    assert!(big.density_pass_fraction >= small.density_pass_fraction);
    for (a, b) in small.per_seed.iter().zip(&big.per_seed) {
        assert!(b.density.fraction_hit >= a.density.fraction_hit);
    }
}

#[test]
fn geometric_ratios_realise_within_window() {
    let rs = RandomSystemSpec {
        ratios: RatioFamily::Geometric {
            first: 0.125,
            factor: 0.5,
        },
        ambient_dim: 1,
        window: 0.5,
        truncation: 10,
        seed: 1,
    };
    let sys = realize_system(&rs).unwrap();
    assert_eq!(
        serde_json::to_string(&sys).unwrap(),
        serde_json::to_string(&realize_system(&rs).unwrap()).unwrap()
    );
}
