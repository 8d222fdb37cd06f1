//! Generated-input invariants for the core library: serialization
//! round-trips, algebraic identities of the composition arithmetic,
//! distribution-function laws, regression residual geometry, and
//! simulator determinism.

use proptest::prelude::*;

use perceptsim_core::compose::{
    bessel_weighted_sd, code_item, compose_theme, reverse_code, weighted_mean, CodedItem,
};
use perceptsim_core::dist::{chi2_cdf, chi2_sf, f_cdf, normal_cdf, t_cdf};
use perceptsim_core::ols::{durbin_watson, fit_ols};
use perceptsim_core::rng::SplitMix64;
use perceptsim_core::sim::{run_simulation, SimulationConfig};
use perceptsim_core::stats::{describe, histogram};
use perceptsim_core::study::{
    parse_study_spec, serialize_study_spec, ItemStat, LikertScale, StudyMetadata, StudySpec,
    ThemeSpec,
};
use perceptsim_core::sus::{score_from_composite, score_from_items, sus_band, SusBand};
use perceptsim_core::ThemeComposite;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn arb_scale() -> impl Strategy<Value = LikertScale> {
    (-10.0..10.0f64, 0.5..20.0f64).prop_map(|(min, w)| LikertScale { min, max: min + w })
}

/// Raw material for one item: mean position within the scale (0..1),
/// a positive sd, a polarity flag, and optional wording.
type RawItem = (f64, f64, bool, Option<String>);

fn arb_raw_items(at_least: usize) -> impl Strategy<Value = Vec<RawItem>> {
    proptest::collection::vec(
        (
            0.0..=1.0f64,
            0.05..3.0f64,
            any::<bool>(),
            proptest::option::of("[a-z]{1,8}"),
        ),
        at_least..(at_least + 8),
    )
}

fn build_items(scale: LikertScale, raw: &[RawItem]) -> Vec<ItemStat> {
    raw.iter()
        .enumerate()
        .map(|(i, (frac, sd, reverse, text))| ItemStat {
            id: format!("i{i}"),
            text: text.clone(),
            mean: scale.min + frac * scale.width(),
            sd: *sd,
            reverse: *reverse,
        })
        .collect()
}

fn arb_spec() -> impl Strategy<Value = StudySpec> {
    (arb_scale(), arb_raw_items(4)).prop_flat_map(|(scale, raw)| {
        let n = raw.len();
        (2..=(n - 2), Just(raw)).prop_map(move |(split, raw)| {
            let items = build_items(scale, &raw);
            let themes = vec![
                ThemeSpec {
                    id: "t0".into(),
                    name: "first block".into(),
                    items: (0..split).map(|i| format!("i{i}")).collect(),
                },
                ThemeSpec {
                    id: "t1".into(),
                    name: "second block".into(),
                    items: (split..n).map(|i| format!("i{i}")).collect(),
                },
            ];
            StudySpec {
                scale,
                items,
                themes,
                metadata: StudyMetadata::default(),
            }
        })
    })
}

proptest! {
    #[test]
    fn study_files_round_trip_through_serialization(spec in arb_spec()) {
        let json = serialize_study_spec(&spec);
        let back = parse_study_spec(&json).unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn reverse_coding_is_an_involution(scale in arb_scale(), frac in 0.0..=1.0f64) {
        let x = scale.min + frac * scale.width();
        let twice = reverse_code(reverse_code(x, &scale), &scale);
        prop_assert!(close(twice, x, 1e-12), "{twice} vs {x}");
    }

    #[test]
    fn weighted_mean_stays_in_the_convex_hull(
        values in proptest::collection::vec(-100.0..100.0f64, 1..20),
        raw_weights in proptest::collection::vec(0.01..50.0f64, 20),
    ) {
        let weights = &raw_weights[..values.len()];
        let m = weighted_mean(&values, weights).unwrap();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(m >= lo - 1e-9 && m <= hi + 1e-9, "{m} outside [{lo}, {hi}]");
    }

    #[test]
    fn weighted_mean_is_affine_equivariant(
        values in proptest::collection::vec(-50.0..50.0f64, 2..15),
        raw_weights in proptest::collection::vec(0.01..20.0f64, 15),
        a in -3.0..3.0f64,
        b in -10.0..10.0f64,
    ) {
        let weights = &raw_weights[..values.len()];
        let mapped: Vec<f64> = values.iter().map(|v| a * v + b).collect();
        let lhs = weighted_mean(&mapped, weights).unwrap();
        let rhs = a * weighted_mean(&values, weights).unwrap() + b;
        prop_assert!(close(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn composites_ignore_item_order(scale in arb_scale(), raw in arb_raw_items(2)) {
        let items = build_items(scale, &raw);
        let coded: Vec<CodedItem> = items.iter().map(|i| code_item(i, &scale).unwrap()).collect();
        let forward = compose_theme("t", "theme", &coded).unwrap();
        let mut reversed = coded.clone();
        reversed.reverse();
        let backward = compose_theme("t", "theme", &reversed).unwrap();
        prop_assert!(close(forward.mean, backward.mean, 1e-10));
        prop_assert!(close(forward.sd, backward.sd, 1e-10));
        prop_assert!(close(forward.total_weight, backward.total_weight, 1e-10));
    }

    #[test]
    fn composites_match_a_term_by_term_oracle(scale in arb_scale(), raw in arb_raw_items(2)) {
        let items = build_items(scale, &raw);
        let coded: Vec<CodedItem> = items.iter().map(|i| code_item(i, &scale).unwrap()).collect();
        let composite = compose_theme("t", "theme", &coded).unwrap();

        let (mut xs, mut ws) = (Vec::new(), Vec::new());
        for item in &items {
            xs.push(if item.reverse { scale.min + scale.max - item.mean } else { item.mean });
            ws.push(1.0 / (item.sd * item.sd));
        }
        let total: f64 = ws.iter().sum();
        let mean = xs.iter().zip(&ws).map(|(x, w)| w * x).sum::<f64>() / total;
        let m = xs.len() as f64;
        let ss: f64 = xs.iter().zip(&ws).map(|(x, w)| w * (x - mean) * (x - mean)).sum();
        let sd = (ss / (((m - 1.0) / m) * total)).sqrt();

        prop_assert!(close(composite.mean, mean, 1e-12), "{} vs {mean}", composite.mean);
        prop_assert!(close(composite.sd, sd, 1e-12), "{} vs {sd}", composite.sd);
        prop_assert!(close(composite.total_weight, total, 1e-12));
    }

    #[test]
    fn weighted_mean_ignores_uniform_weight_scaling(
        values in proptest::collection::vec(-50.0..50.0f64, 1..15),
        raw_weights in proptest::collection::vec(0.01..20.0f64, 15),
        c in 0.001..1000.0f64,
    ) {
        let weights = &raw_weights[..values.len()];
        let scaled: Vec<f64> = weights.iter().map(|w| c * w).collect();
        let base = weighted_mean(&values, weights).unwrap();
        let rescaled = weighted_mean(&values, &scaled).unwrap();
        prop_assert!(close(base, rescaled, 1e-12), "{base} vs {rescaled}");
    }

    #[test]
    fn equal_weights_reduce_to_the_arithmetic_mean(
        values in proptest::collection::vec(-50.0..50.0f64, 1..15),
        w in 0.01..20.0f64,
    ) {
        let weights = vec![w; values.len()];
        let weighted = weighted_mean(&values, &weights).unwrap();
        let plain = values.iter().sum::<f64>() / values.len() as f64;
        prop_assert!(close(weighted, plain, 1e-12), "{weighted} vs {plain}");
    }

    #[test]
    fn weighted_sd_is_invariant_under_reflection(
        values in proptest::collection::vec(-20.0..20.0f64, 2..12),
        raw_weights in proptest::collection::vec(0.01..20.0f64, 12),
    ) {
        let weights = &raw_weights[..values.len()];
        let mean = weighted_mean(&values, weights).unwrap();
        let sd = bessel_weighted_sd(&values, weights, mean).unwrap();
        let reflected: Vec<f64> = values.iter().map(|v| 7.5 - v).collect();
        let rmean = weighted_mean(&reflected, weights).unwrap();
        let rsd = bessel_weighted_sd(&reflected, weights, rmean).unwrap();
        prop_assert!(close(sd, rsd, 1e-9), "{sd} vs {rsd}");
    }

    #[test]
    fn normal_cdf_is_monotone_and_symmetric(a in -38.0..38.0f64, b in -38.0..38.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let cl = normal_cdf(lo);
        let ch = normal_cdf(hi);
        prop_assert!(cl <= ch + 1e-15);
        prop_assert!(close(normal_cdf(a) + normal_cdf(-a), 1.0, 1e-12));
    }

    #[test]
    fn t_cdf_is_a_symmetric_distribution(t in -50.0..50.0f64, df in 1.0..500.0f64) {
        let c = t_cdf(t, df).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        let mirror = t_cdf(-t, df).unwrap();
        prop_assert!(close(c + mirror, 1.0, 1e-12), "{c} + {mirror}");
    }

    #[test]
    fn chi2_survival_with_two_dof_is_exponential(x in 0.0..200.0f64) {
        let sf = chi2_sf(x, 2.0).unwrap();
        prop_assert!(close(sf, (-x / 2.0).exp(), 1e-12));
    }

    #[test]
    fn squared_t_is_f_distributed(t in 0.01..20.0f64, df in 1.0..200.0f64) {
        let f = f_cdf(t * t, 1.0, df).unwrap();
        let via_t = 2.0 * t_cdf(t, df).unwrap() - 1.0;
        prop_assert!(close(f, via_t, 1e-10), "{f} vs {via_t}");
    }

    #[test]
    fn chi2_and_f_cdfs_are_bounded_and_monotone(
        a in 0.0..80.0f64,
        b in 0.0..80.0f64,
        df1 in 1.0..40.0f64,
        df2 in 1.0..40.0f64,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (cl, ch) = (chi2_cdf(lo, df1).unwrap(), chi2_cdf(hi, df1).unwrap());
        prop_assert!((0.0..=1.0).contains(&cl) && cl <= ch + 1e-15);
        let (fl, fh) = (f_cdf(lo, df1, df2).unwrap(), f_cdf(hi, df1, df2).unwrap());
        prop_assert!((0.0..=1.0).contains(&fl) && fl <= fh + 1e-15);
    }

    #[test]
    fn durbin_watson_is_bounded(e in proptest::collection::vec(-5.0..5.0f64, 2..50)) {
        prop_assume!(e.iter().any(|v| v.abs() > 1e-9));
        let dw = durbin_watson(&e).unwrap();
        prop_assert!((-1e-12..=4.0 + 1e-12).contains(&dw), "dw = {dw}");
    }

    #[test]
    fn histogram_conserves_counts_and_stays_contiguous(
        values in proptest::collection::vec(-1e6..1e6f64, 1..400),
        bins in 1usize..80,
    ) {
        let h = histogram(&values, bins).unwrap();
        prop_assert_eq!(h.len(), bins);
        prop_assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), values.len());
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(h[0].lower, lo);
        prop_assert_eq!(h[bins - 1].upper, hi);
        for pair in h.windows(2) {
            prop_assert!((pair[0].upper - pair[1].lower).abs() < 1e-9);
        }
    }

    #[test]
    fn quantiles_are_ordered(values in proptest::collection::vec(-100.0..100.0f64, 1..200)) {
        let s = describe(&values).unwrap();
        prop_assert!(s.min <= s.q25 && s.q25 <= s.median);
        prop_assert!(s.median <= s.q75 && s.q75 <= s.max);
        prop_assert!(s.sd >= 0.0);
    }

    #[test]
    fn describe_ignores_input_order(
        values in proptest::collection::vec(-100.0..100.0f64, 1..100),
        rotate in 0usize..100,
    ) {
        let mut permuted = values.clone();
        permuted.rotate_left(rotate % values.len());
        permuted.reverse();
        let a = describe(&values).unwrap();
        let b = describe(&permuted).unwrap();
        // order statistics are computed after sorting, so they match exactly
        prop_assert_eq!(a.min, b.min);
        prop_assert_eq!(a.max, b.max);
        prop_assert_eq!(a.median, b.median);
        prop_assert_eq!(a.q25, b.q25);
        prop_assert_eq!(a.q75, b.q75);
        // running sums depend on order only through rounding
        prop_assert!(close(a.mean, b.mean, 1e-12));
        prop_assert!(close(a.sd, b.sd, 1e-12));
    }

    #[test]
    fn describe_is_affine_equivariant(
        values in proptest::collection::vec(-100.0..100.0f64, 2..100),
        a in 0.01..3.0f64,
        b in -10.0..10.0f64,
    ) {
        let mapped: Vec<f64> = values.iter().map(|v| a * v + b).collect();
        let base = describe(&values).unwrap();
        let image = describe(&mapped).unwrap();
        let tol = 1e-9;
        prop_assert!(close(image.mean, a * base.mean + b, tol));
        prop_assert!(close(image.sd, a * base.sd, tol));
        prop_assert!(close(image.min, a * base.min + b, tol));
        prop_assert!(close(image.median, a * base.median + b, tol));
        prop_assert!(close(image.q25, a * base.q25 + b, tol));
        prop_assert!(close(image.q75, a * base.q75 + b, tol));
        prop_assert!(close(image.max, a * base.max + b, tol));
    }

    #[test]
    fn banding_is_total_and_monotone(a in 0.0..=100.0f64, b in 0.0..=100.0f64) {
        fn rank(band: SusBand) -> u8 {
            match band {
                SusBand::Poor => 0,
                SusBand::Marginal => 1,
                SusBand::Acceptable => 2,
                SusBand::Good => 3,
                SusBand::Excellent => 4,
            }
        }
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(rank(sus_band(lo).unwrap()) <= rank(sus_band(hi).unwrap()));
    }

    #[test]
    fn composite_usability_score_is_strictly_increasing(
        scale in arb_scale(),
        fa in 0.0..=1.0f64,
        fb in 0.0..=1.0f64,
    ) {
        prop_assume!((fa - fb).abs() > 1e-9);
        let (lo, hi) = if fa < fb { (fa, fb) } else { (fb, fa) };
        let a = score_from_composite(scale.min + lo * scale.width(), scale).unwrap();
        let b = score_from_composite(scale.min + hi * scale.width(), scale).unwrap();
        prop_assert!(a < b, "{a} !< {b}");
    }

    #[test]
    fn usability_score_ignores_item_order(
        scale in arb_scale(),
        raw in arb_raw_items(1),
        rotate in 0usize..16,
    ) {
        let items = build_items(scale, &raw);
        let mut permuted = items.clone();
        permuted.rotate_left(rotate % items.len());
        permuted.reverse();
        let a = score_from_items(&items, scale).unwrap();
        let b = score_from_items(&permuted, scale).unwrap();
        prop_assert!(close(a, b, 1e-12), "{a} vs {b}");
    }

    #[test]
    fn usability_score_survives_polarity_flips(scale in arb_scale(), raw in arb_raw_items(1)) {
        let items = build_items(scale, &raw);
        let flipped: Vec<ItemStat> = items
            .iter()
            .map(|i| ItemStat {
                id: i.id.clone(),
                text: i.text.clone(),
                mean: reverse_code(i.mean, &scale),
                sd: i.sd,
                reverse: !i.reverse,
            })
            .collect();
        let a = score_from_items(&items, scale).unwrap();
        let b = score_from_items(&flipped, scale).unwrap();
        prop_assert!(close(a, b, 1e-9), "{a} vs {b}");
    }

    #[test]
    fn simulation_is_deterministic_and_clipped(
        seed in any::<u64>(),
        n in 1usize..150,
        noise in 0.0..0.5f64,
        clip_lo in 3.0..4.0f64,
        width in 0.2..2.0f64,
    ) {
        let composites = vec![
            ThemeComposite {
                theme_id: "a".into(),
                name: "a".into(),
                mean: 4.1,
                sd: 0.27,
                total_weight: 10.0,
                n_items: 3,
            },
            ThemeComposite {
                theme_id: "b".into(),
                name: "b".into(),
                mean: 3.7,
                sd: 0.17,
                total_weight: 10.0,
                n_items: 3,
            },
        ];
        let config = SimulationConfig {
            n,
            noise_sd: noise,
            clip_min: clip_lo,
            clip_max: clip_lo + width,
            seed,
            overrides: vec![],
        };
        let one = run_simulation(&composites, &config).unwrap();
        let two = run_simulation(&composites, &config).unwrap();
        prop_assert_eq!(&one.success, &two.success);
        prop_assert!(one
            .success
            .iter()
            .all(|&s| (clip_lo..=clip_lo + width).contains(&s)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regression_residuals_are_orthogonal_to_the_design(
        seed in any::<u64>(),
        n in 10usize..40,
        k in 1usize..4,
    ) {
        let mut rng = SplitMix64::new(seed);
        let regressors: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.next_normal()).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| 2.0 + rng.next_normal()).collect();
        let fit = fit_ols(&y, &regressors, true).unwrap();

        let mut resid = y.clone();
        for i in 0..n {
            resid[i] -= fit.coefficients[0];
            for (j, col) in regressors.iter().enumerate() {
                resid[i] -= fit.coefficients[j + 1] * col[i];
            }
        }
        let ynorm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        // intercept column: residuals sum to ~0
        let rsum: f64 = resid.iter().sum();
        prop_assert!(rsum.abs() < 1e-7 * (1.0 + ynorm) * (n as f64).sqrt());
        for col in &regressors {
            let dot: f64 = col.iter().zip(&resid).map(|(a, b)| a * b).sum();
            let cnorm: f64 = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(
                dot.abs() < 1e-7 * (1.0 + cnorm * ynorm),
                "residual correlation {dot}"
            );
        }
        prop_assert!(fit.r_squared <= 1.0 + 1e-12);
        prop_assert!(fit.adj_r_squared <= fit.r_squared + 1e-12);
        prop_assert!((-1e-12..=4.0 + 1e-12).contains(&fit.durbin_watson));
    }

    #[test]
    fn shifting_the_response_moves_only_the_intercept(
        seed in any::<u64>(),
        n in 10usize..40,
        c in -50.0..50.0f64,
    ) {
        let mut rng = SplitMix64::new(seed);
        let regressors: Vec<Vec<f64>> =
            (0..2).map(|_| (0..n).map(|_| rng.next_normal()).collect()).collect();
        let y: Vec<f64> = (0..n)
            .map(|_| 1.0 + 0.5 * rng.next_normal())
            .zip(&regressors[0])
            .map(|(e, x)| e + 2.0 * x)
            .collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        let base = fit_ols(&y, &regressors, true).unwrap();
        let moved = fit_ols(&shifted, &regressors, true).unwrap();

        prop_assert!(close(moved.coefficients[0], base.coefficients[0] + c, 1e-9));
        for (a, b) in moved.coefficients[1..].iter().zip(&base.coefficients[1..]) {
            prop_assert!(close(*a, *b, 1e-9), "{a} vs {b}");
        }
        prop_assert!(close(moved.r_squared, base.r_squared, 1e-9));
        prop_assert!(close(moved.f_statistic, base.f_statistic, 1e-9));
        prop_assert!(close(moved.durbin_watson, base.durbin_watson, 1e-9));
        prop_assert!(close(moved.jarque_bera, base.jarque_bera, 1e-6));
    }

    #[test]
    fn scaling_a_regressor_rescales_only_its_coefficient(
        seed in any::<u64>(),
        n in 10usize..40,
        c in prop_oneof![0.01..100.0f64, -100.0..-0.01f64],
    ) {
        let mut rng = SplitMix64::new(seed);
        let regressors: Vec<Vec<f64>> =
            (0..2).map(|_| (0..n).map(|_| rng.next_normal()).collect()).collect();
        let y: Vec<f64> = (0..n)
            .map(|_| 1.0 + 0.5 * rng.next_normal())
            .zip(&regressors[0])
            .zip(&regressors[1])
            .map(|((e, x1), x2)| e + 2.0 * x1 - 0.7 * x2)
            .collect();
        let mut scaled_cols = regressors.clone();
        for v in &mut scaled_cols[0] {
            *v *= c;
        }
        let base = fit_ols(&y, &regressors, true).unwrap();
        let scaled = fit_ols(&y, &scaled_cols, true).unwrap();

        prop_assert!(close(scaled.coefficients[1], base.coefficients[1] / c, 1e-10));
        prop_assert!(close(scaled.coefficients[0], base.coefficients[0], 1e-10));
        prop_assert!(close(scaled.coefficients[2], base.coefficients[2], 1e-10));
        prop_assert!(close(scaled.r_squared, base.r_squared, 1e-10));
        prop_assert!(close(scaled.durbin_watson, base.durbin_watson, 1e-10));
        prop_assert!(close(scaled.jarque_bera, base.jarque_bera, 1e-10));
    }
}
