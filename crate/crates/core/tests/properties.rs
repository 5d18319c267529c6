//! Property-based invariants of the numeric core.

use approx::assert_relative_eq;
use hirsch_bundles::cli::{fmt_num, ThetaGrid};
use hirsch_bundles::solver::{h_index, kosmulski_index, solve_bundle_point};
use hirsch_bundles::thresholds::{admissible_range, psi};
use hirsch_bundles::verify::{check_lemma1, verify_config};
use hirsch_bundles::{
    Error, OperatorKind, OperatorSpec, RankFrequency, RankFrequency32, SolveConfig,
    ThresholdFamily, Verdict,
};
use proptest::prelude::*;

/// Decreasing piecewise-linear function on `[0, S]` with positive values.
fn decreasing_fn() -> impl Strategy<Value = RankFrequency> {
    (2usize..8, 1.0f64..40.0)
        .prop_flat_map(|(n, end)| {
            (
                Just(end),
                prop::collection::vec(0.0f64..1.0, n - 2),
                prop::collection::vec(0.01f64..50.0, n),
            )
        })
        .prop_filter_map("distinct abscissae", |(end, mut inner, mut ys)| {
            inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut xs = vec![0.0];
            xs.extend(inner.iter().map(|u| u * end));
            xs.push(end);
            ys.sort_by(|a, b| b.partial_cmp(a).unwrap());
            RankFrequency::new(xs.into_iter().zip(ys).collect()).ok()
        })
}

fn op(kind: OperatorKind, f: &RankFrequency) -> OperatorSpec<f64> {
    OperatorSpec::for_function(kind, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn solution_satisfies_the_equation(f in decreasing_fn(), q in 0.05f64..0.95, p in prop::sample::select(vec![0.5, 1.0, 2.0])) {
        for kind in [OperatorKind::Identity, OperatorKind::Averaging] {
            let fam = ThresholdFamily::power(p, 0.0).unwrap();
            let x = q * f.support_end();
            let theta = psi(&f, &op(kind, &f), &fam, x).unwrap();
            let m = solve_bundle_point(&f, &op(kind, &f), &fam, theta, &SolveConfig::default()).unwrap().m;
            prop_assert!((m - x).abs() <= 1e-8 * (1.0 + x), "{kind:?}: m {m} vs {x}");
        }
    }

    #[test]
    fn h_index_decreases_in_theta(f in decreasing_fn(), t in 0.01f64..10.0, r in 1.001f64..4.0) {
        let cfg = SolveConfig::default();
        if let (Ok(a), Ok(b)) = (h_index(&f, t, &cfg), h_index(&f, t * r, &cfg)) {
            prop_assert!(b < a);
        }
    }

    #[test]
    fn dominating_function_has_larger_index(f in decreasing_fn(), bump in decreasing_fn(), t in 0.05f64..5.0) {
        let (a, s) = f.domain();
        let lifted = RankFrequency::new(bump.breakpoints().map(|(x, y)| (a + x / bump.support_end() * (s - a), y)).collect()).unwrap();
        let g = f.add(&lifted).unwrap();
        prop_assert!(f.leq(&g).unwrap());
        let cfg = SolveConfig::default();
        for kind in [OperatorKind::Identity, OperatorKind::Averaging] {
            let fam = ThresholdFamily::hirsch();
            let mf = solve_bundle_point(&f, &op(kind, &f), &fam, t, &cfg);
            let mg = solve_bundle_point(&g, &op(kind, &g), &fam, t, &cfg);
            if let (Ok(mf), Ok(mg)) = (mf, mg) {
                prop_assert!(mf.m <= mg.m + 1e-9);
            }
        }
    }

    #[test]
    fn average_lies_between_value_and_start(f in decreasing_fn(), q in 0.0f64..=1.0) {
        let mu = op(OperatorKind::Averaging, &f).apply(&f).unwrap();
        let x = q * f.support_end();
        let m = mu.eval(x).unwrap();
        let eps = 1e-12 * (1.0 + f.ys()[0]);
        prop_assert!(m <= f.ys()[0] + eps);
        prop_assert!(m + eps >= f.eval(x).unwrap());
    }

    #[test]
    fn admissible_range_decides_solvability(f in decreasing_fn(), u in 0.0f64..1.0) {
        let fam = ThresholdFamily::hirsch();
        for kind in [OperatorKind::Identity, OperatorKind::Averaging] {
            let r = admissible_range(&f, &op(kind, &f), &fam).unwrap();
            prop_assert!(r.certified);
            let lo = r.theta_min.unwrap();
            let cfg = SolveConfig::default();
            let inside = lo * (1.0 + 1e-6 + u);
            prop_assert!(solve_bundle_point(&f, &op(kind, &f), &fam, inside, &cfg).is_ok());
            let below = lo * (1.0 - 1e-6 - 0.5 * u);
            let is_no_root = matches!(solve_bundle_point(&f, &op(kind, &f), &fam, below, &cfg), Err(Error::NoRoot { .. }));
            prop_assert!(is_no_root);
        }
    }

    #[test]
    fn single_precision_tracks_double(f in decreasing_fn(), t in 0.1f64..5.0) {
        let f32_fn = RankFrequency32::new(f.breakpoints().map(|(x, y)| (x as f32, y as f32)).collect()).unwrap();
        let cfg64 = SolveConfig::default();
        let cfg32 = SolveConfig::<f32>::with_tolerance(1e-5);
        if let (Ok(a), Ok(b)) = (kosmulski_index(&f, t, 2.0, &cfg64), kosmulski_index(&f32_fn, t as f32, 2.0, &cfg32)) {
            prop_assert!((a - b as f64).abs() <= 1e-3 * (1.0 + a), "{a} vs {b}");
        }
    }

    #[test]
    fn lemma1_holds_on_random_settings(f in decreasing_fn(), q in 0.05f64..0.95, xs in prop::collection::vec(0.0f64..1.0, 8)) {
        let fam = ThresholdFamily::hirsch();
        let theta = psi(&f, &op(OperatorKind::Averaging, &f), &fam, q * f.support_end()).unwrap();
        let samples: Vec<f64> = xs.iter().map(|u| u * f.support_end()).collect();
        let r = check_lemma1(&f, OperatorKind::Averaging, &fam, theta, &samples, &verify_config());
        prop_assert_ne!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn twelve_digit_rendering_round_trips(x in -1e9f64..1e9) {
        let back: f64 = fmt_num(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-12 * x.abs().max(1e-300));
    }

    #[test]
    fn theta_grids_are_sorted(min in 0.01f64..10.0, span in 0.0f64..100.0, count in 1usize..50, log in any::<bool>()) {
        let spec = format!("{min}:{}:{count}{}", min + span, if log { ":log" } else { "" });
        let v = ThetaGrid::parse(&spec).unwrap().values();
        prop_assert_eq!(v.len(), count);
        prop_assert_eq!(v[0], min);
        prop_assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn transformed_order_matches_integral_identity() {
    let f = RankFrequency::new(vec![(0.0, 9.0), (2.0, 5.0), (7.0, 1.0)]).unwrap();
    let mu = op(OperatorKind::Averaging, &f).apply(&f).unwrap();
    let int = op(OperatorKind::Integral, &f).apply(&f).unwrap();
    for x in [0.5, 2.0, 3.3, 7.0] {
        assert_relative_eq!(
            int.eval(x).unwrap(),
            x * mu.eval(x).unwrap(),
            max_relative = 1e-14
        );
    }
}
