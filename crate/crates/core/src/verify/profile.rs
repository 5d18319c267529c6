use serde::{Deserialize, Serialize};

use crate::funcspace::RankFrequencyFunction;
use crate::operators::{
    grid, grid_monotonicity, sign_monotonicity, Certification, Monotonicity, OperatorKind,
    OperatorSpec, TransformedFunction, GRID_POINTS, GRID_TOLERANCE,
};
use crate::solver::{solve_window, Difference, Window};
use crate::thresholds::ThresholdFamily;

/// Monotonicity of `T(f)`, of `A(·, θ)` and of `D = T(f) − A(·, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisProfile {
    pub t_monotonicity: Monotonicity,
    pub a_monotonicity_in_x: Monotonicity,
    pub d_monotonicity: Monotonicity,
    pub d_certification: Certification,
}

impl HypothesisProfile {
    pub fn d_decreasing(&self) -> bool {
        self.d_monotonicity == Monotonicity::Decreasing
    }

    pub fn d_increasing(&self) -> bool {
        self.d_monotonicity == Monotonicity::Increasing
    }
}

/// Profile over the whole interval on which the equation is posed.
pub fn profile(
    f: &RankFrequencyFunction<f64>,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta: f64,
) -> HypothesisProfile {
    profile_in(f, kind, family, theta, None)
}

/// Profile with `D` examined only on `window`.
pub fn profile_in(
    f: &RankFrequencyFunction<f64>,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta: f64,
    window: Option<Window<f64>>,
) -> HypothesisProfile {
    let a_mono = family.monotonicity_in_x();
    let tf = match OperatorSpec::for_function(kind, f).apply(f) {
        Ok(tf) => tf,
        Err(_) => {
            return HypothesisProfile {
                t_monotonicity: Monotonicity::NonMonotone,
                a_monotonicity_in_x: a_mono,
                d_monotonicity: Monotonicity::NonMonotone,
                d_certification: Certification::GridSample,
            }
        }
    };
    let t_mono = tf.classify_monotonicity();
    let (d_mono, cert) = match solve_window(&tf, family, window) {
        Ok((lo, hi)) if theta > 0.0 => d_monotonicity(&tf, family, theta, lo, hi),
        _ => (Monotonicity::NonMonotone, Certification::GridSample),
    };
    HypothesisProfile {
        t_monotonicity: t_mono,
        a_monotonicity_in_x: a_mono,
        d_monotonicity: d_mono,
        d_certification: cert,
    }
}

fn d_monotonicity(
    tf: &TransformedFunction<f64>,
    family: &ThresholdFamily<f64>,
    theta: f64,
    lo: f64,
    hi: f64,
) -> (Monotonicity, Certification) {
    use Monotonicity::*;
    let t_mono = tf.classify_monotonicity();
    let exact = Certification::SegmentDerivative;
    match (t_mono, family.monotonicity_in_x()) {
        (Decreasing, Increasing) => return (Decreasing, exact),
        (Increasing, Decreasing) => return (Increasing, exact),
        _ => {}
    }
    let f = tf.source();
    match (tf.kind(), *family) {
        (OperatorKind::Identity, ThresholdFamily::DecreasingLinear { .. }) => {
            let derivs: Vec<f64> = f
                .segments()
                .filter(|s| s.x1 > lo && s.x0 < hi)
                .map(|s| s.slope + theta)
                .collect();
            return (sign_monotonicity(&derivs), exact);
        }
        (OperatorKind::Integral, ThresholdFamily::Power { p, .. }) if p >= 1.0 => {
            // D' = f − ∂A/∂x is non-increasing, so its signs at the ends decide
            if f.value(lo) - family.derivative_x(lo, theta) <= 0.0 {
                return (Decreasing, exact);
            }
            if f.value(hi) - family.derivative_x(hi, theta) >= 0.0 {
                return (Increasing, exact);
            }
            return (NonMonotone, exact);
        }
        _ => {}
    }
    let d = Difference { tf, family, theta };
    let values: Vec<f64> = grid(lo, hi, GRID_POINTS).map(|x| d.at(x)).collect();
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = GRID_TOLERANCE * (1.0 + scale);
    (grid_monotonicity(&values, tol), Certification::GridSample)
}

/// Whether `D` is decreasing for every sampled `θ`.
pub fn check_theorem3_hypothesis(
    f: &RankFrequencyFunction<f64>,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta_grid: &[f64],
) -> bool {
    theta_grid
        .iter()
        .all(|&theta| profile(f, kind, family, theta).d_decreasing())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> RankFrequencyFunction<f64> {
        RankFrequencyFunction::line(0.0, 10.0, 10.0, 0.0).unwrap()
    }

    #[test]
    fn classical_setting_is_decreasing_for_every_theta() {
        let f = line();
        for theta in [0.01, 1.0, 100.0] {
            let p = profile(
                &f,
                OperatorKind::Identity,
                &ThresholdFamily::hirsch(),
                theta,
            );
            assert_eq!(p.t_monotonicity, Monotonicity::Decreasing);
            assert_eq!(p.a_monotonicity_in_x, Monotonicity::Increasing);
            assert!(p.d_decreasing());
            assert_eq!(p.d_certification, Certification::SegmentDerivative);
        }
    }

    #[test]
    fn averaging_with_linear_threshold_is_decreasing() {
        let f = RankFrequencyFunction::new(vec![(0.0, 9.0), (2.0, 4.0), (7.0, 1.0)]).unwrap();
        let p = profile(
            &f,
            OperatorKind::Averaging,
            &ThresholdFamily::power(1.0, 0.0).unwrap(),
            1.5,
        );
        assert!(p.d_decreasing());
    }

    #[test]
    fn slow_decay_against_faster_linear_threshold_is_increasing() {
        // f falls with slope −0.1, A with slope −θ = −0.8
        let f = RankFrequencyFunction::line(0.0, 10.0, 10.0, 9.0).unwrap();
        let fam = ThresholdFamily::decreasing_linear(20.0).unwrap();
        let p = profile(&f, OperatorKind::Identity, &fam, 0.8);
        assert!(p.d_increasing());
        // and slower than f once θ is small
        let p = profile(&f, OperatorKind::Identity, &fam, 0.05);
        assert!(p.d_decreasing());
    }

    #[test]
    fn integral_against_square_depends_on_window() {
        let f = RankFrequencyFunction::constant(0.0, 10.0, 4.0).unwrap();
        let fam = ThresholdFamily::power(2.0, 0.0).unwrap();
        // D' = 4 − 2θx changes sign at x = 2/θ
        let whole = profile(&f, OperatorKind::Integral, &fam, 0.5);
        assert_eq!(whole.d_monotonicity, Monotonicity::NonMonotone);
        let tail = profile_in(
            &f,
            OperatorKind::Integral,
            &fam,
            0.5,
            Some(Window::new(4.0, 10.0)),
        );
        assert!(tail.d_decreasing());
        let head = profile_in(
            &f,
            OperatorKind::Integral,
            &fam,
            0.5,
            Some(Window::new(0.0, 4.0)),
        );
        assert!(head.d_increasing());
    }

    #[test]
    fn grid_fallback_agrees_with_a_dense_oracle() {
        let f = RankFrequencyFunction::new(vec![(0.0, 6.0), (3.0, 5.5), (8.0, 0.5)]).unwrap();
        let fam = ThresholdFamily::decreasing_linear(16.0).unwrap();
        for theta in [0.05, 0.3, 0.5, 2.0] {
            let p = profile(&f, OperatorKind::Averaging, &fam, theta);
            assert_eq!(p.d_certification, Certification::GridSample);
            let d = |x: f64| {
                let mu = if x == 0.0 {
                    6.0
                } else {
                    f.integral(0.0, x).unwrap() / x
                };
                mu - theta * (16.0 - x)
            };
            let n = 20_000;
            let diffs: Vec<f64> = (0..n)
                .map(|j| d(8.0 * (j + 1) as f64 / n as f64) - d(8.0 * j as f64 / n as f64))
                .collect();
            let oracle = if diffs.iter().all(|&v| v <= 1e-12) {
                Monotonicity::Decreasing
            } else if diffs.iter().all(|&v| v >= -1e-12) {
                Monotonicity::Increasing
            } else {
                Monotonicity::NonMonotone
            };
            assert_eq!(p.d_monotonicity, oracle, "theta {theta}");
        }
    }

    #[test]
    fn theorem3_hypothesis_on_stock_and_reversal() {
        let f = line();
        let grid = [0.2, 0.5, 1.0, 3.0];
        assert!(check_theorem3_hypothesis(
            &f,
            OperatorKind::Identity,
            &ThresholdFamily::hirsch(),
            &grid
        ));
        let g = ThresholdFamily::power(1.0, 0.0).unwrap();
        assert!(check_theorem3_hypothesis(
            &f,
            OperatorKind::Averaging,
            &g,
            &grid
        ));
        let slow = RankFrequencyFunction::line(0.0, 10.0, 10.0, 8.0).unwrap();
        let rev = ThresholdFamily::decreasing_linear(20.0).unwrap();
        assert!(!check_theorem3_hypothesis(
            &slow,
            OperatorKind::Identity,
            &rev,
            &[0.55, 0.6]
        ));
    }
}
