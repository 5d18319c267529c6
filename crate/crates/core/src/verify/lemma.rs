use crate::funcspace::RankFrequencyFunction;
use crate::operators::{grid, Monotonicity, OperatorKind, OperatorSpec, GRID_POINTS};
use crate::report::{Counterexample, VerificationReport};
use crate::solver::{solve_window, Difference, SolveConfig};
use crate::thresholds::ThresholdFamily;

use super::{describe, profile, solve, STRICT_GAP};

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Sign of `D(x)` against the position of `x` relative to `m_θ(k)`.
///
/// Samples at the root itself, outside the solve interval, or for a
/// non-monotone `D` are vacuous.
pub fn check_lemma1(
    k: &RankFrequencyFunction<f64>,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta: f64,
    x_samples: &[f64],
    cfg: &SolveConfig<f64>,
) -> VerificationReport {
    let mut report = VerificationReport::new("lemma1");
    let prof = profile(k, kind, family, theta);
    let m = solve(k, kind, family, theta, None, cfg);
    let tf = OperatorSpec::for_function(kind, k).apply(k);
    let (tf, m, dir) = match (tf, m, prof.d_monotonicity) {
        (Ok(tf), Some(m), Monotonicity::Decreasing) => (tf, m, 1),
        (Ok(tf), Some(m), Monotonicity::Increasing) => (tf, m, -1),
        _ => {
            x_samples.iter().for_each(|_| report.record_vacuous());
            return report;
        }
    };
    let Ok((lo, hi)) = solve_window(&tf, family, None) else {
        x_samples.iter().for_each(|_| report.record_vacuous());
        return report;
    };
    let d = Difference {
        tf: &tf,
        family,
        theta,
    };
    let near = 10.0 * cfg.abs_tol_x;
    for &x in x_samples {
        if x < lo || x > hi || (x - m).abs() <= near {
            report.record_vacuous();
            continue;
        }
        let dx = d.at(x);
        // decreasing D: D(x) > 0 ⟺ m > x; increasing D: D(x) > 0 ⟺ m < x
        let expected = dir * sign(m - x);
        let cx = || {
            Counterexample::new(describe(k, kind, family), dx, m - x)
                .with_theta(theta)
                .with_note(format!("x = {x}, m = {m}"))
        };
        if dx != 0.0 {
            report.check(sign(dx) == expected, || {
                cx().with_note(format!("forward, x = {x}, m = {m}"))
            });
        }
        report.check(sign(dx) == expected, || {
            cx().with_note(format!("converse, x = {x}, m = {m}"))
        });
    }
    report
}

/// `T(k) − T(f)` on a grid joined with both breakpoint sets.
fn transformed_gaps(
    k: &RankFrequencyFunction<f64>,
    f: &RankFrequencyFunction<f64>,
    kind: OperatorKind,
) -> Option<Vec<f64>> {
    if k.domain() != f.domain() {
        return None;
    }
    let tk = OperatorSpec::for_function(kind, k).apply(k).ok()?;
    let tf = OperatorSpec::for_function(kind, f).apply(f).ok()?;
    let (a, s) = f.domain();
    let mut xs = k.union_breakpoints(f);
    xs.extend(grid(a, s, GRID_POINTS));
    Some(xs.into_iter().map(|x| tk.value(x) - tf.value(x)).collect())
}

/// Order of solutions from the order of transformed functions.
///
/// The premise `T(k) ≥ T(f)` (or `≤`, strict when it holds strictly on every
/// sampled point) is established first. Order is preserved for decreasing
/// `D_k` and reversed for increasing `D_k`.
pub fn check_corollary1(
    k: &RankFrequencyFunction<f64>,
    f: &RankFrequencyFunction<f64>,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta: f64,
    cfg: &SolveConfig<f64>,
) -> VerificationReport {
    let mut report = VerificationReport::new("corollary1");
    let Some(gaps) = transformed_gaps(k, f, kind) else {
        report.record_vacuous();
        return report;
    };
    let premises: Vec<(i8, bool)> = [
        (
            1,
            gaps.iter().all(|&g| g >= 0.0),
            gaps.iter().all(|&g| g > 0.0),
        ),
        (
            -1,
            gaps.iter().all(|&g| g <= 0.0),
            gaps.iter().all(|&g| g < 0.0),
        ),
    ]
    .into_iter()
    .filter(|&(_, weak, _)| weak)
    .map(|(dir, _, strict)| (dir, strict))
    .collect();
    let flip = match profile(k, kind, family, theta).d_monotonicity {
        Monotonicity::Decreasing => 1,
        Monotonicity::Increasing => -1,
        Monotonicity::NonMonotone => 0,
    };
    let mk = solve(k, kind, family, theta, None, cfg);
    let mf = solve(f, kind, family, theta, None, cfg);
    let (Some(mk), Some(mf)) = (mk, mf) else {
        report.record_vacuous();
        return report;
    };
    if premises.is_empty() || flip == 0 {
        report.record_vacuous();
        return report;
    }
    let slack = 2.0 * cfg.abs_tol_x;
    for (dir, strict) in premises {
        let gap = f64::from(dir * flip) * (mk - mf);
        let ok = if strict {
            gap > STRICT_GAP
        } else {
            gap >= -slack
        };
        report.check(ok, || {
            Counterexample::new(
                format!("k#{} vs {}", k.digest(), describe(f, kind, family)),
                mk,
                mf,
            )
            .with_theta(theta)
            .with_slack(if strict { STRICT_GAP } else { slack })
            .with_note(format!(
                "premise {} {}, D_k {}",
                if dir > 0 {
                    "T(k) >= T(f)"
                } else {
                    "T(k) <= T(f)"
                },
                if strict { "strict" } else { "weak" },
                if flip > 0 { "decreasing" } else { "increasing" },
            ))
        });
    }
    report
}

/// Strict movement of `m_θ(f)` in `θ`.
///
/// With `θ < θ′`, `m` moves left when `D` and `A(x, ·)` have opposite
/// monotonicity and right when they share it.
pub fn check_corollary2(
    f: &RankFrequencyFunction<f64>,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta: f64,
    theta_prime: f64,
    cfg: &SolveConfig<f64>,
) -> VerificationReport {
    let mut report = VerificationReport::new("corollary2");
    if !(theta > 0.0 && theta < theta_prime) {
        report.record_vacuous();
        return report;
    }
    let d1 = profile(f, kind, family, theta).d_monotonicity;
    let d2 = profile(f, kind, family, theta_prime).d_monotonicity;
    let m1 = solve(f, kind, family, theta, None, cfg);
    let m2 = solve(f, kind, family, theta_prime, None, cfg);
    let (Some(m1), Some(m2)) = (m1, m2) else {
        report.record_vacuous();
        return report;
    };
    if d1 != d2 || d1 == Monotonicity::NonMonotone {
        report.record_vacuous();
        return report;
    }
    let opposite = (d1 == Monotonicity::Decreasing)
        == (family.monotonicity_in_theta() == Monotonicity::Increasing);
    let moved = if opposite { m1 - m2 } else { m2 - m1 };
    report.check(moved > STRICT_GAP, || {
        Counterexample::new(describe(f, kind, family), m1, m2)
            .with_theta(theta)
            .with_slack(STRICT_GAP)
            .with_note(format!(
                "theta' = {theta_prime}, expected m_theta' {} m_theta",
                if opposite { "<" } else { ">" }
            ))
    });
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::PerturbMode;
    use crate::report::Verdict;
    use crate::verify::verify_config;

    fn line() -> RankFrequencyFunction<f64> {
        RankFrequencyFunction::line(0.0, 10.0, 10.0, 0.0).unwrap()
    }

    #[test]
    fn lemma1_classical_setting() {
        let f = line();
        let xs: Vec<f64> = (0..=20).map(|j| j as f64 * 0.5).collect();
        let r = check_lemma1(
            &f,
            OperatorKind::Identity,
            &ThresholdFamily::hirsch(),
            1.0,
            &xs,
            &verify_config(),
        );
        assert_eq!(r.verdict, Verdict::Pass);
        // x = 5 is the root itself
        assert_eq!(r.vacuous, 1);
    }

    #[test]
    fn lemma1_increasing_branch() {
        // D = (10 − 2·10·θ) + (θ − 0.1)x on [0, 10], increasing for θ > 0.1
        let f = RankFrequencyFunction::line(0.0, 10.0, 10.0, 9.0).unwrap();
        let fam = ThresholdFamily::decreasing_linear(20.0).unwrap();
        let theta = 0.7;
        let m = solve(
            &f,
            OperatorKind::Identity,
            &fam,
            theta,
            None,
            &verify_config(),
        )
        .unwrap();
        assert!((m - 4.0 / 0.6).abs() < 1e-10);
        let xs = [0.5, 2.0, 6.0, 7.0, 9.5];
        let r = check_lemma1(
            &f,
            OperatorKind::Identity,
            &fam,
            theta,
            &xs,
            &verify_config(),
        );
        assert_eq!(r.verdict, Verdict::Pass);
        // D(9.5) > 0 together with m < 9.5
        let d = 10.0 - 0.1 * 9.5 - theta * (20.0 - 9.5);
        assert!(d > 0.0 && m < 9.5);
    }

    #[test]
    fn corollary1_examples() {
        let f = line();
        let cfg = verify_config();
        let k = f.perturb(PerturbMode::Multiplicative, 0.3).unwrap();
        let kind = OperatorKind::Averaging;
        let g = ThresholdFamily::power(1.0, 0.0).unwrap();
        let r = check_corollary1(&k, &f, kind, &g, 1.0, &cfg);
        assert_eq!(r.verdict, Verdict::Pass);

        let r = check_corollary1(
            &f,
            &f,
            OperatorKind::Identity,
            &ThresholdFamily::hirsch(),
            1.0,
            &cfg,
        );
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.satisfied, 2);

        // k > f yet the increasing D reverses the order
        let f = RankFrequencyFunction::line(0.0, 10.0, 10.0, 9.0).unwrap();
        let k = f.perturb(PerturbMode::Multiplicative, 0.05).unwrap();
        let fam = ThresholdFamily::decreasing_linear(20.0).unwrap();
        let mk = solve(&k, OperatorKind::Identity, &fam, 0.7, None, &cfg).unwrap();
        let mf = solve(&f, OperatorKind::Identity, &fam, 0.7, None, &cfg).unwrap();
        assert!(mk < mf);
        let r = check_corollary1(&k, &f, OperatorKind::Identity, &fam, 0.7, &cfg);
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn corollary2_examples() {
        let f = line();
        let cfg = verify_config();
        let h = ThresholdFamily::hirsch();
        assert_eq!(
            check_corollary2(&f, OperatorKind::Identity, &h, 1.0, 2.0, &cfg).verdict,
            Verdict::Pass
        );
        let m1 = solve(&f, OperatorKind::Averaging, &h, 1.0, None, &cfg).unwrap();
        let m2 = solve(&f, OperatorKind::Averaging, &h, 2.0, None, &cfg).unwrap();
        assert!((m1 - 20.0 / 3.0).abs() < 1e-10 && (m2 - 4.0).abs() < 1e-10);
        assert_eq!(
            check_corollary2(&f, OperatorKind::Averaging, &h, 1.0, 2.0, &cfg).verdict,
            Verdict::Pass
        );

        let f = RankFrequencyFunction::line(0.0, 10.0, 10.0, 9.0).unwrap();
        let fam = ThresholdFamily::decreasing_linear(20.0).unwrap();
        let a = solve(&f, OperatorKind::Identity, &fam, 0.6, None, &cfg).unwrap();
        let b = solve(&f, OperatorKind::Identity, &fam, 0.8, None, &cfg).unwrap();
        assert!(a < b);
        assert_eq!(
            check_corollary2(&f, OperatorKind::Identity, &fam, 0.6, 0.8, &cfg).verdict,
            Verdict::Pass
        );
        // reversed arguments are outside the premise
        assert_eq!(
            check_corollary2(&f, OperatorKind::Identity, &fam, 0.8, 0.6, &cfg).verdict,
            Verdict::Vacuous
        );
    }
}
