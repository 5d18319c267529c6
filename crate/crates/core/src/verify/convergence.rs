use serde::{Deserialize, Serialize};

use crate::funcspace::RankFrequencyFunction;
use crate::operators::OperatorKind;
use crate::report::{Counterexample, VerificationReport};
use crate::solver::SolveConfig;
use crate::thresholds::ThresholdFamily;

use super::{describe, solve, transformed_at, PerturbationSchedule, JITTER};

/// Pointwise convergence of `m_θ(f_n)` and of `T(f_n)` at `m_θ(f)`.
///
/// For each `θ` the gap at `n_max` must lie below `10·abs_tol_x + C/n_max`,
/// where `C = n₀·gap(n₀)` for the first solvable member `n₀` (the `n = 1`
/// gap when that member solves). The reconstructed values
/// `T(f_n)(m_θ(f))` are held to the same rate.
pub fn check_convergence_pointwise(
    f: &RankFrequencyFunction<f64>,
    schedule: &PerturbationSchedule,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta_grid: &[f64],
    cfg: &SolveConfig<f64>,
) -> VerificationReport {
    let mut report = VerificationReport::new("convergence_pointwise");
    let n_max = schedule.n_max;
    let tol = 10.0 * cfg.abs_tol_x;
    for &theta in theta_grid {
        let Some(m) = solve(f, kind, family, theta, None, cfg) else {
            report.record_vacuous();
            report.record_vacuous();
            continue;
        };
        let t_m = transformed_at(f, kind, m);
        let gap = |n: usize| -> Option<(f64, f64)> {
            let fn_ = schedule.member(f, n)?;
            let mn = solve(&fn_, kind, family, theta, None, cfg)?;
            Some(((mn - m).abs(), (transformed_at(&fn_, kind, m) - t_m).abs()))
        };
        let first = (1..=n_max).find_map(|n| gap(n).map(|g| (n, g)));
        let (Some((n0, (g0, r0))), Some((g_last, r_last))) = (first, gap(n_max)) else {
            report.record_vacuous();
            report.record_vacuous();
            continue;
        };
        let scale = n0 as f64 / n_max as f64;
        let bound = tol + g0 * scale;
        report.check(g_last <= bound, || {
            Counterexample::new(describe(f, kind, family), g_last, bound)
                .with_theta(theta)
                .with_slack(tol)
                .with_note(format!(
                    "solution gap at n = {n_max}, first gap {g0} at n = {n0}"
                ))
        });
        let bound = tol + r0 * scale + 1e-12 * (1.0 + t_m.abs());
        report.check(r_last <= bound, || {
            Counterexample::new(describe(f, kind, family), r_last, bound)
                .with_theta(theta)
                .with_slack(tol)
                .with_note(format!(
                    "T(f_n)(m) gap at n = {n_max}, first gap {r0} at n = {n0}"
                ))
        });
    }
    report
}

/// Result of the uniform check together with the observed sup sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformConvergence {
    pub report: VerificationReport,
    /// `θ` values that solved for `f` and every `f_n`.
    pub thetas: Vec<f64>,
    /// `sups[n − 1] = max_θ |m_θ(f_n) − m_θ(f)|`.
    pub sups: Vec<f64>,
}

/// Uniform convergence on `[theta_min, theta_max]`, sampled at `grid_size`
/// evenly spaced points.
///
/// Asserts that the sup-gap never rises by more than the jitter allowance
/// from one `n` to the next and ends below `final_tol`.
#[allow(clippy::too_many_arguments)]
pub fn check_convergence_uniform(
    f: &RankFrequencyFunction<f64>,
    schedule: &PerturbationSchedule,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta_min: f64,
    theta_max: f64,
    grid_size: usize,
    final_tol: f64,
    cfg: &SolveConfig<f64>,
) -> UniformConvergence {
    let mut report = VerificationReport::new("convergence_uniform");
    let n_max = schedule.n_max;
    let thetas: Vec<f64> = match grid_size {
        0 => Vec::new(),
        1 => vec![theta_min],
        k => (0..k)
            .map(|j| theta_min + (theta_max - theta_min) * j as f64 / (k - 1) as f64)
            .collect(),
    };
    if !(theta_min > 0.0) || n_max == 0 {
        report.record_vacuous();
        return UniformConvergence {
            report,
            thetas: Vec::new(),
            sups: Vec::new(),
        };
    }
    let members: Vec<Option<RankFrequencyFunction<f64>>> =
        (1..=n_max).map(|n| schedule.member(f, n)).collect();
    let mut kept = Vec::new();
    let mut sups = vec![0.0_f64; n_max];
    for &theta in &thetas {
        let Some(m) = solve(f, kind, family, theta, None, cfg) else {
            continue;
        };
        let gaps: Option<Vec<f64>> = members
            .iter()
            .map(|g| {
                let g = g.as_ref()?;
                solve(g, kind, family, theta, None, cfg).map(|mn| (mn - m).abs())
            })
            .collect();
        if let Some(gaps) = gaps {
            kept.push(theta);
            for (s, g) in sups.iter_mut().zip(gaps) {
                *s = s.max(g);
            }
        }
    }
    if kept.len() < thetas.len() {
        report.note(format!(
            "{} of {} grid values dropped: unsolvable for f or some f_n",
            thetas.len() - kept.len(),
            thetas.len()
        ));
    }
    if kept.is_empty() {
        report.record_vacuous();
        return UniformConvergence {
            report,
            thetas: kept,
            sups: Vec::new(),
        };
    }
    let inputs = || {
        format!(
            "{} on [{theta_min}, {theta_max}]",
            describe(f, kind, family)
        )
    };
    for n in 1..n_max {
        let (prev, next) = (sups[n - 1], sups[n]);
        report.check(next <= prev + JITTER, || {
            Counterexample::new(inputs(), next, prev)
                .with_slack(JITTER)
                .with_note(format!("sup gap rose from n = {n} to n = {}", n + 1))
        });
    }
    let last = sups[n_max - 1];
    report.check(last <= final_tol, || {
        Counterexample::new(inputs(), last, final_tol).with_note(format!("sup gap at n = {n_max}"))
    });
    UniformConvergence {
        report,
        thetas: kept,
        sups,
    }
}
