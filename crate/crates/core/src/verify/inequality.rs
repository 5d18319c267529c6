use serde::{Deserialize, Serialize};

use crate::funcspace::{PerturbMode, RankFrequencyFunction};
use crate::operators::{Monotonicity, OperatorKind, OperatorSpec};
use crate::report::{Counterexample, VerificationReport};
use crate::solver::{SolveConfig, Window};
use crate::thresholds::ThresholdFamily;

use super::{describe, profile_in, solve, transformed_at, INEQUALITY_SLACK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPattern {
    /// `ε_n = amplitude / n`
    Harmonic,
    /// `ε_n = amplitude · (−1)ⁿ / n`
    Alternating,
}

/// The sequence `f_n`, `n = 1..=n_max`, obtained by perturbing `f` by `ε_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSchedule {
    pub mode: PerturbMode,
    pub pattern: SignPattern,
    pub amplitude: f64,
    pub n_max: usize,
}

impl PerturbationSchedule {
    pub fn harmonic(mode: PerturbMode, amplitude: f64, n_max: usize) -> Self {
        Self {
            mode,
            pattern: SignPattern::Harmonic,
            amplitude,
            n_max,
        }
    }

    /// `f_n = f·(1 + (−1)ⁿ/n)`; `f_1` is the null function.
    pub fn alternating(n_max: usize) -> Self {
        Self {
            mode: PerturbMode::Multiplicative,
            pattern: SignPattern::Alternating,
            amplitude: 1.0,
            n_max,
        }
    }

    /// `f_n = f` for every `n`.
    pub fn constant(n_max: usize) -> Self {
        Self::harmonic(PerturbMode::Multiplicative, 0.0, n_max)
    }

    pub fn epsilon(&self, n: usize) -> f64 {
        let sign = match self.pattern {
            SignPattern::Harmonic => 1.0,
            SignPattern::Alternating if n % 2 == 1 => -1.0,
            SignPattern::Alternating => 1.0,
        };
        self.amplitude * sign / n as f64
    }

    /// `f_n`, or `None` when the perturbation leaves the function space.
    pub fn member(
        &self,
        f: &RankFrequencyFunction<f64>,
        n: usize,
    ) -> Option<RankFrequencyFunction<f64>> {
        let eps = self.epsilon(n);
        match self.mode {
            PerturbMode::Multiplicative => f.scale(1.0 + eps).ok(),
            PerturbMode::Additive => f.perturb(PerturbMode::Additive, eps).ok(),
        }
    }
}

fn t_monotonicity(f: &RankFrequencyFunction<f64>, kind: OperatorKind) -> Monotonicity {
    OperatorSpec::for_function(kind, f)
        .apply(f)
        .map(|tf| tf.classify_monotonicity())
        .unwrap_or(Monotonicity::NonMonotone)
}

/// Shared driver: `hypothesis(f_n)` gates each `n`, then `assert(lhs, rhs)`
/// with `lhs = |A(m_n) − A(m)|` and `rhs = |T(f_n)(m) − T(f)(m)|`.
#[allow(clippy::too_many_arguments)]
fn run(
    name: &str,
    f: &RankFrequencyFunction<f64>,
    schedule: &PerturbationSchedule,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta: f64,
    window: Option<Window<f64>>,
    cfg: &SolveConfig<f64>,
    hypothesis: impl Fn(&RankFrequencyFunction<f64>) -> bool,
    holds: impl Fn(f64, f64) -> bool,
) -> VerificationReport {
    let mut report = VerificationReport::new(name);
    let m = solve(f, kind, family, theta, window, cfg);
    let a_m = m.map(|m| family.value(m, theta));
    let t_m = m.map(|m| transformed_at(f, kind, m));
    for n in 1..=schedule.n_max {
        let (Some(m), Some(a_m), Some(t_m)) = (m, a_m, t_m) else {
            report.record_vacuous();
            continue;
        };
        let Some(fn_) = schedule.member(f, n).filter(|g| hypothesis(g)) else {
            report.record_vacuous();
            continue;
        };
        let Some(mn) = solve(&fn_, kind, family, theta, window, cfg) else {
            report.record_vacuous();
            continue;
        };
        let lhs = (family.value(mn, theta) - a_m).abs();
        let rhs = (transformed_at(&fn_, kind, m) - t_m).abs();
        report.check(holds(lhs, rhs), || {
            Counterexample::new(describe(f, kind, family), lhs, rhs)
                .with_theta(theta)
                .with_slack(INEQUALITY_SLACK)
                .with_note(format!(
                    "n = {n}, eps = {}, m = {m}, m_n = {mn}",
                    schedule.epsilon(n)
                ))
        });
    }
    report
}

/// `|A(m_θ(f_n), θ) − A(m_θ(f), θ)| ≤ |T(f_n)(m_θ(f)) − T(f)(m_θ(f))|`
/// whenever `T(f_n)` and `A(·, θ)` have opposite monotonicity.
pub fn check_inequality_13(
    f: &RankFrequencyFunction<f64>,
    schedule: &PerturbationSchedule,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta: f64,
    window: Option<Window<f64>>,
    cfg: &SolveConfig<f64>,
) -> VerificationReport {
    let a_mono = family.monotonicity_in_x();
    let hypothesis = |g: &RankFrequencyFunction<f64>| {
        matches!(
            (t_monotonicity(g, kind), a_mono),
            (Monotonicity::Decreasing, Monotonicity::Increasing)
                | (Monotonicity::Increasing, Monotonicity::Decreasing)
        )
    };
    run(
        "inequality_13",
        f,
        schedule,
        kind,
        family,
        theta,
        window,
        cfg,
        hypothesis,
        |lhs, rhs| lhs <= rhs + INEQUALITY_SLACK,
    )
}

/// `|T(f_n)(m_θ(f)) − T(f)(m_θ(f))| ≤ |A(m_θ(f_n), θ) − A(m_θ(f), θ)|`
/// whenever `T(f_n)` and `T(f_n) − A(·, θ)` have opposite monotonicity.
pub fn check_inequality_14(
    f: &RankFrequencyFunction<f64>,
    schedule: &PerturbationSchedule,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta: f64,
    window: Option<Window<f64>>,
    cfg: &SolveConfig<f64>,
) -> VerificationReport {
    let hypothesis = |g: &RankFrequencyFunction<f64>| {
        let d = profile_in(g, kind, family, theta, window).d_monotonicity;
        matches!(
            (t_monotonicity(g, kind), d),
            (Monotonicity::Increasing, Monotonicity::Decreasing)
                | (Monotonicity::Decreasing, Monotonicity::Increasing)
        )
    };
    run(
        "inequality_14",
        f,
        schedule,
        kind,
        family,
        theta,
        window,
        cfg,
        hypothesis,
        |lhs, rhs| rhs <= lhs + INEQUALITY_SLACK,
    )
}
