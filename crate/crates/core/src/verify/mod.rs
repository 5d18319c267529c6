//! Randomized, hypothesis-gated checks of the monotonicity, perturbation,
//! convergence and impact properties of bundles.
//!
//! Every check first verifies the premises of the property on the concrete
//! inputs. Trials whose premises fail are counted as vacuous and never as
//! passes.

mod convergence;
mod impact;
mod inequality;
mod instances;
mod lemma;
mod profile;
mod suite;

pub use convergence::{check_convergence_pointwise, check_convergence_uniform, UniformConvergence};
pub use impact::{check_impact_axioms, ImpactReport, ImpactSetting};
pub use inequality::{check_inequality_13, check_inequality_14, PerturbationSchedule, SignPattern};
pub use instances::{
    ineq13_instance, ineq14_instance, reversal_instance, steep_power_window, theta_from_psi,
    InequalityInstance, ReversalInstance,
};
pub use lemma::{check_corollary1, check_corollary2, check_lemma1};
pub use profile::{check_theorem3_hypothesis, profile, profile_in, HypothesisProfile};
pub use suite::{run_property_suite, SuiteConfig, SuiteReport};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::funcspace::RankFrequencyFunction;
use crate::operators::{OperatorKind, OperatorSpec};
use crate::solver::{solve_bundle_point, solve_in_window, SolveConfig, Window};
use crate::thresholds::ThresholdFamily;

/// Absolute slack allowed in the perturbation inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-9;
/// Smallest gap accepted as a strict order between two solutions.
pub const STRICT_GAP: f64 = 1e-12;
/// Tolerated upward movement of a sequence that must not increase.
pub const JITTER: f64 = 1e-9;
/// Root tolerance used by the checks.
pub const VERIFY_TOL: f64 = 1e-12;

/// Solver settings used by the checks.
pub fn verify_config() -> SolveConfig<f64> {
    SolveConfig::with_tolerance(VERIFY_TOL)
}

/// Sub-seed for trial `index` of property `stream`, independent of the
/// order in which trials are run.
pub fn sub_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

/// `m_θ(f)`, optionally restricted to a window, or `None` when unsolvable.
pub(crate) fn solve(
    f: &RankFrequencyFunction<f64>,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    theta: f64,
    window: Option<Window<f64>>,
    cfg: &SolveConfig<f64>,
) -> Option<f64> {
    let op = OperatorSpec::for_function(kind, f);
    let point = match window {
        Some(w) => solve_in_window(f, &op, family, theta, w, cfg),
        None => solve_bundle_point(f, &op, family, theta, cfg),
    };
    point.ok().map(|p| p.m)
}

/// `T(f)(x)` without domain checks; `x` must lie in the support.
pub(crate) fn transformed_at(f: &RankFrequencyFunction<f64>, kind: OperatorKind, x: f64) -> f64 {
    match OperatorSpec::for_function(kind, f).apply(f) {
        Ok(tf) => tf.value(x),
        Err(_) => f64::NAN,
    }
}

pub(crate) fn describe(
    f: &RankFrequencyFunction<f64>,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
) -> String {
    format!("f#{} T={} A={}", f.digest(), kind.name(), family)
}
