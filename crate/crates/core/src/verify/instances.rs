//! Seeded generators for hypothesis-satisfying instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::funcspace::{PerturbMode, RandomFunctionParams, RankFrequencyFunction};
use crate::operators::{grid, OperatorKind, OperatorSpec, GRID_POINTS};
use crate::solver::Window;
use crate::thresholds::{psi, ThresholdFamily};

use super::{PerturbationSchedule, SignPattern};

/// `θ = ψ_f(x)`, the level at which `x` solves the equation.
pub fn theta_from_psi(
    f: &RankFrequencyFunction<f64>,
    kind: OperatorKind,
    family: &ThresholdFamily<f64>,
    x: f64,
) -> Option<f64> {
    psi(f, &OperatorSpec::for_function(kind, f), family, x)
        .ok()
        .filter(|t| t.is_finite() && *t > 0.0)
}

/// `f(x) = c − εx` on `[0, S]` against `A = θ(2S − x)`.
///
/// For `θ` strictly between `c/(2S)` and `(c − εS)/S`,
/// `D(x) = (c − 2Sθ) + (θ − ε)x` is strictly increasing and changes sign.
#[derive(Debug, Clone, PartialEq)]
pub struct ReversalInstance {
    pub f: RankFrequencyFunction<f64>,
    pub family: ThresholdFamily<f64>,
    pub c: f64,
    pub slope: f64,
    pub end: f64,
}

impl ReversalInstance {
    pub fn new(c: f64, slope: f64, end: f64) -> crate::error::Result<Self> {
        if !(slope >= 0.0 && slope * end < c / 2.0) {
            return Err(crate::error::Error::InvalidParameter(format!(
                "need 0 <= slope·S < c/2, got slope {slope}, S {end}, c {c}"
            )));
        }
        Ok(Self {
            f: RankFrequencyFunction::line(0.0, c, end, c - slope * end)?,
            family: ThresholdFamily::decreasing_linear(2.0 * end)?,
            c,
            slope,
            end,
        })
    }

    /// Open interval of `θ` for which `D` is increasing with a root.
    pub fn theta_range(&self) -> (f64, f64) {
        (
            self.c / (2.0 * self.end),
            (self.c - self.slope * self.end) / self.end,
        )
    }

    /// `θ` at relative position `u ∈ (0, 1)` inside [`Self::theta_range`].
    pub fn theta_at(&self, u: f64) -> f64 {
        let (lo, hi) = self.theta_range();
        lo + (hi - lo) * u
    }

    /// Closed form root `(2Sθ − c)/(θ − ε)`.
    pub fn root(&self, theta: f64) -> f64 {
        (2.0 * self.end * theta - self.c) / (theta - self.slope)
    }
}

pub fn reversal_instance(seed: u64) -> ReversalInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = rng.gen_range(5.0..50.0);
    let end = rng.gen_range(5.0..50.0);
    let slope = rng.gen_range(0.05..0.95) * c / (2.0 * end);
    ReversalInstance::new(c, slope, end).expect("slope chosen inside the admissible band")
}

/// One `(f, T, A, θ, window, schedule)` draw for the perturbation inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityInstance {
    pub f: RankFrequencyFunction<f64>,
    pub kind: OperatorKind,
    pub family: ThresholdFamily<f64>,
    pub theta: f64,
    pub window: Option<Window<f64>>,
    pub schedule: PerturbationSchedule,
}

fn random_schedule(rng: &mut ChaCha8Rng, y_scale: f64, n_max: usize) -> PerturbationSchedule {
    let pattern = if rng.gen_bool(0.5) {
        SignPattern::Harmonic
    } else {
        SignPattern::Alternating
    };
    let (mode, amplitude) = if rng.gen_bool(0.5) {
        (PerturbMode::Multiplicative, rng.gen_range(-0.9..1.0))
    } else {
        (PerturbMode::Additive, rng.gen_range(0.01..0.5) * y_scale)
    };
    PerturbationSchedule {
        mode,
        pattern,
        amplitude,
        n_max,
    }
}

/// Instance for the first perturbation inequality.
///
/// Branch 0: decreasing `T(f)` (identity or averaging) against the power
/// family. Branch 1: the integral operator against a decreasing linear
/// threshold.
pub fn ineq13_instance(seed: u64, branch: u8, n_max: usize) -> InequalityInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = RankFrequencyFunction::random_function(rng.gen(), &RandomFunctionParams::default());
    let (_, s) = f.domain();
    let y0 = f.ys()[0];
    let schedule = random_schedule(&mut rng, y0, n_max);
    if branch == 0 {
        let kind = if rng.gen_bool(0.5) {
            OperatorKind::Identity
        } else {
            OperatorKind::Averaging
        };
        let p = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
        let family = ThresholdFamily::power(p, 0.0).expect("positive exponent");
        let x = rng.gen_range(0.1..0.9) * s;
        let theta = theta_from_psi(&f, kind, &family, x).unwrap_or(1.0);
        InequalityInstance {
            f,
            kind,
            family,
            theta,
            window: None,
            schedule,
        }
    } else {
        let ceiling = s * rng.gen_range(1.5..3.0);
        let family = ThresholdFamily::decreasing_linear(ceiling).expect("positive ceiling");
        let area = f.integral(0.0, s).expect("support end");
        let theta = rng.gen_range(0.1..0.9) * area / (ceiling - s);
        InequalityInstance {
            f,
            kind: OperatorKind::Integral,
            family,
            theta,
            window: None,
            schedule,
        }
    }
}

/// Sub-domain `[x₀, S]` on which `∂A/∂x ≥ f_max`, found by scanning.
///
/// `f_max` dominates every member of the sequence; `D` is then decreasing
/// there for each member under the integral operator.
pub fn steep_power_window(
    f_max: &RankFrequencyFunction<f64>,
    family: &ThresholdFamily<f64>,
    theta: f64,
) -> Option<Window<f64>> {
    let (a, s) = f_max.domain();
    let (lo, hi) = family.x_window(a, s).ok()?;
    let x0 =
        grid(lo, hi, GRID_POINTS).find(|&x| f_max.value(x) <= family.derivative_x(x, theta))?;
    (x0 < hi).then(|| Window::new(x0, hi))
}

/// Instance for the second perturbation inequality.
///
/// Branch 0: the integral operator against a steep power threshold on a
/// scanned sub-domain. Branch 1: the reversal family.
pub fn ineq14_instance(seed: u64, branch: u8, n_max: usize) -> InequalityInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if branch == 0 {
        let f = RankFrequencyFunction::random_function(rng.gen(), &RandomFunctionParams::default());
        let (_, s) = f.domain();
        let p: f64 = [2.0, 3.0][rng.gen_range(0..2)];
        let family = ThresholdFamily::power(p, 0.0).expect("positive exponent");
        let x_star: f64 = rng.gen_range(0.2..0.6) * s;
        let theta = f.integral(0.0, x_star).expect("inside support") / x_star.powf(p);
        let amplitude = rng.gen_range(0.1..1.0);
        let schedule =
            PerturbationSchedule::harmonic(PerturbMode::Multiplicative, amplitude, n_max);
        let f_max = f.scale(1.0 + amplitude).expect("positive factor");
        let window = steep_power_window(&f_max, &family, theta);
        InequalityInstance {
            f,
            kind: OperatorKind::Integral,
            family,
            theta,
            window,
            schedule,
        }
    } else {
        let inst = reversal_instance(rng.gen());
        let theta = inst.theta_at(rng.gen_range(0.02..0.98));
        let amplitude = rng.gen_range(-0.3..0.3);
        InequalityInstance {
            f: inst.f,
            kind: OperatorKind::Identity,
            family: inst.family,
            theta,
            window: None,
            schedule: PerturbationSchedule::harmonic(PerturbMode::Multiplicative, amplitude, n_max),
        }
    }
}
