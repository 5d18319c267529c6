//! Threshold families `A(x, θ)` and the admissible-θ map
//! `ψ_f(x) = A(x, ·)⁻¹(T(f)(x))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::RankFrequencyFunction;
use crate::operators::{grid, Monotonicity, OperatorSpec, TransformedFunction, GRID_POINTS};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ThresholdFamily<T> {
    /// `θ·(x − shift)^p` on `x ≥ shift`.
    Power { p: T, shift: T },
    /// `θ·(ceiling − x)` on `0 ≤ x < ceiling`.
    DecreasingLinear { ceiling: T },
}

impl<T: Scalar> fmt::Display for ThresholdFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdFamily::Power { p, shift } => write!(f, "power(p={p}, shift={shift})"),
            ThresholdFamily::DecreasingLinear { ceiling } => {
                write!(f, "decreasing_linear(ceiling={ceiling})")
            }
        }
    }
}

impl<T: Scalar> ThresholdFamily<T> {
    pub fn power(p: T, shift: T) -> Result<Self> {
        if !(p > T::zero()) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "exponent p must be > 0, got {p}"
            )));
        }
        if !(shift >= T::zero()) || !shift.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "shift must be >= 0, got {shift}"
            )));
        }
        Ok(ThresholdFamily::Power { p, shift })
    }

    pub fn decreasing_linear(ceiling: T) -> Result<Self> {
        if !(ceiling > T::zero()) || !ceiling.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ceiling must be > 0, got {ceiling}"
            )));
        }
        Ok(ThresholdFamily::DecreasingLinear { ceiling })
    }

    /// `θx`: the Hirsch threshold.
    pub fn hirsch() -> Self {
        ThresholdFamily::Power {
            p: T::one(),
            shift: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ThresholdFamily::Power { p, shift } => Self::power(p, shift).map(|_| ()),
            ThresholdFamily::DecreasingLinear { ceiling } => {
                Self::decreasing_linear(ceiling).map(|_| ())
            }
        }
    }

    pub fn exponent(&self) -> Option<T> {
        match *self {
            ThresholdFamily::Power { p, .. } => Some(p),
            ThresholdFamily::DecreasingLinear { .. } => None,
        }
    }

    pub fn shift(&self) -> Option<T> {
        match *self {
            ThresholdFamily::Power { shift, .. } => Some(shift),
            ThresholdFamily::DecreasingLinear { .. } => None,
        }
    }

    pub fn monotonicity_in_x(&self) -> Monotonicity {
        match self {
            ThresholdFamily::Power { .. } => Monotonicity::Increasing,
            ThresholdFamily::DecreasingLinear { .. } => Monotonicity::Decreasing,
        }
    }

    /// Both families are `θ` times a positive function of `x`.
    pub fn monotonicity_in_theta(&self) -> Monotonicity {
        Monotonicity::Increasing
    }

    /// Whether `x` is in the domain of `A(·, θ)`.
    pub fn accepts(&self, x: T) -> bool {
        match *self {
            ThresholdFamily::Power { shift, .. } => x >= shift,
            ThresholdFamily::DecreasingLinear { ceiling } => x >= T::zero() && x < ceiling,
        }
    }

    fn domain_error(&self, x: T) -> Error {
        let (lo, hi) = match *self {
            ThresholdFamily::Power { shift, .. } => (shift.as_f64(), f64::INFINITY),
            ThresholdFamily::DecreasingLinear { ceiling } => (0.0, ceiling.as_f64()),
        };
        Error::DomainError {
            x: x.as_f64(),
            lo,
            hi,
        }
    }

    /// `A(x, θ)`.
    pub fn eval(&self, x: T, theta: T) -> Result<T> {
        if !(theta > T::zero()) {
            return Err(Error::NonPositiveTheta(theta.as_f64()));
        }
        if !self.accepts(x) {
            return Err(self.domain_error(x));
        }
        Ok(self.value(x, theta))
    }

    /// Unchecked `A(x, θ)`.
    pub(crate) fn value(&self, x: T, theta: T) -> T {
        match *self {
            ThresholdFamily::Power { p, shift } => theta * power(x - shift, p),
            ThresholdFamily::DecreasingLinear { ceiling } => theta * (ceiling - x),
        }
    }

    /// `∂A/∂x (x, θ)`; infinite at `x = shift` when `p < 1`.
    pub fn derivative_x(&self, x: T, theta: T) -> T {
        match *self {
            ThresholdFamily::Power { p, shift } => {
                if p == T::one() {
                    theta
                } else {
                    theta * p * power(x - shift, p - T::one())
                }
            }
            ThresholdFamily::DecreasingLinear { .. } => -theta,
        }
    }

    /// The unique `θ` with `A(x, θ) = value`.
    pub fn inverse_theta(&self, x: T, value: T) -> Result<T> {
        if !(value >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "threshold value must be >= 0, got {value}"
            )));
        }
        match *self {
            ThresholdFamily::Power { p, shift } => {
                if x < shift {
                    return Err(self.domain_error(x));
                }
                if x == shift {
                    return Err(Error::SingularAbscissa(x.as_f64()));
                }
                Ok(value / power(x - shift, p))
            }
            ThresholdFamily::DecreasingLinear { ceiling } => {
                if x < T::zero() || x > ceiling {
                    return Err(self.domain_error(x));
                }
                if x == ceiling {
                    return Err(Error::SingularAbscissa(x.as_f64()));
                }
                Ok(value / (ceiling - x))
            }
        }
    }

    /// Interval of `x` on which the equation can be posed for `f` on `[a, S]`.
    pub fn x_window(&self, a: T, s: T) -> Result<(T, T)> {
        match *self {
            ThresholdFamily::Power { shift, .. } => {
                if shift >= s {
                    return Err(Error::InvalidParameter(format!(
                        "shift {shift} leaves no room below the support end {s}"
                    )));
                }
                Ok((a.max(shift), s))
            }
            ThresholdFamily::DecreasingLinear { ceiling } => {
                if ceiling <= s {
                    return Err(Error::InvalidParameter(format!(
                        "ceiling {ceiling} must exceed the support end {s}"
                    )));
                }
                Ok((a, s))
            }
        }
    }
}

/// `base^p` with the integer exponents evaluated by multiplication.
pub(crate) fn power<T: Scalar>(base: T, p: T) -> T {
    if p == T::one() {
        base
    } else if p == T::lit(2.0) {
        base * base
    } else if p == T::lit(0.5) {
        base.sqrt()
    } else {
        base.powf(p)
    }
}

/// Set of admissible θ, the image of `ψ_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleRange<T> {
    /// `None` when every `θ > 0` down to zero is admissible.
    pub theta_min: Option<T>,
    /// `+∞` when unbounded.
    pub theta_max: T,
    pub min_inclusive: bool,
    /// Derived analytically rather than read off a grid.
    pub certified: bool,
}

impl<T: Scalar> AdmissibleRange<T> {
    pub fn contains(&self, theta: T) -> bool {
        let above = match self.theta_min {
            None => theta > T::zero(),
            Some(m) if self.min_inclusive => theta >= m,
            Some(m) => theta > m,
        };
        above && theta <= self.theta_max
    }

    /// Lower end of the range, zero when unbounded below.
    pub fn lower(&self) -> T {
        self.theta_min.unwrap_or_else(T::zero)
    }
}

/// `ψ_f(x)` from an already transformed function.
pub fn psi_transformed<T: Scalar>(
    tf: &TransformedFunction<T>,
    family: &ThresholdFamily<T>,
    x: T,
) -> Result<T> {
    let v = tf.eval(x)?;
    if v == T::zero() {
        return Err(Error::ZeroValue(x.as_f64()));
    }
    family.inverse_theta(x, v)
}

/// `ψ_f(x) = A(x, ·)⁻¹(T(f)(x))`: the θ for which `x = m_θ(f)`.
pub fn psi<T: Scalar>(
    f: &RankFrequencyFunction<T>,
    op: &OperatorSpec<T>,
    family: &ThresholdFamily<T>,
    x: T,
) -> Result<T> {
    psi_transformed(&op.apply(f)?, family, x)
}

/// Admissible θ for `T(f) = A(·, θ)`.
///
/// For a decreasing `T(f)` against the power family `ψ_f` is decreasing, so
/// the range is `[ψ_f(S), ψ_f(max(a, shift)))` and is reported as certified.
/// Every other combination is estimated from `ψ_f` on a grid.
pub fn admissible_range<T: Scalar>(
    f: &RankFrequencyFunction<T>,
    op: &OperatorSpec<T>,
    family: &ThresholdFamily<T>,
) -> Result<AdmissibleRange<T>> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    family.validate()?;
    let tf = op.apply(f)?;
    let (a, s) = f.domain();
    let (lo, hi) = family.x_window(a, s)?;

    if let (ThresholdFamily::Power { p, shift }, Monotonicity::Decreasing) =
        (*family, tf.classify_monotonicity())
    {
        let at_end = tf.value(s);
        let theta_min = (at_end > T::zero()).then(|| at_end / power(s - shift, p));
        let theta_max = if shift < a {
            tf.value(a) / power(a - shift, p)
        } else {
            T::infinity()
        };
        return Ok(AdmissibleRange {
            theta_min,
            theta_max,
            min_inclusive: theta_min.is_some(),
            certified: true,
        });
    }

    let mut min = T::infinity();
    let mut max = T::zero();
    let mut hits_zero = false;
    for x in grid(lo, hi, GRID_POINTS) {
        let v = tf.value(x);
        if v == T::zero() {
            hits_zero = true;
            continue;
        }
        match family.inverse_theta(x, v) {
            Ok(theta) => {
                min = min.min(theta);
                max = max.max(theta);
            }
            // ψ blows up at the singular end
            Err(Error::SingularAbscissa(_)) => max = T::infinity(),
            Err(e) => return Err(e),
        }
    }
    let theta_min = (!hits_zero && min.is_finite()).then_some(min);
    Ok(AdmissibleRange {
        theta_min,
        theta_max: max,
        min_inclusive: theta_min.is_some(),
        certified: false,
    })
}
