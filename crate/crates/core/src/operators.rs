//! Operators `T` applied to a rank-frequency function before it is
//! intersected with a threshold: identity, running integral `I(f)` and
//! running average `μ(f)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::RankFrequencyFunction;
use crate::report::{Counterexample, VerificationReport};
use crate::scalar::Scalar;

/// Points used whenever monotonicity has to be estimated on a grid.
pub const GRID_POINTS: usize = 1024;
/// Tolerance on successive differences for grid monotonicity.
pub const GRID_TOLERANCE: f64 = 1e-12;
/// Below `AVERAGING_CUTOFF·(S − a)` from the origin, `μ(f)` takes its limit `f(a)`.
pub const AVERAGING_CUTOFF: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Identity,
    Averaging,
    Integral,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Identity => "identity",
            OperatorKind::Averaging => "averaging",
            OperatorKind::Integral => "integral",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" | "id" => Some(OperatorKind::Identity),
            "averaging" | "average" | "mu" => Some(OperatorKind::Averaging),
            "integral" | "i" => Some(OperatorKind::Integral),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec<T> {
    pub kind: OperatorKind,
    /// Lower end of the averaging/integration window, the support start of `f`.
    pub origin: T,
}

impl<T: Scalar> OperatorSpec<T> {
    pub fn new(kind: OperatorKind, origin: T) -> Self {
        Self { kind, origin }
    }

    /// Operator of `kind` anchored at the support start of `f`.
    pub fn for_function(kind: OperatorKind, f: &RankFrequencyFunction<T>) -> Self {
        Self::new(kind, f.support_start())
    }

    pub fn apply(&self, f: &RankFrequencyFunction<T>) -> Result<TransformedFunction<T>> {
        TransformedFunction::new(*self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    /// Non-increasing; constants are classified here.
    Decreasing,
    Increasing,
    NonMonotone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    SegmentDerivative,
    GridSample,
}

/// Classifies a sampled sequence by the signs of its successive differences.
pub fn grid_monotonicity<T: Scalar>(values: &[T], tol: T) -> Monotonicity {
    let diffs = || values.windows(2).map(|w| w[1] - w[0]);
    if diffs().all(|d| d <= tol) {
        Monotonicity::Decreasing
    } else if diffs().all(|d| d >= -tol) {
        Monotonicity::Increasing
    } else {
        Monotonicity::NonMonotone
    }
}

/// Classifies a sequence of derivative values.
pub(crate) fn sign_monotonicity<T: Scalar>(derivs: &[T]) -> Monotonicity {
    if derivs.iter().all(|&d| d <= T::zero()) {
        Monotonicity::Decreasing
    } else if derivs.iter().all(|&d| d >= T::zero()) {
        Monotonicity::Increasing
    } else {
        Monotonicity::NonMonotone
    }
}

/// Evenly spaced abscissae `lo + (hi − lo)·j/n`, `j = 0..=n`.
pub fn grid<T: Scalar>(lo: T, hi: T, n: usize) -> impl Iterator<Item = T> {
    let nt = T::from_usize(n).expect("grid size");
    (0..=n).map(move |j| {
        if j == n {
            hi
        } else {
            lo + (hi - lo) * T::from_usize(j).expect("grid index") / nt
        }
    })
}

/// `T(f)` with an exact evaluator and a cached monotonicity class.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedFunction<T> {
    source: RankFrequencyFunction<T>,
    kind: OperatorKind,
    monotonicity: Monotonicity,
    certification: Certification,
}

impl<T: Scalar> TransformedFunction<T> {
    fn new(op: OperatorSpec<T>, f: &RankFrequencyFunction<T>) -> Result<Self> {
        if op.origin != f.support_start() {
            return Err(Error::OriginMismatch {
                origin: op.origin.as_f64(),
                start: f.support_start().as_f64(),
            });
        }
        let mut tf = Self {
            source: f.clone(),
            kind: op.kind,
            monotonicity: Monotonicity::NonMonotone,
            certification: Certification::SegmentDerivative,
        };
        let (m, c) = tf.compute_monotonicity();
        tf.monotonicity = m;
        tf.certification = c;
        Ok(tf)
    }

    pub fn source(&self) -> &RankFrequencyFunction<T> {
        &self.source
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn origin(&self) -> T {
        self.source.support_start()
    }

    pub fn domain(&self) -> (T, T) {
        self.source.domain()
    }

    pub fn classify_monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn certification(&self) -> Certification {
        self.certification
    }

    pub fn eval(&self, x: T) -> Result<T> {
        if !self.source.contains(x) {
            let (lo, hi) = self.domain();
            return Err(Error::DomainError {
                x: x.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        Ok(self.value(x))
    }

    /// Unchecked evaluation; `x` must lie in the domain.
    pub(crate) fn value(&self, x: T) -> T {
        match self.kind {
            OperatorKind::Identity => self.source.value(x),
            OperatorKind::Integral => self.source.primitive(x),
            OperatorKind::Averaging => {
                let (a, s) = self.domain();
                let width = x - a;
                if width < T::lit(AVERAGING_CUTOFF) * (s - a) {
                    self.source.ys()[0]
                } else {
                    self.source.primitive(x) / width
                }
            }
        }
    }

    fn compute_monotonicity(&self) -> (Monotonicity, Certification) {
        let f = &self.source;
        match self.kind {
            OperatorKind::Identity => (
                sign_monotonicity(&f.segments().map(|s| s.slope).collect::<Vec<_>>()),
                Certification::SegmentDerivative,
            ),
            OperatorKind::Integral => {
                // I(f)' = f ≥ 0; only the null function gives a constant
                let m = if f.is_zero() {
                    Monotonicity::Decreasing
                } else {
                    Monotonicity::Increasing
                };
                (m, Certification::SegmentDerivative)
            }
            OperatorKind::Averaging => {
                // μ' has the sign of N(x) = (x − a)f(x) − I(f)(x); N(a) = 0 and
                // N' = (x − a)f'(x) keeps one sign per segment, so N is monotone
                // on each segment and its sign is decided at the breakpoints.
                let a = f.support_start();
                let scale = T::one().max(f.ys()[0] * (f.support_end() - a));
                let tol = T::lit(GRID_TOLERANCE) * scale;
                let n: Vec<T> = f
                    .breakpoints()
                    .map(|(x, y)| (x - a) * y - f.primitive(x))
                    .collect();
                if n.iter().all(|&v| v <= tol) {
                    (Monotonicity::Decreasing, Certification::SegmentDerivative)
                } else if n.iter().all(|&v| v >= -tol) {
                    (Monotonicity::Increasing, Certification::SegmentDerivative)
                } else {
                    let (lo, hi) = self.domain();
                    let values: Vec<T> = grid(lo, hi, GRID_POINTS).map(|x| self.value(x)).collect();
                    (
                        grid_monotonicity(&values, T::lit(GRID_TOLERANCE)),
                        Certification::GridSample,
                    )
                }
            }
        }
    }
}

/// Checks positivity, `T(f) = 0 ⟺ f = 0`, and strict monotonicity of the
/// restrictions `T_a` over `samples`.
///
/// Strictness is checked pointwise: `f < g` on `[a₀, cut]` must give
/// `T(f) < T(g)` on `(a₀, cut]`. Pairs come from the samples themselves and
/// from lifting each sample by a ramp supported on a prefix.
pub fn check_operator_contract<T: Scalar>(
    kind: OperatorKind,
    samples: &[RankFrequencyFunction<T>],
) -> VerificationReport {
    let mut report = VerificationReport::new(format!("operator_contract[{}]", kind.name()));
    let Some(first) = samples.first() else {
        return report;
    };
    let (a, s) = first.domain();
    if samples.iter().any(|f| f.domain() != (a, s)) {
        report.note("samples do not share a domain");
        return report;
    }
    let op = OperatorSpec::new(kind, a);
    let points: Vec<T> = grid(a, s, 256).collect();

    for f in samples {
        let tf = match op.apply(f) {
            Ok(tf) => tf,
            Err(e) => {
                report.record_failure(
                    Counterexample::new(f.digest(), 0.0, 0.0).with_note(e.to_string()),
                );
                continue;
            }
        };
        let xs: Vec<T> = points
            .iter()
            .copied()
            .chain(f.xs().iter().copied())
            .collect();
        let min = xs.iter().map(|&x| tf.value(x)).fold(T::infinity(), T::min);
        if min >= T::zero() {
            report.record_pass();
        } else {
            report.record_failure(
                Counterexample::new(f.digest(), min.as_f64(), 0.0).with_note("T(f) negative"),
            );
        }
        let t_zero = xs.iter().all(|&x| tf.value(x) == T::zero());
        if t_zero == f.is_zero() {
            report.record_pass();
        } else {
            report.record_failure(
                Counterexample::new(
                    f.digest(),
                    f64::from(t_zero as u8),
                    f64::from(f.is_zero() as u8),
                )
                .with_note("T(f) = 0 must hold exactly when f = 0"),
            );
        }
    }

    let mut pairs: Vec<(RankFrequencyFunction<T>, RankFrequencyFunction<T>)> = Vec::new();
    for f in samples {
        for g in samples {
            if f != g {
                pairs.push((f.clone(), g.clone()));
            }
        }
        let height = T::lit(0.25) * T::one().max(f.ys()[0]);
        let bump_end = a + (s - a) * T::lit(0.8);
        if let Ok(g) = RankFrequencyFunction::ramp(a, bump_end, s, height).and_then(|b| f.add(&b)) {
            pairs.push((f.clone(), g));
        }
    }
    for (f, g) in &pairs {
        for q in [0.25, 0.5, 0.75] {
            let cut = a + (s - a) * T::lit(q);
            if !f.lt_on_prefix(g, cut).unwrap_or(false) {
                continue;
            }
            let (Ok(tf), Ok(tg)) = (op.apply(f), op.apply(g)) else {
                continue;
            };
            let violation = grid(a, cut, 128)
                .skip(1)
                .chain(
                    f.union_breakpoints(g)
                        .into_iter()
                        .filter(|&x| x > a && x <= cut),
                )
                .map(|x| (x, tf.value(x), tg.value(x)))
                .find(|&(_, vf, vg)| !(vf < vg));
            match violation {
                None => report.record_pass(),
                Some((x, vf, vg)) => report.record_failure(
                    Counterexample::new(
                        format!("{}|{}", f.digest(), g.digest()),
                        vf.as_f64(),
                        vg.as_f64(),
                    )
                    .with_note(format!("T(f) < T(g) fails at x = {}", x.as_f64())),
                ),
            }
        }
    }
    report
}
