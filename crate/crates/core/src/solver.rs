//! Solving the Hirsch-type equation `T(f)(x) = A(x, θ)` for `x = m_θ(f)`.
//!
//! The difference `D(x) = T(f)(x) − A(x, θ)` is scanned on a uniform grid to
//! count sign changes. A single crossing is then located either in closed
//! form on the segment that contains it, or by bisection. More than one
//! crossing is reported as [`SolveStatus::NonUnique`] instead of picking one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::RankFrequencyFunction;
use crate::operators::{grid, OperatorKind, OperatorSpec, TransformedFunction};
use crate::scalar::Scalar;
use crate::thresholds::ThresholdFamily;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig<T> {
    pub abs_tol_x: T,
    pub scan_points: usize,
    pub exact_when_possible: bool,
}

impl<T: Scalar> Default for SolveConfig<T> {
    fn default() -> Self {
        Self {
            abs_tol_x: T::lit(1e-10),
            scan_points: 1024,
            exact_when_possible: true,
        }
    }
}

impl<T: Scalar> SolveConfig<T> {
    pub fn with_tolerance(abs_tol_x: T) -> Self {
        Self {
            abs_tol_x,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol_x > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "abs_tol_x must be > 0, got {}",
                self.abs_tol_x
            )));
        }
        if self.scan_points < 16 {
            return Err(Error::InvalidParameter(format!(
                "scan_points must be >= 16, got {}",
                self.scan_points
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Closed-form root of the segment polynomial.
    ExactSegment,
    Bisection,
    /// `θ` is not admissible.
    NoRoot,
    NonUnique,
}

impl SolveStatus {
    pub fn is_success(self) -> bool {
        matches!(self, SolveStatus::ExactSegment | SolveStatus::Bisection)
    }

    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::ExactSegment => "exact_segment",
            SolveStatus::Bisection => "bisection",
            SolveStatus::NoRoot => "no_root",
            SolveStatus::NonUnique => "non_unique",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundlePoint<T> {
    pub m: T,
    pub status: SolveStatus,
}

/// Sub-interval of the domain to which the equation is restricted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Window<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BundleEntry<T> {
    pub theta: T,
    pub m: Option<T>,
    pub status: SolveStatus,
}

/// `θ ↦ m_θ(f)` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSample<T> {
    pub function_id: String,
    pub operator: OperatorKind,
    pub threshold: ThresholdFamily<T>,
    pub entries: Vec<BundleEntry<T>>,
}

/// `D(x) = T(f)(x) − A(x, θ)` for a fixed θ.
#[derive(Debug, Clone, Copy)]
pub struct Difference<'a, T> {
    pub tf: &'a TransformedFunction<T>,
    pub family: &'a ThresholdFamily<T>,
    pub theta: T,
}

impl<T: Scalar> Difference<'_, T> {
    pub fn at(&self, x: T) -> T {
        self.tf.value(x) - self.family.value(x, self.theta)
    }

    fn magnitude(&self, x: T) -> T {
        self.tf.value(x).abs() + self.family.value(x, self.theta).abs()
    }
}

enum Crossing {
    /// Exact zero at scan index.
    At(usize),
    /// Sign flip between scan indices `j` and `j + 1`.
    Between(usize),
}

/// The interval on which `D` is defined for this problem.
pub fn solve_window<T: Scalar>(
    tf: &TransformedFunction<T>,
    family: &ThresholdFamily<T>,
    window: Option<Window<T>>,
) -> Result<(T, T)> {
    let (a, s) = tf.domain();
    let (mut lo, mut hi) = family.x_window(a, s)?;
    if let Some(w) = window {
        if !(w.lo < w.hi) || w.lo < lo || w.hi > hi {
            return Err(Error::DomainError {
                x: w.lo.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        lo = w.lo;
        hi = w.hi;
    }
    Ok((lo, hi))
}

fn exact_applies<T: Scalar>(kind: OperatorKind, family: &ThresholdFamily<T>) -> bool {
    match (kind, *family) {
        (OperatorKind::Identity, ThresholdFamily::Power { p, .. }) => {
            p == T::one() || p == T::lit(2.0)
        }
        (OperatorKind::Averaging, ThresholdFamily::Power { p, .. }) => p == T::one(),
        _ => false,
    }
}

/// `m_θ(f)` for `T(f) = A(·, θ)`.
pub fn solve_bundle_point<T: Scalar>(
    f: &RankFrequencyFunction<T>,
    op: &OperatorSpec<T>,
    family: &ThresholdFamily<T>,
    theta: T,
    cfg: &SolveConfig<T>,
) -> Result<BundlePoint<T>> {
    solve_transformed(&op.apply(f)?, family, theta, None, cfg)
}

/// As [`solve_bundle_point`], restricted to `window`.
pub fn solve_in_window<T: Scalar>(
    f: &RankFrequencyFunction<T>,
    op: &OperatorSpec<T>,
    family: &ThresholdFamily<T>,
    theta: T,
    window: Window<T>,
    cfg: &SolveConfig<T>,
) -> Result<BundlePoint<T>> {
    solve_transformed(&op.apply(f)?, family, theta, Some(window), cfg)
}

/// Core solver on an already transformed function.
pub fn solve_transformed<T: Scalar>(
    tf: &TransformedFunction<T>,
    family: &ThresholdFamily<T>,
    theta: T,
    window: Option<Window<T>>,
    cfg: &SolveConfig<T>,
) -> Result<BundlePoint<T>> {
    if !(theta > T::zero()) {
        return Err(Error::NonPositiveTheta(theta.as_f64()));
    }
    cfg.validate()?;
    family.validate()?;
    if tf.source().is_zero() {
        // m_θ(0) is the support start for every θ
        return Ok(BundlePoint {
            m: tf.origin(),
            status: SolveStatus::ExactSegment,
        });
    }
    let (lo, hi) = solve_window(tf, family, window)?;
    let d = Difference { tf, family, theta };
    let exact = cfg.exact_when_possible && exact_applies(tf.kind(), family);
    let hit_status = if exact {
        SolveStatus::ExactSegment
    } else {
        SolveStatus::Bisection
    };

    let n = cfg.scan_points;
    let xs: Vec<T> = grid(lo, hi, n).collect();
    let mut ds: Vec<T> = xs.iter().map(|&x| d.at(x)).collect();

    // an endpoint within solver resolution of a root counts as one
    let eps = T::epsilon() * T::lit(8.0);
    let h = xs[1] - xs[0];
    let tol_lo = cfg.abs_tol_x * ((ds[1] - ds[0]) / h).abs() + eps * d.magnitude(xs[0]);
    let tol_hi = cfg.abs_tol_x * ((ds[n] - ds[n - 1]) / h).abs() + eps * d.magnitude(xs[n]);
    if ds[0].abs() <= tol_lo {
        ds[0] = T::zero();
    }
    if ds[n].abs() <= tol_hi {
        ds[n] = T::zero();
    }

    let mut crossings = Vec::new();
    let mut j = 0;
    while j <= n {
        if ds[j] == T::zero() {
            let start = j;
            while j <= n && ds[j] == T::zero() {
                j += 1;
            }
            if j - start > 1 {
                // D vanishes on a whole interval
                return Err(Error::NonUnique {
                    theta: theta.as_f64(),
                    roots: j - start,
                });
            }
            crossings.push(Crossing::At(start));
            continue;
        }
        if j < n && ds[j + 1] != T::zero() && (ds[j] > T::zero()) != (ds[j + 1] > T::zero()) {
            crossings.push(Crossing::Between(j));
        }
        j += 1;
    }

    match crossings.len() {
        0 => Err(Error::NoRoot {
            theta: theta.as_f64(),
        }),
        1 => match crossings[0] {
            Crossing::At(k) => Ok(BundlePoint {
                m: xs[k],
                status: hit_status,
            }),
            Crossing::Between(k) => {
                let (l, r) = (xs[k], xs[k + 1]);
                if exact {
                    if let Some(m) = exact_root(&d, l, r) {
                        return Ok(BundlePoint {
                            m,
                            status: SolveStatus::ExactSegment,
                        });
                    }
                }
                Ok(BundlePoint {
                    m: bisect(&d, l, r, ds[k], cfg.abs_tol_x),
                    status: SolveStatus::Bisection,
                })
            }
        },
        roots => Err(Error::NonUnique {
            theta: theta.as_f64(),
            roots,
        }),
    }
}

fn bisect<T: Scalar>(d: &Difference<'_, T>, mut l: T, mut r: T, d_l: T, tol: T) -> T {
    let left_positive = d_l > T::zero();
    let two = T::lit(2.0);
    while r - l > tol {
        let mid = l + (r - l) / two;
        if mid <= l || mid >= r {
            break;
        }
        let v = d.at(mid);
        if v == T::zero() {
            return mid;
        }
        if (v > T::zero()) == left_positive {
            l = mid;
        } else {
            r = mid;
        }
    }
    l + (r - l) / two
}

/// Closed-form root on the source segment that carries the crossing inside
/// `[l, r]`. `None` when rounding pushes every candidate out of the bracket.
fn exact_root<T: Scalar>(d: &Difference<'_, T>, l: T, r: T) -> Option<T> {
    let f = d.tf.source();
    let mut pts = vec![l];
    pts.extend(f.xs().iter().copied().filter(|&x| x > l && x < r));
    pts.push(r);
    let vals: Vec<T> = pts.iter().map(|&x| d.at(x)).collect();
    let k = (0..pts.len() - 1).find(|&i| {
        vals[i] == T::zero()
            || vals[i + 1] == T::zero()
            || (vals[i] > T::zero()) != (vals[i + 1] > T::zero())
    })?;
    if vals[k] == T::zero() {
        return Some(pts[k]);
    }
    if vals[k + 1] == T::zero() {
        return Some(pts[k + 1]);
    }
    let (sl, sr) = (pts[k], pts[k + 1]);
    let seg = f.segment(f.locate(sl + (sr - sl) / T::lit(2.0)));
    let (ThresholdFamily::Power { p, shift }, theta) = (*d.family, d.theta) else {
        return None;
    };
    let dd = seg.x0 - shift;
    let (q2, q1, q0) = match d.tf.kind() {
        OperatorKind::Identity if p == T::one() => {
            (T::zero(), seg.slope - theta, seg.y0 - theta * dd)
        }
        OperatorKind::Identity => (
            -theta,
            seg.slope - T::lit(2.0) * theta * dd,
            seg.y0 - theta * dd * dd,
        ),
        OperatorKind::Averaging => {
            // I(f)(x) = (x − a)·θ(x − shift), cleared of the denominator
            let e = seg.x0 - d.tf.origin();
            (
                seg.slope / T::lit(2.0) - theta,
                seg.y0 - theta * (e + dd),
                seg.area_before - theta * e * dd,
            )
        }
        OperatorKind::Integral => return None,
    };
    let a = d.tf.origin();
    let slack = (sr - sl) * T::lit(1e-9);
    quadratic_roots(q2, q1, q0)
        .into_iter()
        .map(|t| seg.x0 + t)
        .filter(|&x| x.is_finite() && x >= sl - slack && x <= sr + slack)
        // the cleared averaging form has a spurious root at the origin
        .filter(|&x| d.tf.kind() != OperatorKind::Averaging || x > a)
        .map(|x| x.max(sl).min(sr))
        .next()
}

/// Real roots of `q2·t² + q1·t + q0`, computed without cancellation.
fn quadratic_roots<T: Scalar>(q2: T, q1: T, q0: T) -> Vec<T> {
    if q2 == T::zero() {
        return if q1 == T::zero() {
            vec![]
        } else {
            vec![-q0 / q1]
        };
    }
    let disc = q1 * q1 - T::lit(4.0) * q2 * q0;
    if disc < T::zero() {
        return vec![];
    }
    let sq = disc.sqrt();
    let q = -(q1 + if q1 >= T::zero() { sq } else { -sq }) / T::lit(2.0);
    let mut roots = Vec::with_capacity(2);
    if q != T::zero() {
        roots.push(q / q2);
        roots.push(q0 / q);
    } else {
        roots.push(T::zero());
    }
    roots
}

/// Solves at every θ of `theta_grid`; failures are carried as statuses.
pub fn sample_bundle<T: Scalar>(
    f: &RankFrequencyFunction<T>,
    function_id: &str,
    op: &OperatorSpec<T>,
    family: &ThresholdFamily<T>,
    theta_grid: &[T],
    cfg: &SolveConfig<T>,
) -> Result<BundleSample<T>> {
    if let Some(&bad) = theta_grid.iter().find(|&&t| !(t > T::zero())) {
        return Err(Error::NonPositiveTheta(bad.as_f64()));
    }
    let tf = op.apply(f)?;
    let mut entries: Vec<BundleEntry<T>> = theta_grid
        .iter()
        .map(
            |&theta| match solve_transformed(&tf, family, theta, None, cfg) {
                Ok(pt) => Ok(BundleEntry {
                    theta,
                    m: Some(pt.m),
                    status: pt.status,
                }),
                Err(Error::NoRoot { .. }) => Ok(BundleEntry {
                    theta,
                    m: None,
                    status: SolveStatus::NoRoot,
                }),
                Err(Error::NonUnique { .. }) => Ok(BundleEntry {
                    theta,
                    m: None,
                    status: SolveStatus::NonUnique,
                }),
                Err(e) => Err(e),
            },
        )
        .collect::<Result<_>>()?;
    entries.sort_by(|a, b| a.theta.partial_cmp(&b.theta).expect("finite theta"));
    Ok(BundleSample {
        function_id: function_id.to_string(),
        operator: op.kind,
        threshold: *family,
        entries,
    })
}

fn solve_named<T: Scalar>(
    f: &RankFrequencyFunction<T>,
    kind: OperatorKind,
    family: ThresholdFamily<T>,
    theta: T,
    cfg: &SolveConfig<T>,
) -> Result<T> {
    let op = OperatorSpec::for_function(kind, f);
    solve_bundle_point(f, &op, &family, theta, cfg).map(|pt| pt.m)
}

/// θ-dependent h-index: `f(x) = θx`.
pub fn h_index<T: Scalar>(
    f: &RankFrequencyFunction<T>,
    theta: T,
    cfg: &SolveConfig<T>,
) -> Result<T> {
    solve_named(
        f,
        OperatorKind::Identity,
        ThresholdFamily::hirsch(),
        theta,
        cfg,
    )
}

/// θ-dependent g-index: `μ(f)(x) = θ(x − a)`.
pub fn g_index<T: Scalar>(
    f: &RankFrequencyFunction<T>,
    theta: T,
    cfg: &SolveConfig<T>,
) -> Result<T> {
    g_kosmulski_index(f, theta, T::one(), cfg)
}

/// Kosmulski index: `f(x) = θx^p`.
pub fn kosmulski_index<T: Scalar>(
    f: &RankFrequencyFunction<T>,
    theta: T,
    p: T,
    cfg: &SolveConfig<T>,
) -> Result<T> {
    let family = ThresholdFamily::power(p, T::zero())?;
    solve_named(f, OperatorKind::Identity, family, theta, cfg)
}

/// g-variant of the Kosmulski index: `μ(f)(x) = θ(x − a)^p`.
pub fn g_kosmulski_index<T: Scalar>(
    f: &RankFrequencyFunction<T>,
    theta: T,
    p: T,
    cfg: &SolveConfig<T>,
) -> Result<T> {
    let family = ThresholdFamily::power(p, f.support_start())?;
    solve_named(f, OperatorKind::Averaging, family, theta, cfg)
}

/// Polar radius `h_θ(f)·√(1 + θ²)` of the h-bundle point.
pub fn polar_radius<T: Scalar>(
    f: &RankFrequencyFunction<T>,
    theta: T,
    cfg: &SolveConfig<T>,
) -> Result<T> {
    Ok(h_index(f, theta, cfg)? * (T::one() + theta * theta).sqrt())
}
