//! Decreasing piecewise-linear rank-frequency functions.
//!
//! A [`RankFrequencyFunction`] is a continuous, non-increasing, non-negative
//! function on a compact interval `[a, S]`, linear between consecutive
//! breakpoints. Integration and pointwise ordering are decided exactly on the
//! breakpoint representation.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimum margin for strict pointwise order on a prefix.
pub const STRICT_MARGIN: f64 = 1e-12;

/// Decreasing, non-negative, continuous piecewise-linear function on `[a, S]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankFrequencyFunction<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    // ∫_a^{x_i} f, one entry per breakpoint
    cumulative: Vec<T>,
}

/// One linear piece `y0 + slope·(x − x0)` on `[x0, x1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub slope: T,
    /// Integral of the function from the support start up to `x0`.
    pub area_before: T,
}

impl<T: Scalar> Segment<T> {
    pub fn value_at(&self, x: T) -> T {
        self.y0 + self.slope * (x - self.x0)
    }

    /// `∫_a^x f` for `x` inside this segment.
    pub fn primitive_at(&self, x: T) -> T {
        let t = x - self.x0;
        self.area_before + t * (self.y0 + self.slope * t / T::lit(2.0))
    }
}

/// Pointwise relations between two functions sharing a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FunctionOrdering<T> {
    /// `f ≤ g` everywhere.
    Leq,
    /// `f < g` on `[a, cut]`.
    StrictOnPrefix(T),
    /// `f = g` on `[a, cut]`.
    EqualOnPrefix(T),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbMode {
    Additive,
    Multiplicative,
}

/// Result of ingesting a discrete citation vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CitationIngest<T> {
    pub function: RankFrequencyFunction<T>,
    /// The counts were not sorted non-increasing and had to be re-sorted.
    pub resorted: bool,
}

/// Shape parameters for [`RankFrequencyFunction::random_function`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomFunctionParams {
    pub max_breakpoints: usize,
    pub s_range: (f64, f64),
    pub y_max: f64,
}

impl Default for RandomFunctionParams {
    fn default() -> Self {
        Self {
            max_breakpoints: 8,
            s_range: (5.0, 50.0),
            y_max: 50.0,
        }
    }
}

impl<T: Scalar> RankFrequencyFunction<T> {
    /// Builds a function from `(x, y)` breakpoints, checking every invariant.
    pub fn new(points: Vec<(T, T)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidFunction(format!(
                "at least 2 breakpoints required, got {}",
                points.len()
            )));
        }
        for (i, &(x, y)) in points.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidFunction(format!("non-finite breakpoint {i}")));
            }
            if y < T::zero() {
                return Err(Error::InvalidFunction(format!(
                    "negative value {} at breakpoint {i}",
                    y.as_f64()
                )));
            }
        }
        if points[0].0 < T::zero() {
            return Err(Error::InvalidFunction("support start must be >= 0".into()));
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidFunction(format!(
                    "abscissae not strictly increasing at breakpoint {}",
                    i + 1
                )));
            }
            if w[1].1 > w[0].1 {
                return Err(Error::InvalidFunction(format!(
                    "function increases between breakpoints {i} and {}",
                    i + 1
                )));
            }
        }
        let (xs, ys): (Vec<T>, Vec<T>) = points.into_iter().unzip();
        let mut cumulative = Vec::with_capacity(xs.len());
        let mut acc = T::zero();
        cumulative.push(acc);
        for i in 1..xs.len() {
            acc = acc + (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]) / T::lit(2.0);
            cumulative.push(acc);
        }
        Ok(Self { xs, ys, cumulative })
    }

    /// Constant `value` on `[start, end]`.
    pub fn constant(start: T, end: T, value: T) -> Result<Self> {
        Self::new(vec![(start, value), (end, value)])
    }

    /// Single segment from `(x0, y0)` to `(x1, y1)`.
    pub fn line(x0: T, y0: T, x1: T, y1: T) -> Result<Self> {
        Self::new(vec![(x0, y0), (x1, y1)])
    }

    /// The zero function on `[start, end]`.
    pub fn zero(start: T, end: T) -> Result<Self> {
        Self::constant(start, end, T::zero())
    }

    /// Continuous interpolation of a citation vector.
    ///
    /// Breakpoints are `(0, c₁), (1, c₁), (2, c₂), …, (N, c_N), (N+1, 0)`, so
    /// `f(i) = cᵢ` at every integer rank and the function is flat on `[0, 1]`.
    /// Unsorted input is sorted non-increasing and flagged.
    pub fn from_citation_counts(counts: &[T]) -> Result<CitationIngest<T>> {
        if counts.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = counts.iter().find(|c| !c.is_finite() || **c < T::zero()) {
            return Err(Error::InvalidFunction(format!(
                "citation counts must be finite and non-negative, got {}",
                bad.as_f64()
            )));
        }
        let resorted = counts.windows(2).any(|w| w[1] > w[0]);
        let mut sorted = counts.to_vec();
        if resorted {
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        }
        let n = sorted.len();
        let mut points = Vec::with_capacity(n + 2);
        points.push((T::zero(), sorted[0]));
        for (i, &c) in sorted.iter().enumerate() {
            points.push((T::from_usize(i + 1).expect("rank fits"), c));
        }
        points.push((T::from_usize(n + 1).expect("rank fits"), T::zero()));
        Ok(CitationIngest {
            function: Self::new(points)?,
            resorted,
        })
    }

    pub fn support_start(&self) -> T {
        self.xs[0]
    }

    pub fn support_end(&self) -> T {
        self.xs[self.xs.len() - 1]
    }

    pub fn domain(&self) -> (T, T) {
        (self.support_start(), self.support_end())
    }

    pub fn breakpoints(&self) -> impl ExactSizeIterator<Item = (T, T)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    pub fn segment_count(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn segment(&self, i: usize) -> Segment<T> {
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        Segment {
            x0,
            x1,
            y0: self.ys[i],
            slope: (self.ys[i + 1] - self.ys[i]) / (x1 - x0),
            area_before: self.cumulative[i],
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment<T>> + '_ {
        (0..self.segment_count()).map(move |i| self.segment(i))
    }

    /// Index of the segment containing `x`; the last segment owns `S`.
    pub fn locate(&self, x: T) -> usize {
        let idx = self.xs.partition_point(|&xi| xi <= x);
        idx.clamp(1, self.xs.len() - 1) - 1
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.support_start() && x <= self.support_end()
    }

    fn check_domain(&self, x: T) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::DomainError {
                x: x.as_f64(),
                lo: self.support_start().as_f64(),
                hi: self.support_end().as_f64(),
            })
        }
    }

    /// `f(x)` by linear interpolation; exact at breakpoints.
    pub fn eval(&self, x: T) -> Result<T> {
        self.check_domain(x)?;
        Ok(self.value(x))
    }

    pub(crate) fn value(&self, x: T) -> T {
        let i = self.locate(x);
        if x == self.xs[i] {
            return self.ys[i];
        }
        if x == self.xs[i + 1] {
            return self.ys[i + 1];
        }
        self.segment(i).value_at(x)
    }

    /// `∫_a^x f` for `x` in the domain.
    pub(crate) fn primitive(&self, x: T) -> T {
        let i = self.locate(x);
        if x == self.xs[i] {
            return self.cumulative[i];
        }
        self.segment(i).primitive_at(x)
    }

    /// Exact `∫_lower^x f`.
    pub fn integral(&self, lower: T, x: T) -> Result<T> {
        self.check_domain(lower)?;
        self.check_domain(x)?;
        if lower > x {
            return Err(Error::DomainError {
                x: lower.as_f64(),
                lo: self.support_start().as_f64(),
                hi: x.as_f64(),
            });
        }
        if lower == x {
            return Ok(T::zero());
        }
        Ok(self.primitive(x) - self.primitive(lower))
    }

    /// True for the null function. Since `f` is non-increasing and
    /// non-negative this is equivalent to `f(a) = 0`.
    pub fn is_zero(&self) -> bool {
        self.ys[0] == T::zero()
    }

    /// Sorted union of both breakpoint sets.
    pub fn union_breakpoints(&self, other: &Self) -> Vec<T> {
        let mut xs: Vec<T> = self.xs.iter().chain(other.xs.iter()).copied().collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        xs.dedup();
        xs
    }

    fn check_same_domain(&self, other: &Self) -> Result<()> {
        if self.domain() == other.domain() {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    fn check_prefix(&self, cut: T) -> Result<()> {
        if cut > self.support_start() && cut < self.support_end() {
            Ok(())
        } else {
            Err(Error::BadPrefix {
                cut: cut.as_f64(),
                lo: self.support_start().as_f64(),
                hi: self.support_end().as_f64(),
            })
        }
    }

    /// Points on which a difference of two piecewise-linear functions attains
    /// its extrema over `[a, cut]`.
    fn prefix_points(&self, other: &Self, cut: T) -> Vec<T> {
        let mut pts: Vec<T> = self
            .union_breakpoints(other)
            .into_iter()
            .filter(|&x| x < cut)
            .collect();
        pts.push(cut);
        pts
    }

    /// `f ≤ g` pointwise on the shared domain.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.check_same_domain(other)?;
        Ok(self
            .union_breakpoints(other)
            .into_iter()
            .all(|x| self.value(x) <= other.value(x)))
    }

    /// `f < g` pointwise on `[a, cut]` by a margin of at least [`STRICT_MARGIN`].
    pub fn lt_on_prefix(&self, other: &Self, cut: T) -> Result<bool> {
        self.check_same_domain(other)?;
        self.check_prefix(cut)?;
        let margin = T::lit(STRICT_MARGIN);
        Ok(self
            .prefix_points(other, cut)
            .into_iter()
            .all(|x| other.value(x) - self.value(x) > margin))
    }

    /// `f = g` on `[a, cut]`, compared exactly at the union breakpoints.
    pub fn eq_on_prefix(&self, other: &Self, cut: T) -> Result<bool> {
        self.check_same_domain(other)?;
        self.check_prefix(cut)?;
        Ok(self
            .prefix_points(other, cut)
            .into_iter()
            .all(|x| other.value(x) == self.value(x)))
    }

    pub fn satisfies(&self, other: &Self, ordering: FunctionOrdering<T>) -> Result<bool> {
        match ordering {
            FunctionOrdering::Leq => self.leq(other),
            FunctionOrdering::StrictOnPrefix(cut) => self.lt_on_prefix(other, cut),
            FunctionOrdering::EqualOnPrefix(cut) => self.eq_on_prefix(other, cut),
        }
    }

    /// Shifts (`y + ε`) or scales (`y·(1 + ε)`) every breakpoint value.
    pub fn perturb(&self, mode: PerturbMode, epsilon: T) -> Result<Self> {
        let ys: Vec<T> = match mode {
            PerturbMode::Additive => {
                let ys: Vec<T> = self.ys.iter().map(|&y| y + epsilon).collect();
                if ys.iter().any(|&y| y < T::zero()) {
                    return Err(Error::WouldViolateInvariants(format!(
                        "additive epsilon {} drives a value below zero",
                        epsilon.as_f64()
                    )));
                }
                ys
            }
            PerturbMode::Multiplicative => {
                if epsilon <= -T::one() {
                    return Err(Error::WouldViolateInvariants(format!(
                        "multiplicative epsilon {} must exceed -1",
                        epsilon.as_f64()
                    )));
                }
                self.ys.iter().map(|&y| y * (T::one() + epsilon)).collect()
            }
        };
        Self::new(self.xs.iter().copied().zip(ys).collect())
    }

    /// `factor · f` for `factor ≥ 0`; a zero factor gives the null function.
    pub fn scale(&self, factor: T) -> Result<Self> {
        if !(factor >= T::zero()) || !factor.is_finite() {
            return Err(Error::WouldViolateInvariants(format!(
                "scale factor {} must be finite and non-negative",
                factor.as_f64()
            )));
        }
        Self::new(self.breakpoints().map(|(x, y)| (x, y * factor)).collect())
    }

    /// Pointwise sum on the shared domain.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_domain(other)?;
        let pts = self
            .union_breakpoints(other)
            .into_iter()
            .map(|x| (x, self.value(x) + other.value(x)))
            .collect();
        Self::new(pts)
    }

    /// Decreasing ramp on `[start, end]`: `height` at `start`, falling
    /// linearly to zero at `ramp_end` and zero afterwards.
    pub fn ramp(start: T, ramp_end: T, end: T, height: T) -> Result<Self> {
        if ramp_end >= end {
            Self::line(
                start,
                height,
                end,
                height * (ramp_end - end) / (ramp_end - start),
            )
        } else {
            Self::new(vec![
                (start, height),
                (ramp_end, T::zero()),
                (end, T::zero()),
            ])
        }
    }

    /// Random decreasing function on `[0, S]`, deterministic in `seed`.
    pub fn random_function(seed: u64, params: &RandomFunctionParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = params.s_range;
        let end = if hi > lo { rng.gen_range(lo..hi) } else { lo };
        Self::random_with(&mut rng, 0.0, end, params)
    }

    /// Random decreasing function on a prescribed domain `[start, end]`.
    pub fn random_on_domain(seed: u64, start: T, end: T, params: &RandomFunctionParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng, start.as_f64(), end.as_f64(), params)
    }

    fn random_with(
        rng: &mut ChaCha8Rng,
        start: f64,
        end: f64,
        params: &RandomFunctionParams,
    ) -> Self {
        let max_n = params.max_breakpoints.max(2);
        loop {
            let n = rng.gen_range(2..=max_n);
            let mut xs: Vec<f64> = (0..n - 2).map(|_| rng.gen_range(start..end)).collect();
            xs.push(start);
            xs.push(end);
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
            let mut ys: Vec<f64> = (0..n)
                .map(|_| params.y_max * (1.0 - rng.gen::<f64>()))
                .collect();
            ys.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
            let points = xs
                .into_iter()
                .zip(ys)
                .map(|(x, y)| (T::lit(x), T::lit(y)))
                .collect();
            // duplicate abscissae have probability ~0; redraw if they occur
            if let Ok(f) = Self::new(points) {
                return f;
            }
        }
    }

    /// Short content hash identifying the breakpoint list.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for (x, y) in self.breakpoints() {
            hasher.update(x.as_f64().to_le_bytes());
            hasher.update(y.as_f64().to_le_bytes());
        }
        hasher.finalize()[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
