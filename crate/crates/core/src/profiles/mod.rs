//! Piecewise radial profiles `t ↦ f(t)` with exact one-sided jets.
//!
//! A profile is a partition of its domain into segments, each carrying a
//! closed-form [`SegmentKind`]. At an interior breakpoint the left and right
//! formulas are both evaluated, and order-2 queries report both limits
//! whenever the second derivative jumps.

mod segment;

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
pub(crate) use segment::{solve_monotone, square_transport};
pub use segment::{window_basis, Jet, MollifiedWindow, SegmentKind};

/// Relative tolerance for one-sided agreement at breakpoints.
pub const JOIN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Continuity {
    C0,
    C1,
    #[serde(rename = "C1_piecewise_C2")]
    C1PiecewiseC2,
    C2,
}

impl fmt::Display for Continuity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Continuity::C0 => "C0",
            Continuity::C1 => "C1",
            Continuity::C1PiecewiseC2 => "C1_piecewise_C2",
            Continuity::C2 => "C2",
        };
        f.write_str(s)
    }
}

/// Closed interval whose upper end may be `+inf` (serialized as `null`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let hi = if self.hi.is_finite() {
            Some(self.hi)
        } else {
            None
        };
        (self.lo, hi).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (lo, hi): (f64, Option<f64>) = Deserialize::deserialize(d)?;
        Ok(Interval::new(lo, hi.unwrap_or(f64::INFINITY)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub interval: Interval,
    #[serde(flatten)]
    pub kind: SegmentKind,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, kind: SegmentKind) -> Self {
        Segment {
            interval: Interval::new(lo, hi),
            kind,
        }
    }
}

/// A value that is either unique or has distinct one-sided limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sided<T> {
    Single(T),
    Split { left: T, right: T },
}

impl<T: Clone> Sided<T> {
    pub fn left(&self) -> T {
        match self {
            Sided::Single(v) => v.clone(),
            Sided::Split { left, .. } => left.clone(),
        }
    }

    pub fn right(&self) -> T {
        match self {
            Sided::Single(v) => v.clone(),
            Sided::Split { right, .. } => right.clone(),
        }
    }

    pub fn sides(&self) -> Vec<T> {
        match self {
            Sided::Single(v) => vec![v.clone()],
            Sided::Split { left, right } => vec![left.clone(), right.clone()],
        }
    }

    pub fn is_split(&self) -> bool {
        matches!(self, Sided::Split { .. })
    }

    pub fn map<U, F: Fn(T) -> U>(self, f: F) -> Sided<U> {
        match self {
            Sided::Single(v) => Sided::Single(f(v)),
            Sided::Split { left, right } => Sided::Split {
                left: f(left),
                right: f(right),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

pub(crate) fn agrees(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    if !(a.is_finite() && b.is_finite()) {
        return false;
    }
    (a - b).abs() <= JOIN_TOL * 1f64.max(a.abs()).max(b.abs())
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    domain: Interval,
    segments: Vec<Segment>,
    continuity: Continuity,
}

/// Piecewise profile with exact one-sided derivatives to order two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct RadialProfile {
    domain: Interval,
    segments: Vec<Segment>,
    continuity: Continuity,
}

impl TryFrom<RawProfile> for RadialProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        let p = RadialProfile::new(raw.segments)?;
        if p.domain != raw.domain {
            return Err(Error::Format(
                "domain does not match segment partition".into(),
            ));
        }
        Ok(p)
    }
}

impl From<RadialProfile> for RawProfile {
    fn from(p: RadialProfile) -> Self {
        RawProfile {
            domain: p.domain,
            segments: p.segments,
            continuity: p.continuity,
        }
    }
}

impl RadialProfile {
    /// Builds a profile from consecutive segments and classifies its
    /// smoothness. Value jumps are rejected.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first = segments.first().ok_or(Error::DomainEmpty)?;
        let domain = Interval::new(first.interval.lo, segments.last().unwrap().interval.hi);
        for (i, s) in segments.iter().enumerate() {
            let iv = s.interval;
            if !(iv.lo < iv.hi) || iv.lo.is_nan() {
                return Err(Error::InvalidProfile(format!(
                    "segment {i} has empty interval [{}, {}]",
                    iv.lo, iv.hi
                )));
            }
            if i + 1 < segments.len() && segments[i + 1].interval.lo != iv.hi {
                return Err(Error::InvalidProfile(format!(
                    "segments {i} and {} do not share a breakpoint",
                    i + 1
                )));
            }
        }
        let mut continuity = Continuity::C2;
        for w in segments.windows(2) {
            let b = w[0].interval.hi;
            let l = w[0].kind.jet(b);
            let r = w[1].kind.jet(b);
            if !agrees(l.v, r.v) {
                return Err(Error::InvalidProfile(format!(
                    "value jump at t = {b}: {} vs {}",
                    l.v, r.v
                )));
            }
            let class = if !agrees(l.d1, r.d1) {
                Continuity::C0
            } else if !(l.d2.is_finite() && r.d2.is_finite()) {
                Continuity::C1
            } else if !agrees(l.d2, r.d2) {
                Continuity::C1PiecewiseC2
            } else {
                Continuity::C2
            };
            continuity = continuity.min(class);
        }
        Ok(RadialProfile {
            domain,
            segments,
            continuity,
        })
    }

    pub fn single(lo: f64, hi: f64, kind: SegmentKind) -> Result<Self> {
        Self::new(vec![Segment::new(lo, hi, kind)])
    }

    pub fn constant(value: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::single(lo, hi, SegmentKind::Constant { value })
    }

    /// `t ↦ value + slope (t - lo)` on `[lo, hi]`.
    pub fn affine(value: f64, slope: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::single(
            lo,
            hi,
            SegmentKind::AffineDerivativeIntegral {
                center: lo,
                value,
                slope,
                curvature: 0.0,
            },
        )
    }

    /// C² quintic Hermite spline through `(t, v, d1, d2)` knots.
    pub fn hermite(knots: Vec<[f64; 4]>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidArgument("a spline needs two knots".into()));
        }
        if knots.windows(2).any(|w| !(w[0][0] < w[1][0])) {
            return Err(Error::InvalidArgument("spline knots must increase".into()));
        }
        let lo = knots[0][0];
        let hi = knots[knots.len() - 1][0];
        Self::single(lo, hi, SegmentKind::HermiteSpline { knots })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn continuity(&self) -> Continuity {
        self.continuity
    }

    /// Interior breakpoints in increasing order.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments[1..].iter().map(|s| s.interval.lo).collect()
    }

    /// Breakpoints at which the second derivative jumps.
    pub fn d2_breakpoints(&self) -> Vec<f64> {
        self.segments
            .windows(2)
            .filter_map(|w| {
                let b = w[0].interval.hi;
                let (l, r) = (w[0].kind.jet(b), w[1].kind.jet(b));
                (!agrees(l.d2, r.d2)).then_some(b)
            })
            .collect()
    }

    fn check(&self, t: f64) -> Result<()> {
        if self.domain.contains(t) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                t,
                lo: self.domain.lo,
                hi: self.domain.hi,
            })
        }
    }

    /// Index of the segment whose half-open interval `[lo, hi)` holds `t`
    /// (the last segment also owns its right end).
    pub fn segment_index(&self, t: f64) -> usize {
        let i = self.segments.partition_point(|s| s.interval.lo <= t);
        i.saturating_sub(1)
    }

    /// One-sided jet; `Side::Left` at a breakpoint uses the left formula.
    pub fn one_sided(&self, t: f64, side: Side) -> Result<Jet> {
        self.check(t)?;
        let i = self.segment_index(t);
        let i = if side == Side::Left && i > 0 && t == self.segments[i].interval.lo {
            i - 1
        } else {
            i
        };
        Ok(self.segments[i].kind.jet(t))
    }

    /// Full jet with both limits at breakpoints where any component differs.
    pub fn jet(&self, t: f64) -> Result<Sided<Jet>> {
        self.check(t)?;
        let i = self.segment_index(t);
        let right = self.segments[i].kind.jet(t);
        if i > 0 && t == self.segments[i].interval.lo {
            let left = self.segments[i - 1].kind.jet(t);
            if !(agrees(left.v, right.v) && agrees(left.d1, right.d1) && agrees(left.d2, right.d2))
            {
                return Ok(Sided::Split { left, right });
            }
        }
        Ok(Sided::Single(right))
    }

    /// Derivative of order 0, 1 or 2; a pair when the one-sided limits of
    /// that order differ.
    pub fn eval(&self, t: f64, order: usize) -> Result<Sided<f64>> {
        if order > 2 {
            return Err(Error::InvalidArgument(format!("order {order} > 2")));
        }
        Ok(match self.jet(t)? {
            Sided::Single(j) => Sided::Single(j.component(order)),
            Sided::Split { left, right } => {
                let (l, r) = (left.component(order), right.component(order));
                if agrees(l, r) {
                    Sided::Single(r)
                } else {
                    Sided::Split { left: l, right: r }
                }
            }
        })
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(self.one_sided(t, Side::Right)?.v)
    }

    /// Restriction to the sub-interval `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        self.check(lo)?;
        self.check(hi)?;
        let segs = self
            .segments
            .iter()
            .filter(|s| s.interval.hi > lo && s.interval.lo < hi)
            .map(|s| Segment::new(s.interval.lo.max(lo), s.interval.hi.min(hi), s.kind.clone()))
            .collect();
        Self::new(segs)
    }

    /// `t ↦ k·p(t/k)`; lengths and values scale together.
    pub fn rescaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "scale {k} must be positive"
            )));
        }
        let segs = self
            .segments
            .iter()
            .map(|s| {
                let kind = match &s.kind {
                    SegmentKind::Constant { value } => SegmentKind::Constant { value: k * value },
                    SegmentKind::SqrtQuadratic { lambda, a, offset } => {
                        SegmentKind::SqrtQuadratic {
                            lambda: *lambda,
                            a: k * k * a,
                            offset: k * offset,
                        }
                    }
                    other => SegmentKind::Scaled {
                        scale: k,
                        inner: Box::new(other.clone()),
                    },
                };
                Segment::new(k * s.interval.lo, k * s.interval.hi, kind)
            })
            .collect();
        Self::new(segs)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// CSV with columns `t, f, f', f'' (left), f'' (right)`.
    pub fn write_csv<W: Write>(&self, ts: &[f64], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "f", "f'", "f'' (left)", "f'' (right)"])?;
        for &t in ts {
            let j = self.jet(t)?;
            let (l, r) = (j.left(), j.right());
            w.write_record([t, r.v, r.d1, l.d2, r.d2].map(|x| format!("{x:e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `g_{λ,a}(t) = sqrt(λt² + a)` on `{t ≥ 0 : λt² + a > 0}`.
pub fn sqrt_quadratic(lambda: f64, a: f64) -> Result<RadialProfile> {
    if lambda <= 0.0 && a <= 0.0 {
        return Err(Error::DomainEmpty);
    }
    let lo = if a > 0.0 { 0.0 } else { (-a / lambda).sqrt() };
    // for λ < 0 the domain is open at the ellipse's end; keep the last
    // representable point strictly inside
    let hi = if lambda >= 0.0 {
        f64::INFINITY
    } else {
        (a / -lambda).sqrt() * (1.0 - f64::EPSILON)
    };
    RadialProfile::single(
        lo,
        hi,
        SegmentKind::SqrtQuadratic {
            lambda,
            a,
            offset: 0.0,
        },
    )
}

/// Antiderivative of `fprime` with `F(anchor_t) = anchor_value`.
pub fn integrate_derivative(
    fprime: &RadialProfile,
    anchor_t: f64,
    anchor_value: f64,
) -> Result<RadialProfile> {
    fprime.check(anchor_t)?;
    let mut kinds = Vec::with_capacity(fprime.segments.len());
    for s in &fprime.segments {
        let k = s.kind.antiderivative().ok_or_else(|| {
            Error::IntegrationError(format!(
                "no closed-form antiderivative for {}",
                s.kind.tag()
            ))
        })?;
        for end in [s.interval.lo, s.interval.hi] {
            if end.is_finite() && !k.jet(end).v.is_finite() {
                return Err(Error::IntegrationError(format!(
                    "non-integrable singularity at t = {end}"
                )));
            }
        }
        kinds.push(k);
    }
    let n = kinds.len();
    let ia = fprime.segment_index(anchor_t);
    let mut fixed: Vec<Option<SegmentKind>> = vec![None; n];
    let shift = |k: &SegmentKind, t: f64, target: f64| -> Result<SegmentKind> {
        k.shifted(target - k.jet(t).v)
            .ok_or_else(|| Error::IntegrationError("cannot shift antiderivative".into()))
    };
    fixed[ia] = Some(shift(&kinds[ia], anchor_t, anchor_value)?);
    for i in ia + 1..n {
        let b = fprime.segments[i].interval.lo;
        let target = fixed[i - 1].as_ref().unwrap().jet(b).v;
        fixed[i] = Some(shift(&kinds[i], b, target)?);
    }
    for i in (0..ia).rev() {
        let b = fprime.segments[i].interval.hi;
        let target = fixed[i + 1].as_ref().unwrap().jet(b).v;
        fixed[i] = Some(shift(&kinds[i], b, target)?);
    }
    let segs = fprime
        .segments
        .iter()
        .zip(fixed)
        .map(|(s, k)| Segment::new(s.interval.lo, s.interval.hi, k.unwrap()))
        .collect();
    RadialProfile::new(segs)
}

/// Result of a monotone inversion: the preimage and the inverse's slope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inversion {
    pub t: f64,
    pub derivative: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Increasing,
    Decreasing,
}

fn right_end(p: &RadialProfile, seg: &Segment, u_hint: Option<f64>, dir: Direction) -> f64 {
    if seg.interval.hi.is_finite() {
        return seg.interval.hi;
    }
    // unbounded end: walk out until the value passes u (or the range ends)
    let mut b = (2.0 * seg.interval.lo).max(1.0);
    if let Some(u) = u_hint {
        for _ in 0..2000 {
            let v = seg.kind.jet(b).v;
            let passed = match dir {
                Direction::Increasing => v >= u,
                Direction::Decreasing => v <= u,
            };
            if passed || !v.is_finite() || b > 1e300 {
                break;
            }
            b *= 2.0;
        }
    }
    let _ = p;
    b
}

fn direction(p: &RadialProfile) -> Result<Direction> {
    let mut dir: Option<Direction> = None;
    for s in &p.segments {
        let lo = s.interval.lo;
        let hi = right_end(p, s, None, Direction::Increasing);
        let probes = [0.25, 0.5, 0.75].map(|w| lo + w * (hi - lo));
        for t in probes {
            let d = s.kind.jet(t).d1;
            let here = if d > 0.0 {
                Direction::Increasing
            } else if d < 0.0 {
                Direction::Decreasing
            } else {
                return Err(Error::NotMonotone { t });
            };
            match dir {
                None => dir = Some(here),
                Some(x) if x != here => return Err(Error::NotMonotone { t }),
                _ => {}
            }
        }
        // equal end values: the piece is narrower than the rounding of its
        // values, which inversion skips
        let (vl, vh) = (s.kind.jet(lo).v, s.kind.jet(hi).v);
        let ok = match dir.unwrap() {
            Direction::Increasing => vh >= vl,
            Direction::Decreasing => vh <= vl,
        };
        if !ok {
            return Err(Error::NotMonotone { t: lo });
        }
    }
    dir.ok_or(Error::DomainEmpty)
}

/// Solves `p(t) = u` by bracketed safeguarded Newton. The reported inverse
/// slope is `1/p'(t)`, and `0` where `p'` is infinite.
pub fn invert_monotone(p: &RadialProfile, u: f64, tol: f64) -> Result<Inversion> {
    let dir = direction(p)?;
    let dom = p.domain;
    let at = |t: f64| p.value(t);
    let (vlo, vhi) = (at(dom.lo)?, {
        let last = p.segments.last().unwrap();
        let hi = right_end(p, last, Some(u), dir);
        last.kind.jet(hi).v
    });
    let (rmin, rmax) = match dir {
        Direction::Increasing => (vlo, vhi),
        Direction::Decreasing => (vhi, vlo),
    };
    let unbounded = !dom.hi.is_finite();
    let above = u > rmax && !(unbounded && dir == Direction::Increasing);
    let below = u < rmin && !(unbounded && dir == Direction::Decreasing);
    if !u.is_finite() || above || below {
        return Err(Error::OutOfRange { u });
    }
    for s in &p.segments {
        let lo = s.interval.lo;
        let hi = right_end(p, s, Some(u), dir);
        let (a, b) = (s.kind.jet(lo).v, s.kind.jet(hi).v);
        let (mn, mx) = if a <= b { (a, b) } else { (b, a) };
        if u >= mn && u <= mx {
            let f = |t: f64| s.kind.jet(t);
            let t = solve_monotone(&f, u, lo, hi, tol).ok_or(Error::OutOfRange { u })?;
            let d = s.kind.jet(t).d1;
            let derivative = if d.is_infinite() { 0.0 } else { 1.0 / d };
            return Ok(Inversion { t, derivative });
        }
    }
    Err(Error::OutOfRange { u })
}

/// Default tolerance `1e-12·max(1, |u|)`.
pub fn invert(p: &RadialProfile, u: f64) -> Result<Inversion> {
    invert_monotone(p, u, 1e-12 * u.abs().max(1.0))
}

fn inverse_kind(kind: &SegmentKind, lo: f64, hi: f64) -> SegmentKind {
    match kind {
        SegmentKind::SqrtQuadratic {
            lambda,
            a,
            offset: 0.0,
        } if *lambda > 0.0 && lo >= 0.0 => SegmentKind::SqrtQuadratic {
            lambda: 1.0 / lambda,
            a: -a / lambda,
            offset: 0.0,
        },
        SegmentKind::InverseSqrtDerivativeIntegral {
            log_sigma, offset, ..
        } => SegmentKind::AffineDerivativeIntegral {
            center: *offset,
            value: log_sigma.exp(),
            slope: 0.0,
            curvature: 1.0 / (8.0 * log_sigma.exp()),
        },
        SegmentKind::AffineDerivativeIntegral {
            center,
            value,
            slope,
            curvature: 0.0,
        } => SegmentKind::AffineDerivativeIntegral {
            center: *value,
            value: *center,
            slope: 1.0 / slope,
            curvature: 0.0,
        },
        other => SegmentKind::InverseOf {
            forward: Box::new(other.clone()),
            lo,
            hi,
        },
    }
}

/// Inverse function as a profile over the range of a strictly monotone `p`.
pub fn inverse_profile(p: &RadialProfile) -> Result<RadialProfile> {
    let dir = direction(p)?;
    let mut segs = Vec::with_capacity(p.segments.len());
    for s in &p.segments {
        let (lo, hi) = (s.interval.lo, s.interval.hi);
        let a = s.kind.jet(lo).v;
        let b = if hi.is_finite() {
            s.kind.jet(hi).v
        } else {
            f64::INFINITY
        };
        let (ulo, uhi) = if a <= b { (a, b) } else { (b, a) };
        if ulo == uhi {
            // collapsed in double precision; nothing to invert
            continue;
        }
        segs.push(Segment::new(ulo, uhi, inverse_kind(&s.kind, lo, hi)));
    }
    if dir == Direction::Decreasing {
        segs.reverse();
    }
    // glue exact breakpoints so the partition is consistent
    for i in 1..segs.len() {
        segs[i].interval.lo = segs[i - 1].interval.hi;
    }
    RadialProfile::new(segs)
}

fn check_positive(p: &RadialProfile) -> Result<()> {
    for s in &p.segments {
        let lo = s.interval.lo;
        let hi = if s.interval.hi.is_finite() {
            s.interval.hi
        } else {
            lo + 1.0
        };
        for w in [0.0, 0.5, 1.0] {
            let t = lo + w * (hi - lo);
            let v = s.kind.jet(t).v;
            if !(v > 0.0) {
                return Err(Error::NotPositive { t, value: v });
            }
        }
    }
    Ok(())
}

/// `θ(s) = f(√s)²`, defined on the squared domain.
pub fn theta_of_f(f: &RadialProfile) -> Result<RadialProfile> {
    check_positive(f)?;
    let segs = f
        .segments
        .iter()
        .map(|s| {
            let kind = match &s.kind {
                SegmentKind::Constant { value } => SegmentKind::Constant {
                    value: value * value,
                },
                SegmentKind::SqrtQuadratic {
                    lambda,
                    a,
                    offset: 0.0,
                } => SegmentKind::AffineDerivativeIntegral {
                    center: 0.0,
                    value: *a,
                    slope: *lambda,
                    curvature: 0.0,
                },
                SegmentKind::RootOfSquared { inner } => (**inner).clone(),
                other => SegmentKind::Squared {
                    inner: Box::new(other.clone()),
                },
            };
            Segment::new(s.interval.lo.powi(2), s.interval.hi.powi(2), kind)
        })
        .collect();
    RadialProfile::new(segs)
}

/// `f(t) = √θ(t²)`, defined on the root domain.
pub fn f_of_theta(theta: &RadialProfile) -> Result<RadialProfile> {
    check_positive(theta)?;
    let segs = theta
        .segments
        .iter()
        .map(|s| {
            let kind = match &s.kind {
                SegmentKind::Constant { value } => SegmentKind::Constant {
                    value: value.sqrt(),
                },
                SegmentKind::AffineDerivativeIntegral {
                    center,
                    value,
                    slope,
                    curvature: 0.0,
                } => SegmentKind::SqrtQuadratic {
                    lambda: *slope,
                    a: value - slope * center,
                    offset: 0.0,
                },
                SegmentKind::Squared { inner } => (**inner).clone(),
                other => SegmentKind::RootOfSquared {
                    inner: Box::new(other.clone()),
                },
            };
            Segment::new(s.interval.lo.sqrt(), s.interval.hi.sqrt(), kind)
        })
        .collect();
    RadialProfile::new(segs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_quadratic_values() {
        let g = sqrt_quadratic(2.0, 1.0).unwrap();
        assert!((g.value(1.0).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        let j = g.jet(0.5).unwrap().right();
        assert!((j.d1 - 0.816_496_580_927_726).abs() < 1e-14);
        assert!((j.d2 - 1.088_662_107_903_635).abs() < 1e-14);
        let cone = sqrt_quadratic(1.0, 0.0).unwrap();
        let j = cone.jet(2.5).unwrap().right();
        assert_eq!((j.v, j.d1, j.d2), (2.5, 1.0, 0.0));
    }

    #[test]
    fn empty_domain_is_rejected() {
        assert_eq!(sqrt_quadratic(-1.0, -1.0), Err(Error::DomainEmpty));
        assert_eq!(sqrt_quadratic(0.0, 0.0), Err(Error::DomainEmpty));
    }

    #[test]
    fn out_of_domain() {
        let c = RadialProfile::constant(5.0, 0.0, 10.0).unwrap();
        assert_eq!(c.eval(3.0, 1).unwrap(), Sided::Single(0.0));
        assert!(matches!(c.eval(11.0, 0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn breakpoint_reports_both_second_derivatives() {
        // |t|-like kink smoothed to C1: t^2/2 then t - 1/2
        let p = RadialProfile::new(vec![
            Segment::new(
                0.0,
                1.0,
                SegmentKind::AffineDerivativeIntegral {
                    center: 0.0,
                    value: 0.0,
                    slope: 0.0,
                    curvature: 1.0,
                },
            ),
            Segment::new(
                1.0,
                2.0,
                SegmentKind::AffineDerivativeIntegral {
                    center: 1.0,
                    value: 0.5,
                    slope: 1.0,
                    curvature: 0.0,
                },
            ),
        ])
        .unwrap();
        assert_eq!(p.continuity(), Continuity::C1PiecewiseC2);
        assert_eq!(p.eval(1.0, 1).unwrap(), Sided::Single(1.0));
        assert_eq!(
            p.eval(1.0, 2).unwrap(),
            Sided::Split {
                left: 1.0,
                right: 0.0
            }
        );
    }

    #[test]
    fn value_jump_is_invalid() {
        let r = RadialProfile::new(vec![
            Segment::new(0.0, 1.0, SegmentKind::Constant { value: 0.0 }),
            Segment::new(1.0, 2.0, SegmentKind::Constant { value: 1.0 }),
        ]);
        assert!(matches!(r, Err(Error::InvalidProfile(_))));
    }

    #[test]
    fn integrate_zero_derivative() {
        let z = RadialProfile::constant(0.0, 0.0, 5.0).unwrap();
        let f = integrate_derivative(&z, 1.0, 7.0).unwrap();
        for t in [0.0, 2.0, 5.0] {
            assert_eq!(f.value(t).unwrap(), 7.0);
        }
    }

    #[test]
    fn integrate_sqrt_slope_reproduces_g() {
        let gp = RadialProfile::single(
            0.5,
            f64::INFINITY,
            SegmentKind::SqrtQuadraticSlope {
                lambda: 2.0,
                a: 1.0,
            },
        )
        .unwrap();
        let f = integrate_derivative(&gp, 0.5, 1.5f64.sqrt()).unwrap();
        let g = sqrt_quadratic(2.0, 1.0).unwrap();
        for i in 0..1000 {
            let t = 0.5 + 9.5 * i as f64 / 999.0;
            assert!((f.value(t).unwrap() - g.value(t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn inversion_examples() {
        let id = RadialProfile::affine(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!((invert(&id, 0.3).unwrap().t - 0.3).abs() < 1e-15);
        let g = sqrt_quadratic(2.0, 1.0).unwrap();
        let inv = invert(&g, 3f64.sqrt()).unwrap();
        assert!((inv.t - 1.0).abs() < 1e-12);
        assert!(matches!(invert(&g, 0.5), Err(Error::OutOfRange { .. })));
        let bump = RadialProfile::single(
            -1.0,
            1.0,
            SegmentKind::AffineDerivativeIntegral {
                center: 0.0,
                value: 0.0,
                slope: 0.0,
                curvature: 1.0,
            },
        )
        .unwrap();
        assert!(matches!(invert(&bump, 0.1), Err(Error::NotMonotone { .. })));
    }

    #[test]
    fn inverse_profile_of_g_is_closed_form() {
        let g = sqrt_quadratic(2.0, 1.0).unwrap();
        let h = inverse_profile(&g).unwrap();
        assert_eq!(h.domain().lo, 1.0);
        let j = h.jet(3f64.sqrt()).unwrap().right();
        assert!((j.v - 1.0).abs() < 1e-14);
        assert!(matches!(
            h.segments()[0].kind,
            SegmentKind::SqrtQuadratic { .. }
        ));
    }

    #[test]
    fn theta_f_transforms_are_exact_for_quadrics() {
        let g = sqrt_quadratic(0.5, 1.0).unwrap();
        let th = theta_of_f(&g).unwrap();
        let j = th.jet(4.0).unwrap().right();
        assert_eq!((j.v, j.d1, j.d2), (3.0, 0.5, 0.0));
        let c = RadialProfile::constant(3.0, 0.5, 2.0).unwrap();
        let tc = theta_of_f(&c).unwrap();
        assert_eq!(tc.jet(1.0).unwrap().right(), Jet::new(9.0, 0.0, 0.0));
        let back = f_of_theta(&th).unwrap();
        assert_eq!(back, g);
        let neg = RadialProfile::constant(-1.0, 0.0, 1.0).unwrap();
        assert!(matches!(theta_of_f(&neg), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn json_round_trip_with_unbounded_domain() {
        let g = sqrt_quadratic(2.0, 1.0).unwrap();
        let s = g.to_json().unwrap();
        assert!(s.contains("null"));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["segments"][0]["kind"], "sqrt_quadratic");
        assert!(v["segments"][0]["coeffs"].is_object());
        assert_eq!(v["continuity"], "C2");
        assert_eq!(RadialProfile::from_json(&s).unwrap(), g);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = sqrt_quadratic(2.0, 1.0).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&[0.0, 1.0], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,f,f',f'' (left),f'' (right)"));
        assert_eq!(text.lines().count(), 3);
    }
}
