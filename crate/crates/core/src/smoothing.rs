//! C² smoothing of piecewise-C² profiles.
//!
//! On a window `[b − r, b + r]` around a breakpoint the second derivative is
//! replaced by `(1−Q)L″ + QR″ + Σ wᵢBᵢ`, where `L`, `R` are the
//! continuations of the neighbouring formulas and `Q` is a quintic ramp on
//! the middle half of the window. Two correction weights make the double
//! integral land on `R`'s value and slope at `b + r`, so the profile is
//! bit-identical outside the windows and C² across their edges.
//!
//! No blend with `L″ ≤ f″ ≤ R″` can match both value and slope across a
//! curvature jump, so the corrections pick a side ([`Bias`]): by default
//! they stay below the larger one-sided curvature (a dip on the side of the
//! smaller one), which only adds margin to conditions that grow as `f″`
//! drops; the mirrored choice stays above the smaller curvature, for (9).
//! Slope jumps get a symmetric bump carrying the missing slope.
//!
//! Windows whose neighbouring formulas cannot be continued across the
//! window (pieces collapsed below double-precision resolution), or whose
//! one-sided curvature is singular on the window's scale, are skipped.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::{
    agrees, window_basis, MollifiedWindow, RadialProfile, Segment, SegmentKind, Side,
};
use crate::pseudoconvexity::{certification_grid, sweep_points, Condition, VerificationReport};
use crate::quadrature::composite;

const PANELS: usize = 64;

/// Per-window diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowInfo {
    pub breakpoint: f64,
    pub start: f64,
    pub end: f64,
    /// `R″(b) − L″(b)`.
    pub jump: f64,
    /// `R′(b) − L′(b)`.
    pub slope_jump: f64,
    pub weights: [f64; 5],
    /// Largest `|smoothed − original|` in value and slope inside the window.
    pub value_shift: f64,
    pub slope_shift: f64,
    /// Largest excursion of `f″` above `max(L″, R″)` and below `min(L″, R″)`.
    pub overshoot: f64,
    pub undershoot: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Smoothed {
    pub profile: RadialProfile,
    pub radius: f64,
    pub windows: Vec<WindowInfo>,
    /// Breakpoints left as they were because a continuation is unavailable.
    pub skipped: Vec<f64>,
}

/// Breakpoints where the slope or the curvature jumps with finite one-sided
/// jets.
pub fn smoothable_breakpoints(p: &RadialProfile) -> Vec<f64> {
    p.segments()
        .windows(2)
        .filter_map(|w| {
            let b = w[0].interval.hi;
            let (l, r) = (w[0].kind.jet(b), w[1].kind.jet(b));
            let ok = l.is_finite() && r.is_finite() && !(agrees(l.d1, r.d1) && agrees(l.d2, r.d2));
            ok.then_some(b)
        })
        .collect()
}

/// Distance from each smoothable breakpoint to its nearest neighbouring
/// breakpoint or domain end.
pub fn local_gaps(p: &RadialProfile) -> Vec<(f64, f64)> {
    let targets = smoothable_breakpoints(p);
    let d = p.domain();
    let mut marks = vec![d.lo];
    marks.extend(p.breakpoints());
    marks.push(d.hi);
    let mut out = Vec::with_capacity(targets.len());
    for (i, m) in marks.iter().enumerate() {
        if targets.contains(m) {
            out.push((*m, (m - marks[i - 1]).min(marks[i + 1] - m)));
        }
    }
    out
}

/// Smallest of the [`local_gaps`].
pub fn minimal_gap(p: &RadialProfile) -> Option<f64> {
    local_gaps(p).into_iter().map(|(_, g)| g).reduce(f64::min)
}

/// `10⁻³ ×` the minimal breakpoint gap.
pub fn default_radius(p: &RadialProfile) -> Option<f64> {
    minimal_gap(p).map(|g| 1e-3 * g)
}

/// Window half-width policy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Radius {
    /// The same half-width at every breakpoint.
    Absolute(f64),
    /// A fraction of each breakpoint's own gap; needed when breakpoints sit
    /// at wildly different scales.
    Relative(f64),
}

impl Radius {
    pub const DEFAULT: Radius = Radius::Relative(1e-3);

    pub fn halved(self) -> Radius {
        match self {
            Radius::Absolute(r) => Radius::Absolute(0.5 * r),
            Radius::Relative(r) => Radius::Relative(0.5 * r),
        }
    }
}

/// `(∫Bᵢ, ∫(1−s)Bᵢ)` on the unit window.
fn basis_moments(i: usize) -> (f64, f64) {
    (
        composite(|s| window_basis(i, s), 0.0, 1.0, PANELS),
        composite(|s| (1.0 - s) * window_basis(i, s), 0.0, 1.0, PANELS),
    )
}

fn below_resolution(r: f64, parts: &[f64]) -> bool {
    r.abs() <= 8.0 * f64::EPSILON * parts.iter().map(|p| p.abs()).sum::<f64>()
}

const SINGULAR: f64 = 1e6;

/// Slope mismatches below 1e-8 relative are rounding of a C¹ join.
fn slope_jump(l: f64, r: f64) -> bool {
    (l - r).abs() > 1e-8 * l.abs().max(r.abs()).max(1.0)
}

/// Side of the one-sided curvatures the corrections may leave.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Bias {
    /// Stay below `max(L″, R″)`, dipping on the smaller side: for conditions
    /// whose margin grows as `f″` drops ((2), (6), (8), the cap).
    #[default]
    Below,
    /// Stay above `min(L″, R″)`, bulging on the larger side: for (9).
    Above,
}

impl Bias {
    pub fn for_condition(cond: Condition) -> Bias {
        match cond {
            Condition::Ineq9 => Bias::Above,
            _ => Bias::Below,
        }
    }
}

fn build_window(
    left: &SegmentKind,
    right: &SegmentKind,
    b: f64,
    s0: f64,
    s1: f64,
    bias: Bias,
) -> Option<MollifiedWindow> {
    let w = s1 - s0;
    let zero = [0.0; 5];
    let base = |t: f64| MollifiedWindow::blend_d2(s0, s1, left, right, &zero, t);
    let i1 = composite(base, s0, s1, PANELS);
    let i2 = composite(|t| (s1 - t) * base(t), s0, s1, PANELS);
    let (jl, jr) = (left.jet(s0), right.jet(s1));
    if !(i1.is_finite() && i2.is_finite() && jl.is_finite() && jr.is_finite()) {
        return None;
    }
    // residuals below rounding resolution carry no information; drop them
    // rather than amplify noise by 1/W or 1/W²
    let mut rd = jr.d1 - jl.d1 - i1;
    if below_resolution(rd, &[jr.d1, jl.d1, i1]) {
        rd = 0.0;
    }
    let mut rv = jr.v - jl.v - jl.d1 * w - i2;
    if below_resolution(rv, &[jr.v, jl.v, jl.d1 * w, i2]) {
        rv = 0.0;
    }
    let (lb, rb) = (left.jet(b), right.jet(b));
    let slope_scale = lb.d1.abs().max(rb.d1.abs()).max(1.0);
    // a side whose curvature turns the slope by more than 10⁶ over the window
    // sits on a singularity; a blend there is pure rounding noise
    if lb.d2.abs().max(rb.d2.abs()) * w > SINGULAR * slope_scale {
        return None;
    }
    let pair = if slope_jump(lb.d1, rb.d1) {
        [0, 1]
    } else if (rb.d2 > lb.d2) == (bias == Bias::Below) {
        [2, 3]
    } else {
        [2, 4]
    };
    let (m0, n0) = basis_moments(pair[0]);
    let (m1, n1) = basis_moments(pair[1]);
    // [m0 W, m1 W; n0 W², n1 W²] · [w0, w1] = [rd, rv]
    let det = m0 * n1 - m1 * n0;
    let x = rd / w;
    let y = rv / (w * w);
    let mut weights = [0.0; 5];
    weights[pair[0]] = (x * n1 - m1 * y) / det;
    weights[pair[1]] = (m0 * y - n0 * x) / det;
    let d2 = |t: f64| MollifiedWindow::blend_d2(s0, s1, left, right, &weights, t);
    let mut anchors = Vec::with_capacity(PANELS + 1);
    let (mut v, mut d) = (jl.v, jl.d1);
    anchors.push([s0, v, d]);
    for i in 0..PANELS {
        let a = s0 + w * i as f64 / PANELS as f64;
        let e = if i + 1 == PANELS {
            s1
        } else {
            s0 + w * (i + 1) as f64 / PANELS as f64
        };
        v += d * (e - a) + composite(|x| (e - x) * d2(x), a, e, 1);
        d += composite(d2, a, e, 1);
        anchors.push([e, v, d]);
    }
    Some(MollifiedWindow {
        start: s0,
        end: s1,
        left: left.clone(),
        right: right.clone(),
        weights,
        anchors,
    })
}

fn window_info(
    b: f64,
    left: &SegmentKind,
    right: &SegmentKind,
    win: &MollifiedWindow,
) -> WindowInfo {
    let kind = SegmentKind::MollifiedSpline(Box::new(win.clone()));
    let (mut vs, mut ds, mut over, mut under) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..=256 {
        let t = win.start + (win.end - win.start) * k as f64 / 256.0;
        let (l, r) = (left.jet(t), right.jet(t));
        let orig = if t < b { l } else { r };
        let new = kind.jet(t);
        vs = vs.max((new.v - orig.v).abs());
        ds = ds.max((new.d1 - orig.d1).abs());
        over = over.max(new.d2 - l.d2.max(r.d2));
        under = under.max(l.d2.min(r.d2) - new.d2);
    }
    let (lb, rb) = (left.jet(b), right.jet(b));
    WindowInfo {
        breakpoint: b,
        start: win.start,
        end: win.end,
        jump: rb.d2 - lb.d2,
        slope_jump: rb.d1 - lb.d1,
        weights: win.weights,
        value_shift: vs,
        slope_shift: ds,
        overshoot: over,
        undershoot: under,
    }
}

/// Replaces the second derivative near every smoothable breakpoint on a
/// centred window of half-width `radius`.
pub fn mollify_breakpoints(p: &RadialProfile, radius: f64) -> Result<Smoothed> {
    mollify(p, Radius::Absolute(radius))
}

pub fn mollify(p: &RadialProfile, radius: Radius) -> Result<Smoothed> {
    mollify_with(p, radius, Bias::Below)
}

pub fn mollify_with(p: &RadialProfile, radius: Radius, bias: Bias) -> Result<Smoothed> {
    let gaps = local_gaps(p);
    let nominal = match radius {
        Radius::Absolute(r) | Radius::Relative(r) => r,
    };
    if gaps.is_empty() {
        return Ok(Smoothed {
            profile: p.clone(),
            radius: nominal,
            windows: Vec::new(),
            skipped: Vec::new(),
        });
    }
    if !(nominal > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius {nominal} must be positive"
        )));
    }
    let mut radii = Vec::with_capacity(gaps.len());
    for &(b, gap) in &gaps {
        let r = match radius {
            Radius::Absolute(r) => r,
            Radius::Relative(k) => k * gap,
        };
        if r >= 0.5 * gap {
            return Err(Error::RadiusTooLarge(format!(
                "radius {r:e} at {b:e} is not below half the breakpoint gap {gap:e}"
            )));
        }
        radii.push((b, r));
    }
    let segs = p.segments();
    let mut out: Vec<Segment> = Vec::with_capacity(segs.len() + radii.len());
    let mut infos = Vec::with_capacity(radii.len());
    let mut skipped = Vec::new();
    let mut start = segs[0].interval.lo;
    for (i, s) in segs.iter().enumerate() {
        let b = s.interval.hi;
        let target = if i + 1 < segs.len() {
            radii.iter().find(|(t, _)| *t == b).map(|(_, r)| *r)
        } else {
            None
        };
        let window = match target {
            Some(r) => {
                let (s0, s1) = (b - r, b + r);
                if !(s0 < b && b < s1) {
                    return Err(Error::RadiusTooLarge(format!(
                        "radius {r:e} is below the resolution at {b:e}"
                    )));
                }
                let w = build_window(&s.kind, &segs[i + 1].kind, b, s0, s1, bias);
                if w.is_none() {
                    skipped.push(b);
                }
                w
            }
            None => None,
        };
        let end = window.as_ref().map_or(b, |w| w.start);
        if !(end > start) {
            return Err(Error::RadiusTooLarge(format!(
                "window at {b:e} leaves no room for the segment starting at {start:e}"
            )));
        }
        out.push(Segment::new(start, end, s.kind.clone()));
        start = end;
        if let Some(win) = window {
            infos.push(window_info(b, &s.kind, &segs[i + 1].kind, &win));
            start = win.end;
            out.push(Segment::new(
                win.start,
                win.end,
                SegmentKind::MollifiedSpline(Box::new(win)),
            ));
        }
    }
    Ok(Smoothed {
        profile: RadialProfile::new(out)?,
        radius: nominal,
        windows: infos,
        skipped,
    })
}

/// Sweep grid shared by a profile and its smoothing: both certification
/// grids plus dense points inside every window.
pub fn comparison_grid(
    before: &RadialProfile,
    after: &Smoothed,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Vec<f64>> {
    let mut g = certification_grid(before, lo, hi, n)?;
    g.extend(certification_grid(&after.profile, lo, hi, n)?);
    for w in &after.windows {
        for k in 0..=64 {
            g.push(w.start + (w.end - w.start) * k as f64 / 64.0);
        }
    }
    g.retain(|t| *t >= lo && *t <= hi);
    g.sort_by(f64::total_cmp);
    g.dedup();
    Ok(g)
}

/// Result of smoothing followed by re-certification.
#[derive(Clone, Debug)]
pub struct SmoothingOutcome {
    pub smoothed: Smoothed,
    pub before: VerificationReport,
    pub after: VerificationReport,
    /// `max(0, before − after) / before` on the oriented minimum margins.
    pub margin_loss: f64,
    pub halvings: usize,
    pub accepted: bool,
}

fn loss(before: f64, after: f64) -> f64 {
    if before > 0.0 {
        ((before - after) / before).max(0.0)
    } else {
        f64::INFINITY
    }
}

/// Smooths with `radius` and re-certifies `cond` on `[lo, hi]`, halving the
/// radius up to six times until the smoothed profile passes with less than
/// 10% margin loss.
pub fn smooth_and_certify(
    p: &RadialProfile,
    cond: Condition,
    lo: f64,
    hi: f64,
    n: usize,
    radius: Radius,
) -> Result<SmoothingOutcome> {
    let mut r = radius;
    let mut halvings = 0;
    loop {
        let outcome = match mollify_with(p, r, Bias::for_condition(cond)) {
            Ok(s) => {
                let grid = comparison_grid(p, &s, lo, hi, n)?;
                let before = sweep_points(p, cond, &grid)?.report();
                let after = sweep_points(&s.profile, cond, &grid)?.report();
                let margin_loss = loss(before.min_margin, after.min_margin);
                let accepted = after.passed && margin_loss < 0.1;
                Some(SmoothingOutcome {
                    smoothed: s,
                    before,
                    after,
                    margin_loss,
                    halvings,
                    accepted,
                })
            }
            Err(Error::RadiusTooLarge(_)) if halvings < 6 => None,
            Err(e) => return Err(e),
        };
        match outcome {
            Some(o) if o.accepted || halvings == 6 => return Ok(o),
            _ => {
                r = r.halved();
                halvings += 1;
            }
        }
    }
}

/// Worst margin loss inside each window, measured against the unsmoothed
/// profile on the window itself (both one-sided limits at the breakpoint).
pub fn window_losses(p: &RadialProfile, s: &Smoothed, cond: Condition) -> Result<Vec<f64>> {
    s.windows
        .iter()
        .map(|w| {
            let mut grid: Vec<f64> = (0..=256)
                .map(|k| w.start + (w.end - w.start) * k as f64 / 256.0)
                .collect();
            grid.push(w.breakpoint);
            grid.sort_by(f64::total_cmp);
            grid.dedup();
            let before = sweep_points(p, cond, &grid)?.min_margin().0;
            let after = sweep_points(&s.profile, cond, &grid)?.min_margin().0;
            Ok((before - after).max(0.0))
        })
        .collect()
}

/// Convenience: one-sided second derivatives at every window edge.
pub fn edge_curvature_mismatch(s: &Smoothed) -> Result<f64> {
    let mut worst = 0.0f64;
    for w in &s.windows {
        for e in [w.start, w.end] {
            let l = s.profile.one_sided(e, Side::Left)?.d2;
            let r = s.profile.one_sided(e, Side::Right)?.d2;
            worst = worst.max((l - r).abs() / 1f64.max(l.abs()).max(r.abs()));
        }
    }
    Ok(worst)
}
