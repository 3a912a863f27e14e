//! Pointwise and grid certification of the radial pseudoconvexity
//! inequalities.
//!
//! θ-form at `s = |x|²`:  `θ′ < 1` and `2sθθ″ < (1−θ′)(sθ′² + θ)`.
//! f-form at `t = |x|`:   `ff′/t < 1` and `f(f″ + f′³/t) < 1`.
//! Both strict means `{|y| < f(|x|)}` is strongly pseudoconvex along the
//! boundary; both reversed means `{|y| > f(|x|)}` is. A margin is always
//! `rhs − lhs`, so positive margins favour the inner side.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::profiles::{square_transport, Jet, RadialProfile, Sided};

/// Margins above `STRICT_TOL·scale` count as strict.
pub const STRICT_TOL: f64 = 1e-12;
/// Margins within `EQUALITY_TOL·scale` count as equality.
pub const EQUALITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Verdict {
    StrictHolds,
    ReverseHolds,
    Equality(f64),
    Violated,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::StrictHolds => "StrictHolds",
            Verdict::ReverseHolds => "ReverseHolds",
            Verdict::Equality(_) => "Equality",
            Verdict::Violated => "Violated",
        }
    }

    pub fn same_kind(&self, other: &Verdict) -> bool {
        self.name() == other.name()
    }

    /// The verdict seen from the other side of the hypersurface.
    pub fn swapped(&self) -> Verdict {
        match self {
            Verdict::StrictHolds => Verdict::ReverseHolds,
            Verdict::ReverseHolds => Verdict::StrictHolds,
            v => *v,
        }
    }
}

impl<T: Serialize> Serialize for Sided<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            Sided::Single(v) => v.serialize(s),
            Sided::Split { left, right } => {
                let mut st = s.serialize_struct("Split", 2)?;
                st.serialize_field("left", left)?;
                st.serialize_field("right", right)?;
                st.end()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

impl Inequality {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        let tol = STRICT_TOL * Self::scale_of(lhs, rhs);
        let verdict = if margin > tol {
            Verdict::StrictHolds
        } else if margin < -tol {
            Verdict::ReverseHolds
        } else {
            Verdict::Equality(tol)
        };
        Inequality {
            lhs,
            rhs,
            margin,
            verdict,
        }
    }

    fn scale_of(lhs: f64, rhs: f64) -> f64 {
        1f64.max(lhs.abs()).max(rhs.abs())
    }

    pub fn scale(&self) -> f64 {
        Self::scale_of(self.lhs, self.rhs)
    }
}

/// Both inequalities of a system at one point (one side of a breakpoint).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SideReport {
    pub first: Inequality,
    pub second: Inequality,
    /// ODE residual `lhs₂ − rhs₂`.
    pub residual: f64,
    pub verdict: Verdict,
}

impl SideReport {
    pub fn new(first: Inequality, second: Inequality) -> Self {
        let ineqs = [first, second];
        let verdict = if ineqs.iter().all(|q| q.verdict == Verdict::StrictHolds) {
            Verdict::StrictHolds
        } else if ineqs.iter().all(|q| q.verdict == Verdict::ReverseHolds) {
            Verdict::ReverseHolds
        } else {
            let in_band = |q: &Inequality| q.margin.abs() <= EQUALITY_TOL * q.scale();
            let outside: Vec<f64> = ineqs
                .iter()
                .filter(|q| !in_band(q))
                .map(|q| q.margin)
                .collect();
            let same_sign = outside.iter().all(|m| *m > 0.0) || outside.iter().all(|m| *m < 0.0);
            if outside.len() < ineqs.len() && same_sign {
                Verdict::Equality(EQUALITY_TOL)
            } else {
                Verdict::Violated
            }
        };
        SideReport {
            first,
            second,
            residual: second.lhs - second.rhs,
            verdict,
        }
    }

    pub fn margins(&self) -> [f64; 2] {
        [self.first.margin, self.second.margin]
    }
}

/// Which system a sweep evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Condition {
    /// θ-form, inner side strict.
    Ineq2,
    /// f-form, inner side strict.
    Ineq6,
    /// Same system as `Ineq6`, as restated for the handles.
    Ineq8,
    /// f-form reversed: outer side strict.
    Ineq9,
    /// `ḣ < λ₁` and `2tḧ + ḣ < λ₁` for the quadratic cap.
    Cap { lambda1: f64 },
}

impl Condition {
    pub fn expected(&self) -> Verdict {
        match self {
            Condition::Ineq9 => Verdict::ReverseHolds,
            _ => Verdict::StrictHolds,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Condition::Ineq2 => "2".into(),
            Condition::Ineq6 => "6".into(),
            Condition::Ineq8 => "8".into(),
            Condition::Ineq9 => "9".into(),
            Condition::Cap { .. } => "cap".into(),
        }
    }

    fn evaluate(&self, j: Jet, t: f64) -> Result<SideReport> {
        match self {
            Condition::Ineq2 => Ok(theta_side(j, t)),
            Condition::Ineq6 | Condition::Ineq8 | Condition::Ineq9 => f_side_or_origin(j, t),
            Condition::Cap { lambda1 } => Ok(SideReport::new(
                Inequality::new(j.d1, *lambda1),
                Inequality::new(2.0 * t * j.d2 + j.d1, *lambda1),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub t: f64,
    pub report: Sided<SideReport>,
}

impl ConditionReport {
    pub fn sides(&self) -> Vec<SideReport> {
        self.report.sides()
    }

    /// Verdict shared by both sides, or `Violated` if they disagree.
    pub fn verdict(&self) -> Verdict {
        let sides = self.sides();
        let v = sides[0].verdict;
        if sides.iter().all(|s| s.verdict.same_kind(&v)) {
            v
        } else {
            Verdict::Violated
        }
    }
}

/// θ-form system from a jet at `s`; at `s = 0` the `sθθ″` term vanishes.
pub fn theta_side(j: Jet, s: f64) -> SideReport {
    let lhs2 = if s == 0.0 { 0.0 } else { 2.0 * s * j.v * j.d2 };
    SideReport::new(
        Inequality::new(j.d1, 1.0),
        Inequality::new(lhs2, (1.0 - j.d1) * (s * j.d1 * j.d1 + j.v)),
    )
}

/// f-form system from a jet at `t > 0`.
pub fn f_side(j: Jet, t: f64) -> SideReport {
    SideReport::new(
        Inequality::new(j.v * j.d1 / t, 1.0),
        Inequality::new(j.v * (j.d2 + j.d1 * j.d1 * j.d1 / t), 1.0),
    )
}

/// f-form, delegating `t = 0` to the θ-form at `s = 0` and mapping the
/// second margin back by `1/f²`.
fn f_side_or_origin(j: Jet, t: f64) -> Result<SideReport> {
    if t > 0.0 {
        return Ok(f_side(j, t));
    }
    if j.d1 != 0.0 {
        return Err(Error::InvalidProfile(
            "f′(0) must vanish for a smooth hypersurface at x = 0".into(),
        ));
    }
    let th = theta_side(square_transport(j, 0.0), 0.0);
    let f2 = j.v * j.v;
    Ok(SideReport::new(
        th.first,
        Inequality::new(th.second.lhs / f2, th.second.rhs / f2),
    ))
}

fn positive_jet(p: &RadialProfile, t: f64) -> Result<Sided<Jet>> {
    let j = p.jet(t)?;
    for side in j.sides() {
        if !(side.v > 0.0) {
            return Err(Error::NotPositive { t, value: side.v });
        }
    }
    Ok(j)
}

fn report_for(p: &RadialProfile, t: f64, cond: Condition) -> Result<ConditionReport> {
    let report = match positive_jet(p, t)? {
        Sided::Single(j) => Sided::Single(cond.evaluate(j, t)?),
        Sided::Split { left, right } => Sided::Split {
            left: cond.evaluate(left, t)?,
            right: cond.evaluate(right, t)?,
        },
    };
    Ok(ConditionReport { t, report })
}

/// Both θ-form inequalities, their reverses, and the degenerate-ODE residual
/// `2sθθ″ − (1−θ′)(sθ′² + θ)` at `s`.
pub fn theta_condition(theta: &RadialProfile, s: f64) -> Result<ConditionReport> {
    report_for(theta, s, Condition::Ineq2)
}

/// f-form report at `t > 0`; residual is `f(f″ + f′³/t) − 1`.
pub fn f_condition(f: &RadialProfile, t: f64) -> Result<ConditionReport> {
    if t == 0.0 {
        let d = f.domain();
        return Err(Error::OutOfDomain {
            t,
            lo: d.lo,
            hi: d.hi,
        });
    }
    report_for(f, t, Condition::Ineq8)
}

/// Cap conditions for the quadratic handle's `h`.
pub fn cap_condition(h: &RadialProfile, t: f64, lambda1: f64) -> Result<ConditionReport> {
    let report = h.jet(t)?.map(|j| {
        Condition::Cap { lambda1 }
            .evaluate(j, t)
            .expect("cap conditions are total")
    });
    Ok(ConditionReport { t, report })
}

/// Grid used for certification on `[lo, hi]`: `n` uniform points, every
/// breakpoint inside, geometric refinement towards each segment end
/// (`a + w·10⁻ᵏ`, `b − w·10⁻ᵏ`, k = 1..10), and log-spaced points on
/// segments spanning more than three decades.
pub fn certification_grid(p: &RadialProfile, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "grid needs at least two points".into(),
        ));
    }
    if !(lo < hi) || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("bad interval [{lo}, {hi}]")));
    }
    let d = p.domain();
    if lo < d.lo || hi > d.hi {
        return Err(Error::OutOfDomain {
            t: if lo < d.lo { lo } else { hi },
            lo: d.lo,
            hi: d.hi,
        });
    }
    let mut pts: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    pts.push(hi);
    let mut ends = vec![lo];
    ends.extend(p.breakpoints().into_iter().filter(|b| *b > lo && *b < hi));
    ends.push(hi);
    for w in ends.windows(2) {
        let (a, b) = (w[0], w[1]);
        pts.push(a);
        let width = b - a;
        for k in 1..=10 {
            let e = width * 10f64.powi(-k);
            pts.push(a + e);
            pts.push(b - e);
        }
        let floor = if a > 0.0 { a } else { b * 1e-290 };
        if b / floor > 1e3 {
            let (l0, l1) = (floor.ln(), b.ln());
            for i in 1..60 {
                pts.push((l0 + (l1 - l0) * i as f64 / 60.0).exp());
            }
        }
    }
    pts.retain(|t| *t >= lo && *t <= hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Ok(pts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Class {
    DMinusStrong,
    DPlusStrong,
    BoundaryCase,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub class: Class,
    /// Smallest margin in the direction of the class (both margins, all
    /// sides); for `Mixed`, the margin at the first disagreeing point.
    pub worst_margin: f64,
    pub worst_location: f64,
    pub points: usize,
    pub skipped: usize,
}

/// Margins and verdict at one grid point and side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub t: f64,
    pub side: Option<&'static str>,
    pub margins: [f64; 2],
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub condition: Condition,
    pub points: Vec<SweepPoint>,
    pub skipped: usize,
}

/// Evaluates `cond` over the certification grid of `[lo, hi]` in parallel,
/// skipping points where the jet is not finite (e.g. `f′ = ∞` at an end).
pub fn sweep(p: &RadialProfile, cond: Condition, lo: f64, hi: f64, n: usize) -> Result<Sweep> {
    let grid = certification_grid(p, lo, hi, n)?;
    sweep_points(p, cond, &grid)
}

pub fn sweep_points(p: &RadialProfile, cond: Condition, grid: &[f64]) -> Result<Sweep> {
    let evaluated: Vec<Result<Vec<SweepPoint>>> = grid
        .par_iter()
        .map(|&t| {
            let jet = p.jet(t)?;
            let mut out = Vec::new();
            let sides: Vec<(Option<&'static str>, Jet)> = match jet {
                Sided::Single(j) => vec![(None, j)],
                Sided::Split { left, right } => vec![(Some("left"), left), (Some("right"), right)],
            };
            for (side, mut j) in sides {
                if t == 0.0 && matches!(cond, Condition::Ineq2) {
                    j.d2 = 0.0;
                }
                if !j.is_finite() {
                    continue;
                }
                if !matches!(cond, Condition::Cap { .. }) && !(j.v > 0.0) {
                    return Err(Error::NotPositive { t, value: j.v });
                }
                let r = cond.evaluate(j, t)?;
                if !(r.first.margin.is_finite() && r.second.margin.is_finite()) {
                    continue;
                }
                out.push(SweepPoint {
                    t,
                    side,
                    margins: r.margins(),
                    verdict: r.verdict,
                });
            }
            Ok(out)
        })
        .collect();
    let mut points = Vec::with_capacity(grid.len());
    let mut skipped = 0;
    for e in evaluated {
        let v = e?;
        if v.is_empty() {
            skipped += 1;
        }
        points.extend(v);
    }
    Ok(Sweep {
        condition: cond,
        points,
        skipped,
    })
}

impl Sweep {
    pub fn classification(&self) -> Classification {
        let n = self.points.len();
        let all = |v: Verdict| self.points.iter().all(|p| p.verdict.same_kind(&v));
        let worst = |sign: f64| {
            self.points
                .iter()
                .map(|p| ((sign * p.margins[0]).min(sign * p.margins[1]), p.t))
                .fold(
                    (f64::INFINITY, f64::NAN),
                    |acc, x| if x.0 < acc.0 { x } else { acc },
                )
        };
        let (class, (m, t)) = if n > 0 && all(Verdict::StrictHolds) {
            (Class::DMinusStrong, worst(1.0))
        } else if n > 0 && all(Verdict::ReverseHolds) {
            (Class::DPlusStrong, worst(-1.0))
        } else if n > 0 && all(Verdict::Equality(0.0)) {
            let (m, t) = self
                .points
                .iter()
                .map(|p| (p.margins[0].abs().max(p.margins[1].abs()), p.t))
                .fold((0.0, f64::NAN), |acc, x| if x.0 >= acc.0 { x } else { acc });
            (Class::BoundaryCase, (m, t))
        } else {
            let odd = self.points.first().and_then(|first| {
                self.points
                    .iter()
                    .find(|p| !p.verdict.same_kind(&first.verdict))
                    .or(Some(first))
            });
            match odd {
                Some(p) => (Class::Mixed, (p.margins[0].min(p.margins[1]), p.t)),
                None => (Class::Mixed, (f64::NAN, f64::NAN)),
            }
        };
        Classification {
            class,
            worst_margin: m,
            worst_location: t,
            points: n,
            skipped: self.skipped,
        }
    }

    /// Smallest margin oriented towards the condition's expected side.
    pub fn min_margin(&self) -> (f64, f64) {
        let sign = if self.condition.expected() == Verdict::ReverseHolds {
            -1.0
        } else {
            1.0
        };
        self.points
            .iter()
            .map(|p| ((sign * p.margins[0]).min(sign * p.margins[1]), p.t))
            .fold(
                (f64::INFINITY, f64::NAN),
                |acc, x| if x.0 < acc.0 { x } else { acc },
            )
    }

    pub fn passed(&self) -> bool {
        let e = self.condition.expected();
        !self.points.is_empty() && self.points.iter().all(|p| p.verdict.same_kind(&e))
    }

    /// CSV margin trace with columns `t, margin1, margin2`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "margin1", "margin2"])?;
        for p in &self.points {
            w.write_record([p.t, p.margins[0], p.margins[1]].map(|x| format!("{x:e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// f-form classification on `[lo, hi]`.
pub fn classify(p: &RadialProfile, lo: f64, hi: f64, n: usize) -> Result<Classification> {
    Ok(sweep(p, Condition::Ineq8, lo, hi, n)?.classification())
}

/// θ-form classification on `[lo, hi]`.
pub fn classify_theta(theta: &RadialProfile, lo: f64, hi: f64, n: usize) -> Result<Classification> {
    Ok(sweep(theta, Condition::Ineq2, lo, hi, n)?.classification())
}

/// Pass/fail summary of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub condition: Condition,
    pub passed: bool,
    pub min_margin: f64,
    pub location: f64,
    pub points: usize,
    pub failures: usize,
}

pub fn reverify(
    p: &RadialProfile,
    cond: Condition,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<VerificationReport> {
    let s = sweep(p, cond, lo, hi, n)?;
    Ok(s.report())
}

impl Sweep {
    pub fn report(&self) -> VerificationReport {
        let (m, t) = self.min_margin();
        let e = self.condition.expected();
        VerificationReport {
            condition: self.condition,
            passed: self.passed(),
            min_margin: m,
            location: t,
            points: self.points.len(),
            failures: self
                .points
                .iter()
                .filter(|p| !p.verdict.same_kind(&e))
                .count(),
        }
    }
}

/// θ and its local inverse τ compared at `s ↔ u = θ(s)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityReport {
    pub s: f64,
    pub u: f64,
    pub theta_slope: f64,
    pub theta: SideReport,
    /// θ-form system for τ at `u`; its reversal is the dual system.
    pub tau: SideReport,
    pub consistent: bool,
}

/// Solution of the degenerate equation `f(f″ + f′³/t) = 1` from
/// `(t₀, f₀, f′₀)` to `t₁` by classical RK4, as a quintic Hermite spline
/// whose knots carry the equation's own `f″`.
pub fn degenerate_profile(
    t0: f64,
    f0: f64,
    fp0: f64,
    t1: f64,
    steps: usize,
) -> Result<RadialProfile> {
    if !(t0 > 0.0 && t1 > t0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < t₀ < t₁, got {t0}, {t1}"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    let rhs = |t: f64, f: f64, p: f64| 1.0 / f - p * p * p / t;
    let h = (t1 - t0) / steps as f64;
    let (mut f, mut p) = (f0, fp0);
    let mut knots = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = if i == steps { t1 } else { t0 + h * i as f64 };
        if !(f > 0.0) {
            return Err(Error::NotPositive { t, value: f });
        }
        knots.push([t, f, p, rhs(t, f, p)]);
        if i == steps {
            break;
        }
        let k1 = (p, rhs(t, f, p));
        let k2 = (
            p + 0.5 * h * k1.1,
            rhs(t + 0.5 * h, f + 0.5 * h * k1.0, p + 0.5 * h * k1.1),
        );
        let k3 = (
            p + 0.5 * h * k2.1,
            rhs(t + 0.5 * h, f + 0.5 * h * k2.0, p + 0.5 * h * k2.1),
        );
        let k4 = (p + h * k3.1, rhs(t + h, f + h * k3.0, p + h * k3.1));
        f += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    RadialProfile::hermite(knots)
}

/// `τ = θ⁻¹`: `τ′ = 1/θ′`, `τ″ = −θ″/θ′³`. For θ′ > 0 the system for θ
/// holds iff the reversed system holds for τ; for θ′ < 0 the verdicts agree.
pub fn duality_check(theta: &RadialProfile, s: f64) -> Result<DualityReport> {
    let j = theta.jet(s)?.right();
    if j.d1 == 0.0 || !j.d1.is_finite() {
        return Err(Error::NotInvertible { t: s });
    }
    let u = j.v;
    let tau_jet = Jet::new(s, 1.0 / j.d1, -j.d2 / (j.d1 * j.d1 * j.d1));
    let th = theta_side(j, s);
    let tau = theta_side(tau_jet, u);
    let expected = if j.d1 > 0.0 {
        th.verdict.swapped()
    } else {
        th.verdict
    };
    Ok(DualityReport {
        s,
        u,
        theta_slope: j.d1,
        theta: th,
        tau,
        consistent: tau.verdict.same_kind(&expected),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{sqrt_quadratic, RadialProfile, Segment, SegmentKind};

    #[test]
    fn cylinder_is_inner_strong() {
        let th = RadialProfile::constant(1.0, 0.0, 5.0).unwrap();
        let r = theta_condition(&th, 2.0).unwrap();
        assert_eq!(r.verdict(), Verdict::StrictHolds);
        let s = r.sides()[0];
        assert_eq!((s.first.lhs, s.second.lhs, s.second.rhs), (0.0, 0.0, 1.0));
    }

    #[test]
    fn identity_theta_is_boundary_case() {
        let th = RadialProfile::affine(0.0, 1.0, 0.0, 5.0).unwrap();
        let r = theta_condition(&th, 2.0).unwrap();
        assert!(matches!(r.verdict(), Verdict::Equality(_)));
        assert_eq!(r.sides()[0].residual, 0.0);
    }

    #[test]
    fn line_theta_outer_side() {
        let th = RadialProfile::affine(1.0, 2.0, 0.0, 5.0).unwrap();
        let r = theta_condition(&th, 1.0).unwrap().sides()[0];
        assert_eq!(r.verdict, Verdict::ReverseHolds);
        assert_eq!(r.second.rhs, -7.0);
        assert_eq!(r.second.lhs, 0.0);
    }

    #[test]
    fn f_condition_examples() {
        let c = RadialProfile::constant(2.0, 0.0, 5.0).unwrap();
        assert_eq!(
            f_condition(&c, 1.0).unwrap().verdict(),
            Verdict::StrictHolds
        );
        let g = sqrt_quadratic(2.0, 1.0).unwrap();
        let r = f_condition(&g, 1.0).unwrap().sides()[0];
        assert!((r.second.lhs - 10.0 / 3.0).abs() < 1e-14);
        assert!((r.first.lhs - 2.0).abs() < 1e-14);
        assert_eq!(r.verdict, Verdict::ReverseHolds);
        let g = sqrt_quadratic(0.5, 1.0).unwrap();
        let r = f_condition(&g, 1.0).unwrap().sides()[0];
        assert!((r.second.lhs - 5.0 / 12.0).abs() < 1e-14);
        assert!((r.first.lhs - 0.5).abs() < 1e-14);
        assert_eq!(r.verdict, Verdict::StrictHolds);
        assert!(matches!(
            f_condition(&g, 0.0),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn classify_quadrics() {
        let g = sqrt_quadratic(2.0, 1.0).unwrap();
        let c = classify(&g, 0.1, 10.0, 10_000).unwrap();
        assert_eq!(c.class, Class::DPlusStrong);
        assert!(c.worst_margin > 0.0);
        let g = sqrt_quadratic(0.5, 1.0).unwrap();
        assert_eq!(
            classify(&g, 0.1, 10.0, 1000).unwrap().class,
            Class::DMinusStrong
        );
    }

    #[test]
    fn classification_at_origin_uses_theta_form() {
        let g = sqrt_quadratic(0.5, 1.0).unwrap();
        let c = classify(&g, 0.0, 1.0, 50).unwrap();
        assert_eq!(c.class, Class::DMinusStrong);
        assert_eq!(c.skipped, 0);
    }

    #[test]
    fn breakpoints_need_both_sides() {
        // slope of θ jumps from 0.5 to 1.5 across s = 1 (C0 in θ′)
        let th = RadialProfile::new(vec![
            Segment::new(
                0.0,
                1.0,
                SegmentKind::AffineDerivativeIntegral {
                    center: 0.0,
                    value: 1.0,
                    slope: 0.5,
                    curvature: 0.0,
                },
            ),
            Segment::new(
                1.0,
                2.0,
                SegmentKind::AffineDerivativeIntegral {
                    center: 1.0,
                    value: 1.5,
                    slope: 1.5,
                    curvature: 0.0,
                },
            ),
        ])
        .unwrap();
        let r = theta_condition(&th, 1.0).unwrap();
        assert!(r.report.is_split());
        assert_eq!(r.verdict(), Verdict::Violated);
    }

    #[test]
    fn duality_examples() {
        let th = RadialProfile::affine(1.0, 2.0, 0.0, 5.0).unwrap();
        let d = duality_check(&th, 1.0).unwrap();
        assert!(d.consistent);
        assert_eq!(d.theta.verdict, Verdict::ReverseHolds);
        assert_eq!(d.tau.verdict, Verdict::StrictHolds);
        let th = RadialProfile::affine(1.0, 0.5, 0.0, 5.0).unwrap();
        let d = duality_check(&th, 1.0).unwrap();
        assert!(d.consistent && d.tau.first.lhs == 2.0);
        assert_eq!(d.tau.verdict, Verdict::ReverseHolds);
        let flat = RadialProfile::constant(1.0, 0.0, 5.0).unwrap();
        assert!(matches!(
            duality_check(&flat, 1.0),
            Err(Error::NotInvertible { .. })
        ));
    }

    #[test]
    fn grid_contains_breakpoints_and_layers() {
        let p = RadialProfile::new(vec![
            Segment::new(0.0, 1.0, SegmentKind::Constant { value: 1.0 }),
            Segment::new(1.0, 3.0, SegmentKind::Constant { value: 1.0 }),
        ])
        .unwrap();
        let g = certification_grid(&p, 0.0, 3.0, 10).unwrap();
        assert!(g.contains(&1.0));
        assert!(g.iter().any(|t| (*t - (1.0 - 1e-10)).abs() < 1e-15));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
