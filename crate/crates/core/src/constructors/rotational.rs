use serde::{Deserialize, Serialize};

use super::sampling::{ContainmentReport, PointSampler};
use super::{Certificate, CertificationReport, Claim, SmoothingSummary, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::profiles::{
    integrate_derivative, inverse_profile, sqrt_quadratic, RadialProfile, Segment, SegmentKind,
};
use crate::pseudoconvexity::Condition;
use crate::smoothing::{smooth_and_certify, Radius};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HandleKind {
    /// `λ > 1`: `K = {|x| ≤ f⁻¹(|y|)}` around `|y|² ≥ λ|x|² + a`.
    Outer,
    /// `λ < 1`: `L = {|x| > σ, |y| ≤ f(|x|)} ∪ {|x| ≤ σ}` around
    /// `|y|² ≤ λ|x|² + 1`.
    Inner,
}

/// Constants of the `a = 1` construction; the built profiles are scaled by
/// `√a` in both variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandleConstants {
    pub lambda: f64,
    pub a: f64,
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub c: f64,
    pub eta: f64,
    pub c1: f64,
    pub log_sigma: f64,
    /// `exp(log_sigma)`; zero when it underflows.
    pub sigma: f64,
}

impl HandleConstants {
    pub fn scale(&self) -> f64 {
        self.a.sqrt()
    }

    /// `g(ε)`, `g′(ε)`, `g″(ε)` for `g = sqrt(λt² + 1)`.
    pub fn g_at_eps(&self) -> (f64, f64, f64) {
        let g = (self.lambda * self.eps * self.eps + 1.0).sqrt();
        (g, self.lambda * self.eps / g, self.lambda / (g * g * g))
    }

    fn sign(&self) -> f64 {
        if self.k.is_some() {
            -1.0
        } else {
            1.0
        }
    }

    /// `c₁ ± η log(η/2σ) ∓ 2`, with the logarithm taken from `log σ`.
    pub fn sigma_equation_residual(&self) -> f64 {
        let s = self.sign();
        self.c1 + s * self.eta * (self.eta.ln() - std::f64::consts::LN_2 - self.log_sigma) - s * 2.0
    }

    /// σ, ε, η of the built (scaled) construction.
    pub fn scaled_lengths(&self) -> (f64, f64, f64) {
        let k = self.scale();
        (k * self.sigma, k * self.eps, k * self.eta)
    }
}

/// Overrides for the free constants and the verification effort.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HandleOptions {
    /// Double η while direct certification keeps passing.
    pub relax: bool,
    pub eta: Option<f64>,
    pub k: Option<f64>,
    pub grid: usize,
    pub radius: Radius,
}

impl Default for HandleOptions {
    fn default() -> Self {
        HandleOptions {
            relax: false,
            eta: None,
            k: None,
            grid: DEFAULT_GRID,
            radius: Radius::DEFAULT,
        }
    }
}

fn sigma_from_log(log_sigma: f64) -> f64 {
    let s = log_sigma.exp();
    // subnormal σ has too few bits to resolve (σ, 2σ); treat as collapsed
    if s < f64::MIN_POSITIVE {
        0.0
    } else {
        s
    }
}

/// `c = λ²ε³/g(ε)³`, `η = ½ min(ε, c³/3)` unless overridden,
/// `c₁ = c + η g″(ε)` and `σ = (η/2) exp((c₁ − 2)/η)`.
pub fn derive_constants_outer(lambda: f64, eps: f64, eta: Option<f64>) -> Result<HandleConstants> {
    if !(lambda > 1.0) {
        return Err(Error::NotStronglyPsh(format!("λ = {lambda} must exceed 1")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "ε = {eps} must be positive"
        )));
    }
    let g = (lambda * eps * eps + 1.0).sqrt();
    let c = lambda * lambda * eps.powi(3) / g.powi(3);
    let eta = eta.unwrap_or(0.5 * eps.min(c.powi(3) / 3.0));
    if !(eta > 0.0 && eta < eps) {
        return Err(Error::InvalidArgument(format!(
            "η = {eta} must lie in (0, ε)"
        )));
    }
    let c1 = c + eta * lambda / g.powi(3);
    if c1 >= 2.0 {
        return Err(Error::EpsilonTooLarge(format!(
            "c₁ = {c1} ≥ 2 leaves no σ with 2σ < η"
        )));
    }
    let log_sigma = (0.5 * eta).ln() + (c1 - 2.0) / eta;
    Ok(HandleConstants {
        lambda,
        a: 1.0,
        eps,
        k: None,
        c,
        eta,
        c1,
        log_sigma,
        sigma: sigma_from_log(log_sigma),
    })
}

/// `k = (λ/g(ε) + 1)/2`, `c = g′(ε) − kε`, η from a halving search starting
/// at `min(ε, 1)/2` until `c₁ = c + kη < 0` and `η + c₁³ < 0`, and
/// `σ = (η/2) exp(−(c₁ + 2)/η)`.
pub fn derive_constants_inner(
    lambda: f64,
    eps: f64,
    k: Option<f64>,
    eta: Option<f64>,
) -> Result<HandleConstants> {
    if !(lambda < 1.0) {
        return Err(Error::WrongRegime(format!("λ = {lambda} must be below 1")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "ε = {eps} must be positive"
        )));
    }
    let g2 = lambda * eps * eps + 1.0;
    if !(g2 > 0.0) {
        return Err(Error::EpsilonTooLarge(format!(
            "ε = {eps} is outside the domain of g"
        )));
    }
    let g = g2.sqrt();
    let ratio = lambda / g;
    let k = k.unwrap_or(0.5 * (ratio + 1.0));
    if !(ratio < k && k < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must lie in ({ratio}, 1)"
        )));
    }
    let c = lambda * eps / g - k * eps;
    let eta = match eta {
        Some(e) => {
            if !(e > 0.0 && e < eps && c + k * e < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "η = {e} must lie in (0, ε) with c + kη < 0"
                )));
            }
            e
        }
        None => {
            let mut e = 0.5 * eps.min(1.0);
            let mut found = None;
            for _ in 0..200 {
                let c1 = c + k * e;
                if c1 < 0.0 && e + c1.powi(3) < 0.0 {
                    found = Some(e);
                    break;
                }
                e *= 0.5;
            }
            found.ok_or_else(|| Error::EpsilonTooLarge("no admissible η".into()))?
        }
    };
    let c1 = c + k * eta;
    if c1 <= -2.0 {
        return Err(Error::DegenerateConstants(format!(
            "c₁ = {c1} ≤ −2 forces σ ≥ η/2"
        )));
    }
    let log_sigma = (0.5 * eta).ln() - (c1 + 2.0) / eta;
    Ok(HandleConstants {
        lambda,
        a: 1.0,
        eps,
        k: Some(k),
        c,
        eta,
        c1,
        log_sigma,
        sigma: sigma_from_log(log_sigma),
    })
}

fn derivative_table(
    k: &HandleConstants,
    middle_slope: f64,
    sign: f64,
    hi: f64,
) -> Result<RadialProfile> {
    let (_, gp, _) = k.g_at_eps();
    let sigma = k.sigma;
    let mut segs = Vec::with_capacity(4);
    let log_start = if sigma > 0.0 {
        segs.push(Segment::new(
            sigma,
            2.0 * sigma,
            SegmentKind::InverseSqrtSlope {
                log_sigma: k.log_sigma,
                sign,
            },
        ));
        2.0 * sigma
    } else {
        0.0
    };
    segs.push(Segment::new(
        log_start,
        k.eta,
        SegmentKind::LogSlope {
            c1: k.c1,
            eta: k.eta,
            sign,
        },
    ));
    segs.push(Segment::new(
        k.eta,
        k.eps,
        SegmentKind::AffineDerivativeIntegral {
            center: k.eps,
            value: gp,
            slope: middle_slope,
            curvature: 0.0,
        },
    ));
    segs.push(Segment::new(
        k.eps,
        hi,
        SegmentKind::SqrtQuadraticSlope {
            lambda: k.lambda,
            a: 1.0,
        },
    ));
    RadialProfile::new(segs)
}

/// `f′` of the outer handle (`a = 1`): inverse-square-root, logarithmic,
/// tangent-line and `g′` pieces.
pub fn outer_derivative_table(k: &HandleConstants) -> Result<RadialProfile> {
    let (_, _, gpp) = k.g_at_eps();
    derivative_table(k, gpp, 1.0, f64::INFINITY)
}

/// `f′` of the inner handle: the same shape with the signs of the singular
/// pieces reversed and middle slope `k`.
pub fn inner_derivative_table(k: &HandleConstants) -> Result<RadialProfile> {
    let slope =
        k.k.ok_or_else(|| Error::InvalidArgument("inner constants need k".into()))?;
    let hi = sqrt_quadratic(k.lambda, 1.0)?.domain().hi;
    derivative_table(k, slope, -1.0, hi)
}

fn antiderivative(fprime: &RadialProfile, k: &HandleConstants) -> Result<RadialProfile> {
    let (g, _, _) = k.g_at_eps();
    integrate_derivative(fprime, k.eps, g)
}

/// `u ↦ σ` on `[0, u₀]` glued to `inv` (which starts at `u₀`), or `inv`
/// followed by `u ↦ σ` on `[u₁, ∞)`.
fn flat_extended(inv: &RadialProfile, sigma: f64, before: bool) -> Result<RadialProfile> {
    let d = inv.domain();
    let mut segs = inv.segments().to_vec();
    if before {
        if d.lo > 0.0 {
            segs.insert(
                0,
                Segment::new(0.0, d.lo, SegmentKind::Constant { value: sigma }),
            );
        }
    } else {
        segs.push(Segment::new(
            d.hi,
            f64::INFINITY,
            SegmentKind::Constant { value: sigma },
        ));
    }
    RadialProfile::new(segs)
}

/// A built rotational handle together with everything that was checked.
#[derive(Clone, Debug)]
pub struct HandleConstruction {
    pub kind: HandleKind,
    pub constants: HandleConstants,
    /// C¹, piecewise C² profile assembled from the derivative table.
    pub f: RadialProfile,
    /// `f` smoothed at its curvature jumps (inner); `f` itself for the outer
    /// handle, whose smoothing is done on the inverse.
    pub f_smoothed: RadialProfile,
    /// Outer: `f⁻¹` extended by `σ` on `[0, f(σ)]`. Inner: the inverse of the
    /// decreasing part `(σ, η)` extended by `σ` on `[f(σ), ∞)`.
    pub inverse: RadialProfile,
    pub inverse_smoothed: RadialProfile,
    pub report: CertificationReport,
    /// How many doublings of η relax mode accepted.
    pub relax_steps: usize,
}

struct Parts {
    f: RadialProfile,
    f_smoothed: RadialProfile,
    inverse: RadialProfile,
    inverse_smoothed: RadialProfile,
    smoothing: Vec<SmoothingSummary>,
}

fn outer_parts(k: &HandleConstants, opts: &HandleOptions) -> Result<Parts> {
    let f = antiderivative(&outer_derivative_table(k)?, k)?;
    let inverse = flat_extended(&inverse_profile(&f)?, k.sigma, true)?;
    let hi = f.value(4.0 * k.eps)?;
    let o = smooth_and_certify(&inverse, Condition::Ineq8, 0.0, hi, opts.grid, opts.radius)?;
    Ok(Parts {
        f_smoothed: f.clone(),
        f,
        inverse_smoothed: o.smoothed.profile.clone(),
        inverse,
        smoothing: vec![SmoothingSummary::new("inverse", opts.radius, &o)],
    })
}

fn inner_cert_hi(f: &RadialProfile, eps: f64) -> f64 {
    (2.0 * eps).min(eps + 0.5 * (f.domain().hi - eps))
}

/// `[f(η), 2f(σ) − f(η)]`; with `σ` underflowed to zero the flat part would
/// sit at `|x| = 0`, so the range stops one ulp short of `f(0)`.
fn inner_inverse_range(f: &RadialProfile, k: &HandleConstants) -> Result<(f64, f64)> {
    let (a, b) = (f.value(k.eta)?, f.value(k.sigma)?);
    if k.sigma == 0.0 {
        return Ok((a, b.next_down()));
    }
    Ok((a, b + (b - a)))
}

fn inner_parts(k: &HandleConstants, opts: &HandleOptions) -> Result<Parts> {
    let f = antiderivative(&inner_derivative_table(k)?, k)?;
    let hi = inner_cert_hi(&f, k.eps);
    let of = smooth_and_certify(&f, Condition::Ineq8, k.sigma, hi, opts.grid, opts.radius)?;
    let inverse = inverse_profile(&f.restrict(k.sigma, k.eta)?)?;
    let inverse = if k.sigma > 0.0 {
        flat_extended(&inverse, k.sigma, false)?
    } else {
        inverse
    };
    let (ulo, uhi) = inner_inverse_range(&f, k)?;
    let oi = smooth_and_certify(&inverse, Condition::Ineq8, ulo, uhi, opts.grid, opts.radius)?;
    Ok(Parts {
        f_smoothed: of.smoothed.profile.clone(),
        f,
        inverse_smoothed: oi.smoothed.profile.clone(),
        inverse,
        smoothing: vec![
            SmoothingSummary::new("f", opts.radius, &of),
            SmoothingSummary::new("inverse", opts.radius, &oi),
        ],
    })
}

fn sample_points(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / n as f64)
}

/// `min (g − f)·side` over `n` points of `[lo, hi)`.
fn min_gap(
    f: &RadialProfile,
    g: &RadialProfile,
    lo: f64,
    hi: f64,
    n: usize,
    side: f64,
) -> Result<f64> {
    let mut m = f64::INFINITY;
    for t in sample_points(lo, hi, n) {
        m = m.min(side * (g.value(t)? - f.value(t)?));
    }
    Ok(m)
}

/// `1` when `f` and `g` agree bit for bit on 100 points of `[lo, hi]`,
/// otherwise minus the largest difference.
fn exact_agreement(f: &RadialProfile, g: &RadialProfile, lo: f64, hi: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..100 {
        let t = lo + (hi - lo) * i as f64 / 99.0;
        worst = worst.max((f.value(t)? - g.value(t)?).abs());
    }
    Ok(if worst == 0.0 { 1.0 } else { -worst })
}

/// `|f′(σ + 10⁻ʲσ)|` for `j = 1..6`, strictly increasing and tracking
/// `2√σ/√(t − σ)` to 1e-6 relative; returns the worst relative deviation
/// as negative slack when either fails.
fn blowup_slack(f: &RadialProfile, sigma: f64) -> Result<f64> {
    if sigma == 0.0 {
        let mut prev = 0.0;
        for j in 1..=6 {
            let t = f.domain().lo + f.domain().hi.min(1.0) * 10f64.powi(-3 * j);
            let d = f.one_sided(t, crate::profiles::Side::Right)?.d1.abs();
            if !(d > prev) {
                return Ok(-1.0);
            }
            prev = d;
        }
        return Ok(1.0);
    }
    let mut prev = 0.0;
    let mut worst = 0.0f64;
    for j in 1..=6 {
        let d = 10f64.powi(-j) * sigma;
        let t = sigma + d;
        let slope = f.one_sided(t, crate::profiles::Side::Right)?.d1.abs();
        if !(slope > prev) {
            return Ok(-1.0);
        }
        prev = slope;
        let rate = 2.0 * sigma.sqrt() / (t - sigma).sqrt();
        worst = worst.max((slope - rate).abs() / rate);
    }
    Ok(if worst < 1e-6 { 1.0 } else { -worst })
}

fn outer_report(
    k: &HandleConstants,
    unit_f: &RadialProfile,
    p: &Parts,
    grid: usize,
    smoothing: Vec<SmoothingSummary>,
) -> Result<CertificationReport> {
    let (sigma, eps, _) = k.scaled_lengths();
    let g = sqrt_quadratic(k.lambda, k.a)?;
    let uhi = p.f.value(4.0 * eps)?;
    let certificates = vec![
        Certificate::run(
            "(9) for f on (σ, ε)",
            "f",
            &p.f,
            Condition::Ineq9,
            sigma,
            eps,
            grid,
        )?,
        Certificate::run(
            "(8) for the piecewise inverse",
            "inverse",
            &p.inverse,
            Condition::Ineq8,
            0.0,
            uhi,
            grid,
        )?,
        Certificate::run(
            "(8) for the smoothed inverse",
            "inverse_smoothed",
            &p.inverse_smoothed,
            Condition::Ineq8,
            0.0,
            uhi,
            grid,
        )?,
    ];
    let (ge, gpe, _) = k.g_at_eps();
    let mut claims = vec![
        Claim::new(
            "σ solves its equation",
            1e-10 - k.sigma_equation_residual().abs(),
        ),
        Claim::new(
            "f = g for t ≥ ε",
            exact_agreement(&p.f, &g, eps, 10.0 * eps)?,
        ),
        Claim::new("f < g on [σ, ε)", min_gap(&p.f, &g, sigma, eps, 1000, 1.0)?),
        Claim::new("f(σ) > 0", p.f.value(sigma)?),
        Claim::new("f′(σ+) = +∞", blowup_slack(&p.f, sigma)?),
        Claim::new(
            "f > 1/g(ε) on [η, ε)",
            sample_points(k.eta, k.eps, 1000)
                .map(|t| unit_f.value(t).map(|v| v - 1.0 / ge))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min),
        ),
    ];
    let m = 1.0 / ge - k.eta * gpe - k.eta * k.eta;
    if m > 0.5 {
        let lo = 2.0 * k.sigma;
        claims.push(Claim::new(
            "f > M on [2σ, η)",
            sample_points(lo, k.eta, 1000)
                .map(|t| unit_f.value(t).map(|v| v - m))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min),
        ));
    }
    Ok(CertificationReport::new(certificates, smoothing, claims))
}

fn inner_report(
    k: &HandleConstants,
    p: &Parts,
    grid: usize,
    smoothing: Vec<SmoothingSummary>,
) -> Result<CertificationReport> {
    let g = sqrt_quadratic(k.lambda, 1.0)?;
    let hi = inner_cert_hi(&p.f, k.eps);
    let (ulo, uhi) = inner_inverse_range(&p.f, k)?;
    let certificates = vec![
        Certificate::run(
            "(8) for the piecewise f on (σ, ε)",
            "f",
            &p.f,
            Condition::Ineq8,
            k.sigma,
            hi,
            grid,
        )?,
        Certificate::run(
            "(8) for the smoothed f on (σ, ε)",
            "f_smoothed",
            &p.f_smoothed,
            Condition::Ineq8,
            k.sigma,
            hi,
            grid,
        )?,
        Certificate::run(
            "(8) for the smoothed inverse near f(σ)",
            "inverse_smoothed",
            &p.inverse_smoothed,
            Condition::Ineq8,
            ulo,
            uhi,
            grid,
        )?,
    ];
    let (ge, _, _) = k.g_at_eps();
    let kk = k.k.unwrap_or(f64::NAN);
    let slope_bound = sample_points(k.eta, k.eps, 1000)
        .map(|t| {
            p.f.one_sided(t, crate::profiles::Side::Right)
                .map(|j| k.lambda * t / ge - j.d1)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let claims = vec![
        Claim::new(
            "σ solves its equation",
            1e-10 - k.sigma_equation_residual().abs(),
        ),
        Claim::new("f = g for t ≥ ε", exact_agreement(&p.f, &g, k.eps, hi)?),
        Claim::new(
            "f > g on [σ, ε)",
            min_gap(&p.f, &g, k.sigma, k.eps, 1000, -1.0)?,
        ),
        Claim::new("f′(σ+) = −∞", blowup_slack(&p.f, k.sigma)?),
        Claim::new("f′ < λt/g(ε) on [η, ε)", slope_bound),
        Claim::new("c₁ < 0", -k.c1),
        Claim::new("λ/g(ε) < k < 1", (kk - k.lambda / ge).min(1.0 - kk)),
    ];
    Ok(CertificationReport::new(certificates, smoothing, claims))
}

fn outer_unit(
    lambda: f64,
    eps: f64,
    eta: Option<f64>,
    opts: &HandleOptions,
) -> Result<(HandleConstants, Parts)> {
    let k = derive_constants_outer(lambda, eps, eta)?;
    let parts = outer_parts(&k, opts)?;
    Ok((k, parts))
}

fn finish_outer(
    k: HandleConstants,
    unit: Parts,
    a: f64,
    grid: usize,
    relax_steps: usize,
) -> Result<HandleConstruction> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("a = {a} must be positive")));
    }
    let s = a.sqrt();
    let k = HandleConstants { a, ..k };
    let scale = |p: &RadialProfile| {
        if a == 1.0 {
            Ok(p.clone())
        } else {
            p.rescaled(s)
        }
    };
    let parts = Parts {
        f: scale(&unit.f)?,
        f_smoothed: scale(&unit.f_smoothed)?,
        inverse: scale(&unit.inverse)?,
        inverse_smoothed: scale(&unit.inverse_smoothed)?,
        smoothing: unit.smoothing.clone(),
    };
    let report = outer_report(&k, &unit.f, &parts, grid, unit.smoothing)?;
    Ok(HandleConstruction {
        kind: HandleKind::Outer,
        constants: k,
        f: parts.f,
        f_smoothed: parts.f_smoothed,
        inverse: parts.inverse,
        inverse_smoothed: parts.inverse_smoothed,
        report,
        relax_steps,
    })
}

/// Outer handle without failing on certification; the report says what
/// passed.
pub fn assemble_outer_handle(
    lambda: f64,
    a: f64,
    eps: f64,
    opts: &HandleOptions,
) -> Result<HandleConstruction> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("a = {a} must be positive")));
    }
    let (k, parts) = outer_unit(lambda, eps, opts.eta, opts)?;
    let mut best = finish_outer(k, parts, a, opts.grid, 0)?;
    if !opts.relax || !best.report.passed {
        return Ok(best);
    }
    let mut steps = 0;
    loop {
        let eta = 2.0 * best.constants.eta;
        if eta >= 0.5 * eps {
            break;
        }
        let Ok((k, parts)) = outer_unit(lambda, eps, Some(eta), opts) else {
            break;
        };
        let cand = finish_outer(k, parts, a, opts.grid, steps + 1)?;
        if !cand.report.passed {
            break;
        }
        steps += 1;
        best = cand;
    }
    Ok(best)
}

/// Outer handle, failing with the first violated check.
pub fn build_outer_handle(
    lambda: f64,
    a: f64,
    eps: f64,
    opts: &HandleOptions,
) -> Result<HandleConstruction> {
    let h = assemble_outer_handle(lambda, a, eps, opts)?;
    h.report.ensure()?;
    Ok(h)
}

/// Rescales an `a = 1` outer construction to `a`: `f_a(t) = √a f(t/√a)`.
pub fn rescale_outer(h: &HandleConstruction, a: f64) -> Result<HandleConstruction> {
    if h.kind != HandleKind::Outer || h.constants.a != 1.0 {
        return Err(Error::InvalidArgument(
            "rescaling needs an a = 1 outer construction".into(),
        ));
    }
    let unit = Parts {
        f: h.f.clone(),
        f_smoothed: h.f_smoothed.clone(),
        inverse: h.inverse.clone(),
        inverse_smoothed: h.inverse_smoothed.clone(),
        smoothing: h.report.smoothing.clone(),
    };
    finish_outer(
        h.constants.clone(),
        unit,
        a,
        h.report.certificates[0].grid,
        h.relax_steps,
    )
}

fn inner_once(
    lambda: f64,
    eps: f64,
    eta: Option<f64>,
    opts: &HandleOptions,
) -> Result<HandleConstruction> {
    let k = derive_constants_inner(lambda, eps, opts.k, eta)?;
    let parts = inner_parts(&k, opts)?;
    let smoothing = parts.smoothing.clone();
    let report = inner_report(&k, &parts, opts.grid, smoothing)?;
    Ok(HandleConstruction {
        kind: HandleKind::Inner,
        constants: k,
        f: parts.f,
        f_smoothed: parts.f_smoothed,
        inverse: parts.inverse,
        inverse_smoothed: parts.inverse_smoothed,
        report,
        relax_steps: 0,
    })
}

pub fn assemble_inner_handle(
    lambda: f64,
    eps: f64,
    opts: &HandleOptions,
) -> Result<HandleConstruction> {
    let mut best = inner_once(lambda, eps, opts.eta, opts)?;
    if !opts.relax || !best.report.passed {
        return Ok(best);
    }
    let mut steps = 0;
    loop {
        let eta = 2.0 * best.constants.eta;
        if eta >= 0.5 * eps {
            break;
        }
        let Ok(mut cand) = inner_once(lambda, eps, Some(eta), opts) else {
            break;
        };
        if !cand.report.passed {
            break;
        }
        steps += 1;
        cand.relax_steps = steps;
        best = cand;
    }
    Ok(best)
}

pub fn build_inner_handle(
    lambda: f64,
    eps: f64,
    opts: &HandleOptions,
) -> Result<HandleConstruction> {
    let h = assemble_inner_handle(lambda, eps, opts)?;
    h.report.ensure()?;
    Ok(h)
}

impl HandleConstruction {
    /// The quadric profile `g_{λ,a}` the handle is attached to.
    pub fn base(&self) -> Result<RadialProfile> {
        sqrt_quadratic(self.constants.lambda, self.constants.a)
    }

    /// Negative inside the handlebody, zero on its boundary, positive
    /// outside; depends only on `(|x|, |y|)`.
    pub fn membership_norms(&self, xn: f64, yn: f64) -> f64 {
        let (sigma, _, _) = self.constants.scaled_lengths();
        match self.kind {
            HandleKind::Outer => xn - self.inverse_smoothed.value(yn).unwrap_or(f64::NAN),
            HandleKind::Inner => {
                if xn <= sigma {
                    return xn - sigma;
                }
                let d = self.f_smoothed.domain();
                if xn >= d.hi {
                    return 1.0 + xn - d.hi;
                }
                match self.f_smoothed.value(xn) {
                    Ok(v) => (yn - v).min(xn - sigma),
                    Err(_) => f64::NAN,
                }
            }
        }
    }

    pub fn membership(&self, x: &[f64], y: &[f64]) -> f64 {
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        self.membership_norms(norm(x), norm(y))
    }

    /// Whether `(|x|, |y|)` lies in the quadric part of the center.
    pub fn in_quadric(&self, xn: f64, yn: f64) -> bool {
        let q = self.constants.lambda * xn * xn + self.constants.a;
        match self.kind {
            HandleKind::Outer => yn * yn >= q,
            HandleKind::Inner => yn * yn <= q,
        }
    }

    /// Samples `count` points of `ℂⁿ` in a box of radius `box_radius` (half
    /// of them concentrated on `|xⱼ| ≤ 2ε`) and checks
    /// `D ∪ {|x| ≤ σ} ⊂ handlebody ⊂ D ∪ {|x| < ε}`.
    pub fn containment(
        &self,
        n: usize,
        count: usize,
        box_radius: f64,
        seed: u64,
    ) -> Result<ContainmentReport> {
        let (sigma, eps, _) = self.constants.scaled_lengths();
        let sampler = PointSampler::new(n, box_radius, Some((2.0 * eps).min(box_radius)));
        let pts = sampler.rotational(count, seed);
        Ok(ContainmentReport::check(&pts, |&(xn, yn)| {
            let member = self.membership_norms(xn, yn);
            let inner = self.in_quadric(xn, yn) || xn <= sigma;
            let outer = self.in_quadric(xn, yn) || xn < eps;
            (inner, member <= 0.0, outer)
        }))
    }
}
