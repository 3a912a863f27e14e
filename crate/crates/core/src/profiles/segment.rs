use serde::{Deserialize, Serialize};

use crate::quadrature::gauss_legendre;

/// Value and first two derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const NAN: Jet = Jet {
        v: f64::NAN,
        d1: f64::NAN,
        d2: f64::NAN,
    };

    pub fn new(v: f64, d1: f64, d2: f64) -> Self {
        Jet { v, d1, d2 }
    }

    pub fn component(&self, order: usize) -> f64 {
        match order {
            0 => self.v,
            1 => self.d1,
            _ => self.d2,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

/// Closed-form formula of one profile segment.
///
/// Every kind is a formula valid on some natural domain that may extend past
/// the segment's interval; evaluation outside the interval is the analytic
/// continuation, which the smoothing windows rely on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "coeffs", rename_all = "snake_case")]
pub enum SegmentKind {
    Constant {
        value: f64,
    },
    /// `sqrt(lambda t^2 + a) + offset`
    SqrtQuadratic {
        lambda: f64,
        a: f64,
        #[serde(default)]
        offset: f64,
    },
    /// Derivative of the above: `lambda t / sqrt(lambda t^2 + a)`.
    SqrtQuadraticSlope {
        lambda: f64,
        a: f64,
    },
    /// `value + slope (t - center) + curvature (t - center)^2 / 2`; the
    /// antiderivative of an affine function.
    AffineDerivativeIntegral {
        center: f64,
        value: f64,
        slope: f64,
        curvature: f64,
    },
    /// `c1 + sign * eta * ln(eta / t)`
    LogSlope {
        c1: f64,
        eta: f64,
        sign: f64,
    },
    /// `c1 t + sign * eta * t (ln(eta / t) + 1) + offset`
    LogDerivativeIntegral {
        c1: f64,
        eta: f64,
        sign: f64,
        offset: f64,
    },
    /// `sign * 2 sqrt(sigma) / sqrt(t - sigma)`, sigma stored as its log.
    InverseSqrtSlope {
        log_sigma: f64,
        sign: f64,
    },
    /// `sign * 4 sqrt(sigma) sqrt(t - sigma) + offset`
    InverseSqrtDerivativeIntegral {
        log_sigma: f64,
        sign: f64,
        offset: f64,
    },
    /// Middle piece of the quadratic cap: `delta t + mu (sqrt t - sqrt t0)^2`.
    QuadraticCapPiece {
        delta: f64,
        mu: f64,
        t0: f64,
        #[serde(default)]
        offset: f64,
    },
    /// C² quintic Hermite interpolant through `(t, v, d1, d2)` knots.
    HermiteSpline {
        knots: Vec<[f64; 4]>,
    },
    /// Second-derivative blend across a former breakpoint.
    MollifiedSpline(Box<MollifiedWindow>),
    /// Local inverse of a monotone formula, solved on demand.
    InverseOf {
        forward: Box<SegmentKind>,
        lo: f64,
        hi: f64,
    },
    /// `theta(s) = f(sqrt s)^2`
    Squared {
        inner: Box<SegmentKind>,
    },
    /// `f(t) = sqrt(theta(t^2))`
    RootOfSquared {
        inner: Box<SegmentKind>,
    },
    /// `scale * inner(t / scale)`
    Scaled {
        scale: f64,
        inner: Box<SegmentKind>,
    },
}

/// A window `[start, end]` on which the second derivative is blended between
/// the continuations of the two neighbouring formulas:
///
/// `f″ = (1−Q(s)) L″ + Q(s) R″ + Σ wᵢ Bᵢ(s)`, `s = (t − start)/(end − start)`,
///
/// where `Q` is a quintic smoothstep ramp on the middle half of the window
/// and `Bᵢ` are the correction shapes of [`window_basis`]. Anchors store
/// `(t, v, d1)` at every panel edge so evaluation only integrates within a
/// single smooth panel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifiedWindow {
    pub start: f64,
    pub end: f64,
    pub left: SegmentKind,
    pub right: SegmentKind,
    pub weights: [f64; 5],
    pub anchors: Vec<[f64; 3]>,
}

pub(crate) const RAMP: (f64, f64) = (0.25, 0.75);

pub(crate) fn smoothstep(s: f64) -> f64 {
    s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
}

pub(crate) fn bump1(s: f64) -> f64 {
    if !(0.0..=1.0).contains(&s) {
        return 0.0;
    }
    let u = s * (1.0 - s);
    30.0 * u * u
}

pub(crate) fn bump2(s: f64) -> f64 {
    if !(0.0..=1.0).contains(&s) {
        return 0.0;
    }
    let u = s * (1.0 - s);
    420.0 * (1.0 - 2.0 * s) * u * u
}

/// Blend weight of the right formula.
pub(crate) fn ramp(s: f64) -> f64 {
    smoothstep(((s - RAMP.0) / (RAMP.1 - RAMP.0)).clamp(0.0, 1.0))
}

/// Correction shapes on the unit window:
/// 0: `30s²(1−s)²` (unit mass, symmetric),
/// 1: `420(1−2s)s²(1−s)²` (zero mass, unit moment),
/// 2: `Q(1−Q)` (inside the ramp, bounded by the ramp's headroom),
/// 3, 4: unit-shape bumps on the outer quarters, left and right.
pub fn window_basis(i: usize, s: f64) -> f64 {
    match i {
        0 => bump1(s),
        1 => bump2(s),
        2 => {
            let q = ramp(s);
            q * (1.0 - q)
        }
        3 => bump1(s / RAMP.0),
        _ => bump1((s - RAMP.1) / (1.0 - RAMP.1)),
    }
}

impl MollifiedWindow {
    pub(crate) fn blend_d2(
        start: f64,
        end: f64,
        left: &SegmentKind,
        right: &SegmentKind,
        weights: &[f64; 5],
        t: f64,
    ) -> f64 {
        let s = ((t - start) / (end - start)).clamp(0.0, 1.0);
        let q = ramp(s);
        let mut d2 = if q == 0.0 {
            left.jet(t).d2
        } else if q == 1.0 {
            right.jet(t).d2
        } else {
            (1.0 - q) * left.jet(t).d2 + q * right.jet(t).d2
        };
        for (i, w) in weights.iter().enumerate() {
            if *w != 0.0 {
                d2 += w * window_basis(i, s);
            }
        }
        d2
    }

    pub(crate) fn d2(&self, t: f64) -> f64 {
        Self::blend_d2(
            self.start,
            self.end,
            &self.left,
            &self.right,
            &self.weights,
            t,
        )
    }

    fn jet(&self, t: f64) -> Jet {
        if t <= self.start {
            return self.left.jet(t);
        }
        if t >= self.end {
            return self.right.jet(t);
        }
        let m = self.anchors.len();
        let idx = self
            .anchors
            .partition_point(|a| a[0] <= t)
            .saturating_sub(1)
            .min(m - 1);
        let [ta, va, da] = self.anchors[idx];
        let d2 = self.d2(t);
        if t == ta {
            return Jet::new(va, da, d2);
        }
        let d1 = da + gauss_legendre(|x| self.d2(x), ta, t);
        let v = va + da * (t - ta) + gauss_legendre(|x| (t - x) * self.d2(x), ta, t);
        Jet::new(v, d1, d2)
    }
}

impl SegmentKind {
    /// Jet of the formula at `t` (analytic continuation outside the owning
    /// interval). Non-finite components signal points outside the formula's
    /// natural domain.
    pub fn jet(&self, t: f64) -> Jet {
        match self {
            SegmentKind::Constant { value } => Jet::new(*value, 0.0, 0.0),
            SegmentKind::SqrtQuadratic { lambda, a, offset } => {
                let g = (lambda * t * t + a).sqrt();
                Jet::new(g + offset, lambda * t / g, lambda * a / (g * g * g))
            }
            SegmentKind::SqrtQuadraticSlope { lambda, a } => {
                let g = (lambda * t * t + a).sqrt();
                let g3 = g * g * g;
                Jet::new(
                    lambda * t / g,
                    lambda * a / g3,
                    -3.0 * lambda * lambda * a * t / (g3 * g * g),
                )
            }
            SegmentKind::AffineDerivativeIntegral {
                center,
                value,
                slope,
                curvature,
            } => {
                let d = t - center;
                Jet::new(
                    value + d * (slope + 0.5 * curvature * d),
                    slope + curvature * d,
                    *curvature,
                )
            }
            SegmentKind::LogSlope { c1, eta, sign } => {
                let l = eta.ln() - t.ln();
                Jet::new(c1 + sign * eta * l, -sign * eta / t, sign * eta / (t * t))
            }
            SegmentKind::LogDerivativeIntegral {
                c1,
                eta,
                sign,
                offset,
            } => {
                if t == 0.0 {
                    return Jet::new(*offset, sign * f64::INFINITY, -sign * f64::INFINITY);
                }
                let l = eta.ln() - t.ln();
                Jet::new(
                    c1 * t + sign * eta * t * (l + 1.0) + offset,
                    c1 + sign * eta * l,
                    -sign * eta / t,
                )
            }
            SegmentKind::InverseSqrtSlope { log_sigma, sign } => {
                let sigma = log_sigma.exp();
                let rs = (0.5 * log_sigma).exp();
                let d = t - sigma;
                let rd = d.sqrt();
                Jet::new(
                    sign * 2.0 * rs / rd,
                    -sign * (rs / d) / rd,
                    sign * 1.5 * (rs / d) / (d * rd),
                )
            }
            SegmentKind::InverseSqrtDerivativeIntegral {
                log_sigma,
                sign,
                offset,
            } => {
                let sigma = log_sigma.exp();
                let rs = (0.5 * log_sigma).exp();
                let d = t - sigma;
                if d == 0.0 {
                    return Jet::new(*offset, sign * f64::INFINITY, -sign * f64::INFINITY);
                }
                let rd = d.sqrt();
                Jet::new(
                    sign * 4.0 * rs * rd + offset,
                    sign * 2.0 * rs / rd,
                    -sign * (rs / d) / rd,
                )
            }
            SegmentKind::QuadraticCapPiece {
                delta,
                mu,
                t0,
                offset,
            } => {
                let rt = t.sqrt();
                let r0 = t0.sqrt();
                Jet::new(
                    delta * t + mu * (rt - r0) * (rt - r0) + offset,
                    delta + mu * (1.0 - r0 / rt),
                    mu * r0 / (2.0 * t * rt),
                )
            }
            SegmentKind::HermiteSpline { knots } => hermite_jet(knots, t),
            SegmentKind::MollifiedSpline(w) => w.jet(t),
            SegmentKind::InverseOf { forward, lo, hi } => inverse_jet(forward, *lo, *hi, t),
            SegmentKind::Squared { inner } => {
                if t < 0.0 {
                    return Jet::NAN;
                }
                let r = t.sqrt();
                let j = inner.jet(r);
                square_transport(j, r)
            }
            SegmentKind::RootOfSquared { inner } => {
                let j = inner.jet(t * t);
                root_transport(j, t)
            }
            SegmentKind::Scaled { scale, inner } => {
                let j = inner.jet(t / scale);
                Jet::new(scale * j.v, j.d1, j.d2 / scale)
            }
        }
    }

    /// Same formula shifted by a constant.
    pub fn shifted(&self, delta: f64) -> Option<SegmentKind> {
        let mut k = self.clone();
        match &mut k {
            SegmentKind::Constant { value } => *value += delta,
            SegmentKind::SqrtQuadratic { offset, .. }
            | SegmentKind::LogDerivativeIntegral { offset, .. }
            | SegmentKind::InverseSqrtDerivativeIntegral { offset, .. }
            | SegmentKind::QuadraticCapPiece { offset, .. } => *offset += delta,
            SegmentKind::AffineDerivativeIntegral { value, .. } => *value += delta,
            SegmentKind::HermiteSpline { knots } => knots.iter_mut().for_each(|k| k[1] += delta),
            _ => return None,
        }
        Some(k)
    }

    /// Closed-form antiderivative with zero additive constant, where one
    /// exists among the supported kinds.
    pub fn antiderivative(&self) -> Option<SegmentKind> {
        Some(match self {
            SegmentKind::Constant { value } => SegmentKind::AffineDerivativeIntegral {
                center: 0.0,
                value: 0.0,
                slope: *value,
                curvature: 0.0,
            },
            SegmentKind::AffineDerivativeIntegral {
                center,
                value,
                slope,
                curvature,
            } if *curvature == 0.0 => SegmentKind::AffineDerivativeIntegral {
                center: *center,
                value: 0.0,
                slope: *value,
                curvature: *slope,
            },
            SegmentKind::SqrtQuadraticSlope { lambda, a } => SegmentKind::SqrtQuadratic {
                lambda: *lambda,
                a: *a,
                offset: 0.0,
            },
            SegmentKind::LogSlope { c1, eta, sign } => SegmentKind::LogDerivativeIntegral {
                c1: *c1,
                eta: *eta,
                sign: *sign,
                offset: 0.0,
            },
            SegmentKind::InverseSqrtSlope { log_sigma, sign } => {
                SegmentKind::InverseSqrtDerivativeIntegral {
                    log_sigma: *log_sigma,
                    sign: *sign,
                    offset: 0.0,
                }
            }
            _ => return None,
        })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            SegmentKind::Constant { .. } => "constant",
            SegmentKind::SqrtQuadratic { .. } => "sqrt_quadratic",
            SegmentKind::SqrtQuadraticSlope { .. } => "sqrt_quadratic_slope",
            SegmentKind::AffineDerivativeIntegral { .. } => "affine_derivative_integral",
            SegmentKind::LogSlope { .. } => "log_slope",
            SegmentKind::LogDerivativeIntegral { .. } => "log_derivative_integral",
            SegmentKind::InverseSqrtSlope { .. } => "inverse_sqrt_slope",
            SegmentKind::InverseSqrtDerivativeIntegral { .. } => "inverse_sqrt_derivative_integral",
            SegmentKind::QuadraticCapPiece { .. } => "quadratic_cap_piece",
            SegmentKind::HermiteSpline { .. } => "hermite_spline",
            SegmentKind::MollifiedSpline(_) => "mollified_spline",
            SegmentKind::InverseOf { .. } => "inverse_of",
            SegmentKind::Squared { .. } => "squared",
            SegmentKind::RootOfSquared { .. } => "root_of_squared",
            SegmentKind::Scaled { .. } => "scaled",
        }
    }
}

/// `theta(s) = f(r)^2` with `r = sqrt s`.
pub(crate) fn square_transport(j: Jet, r: f64) -> Jet {
    let v = j.v * j.v;
    if r == 0.0 {
        // theta'(0) = f f''(0) needs f'(0) = 0; theta''(0) is a third-order
        // quantity not carried by the jet.
        return if j.d1 == 0.0 {
            Jet::new(v, j.v * j.d2, f64::NAN)
        } else {
            Jet::new(v, f64::NAN, f64::NAN)
        };
    }
    let ff1_r = j.v * j.d1 / r;
    Jet::new(v, ff1_r, (j.v * j.d2 + j.d1 * j.d1 - ff1_r) / (2.0 * r * r))
}

/// `f(t) = sqrt(theta(t^2))`.
pub(crate) fn root_transport(j: Jet, t: f64) -> Jet {
    let f = j.v.sqrt();
    let f1 = t * j.d1 / f;
    Jet::new(f, f1, (j.d1 + 2.0 * t * t * j.d2 - f1 * f1) / f)
}

fn hermite_jet(knots: &[[f64; 4]], t: f64) -> Jet {
    let n = knots.len();
    if n == 0 {
        return Jet::NAN;
    }
    if n == 1 {
        let [_, v, d1, d2] = knots[0];
        return Jet::new(v, d1, d2);
    }
    let i = match knots.binary_search_by(|k| k[0].total_cmp(&t)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.saturating_sub(1).min(n - 2),
    };
    let [t0, v0, a0, c0] = knots[i];
    let [t1, v1, a1, c1] = knots[i + 1];
    let h = t1 - t0;
    let s = (t - t0) / h;
    let (s2, s3, s4, s5) = (s * s, s * s * s, s.powi(4), s.powi(5));

    let b = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
        0.5 * (s3 - 2.0 * s4 + s5),
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
    ];
    let db = [
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
        0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4),
        -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
        30.0 * s2 - 60.0 * s3 + 30.0 * s4,
    ];
    let ddb = [
        -60.0 * s + 180.0 * s2 - 120.0 * s3,
        -36.0 * s + 96.0 * s2 - 60.0 * s3,
        0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3),
        0.5 * (6.0 * s - 24.0 * s2 + 20.0 * s3),
        -24.0 * s + 84.0 * s2 - 60.0 * s3,
        60.0 * s - 180.0 * s2 + 120.0 * s3,
    ];
    let coef = [v0, h * a0, h * h * c0, h * h * c1, h * a1, v1];
    let dot = |w: &[f64; 6]| w.iter().zip(coef.iter()).map(|(x, y)| x * y).sum::<f64>();
    Jet::new(dot(&b), dot(&db) / h, dot(&ddb) / (h * h))
}

fn inverse_jet(forward: &SegmentKind, lo: f64, hi: f64, u: f64) -> Jet {
    let f = |t: f64| forward.jet(t);
    let tol = 1e-15 * u.abs().max(1e-300);
    let mut root = None;
    // the stored bracket first; continuation outside it widens the bracket
    // geometrically while staying on the positive half-line
    for k in 0..64 {
        let w = if hi.is_finite() { hi - lo } else { lo.max(1.0) };
        let grow = 2f64.powi(k) - 1.0;
        let a = if lo > 0.0 {
            (lo - w * grow).max(lo * 0.5f64.powi(k))
        } else {
            lo
        };
        let b = if hi.is_finite() {
            hi + w * grow
        } else {
            (2.0 * lo).max(1.0) * 2f64.powi(k)
        };
        root = solve_monotone(&f, u, a, b, tol);
        if root.is_some() {
            break;
        }
    }
    match root {
        Some(t) => {
            let j = f(t);
            if j.d1.is_infinite() {
                return Jet::new(t, 0.0, 0.0);
            }
            Jet::new(t, 1.0 / j.d1, -j.d2 / (j.d1 * j.d1 * j.d1))
        }
        None => Jet::NAN,
    }
}

/// Bracket midpoint: geometric when the bracket spans orders of magnitude.
fn split(a: f64, b: f64) -> f64 {
    if a > 0.0 && b / a > 4.0 {
        (a * b).sqrt()
    } else if a == 0.0 && b > 1e-300 {
        b / 1024.0
    } else {
        a + 0.5 * (b - a)
    }
}

/// Safeguarded Newton on a bracket of a monotone function. Bisection is done
/// geometrically when the bracket spans orders of magnitude above zero.
/// Returns `None` when `u` is not bracketed by `[f(lo), f(hi)]`.
pub(crate) fn solve_monotone<F: Fn(f64) -> Jet>(
    f: &F,
    u: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Option<f64> {
    let flo = f(lo).v - u;
    let fhi = f(hi).v - u;
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return None;
    }
    let increasing = fhi > 0.0;
    // invariant: g(a) < 0 < g(b) for the oriented residual g
    let (mut a, mut b) = (lo, hi);
    let orient = |r: f64| if increasing { r } else { -r };
    let mut x = split(a, b);
    for _ in 0..400 {
        let j = f(x);
        let r = orient(j.v - u);
        if r.abs() <= tol {
            return Some(x);
        }
        if r < 0.0 {
            a = x;
        } else {
            b = x;
        }
        if b - a <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) || b <= a {
            return Some(if orient(f(a).v - u).abs() < orient(f(b).v - u).abs() {
                a
            } else {
                b
            });
        }
        let newton = x - (j.v - u) / j.d1;
        let width = b - a;
        x = if newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            split(a, b)
        };
        // Newton steps that hug a bracket end stall; follow with a bisection
        if (x - a).min(b - x) < 1e-3 * width {
            let mid = split(a, b);
            if orient(f(mid).v - u) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
            if !(x > a && x < b) {
                x = split(a, b);
            }
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(k: &SegmentKind, t: f64, h: f64) -> (f64, f64) {
        let p = k.jet(t + h).v;
        let m = k.jet(t - h).v;
        let c = k.jet(t).v;
        ((p - m) / (2.0 * h), (p - 2.0 * c + m) / (h * h))
    }

    #[test]
    fn closed_form_derivatives_match_differences() {
        let kinds = [
            SegmentKind::SqrtQuadratic {
                lambda: 2.0,
                a: 1.0,
                offset: 0.0,
            },
            SegmentKind::SqrtQuadraticSlope {
                lambda: 0.5,
                a: 1.0,
            },
            SegmentKind::LogSlope {
                c1: 0.3,
                eta: 0.01,
                sign: -1.0,
            },
            SegmentKind::LogDerivativeIntegral {
                c1: 0.3,
                eta: 0.01,
                sign: 1.0,
                offset: 2.0,
            },
            SegmentKind::InverseSqrtSlope {
                log_sigma: (0.05f64).ln(),
                sign: 1.0,
            },
            SegmentKind::InverseSqrtDerivativeIntegral {
                log_sigma: (0.05f64).ln(),
                sign: -1.0,
                offset: 1.0,
            },
            SegmentKind::QuadraticCapPiece {
                delta: 0.2,
                mu: 1.3,
                t0: 0.4,
                offset: 0.0,
            },
        ];
        for k in &kinds {
            for &t in &[0.3, 0.7, 1.9] {
                let j = k.jet(t);
                let (d1, d2) = fd(k, t, 1e-4);
                assert!(
                    (j.d1 - d1).abs() < 1e-6 * (1.0 + d1.abs()),
                    "{k:?} d1 at {t}"
                );
                assert!(
                    (j.d2 - d2).abs() < 1e-4 * (1.0 + d2.abs()),
                    "{k:?} d2 at {t}"
                );
            }
        }
    }

    #[test]
    fn antiderivatives_differentiate_back() {
        let slopes = [
            SegmentKind::Constant { value: 1.5 },
            SegmentKind::SqrtQuadraticSlope {
                lambda: 2.0,
                a: 1.0,
            },
            SegmentKind::LogSlope {
                c1: 0.27,
                eta: 0.003,
                sign: 1.0,
            },
            SegmentKind::InverseSqrtSlope {
                log_sigma: -3.0,
                sign: -1.0,
            },
        ];
        for k in &slopes {
            let big = k.antiderivative().unwrap();
            for &t in &[0.2, 0.5, 1.1] {
                let a = big.jet(t);
                let b = k.jet(t);
                assert!((a.d1 - b.v).abs() < 1e-14 * (1.0 + b.v.abs()));
                assert!((a.d2 - b.d1).abs() < 1e-12 * (1.0 + b.d1.abs()));
            }
        }
    }

    #[test]
    fn hermite_reproduces_quintic_data_at_knots() {
        let knots = vec![
            [0.0, 1.0, 0.5, -1.0],
            [1.0, 2.0, 1.5, 2.0],
            [2.5, 0.0, -1.0, 0.5],
        ];
        let k = SegmentKind::HermiteSpline {
            knots: knots.clone(),
        };
        for kn in &knots {
            let j = k.jet(kn[0]);
            assert!((j.v - kn[1]).abs() < 1e-14);
            assert!((j.d1 - kn[2]).abs() < 1e-12);
            assert!((j.d2 - kn[3]).abs() < 1e-10);
        }
        let (d1, d2) = fd(&k, 0.4, 1e-4);
        let j = k.jet(0.4);
        assert!((j.d1 - d1).abs() < 1e-6);
        assert!((j.d2 - d2).abs() < 1e-4);
    }

    #[test]
    fn inverse_of_sqrt_quadratic() {
        let g = SegmentKind::SqrtQuadratic {
            lambda: 2.0,
            a: 1.0,
            offset: 0.0,
        };
        let inv = SegmentKind::InverseOf {
            forward: Box::new(g.clone()),
            lo: 0.0,
            hi: 10.0,
        };
        let j = inv.jet(3f64.sqrt());
        assert!((j.v - 1.0).abs() < 1e-14);
        let gj = g.jet(1.0);
        assert!((j.d1 - 1.0 / gj.d1).abs() < 1e-13);
    }

    #[test]
    fn geometric_bisection_reaches_tiny_roots() {
        let f = |t: f64| Jet::new(t.sqrt(), 0.5 / t.sqrt(), 0.0);
        let root = solve_monotone(&f, 1e-60, 0.0, 1.0, 1e-75).unwrap();
        assert!((root / 1e-120 - 1.0).abs() < 1e-12, "{root:e}");
    }

    #[test]
    fn kind_json_uses_tag_and_coeffs() {
        let k = SegmentKind::Constant { value: 5.0 };
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(s, r#"{"kind":"constant","coeffs":{"value":5.0}}"#);
        let back: SegmentKind = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
    }
}
