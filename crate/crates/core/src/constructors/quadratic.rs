use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{ContainmentReport, PointSampler};
use super::{Certificate, CertificationReport, Claim, SmoothingSummary, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::levi::{min_eigenvalue, quadratic_tau_hessian_from_jet, HermitianForm};
use crate::profiles::{RadialProfile, Segment, SegmentKind, Side};
use crate::pseudoconvexity::Condition;
use crate::smoothing::{smooth_and_certify, Radius};

/// Smallest eigenvalue of a real symmetric matrix; asymmetry above 1e-12
/// is rejected.
pub fn symmetric_min_eigenvalue(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::ShapeError(format!(
            "{}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 {
        return Err(Error::ShapeError(format!(
            "matrix asymmetry {asym:e} exceeds 1e-12"
        )));
    }
    let e = SymmetricEigen::new(m.clone()).eigenvalues;
    Ok(e.iter().copied().fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticConstants {
    pub k: usize,
    pub n: usize,
    pub lambda1: f64,
    pub r: f64,
    pub eps: f64,
    pub t0: f64,
    pub delta: f64,
    pub mu: f64,
    /// `R = μ²t₀/(μ + δ − 1)²`.
    pub big_r: f64,
    pub h_big_r: f64,
    /// `c₀ = R − h(R)`.
    pub c0: f64,
}

/// `t₀ = r + ε`, `δ = min(ε/2t₀, (λ₁ − 1)/4, 1/2)`, `μ = 1 + (λ₁ − 1 − δ)/2`.
pub fn quadratic_constants(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    r: f64,
    eps: f64,
) -> Result<QuadraticConstants> {
    let lambda1 = symmetric_min_eigenvalue(a)?;
    let bmin = symmetric_min_eigenvalue(b)?;
    if !(lambda1 > 1.0) {
        return Err(Error::NotStronglyPsh(format!(
            "smallest eigenvalue of A is {lambda1}, not above 1"
        )));
    }
    if !(bmin > 0.0) {
        return Err(Error::ShapeError(format!(
            "B is not positive definite (eigenvalue {bmin})"
        )));
    }
    if !(r > 0.0 && eps > 0.0 && r.is_finite() && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "r = {r}, ε = {eps} must be positive"
        )));
    }
    let t0 = r + eps;
    let delta = (eps / (2.0 * t0)).min(0.25 * (lambda1 - 1.0)).min(0.5);
    let mu = 1.0 + 0.5 * (lambda1 - 1.0 - delta);
    let big_r = mu * mu * t0 / (mu + delta - 1.0).powi(2);
    let h_big_r = delta * big_r + mu * (big_r.sqrt() - t0.sqrt()).powi(2);
    Ok(QuadraticConstants {
        k: a.nrows(),
        n: a.nrows() + b.nrows(),
        lambda1,
        r,
        eps,
        t0,
        delta,
        mu,
        big_r,
        h_big_r,
        c0: big_r - h_big_r,
    })
}

fn cap_profile(c: &QuadraticConstants) -> Result<RadialProfile> {
    RadialProfile::new(vec![
        Segment::new(
            0.0,
            c.t0,
            SegmentKind::AffineDerivativeIntegral {
                center: 0.0,
                value: 0.0,
                slope: c.delta,
                curvature: 0.0,
            },
        ),
        Segment::new(
            c.t0,
            c.big_r,
            SegmentKind::QuadraticCapPiece {
                delta: c.delta,
                mu: c.mu,
                t0: c.t0,
                offset: 0.0,
            },
        ),
        Segment::new(
            c.big_r,
            f64::INFINITY,
            SegmentKind::AffineDerivativeIntegral {
                center: c.big_r,
                value: c.h_big_r,
                slope: 1.0,
                curvature: 0.0,
            },
        ),
    ])
}

/// A point `(x + iy, u + iv)` with `x, y ∈ ℝᵏ` and `u, v ∈ ℝⁿ⁻ᵏ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl QuadraticPoint {
    /// From real coordinates laid out as `[x, y, u, v]`.
    pub fn from_real(p: &[f64], k: usize) -> Self {
        let m = (p.len() - 2 * k) / 2;
        QuadraticPoint {
            x: p[..k].to_vec(),
            y: p[k..2 * k].to_vec(),
            u: p[2 * k..2 * k + m].to_vec(),
            v: p[2 * k + m..].to_vec(),
        }
    }

    pub fn on_lambda(x: Vec<f64>, m: usize) -> Self {
        let k = x.len();
        QuadraticPoint {
            x,
            y: vec![0.0; k],
            u: vec![0.0; m],
            v: vec![0.0; m],
        }
    }

    pub fn x_norm2(&self) -> f64 {
        self.x.iter().map(|a| a * a).sum()
    }
}

fn form(m: &DMatrix<f64>, v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in 0..v.len() {
            s += m[(i, j)] * v[i] * v[j];
        }
    }
    s
}

#[derive(Clone, Debug)]
pub struct QuadraticHandle {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub constants: QuadraticConstants,
    /// The three-piece cap `δt`, `δt + μ(√t − √t₀)²`, `t − R + h(R)`.
    pub h_piecewise: RadialProfile,
    pub h: RadialProfile,
    pub report: CertificationReport,
}

/// Builds the cap, smooths it, and certifies `ḣ < λ₁`, `2tḧ + ḣ < λ₁` on
/// `[0, 2R]` together with the Levi positivity of `τ`.
pub fn build_quadratic_handle(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    r: f64,
    eps: f64,
) -> Result<QuadraticHandle> {
    build_quadratic_handle_with(a, b, r, eps, DEFAULT_GRID, Radius::DEFAULT)
}

pub fn build_quadratic_handle_with(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    r: f64,
    eps: f64,
    grid: usize,
    radius: Radius,
) -> Result<QuadraticHandle> {
    let c = quadratic_constants(a, b, r, eps)?;
    let hp = cap_profile(&c)?;
    let cond = Condition::Cap { lambda1: c.lambda1 };
    let hi = 2.0 * c.big_r;
    let o = smooth_and_certify(&hp, cond, 0.0, hi, grid, radius)?;
    let mut handle = QuadraticHandle {
        a: a.clone(),
        b: b.clone(),
        h: o.smoothed.profile.clone(),
        h_piecewise: hp,
        report: CertificationReport::new(Vec::new(), Vec::new(), Vec::new()),
        constants: c.clone(),
    };
    let certificates = vec![
        Certificate::run(
            "cap conditions, piecewise h",
            "h_piecewise",
            &handle.h_piecewise,
            cond,
            0.0,
            hi,
            grid,
        )?,
        Certificate::run(
            "cap conditions, smoothed h",
            "h",
            &handle.h,
            cond,
            0.0,
            hi,
            grid,
        )?,
    ];
    let mid_identity = (1..=100)
        .map(|i| {
            let t = c.t0 + (c.big_r - c.t0) * i as f64 / 101.0;
            let j = handle.h_piecewise.one_sided(t, Side::Right)?;
            Ok((2.0 * t * j.d2 + j.d1 - c.mu - c.delta).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let slope_at = |t: f64, s: Side| handle.h_piecewise.one_sided(t, s).map(|j| j.d1);
    let joints = [
        (slope_at(c.t0, Side::Left)? - c.delta).abs(),
        (slope_at(c.t0, Side::Right)? - c.delta).abs(),
        (slope_at(c.big_r, Side::Left)? - 1.0).abs(),
        (slope_at(c.big_r, Side::Right)? - 1.0).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let claims = vec![
        Claim::new("δt₀ < ε", c.eps - c.delta * c.t0),
        Claim::new(
            "1 < μ + δ < λ₁",
            (c.mu + c.delta - 1.0).min(c.lambda1 - c.mu - c.delta),
        ),
        Claim::new("r < c₀ < R", (c.c0 - c.r).min(c.big_r - c.c0)),
        Claim::new("C¹ joints ḣ(t₀) = δ, ḣ(R) = 1", 1e-12 - joints),
        Claim::new("2tḧ + ḣ = μ + δ on (t₀, R)", 1e-10 - mid_identity),
        Claim::new("h increasing", handle.min_slope(hi, 4000)?),
        Claim::new(
            "τ strongly plurisubharmonic",
            handle.min_levi_eigenvalue(10_000, 42)?,
        ),
    ];
    handle.report = CertificationReport::new(
        certificates,
        vec![SmoothingSummary::new("h", radius, &o)],
        claims,
    );
    Ok(handle)
}

impl QuadraticHandle {
    pub fn q(&self, p: &QuadraticPoint) -> f64 {
        form(&self.a, &p.y) + form(&self.b, &p.v) + p.u.iter().map(|a| a * a).sum::<f64>()
    }

    /// `ρ = Q(y, w) − |x|²`.
    pub fn rho(&self, p: &QuadraticPoint) -> f64 {
        self.q(p) - p.x_norm2()
    }

    /// `τ = Q(y, w) − h(|x|²)` with the smoothed cap.
    pub fn tau(&self, p: &QuadraticPoint) -> f64 {
        self.q(p) - self.h.value(p.x_norm2()).unwrap_or(f64::NAN)
    }

    /// `τ − c`: negative inside `K_c = {τ ≤ c}`.
    pub fn membership(&self, p: &QuadraticPoint, c: f64) -> f64 {
        self.tau(p) - c
    }

    /// Complex Hessian of `τ`, which depends on `x` only.
    pub fn tau_hessian(&self, x: &[f64]) -> Result<HermitianForm> {
        let t: f64 = x.iter().map(|a| a * a).sum();
        let j = self.h.one_sided(t, Side::Right)?;
        quadratic_tau_hessian_from_jet(&self.a, &self.b, j, x)
    }

    fn min_slope(&self, hi: f64, n: usize) -> Result<f64> {
        let mut m = f64::INFINITY;
        for i in 0..=n {
            m = m.min(self.h.one_sided(hi * i as f64 / n as f64, Side::Right)?.d1);
        }
        Ok(m)
    }

    /// Points `x` with `|x|² ∈ [0, 2R]`: a symmetric line for `k = 1`,
    /// seeded random directions otherwise.
    pub fn levi_grid(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let k = self.constants.k;
        let rmax = (2.0 * self.constants.big_r).sqrt();
        if k == 1 {
            return (0..count)
                .map(|i| vec![-rmax + 2.0 * rmax * i as f64 / (count - 1) as f64])
                .collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|i| {
                let rad = rmax * (i as f64 / (count - 1) as f64).sqrt();
                let mut d: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
                let n = d.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-300);
                d.iter_mut().for_each(|a| *a *= rad / n);
                d
            })
            .collect()
    }

    /// Smallest eigenvalue of the complex Hessian of `τ` over [`levi_grid`](Self::levi_grid).
    pub fn min_levi_eigenvalue(&self, count: usize, seed: u64) -> Result<f64> {
        let pts = self.levi_grid(count, seed);
        let vals = pts
            .par_iter()
            .map(|x| self.tau_hessian(x).map(|h| min_eigenvalue(&h)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Checks `{ρ ≤ −c₀} ∪ Λᵏ ⊂ {τ ≤ 0} ⊂ {ρ < −r} ∪ {Q < ε}` on `count`
    /// box samples plus `count / 10` samples of `Λᵏ` with `|x|² ≤ 2R`.
    pub fn containment(
        &self,
        count: usize,
        box_radius: f64,
        seed: u64,
    ) -> Result<ContainmentReport> {
        let c = &self.constants;
        let (k, m) = (c.k, c.n - c.k);
        let focus = (2.0 * c.big_r).sqrt().min(box_radius);
        let sampler = PointSampler::new(c.n, box_radius, Some(focus));
        // focus the y, u, v coordinates: reorder so they come first
        let raw = sampler.points(count, seed, 2 * c.n, k + 2 * m);
        let mut pts: Vec<QuadraticPoint> = raw
            .into_iter()
            .map(|p| {
                let mut v = p[k + 2 * m..].to_vec();
                v.extend_from_slice(&p[..k + 2 * m]);
                QuadraticPoint::from_real(&v, k)
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let rmax = (2.0 * c.big_r).sqrt();
        let lambda_pts = count / 10;
        let mut added = 0;
        while added < lambda_pts {
            let x: Vec<f64> = (0..k).map(|_| rng.random_range(-rmax..=rmax)).collect();
            if x.iter().map(|a| a * a).sum::<f64>() <= rmax * rmax {
                pts.push(QuadraticPoint::on_lambda(x, m));
                added += 1;
            }
        }
        let on_lambda = |p: &QuadraticPoint| p.y.iter().chain(&p.u).chain(&p.v).all(|a| *a == 0.0);
        Ok(ContainmentReport::check(&pts, |p| {
            let rho = self.rho(p);
            let inner = rho <= -c.c0 || on_lambda(p);
            let inside = self.tau(p) <= 0.0;
            let outer = rho < -c.r || self.q(p) < c.eps;
            (inner, inside, outer)
        }))
    }
}
