//! Complex gradients, Hessians and restricted Levi forms.
//!
//! Convention: for a real function ρ on ℂⁿ with z = x + iy,
//! `H_jk = ∂²ρ/∂z_j∂z̄_k` and the Levi form is `ℒ(v) = Σ H_jk v_j v̄_k`.
//! The complex tangent space at p is `{v : Σ ρ_{z_k} v_k = 0}`, i.e. the
//! Hermitian orthogonal complement of the conjugated gradient. With this
//! convention `ℒ(v) = v* Hᵀ v`, so the restricted matrix is `F* Hᵀ F`; all
//! Hessians produced here are real symmetric, where this is `F* H F`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::{Jet, RadialProfile, Sided};

pub type C64 = Complex<f64>;

/// A point of ℂⁿ as real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl BoundaryPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::ShapeError(format!(
                "x has length {}, y has length {}",
                x.len(),
                y.len()
            )));
        }
        Ok(BoundaryPoint { x, y })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x_norm2(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }

    pub fn y_norm2(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum()
    }

    pub fn x_dot_y(&self) -> f64 {
        self.x.iter().zip(&self.y).map(|(a, b)| a * b).sum()
    }

    /// Real coordinates `(x₁…xₙ, y₁…yₙ)`.
    pub fn to_real(&self) -> Vec<f64> {
        self.x.iter().chain(self.y.iter()).copied().collect()
    }

    pub fn from_real(v: &[f64]) -> Self {
        let n = v.len() / 2;
        BoundaryPoint {
            x: v[..n].to_vec(),
            y: v[n..].to_vec(),
        }
    }

    /// Membership defect `||y|² − θ(|x|²)| / max(1, θ)` for the rotational
    /// hypersurface.
    pub fn rotational_defect(&self, theta: &RadialProfile) -> Result<f64> {
        let th = theta.value(self.x_norm2())?;
        Ok((self.y_norm2() - th).abs() / th.abs().max(1.0))
    }
}

/// `∂²ρ/∂z_j∂z̄_k` as a dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm(pub DMatrix<C64>);

impl HermitianForm {
    pub fn from_real(m: &DMatrix<f64>) -> Self {
        HermitianForm(m.map(|v| C64::new(v, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    /// Largest entry of `H − H*`.
    pub fn asymmetry(&self) -> f64 {
        let h = &self.0;
        let mut worst = 0.0f64;
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &HermitianForm) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// `ℒ(v) = Σ H_jk v_j v̄_k`.
    pub fn levi_value(&self, v: &[C64]) -> f64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += self.0[(j, k)] * v[j] * v[k].conj();
            }
        }
        acc.re
    }

    /// Ascending eigenvalues of the full form.
    pub fn eigenvalues(&self) -> Vec<f64> {
        sorted_eigenvalues(self.0.clone())
    }
}

fn sorted_eigenvalues(m: DMatrix<C64>) -> Vec<f64> {
    let herm = (&m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Orthonormal basis (as columns) of the complex tangent space.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentFrame(pub DMatrix<C64>);

impl TangentFrame {
    pub fn vectors(&self) -> Vec<DVector<C64>> {
        self.0.column_iter().map(|c| c.into_owned()).collect()
    }

    /// `max |Σ_k grad_k v_k|` over frame vectors.
    pub fn annihilation(&self, grad: &DVector<C64>) -> f64 {
        self.0
            .column_iter()
            .map(|c| {
                c.iter()
                    .zip(grad.iter())
                    .map(|(v, g)| v * g)
                    .sum::<C64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |F*F − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.0.adjoint() * &self.0;
        let id = DMatrix::<C64>::identity(g.nrows(), g.ncols());
        (g - id).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `ρ_{z_k} = −(x_k θ′(|x|²) + i y_k)` for `ρ = |y|² − θ(|x|²)`.
pub fn rotational_gradient(theta: &RadialProfile, p: &BoundaryPoint) -> Result<DVector<C64>> {
    let d1 = theta.eval(p.x_norm2(), 1)?.right();
    Ok(gradient_from_slope(d1, p))
}

pub fn gradient_from_slope(theta_d1: f64, p: &BoundaryPoint) -> DVector<C64> {
    DVector::from_iterator(
        p.dim(),
        p.x.iter()
            .zip(&p.y)
            .map(|(x, y)| -C64::new(x * theta_d1, *y)),
    )
}

/// Hessian from a θ jet at `s = |x|²`.
pub fn hessian_from_jet(j: Jet, x: &[f64]) -> HermitianForm {
    let n = x.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            m[(a, b)] = -x[a] * x[b] * j.d2;
        }
        m[(a, a)] += 0.5 * (1.0 - j.d1);
    }
    HermitianForm::from_real(&m)
}

/// `H_kk = (1 − θ′ − 2x_k²θ″)/2`, `H_jk = −x_j x_k θ″`; both one-sided forms
/// at a θ″ breakpoint.
pub fn rotational_hessian(
    theta: &RadialProfile,
    p: &BoundaryPoint,
) -> Result<Sided<HermitianForm>> {
    let jet = theta.jet(p.x_norm2())?;
    Ok(match jet {
        Sided::Single(j) => Sided::Single(hessian_from_jet(j, &p.x)),
        Sided::Split { left, right } => {
            let (l, r) = (hessian_from_jet(left, &p.x), hessian_from_jet(right, &p.x));
            Sided::Split { left: l, right: r }
        }
    })
}

/// Orthonormal basis of `{v : Σ grad_k v_k = 0}`.
pub fn tangent_frame(grad: &DVector<C64>) -> Result<TangentFrame> {
    let n = grad.len();
    if n < 2 {
        return Err(Error::ShapeError(
            "the complex tangent space is trivial for n = 1".into(),
        ));
    }
    let norm = grad.norm();
    if !(norm > 0.0) {
        return Err(Error::SingularPoint);
    }
    let c = grad.map(|g| g.conj()).unscale(norm);
    let mut basis: Vec<DVector<C64>> = vec![c.clone()];
    // least aligned coordinate axes first keeps the projection well-conditioned
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| c[a].norm().total_cmp(&c[b].norm()));
    let mut out = Vec::with_capacity(n - 1);
    for k in order {
        if out.len() == n - 1 {
            break;
        }
        let mut v = DVector::<C64>::zeros(n);
        v[k] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let nv = v.norm();
        if nv > 1e-8 {
            let v = v.unscale(nv);
            basis.push(v.clone());
            out.push(v);
        }
    }
    Ok(TangentFrame(DMatrix::from_columns(&out)))
}

/// Ascending eigenvalues of the Levi form restricted to the frame.
pub fn restricted_levi_spectrum(h: &HermitianForm, frame: &TangentFrame) -> Result<Vec<f64>> {
    if frame.0.nrows() != h.dim() {
        return Err(Error::ShapeError(format!(
            "frame vectors have length {}, form has dimension {}",
            frame.0.nrows(),
            h.dim()
        )));
    }
    let m = frame.0.adjoint() * h.0.transpose() * &frame.0;
    Ok(sorted_eigenvalues(m))
}

/// Restricted spectra at a point of `{|y|² = θ(|x|²)}`, one per side at θ″
/// breakpoints.
pub fn rotational_levi_spectrum(
    theta: &RadialProfile,
    p: &BoundaryPoint,
) -> Result<Sided<Vec<f64>>> {
    let grad = rotational_gradient(theta, p)?;
    let frame = tangent_frame(&grad)?;
    Ok(match rotational_hessian(theta, p)? {
        Sided::Single(h) => Sided::Single(restricted_levi_spectrum(&h, &frame)?),
        Sided::Split { left, right } => Sided::Split {
            left: restricted_levi_spectrum(&left, &frame)?,
            right: restricted_levi_spectrum(&right, &frame)?,
        },
    })
}

/// Tangent vector `(−iλy₂, λ(x₁θ′ + iy₁), v″)` at the reduced point
/// `(x₁ + iy₁, iy₂, 0, …)`.
pub fn canonical_tangent_vector(
    theta_d1: f64,
    x1: f64,
    y1: f64,
    y2: f64,
    lam: C64,
    vpp: &[C64],
) -> Vec<C64> {
    let i = C64::new(0.0, 1.0);
    let mut v = vec![-i * lam * y2, lam * C64::new(x1 * theta_d1, y1)];
    v.extend_from_slice(vpp);
    v
}

/// `2ℒ(p; v)` at the reduced point by the closed formula
/// `|λ|²(−2x₁²y₂²θ″ + (1−θ′)(x₁²θ′² + θ)) + (1−θ′)|v″|²`.
pub fn canonical_levi_value(
    theta: &RadialProfile,
    x1: f64,
    y1: f64,
    y2: f64,
    lam: C64,
    vpp: &[C64],
) -> Result<f64> {
    let s = x1 * x1;
    let j = theta.one_sided(s, crate::profiles::Side::Right)?;
    let defect = (y1 * y1 + y2 * y2 - j.v).abs() / j.v.abs().max(1.0);
    if defect > 1e-10 {
        return Err(Error::NotOnHypersurface { defect });
    }
    Ok(canonical_levi_from_jet(j, x1, y2, lam, vpp))
}

pub fn canonical_levi_from_jet(j: Jet, x1: f64, y2: f64, lam: C64, vpp: &[C64]) -> f64 {
    let s = x1 * x1;
    let w: f64 = vpp.iter().map(|c| c.norm_sqr()).sum();
    lam.norm_sqr() * (-2.0 * s * y2 * y2 * j.d2 + (1.0 - j.d1) * (s * j.d1 * j.d1 + j.v))
        + (1.0 - j.d1) * w
}

/// Finite-difference Hessian with a Richardson error estimate.
#[derive(Clone, Debug)]
pub struct FdHessian {
    pub form: HermitianForm,
    pub error_estimate: f64,
}

fn real_hessian<F: Fn(&[f64]) -> f64>(field: &F, p: &[f64], h: f64) -> DMatrix<f64> {
    let m = p.len();
    let f0 = field(p);
    let mut q = p.to_vec();
    let mut out = DMatrix::<f64>::zeros(m, m);
    for a in 0..m {
        q[a] = p[a] + h;
        let fp = field(&q);
        q[a] = p[a] - h;
        let fm = field(&q);
        q[a] = p[a];
        out[(a, a)] = (fp - 2.0 * f0 + fm) / (h * h);
        for b in a + 1..m {
            let mut e = |sa: f64, sb: f64| {
                q[a] = p[a] + sa * h;
                q[b] = p[b] + sb * h;
                let v = field(&q);
                q[a] = p[a];
                q[b] = p[b];
                v
            };
            let v = (e(1.0, 1.0) - e(1.0, -1.0) - e(-1.0, 1.0) + e(-1.0, -1.0)) / (4.0 * h * h);
            out[(a, b)] = v;
            out[(b, a)] = v;
        }
    }
    out
}

fn wirtinger(real: &DMatrix<f64>) -> DMatrix<C64> {
    let n = real.nrows() / 2;
    DMatrix::from_fn(n, n, |j, k| {
        let xx = real[(j, k)];
        let yy = real[(n + j, n + k)];
        let xy = real[(j, n + k)];
        let yx = real[(n + j, k)];
        C64::new(0.25 * (xx + yy), 0.25 * (xy - yx))
    })
}

/// `∂²/∂z_j∂z̄_k = ¼(∂x_j∂x_k + ∂y_j∂y_k) + (i/4)(∂x_j∂y_k − ∂y_j∂x_k)` from
/// central differences at `step` and `2·step`, Richardson-combined.
/// `field` takes `(x₁…xₙ, y₁…yₙ)`.
pub fn fd_hessian<F: Fn(&[f64]) -> f64>(field: F, p: &[f64], step: f64) -> Result<FdHessian> {
    if p.len() % 2 != 0 || p.is_empty() {
        return Err(Error::ShapeError("expected 2n real coordinates".into()));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let fine = wirtinger(&real_hessian(&field, p, step));
    let coarse = wirtinger(&real_hessian(&field, p, 2.0 * step));
    let rich = (fine.scale(4.0) - &coarse).unscale(3.0);
    let err = (&fine - &coarse)
        .iter()
        .map(|c| c.norm() / 3.0)
        .fold(0.0, f64::max);
    Ok(FdHessian {
        form: HermitianForm(rich),
        error_estimate: err,
    })
}

/// `ρ(x + iy) = |y|² − θ(|x|²)` on real coordinates.
pub fn rotational_field(theta: &RadialProfile) -> impl Fn(&[f64]) -> f64 + '_ {
    move |v: &[f64]| {
        let n = v.len() / 2;
        let s: f64 = v[..n].iter().map(|a| a * a).sum();
        let y2: f64 = v[n..].iter().map(|a| a * a).sum();
        y2 - theta.value(s).unwrap_or(f64::NAN)
    }
}

/// Block Hessian of `τ = Q(y, w) − h(|x|²)`: z-block `(A − ḣI)/2 − ḧ x xᵀ`,
/// w-block `(B + I)/2`, zero cross blocks.
pub fn quadratic_tau_hessian_from_jet(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    h: Jet,
    x: &[f64],
) -> Result<HermitianForm> {
    let k = a.nrows();
    let m = b.nrows();
    if x.len() != k || a.ncols() != k || b.ncols() != m {
        return Err(Error::ShapeError(format!(
            "A is {}x{}, B is {}x{}, x has length {}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            x.len()
        )));
    }
    let n = k + m;
    let mut out = DMatrix::<f64>::zeros(n, n);
    for i in 0..k {
        for j in 0..k {
            out[(i, j)] = 0.5 * a[(i, j)] - h.d2 * x[i] * x[j];
        }
        out[(i, i)] -= 0.5 * h.d1;
    }
    for i in 0..m {
        for j in 0..m {
            out[(k + i, k + j)] = 0.5 * b[(i, j)];
        }
        out[(k + i, k + i)] += 0.5;
    }
    Ok(HermitianForm::from_real(&out))
}

/// Smallest eigenvalue of a form.
pub fn min_eigenvalue(h: &HermitianForm) -> f64 {
    h.eigenvalues()[0]
}

/// Tally of [`levi_consistency`].
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LeviConsistency {
    pub radii: usize,
    pub points: usize,
    /// Radii where the θ-form verdict is strict or reversed.
    pub decided: usize,
    /// Radii whose spectra contradict the verdict.
    pub exceptions: usize,
    /// `s` of every exception.
    pub exception_radii: Vec<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Samples `per_radius` points of `{|y|² = θ(|x|²)} ⊂ ℂⁿ` at each `s` and
/// checks: the strict θ-form verdict holds iff every restricted eigenvalue
/// is positive, the reversed one iff every eigenvalue is negative. The first
/// point at each radius has `x·y = 0`, where the Levi form is smallest.
pub fn levi_consistency(
    theta: &RadialProfile,
    radii: &[f64],
    n: usize,
    per_radius: usize,
    seed: u64,
) -> Result<LeviConsistency> {
    use crate::pseudoconvexity::{theta_condition, Verdict};
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;

    if n < 2 {
        return Err(Error::ShapeError(
            "the complex tangent space is trivial for n = 1".into(),
        ));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let unit = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.into_iter().map(|a| a / norm).collect()
    };
    let mut out = LeviConsistency {
        min_eigenvalue: f64::INFINITY,
        max_eigenvalue: f64::NEG_INFINITY,
        ..Default::default()
    };
    for &s in radii {
        let verdict = theta_condition(theta, s)?.verdict();
        let (r, q) = (s.sqrt(), theta.value(s)?.sqrt());
        let (mut all_pos, mut all_neg) = (true, true);
        for i in 0..per_radius {
            let ux = unit(&mut rng);
            let mut uy = unit(&mut rng);
            if i == 0 {
                let d: f64 = ux.iter().zip(&uy).map(|(a, b)| a * b).sum();
                uy.iter_mut().zip(&ux).for_each(|(b, a)| *b -= d * a);
                let norm = uy.iter().map(|a| a * a).sum::<f64>().sqrt();
                uy.iter_mut().for_each(|b| *b /= norm);
            }
            let p = BoundaryPoint::new(
                ux.iter().map(|a| a * r).collect(),
                uy.iter().map(|b| b * q).collect(),
            )?;
            for spec in rotational_levi_spectrum(theta, &p)?.sides() {
                all_pos &= spec.iter().all(|&e| e > 0.0);
                all_neg &= spec.iter().all(|&e| e < 0.0);
                out.min_eigenvalue = out.min_eigenvalue.min(spec[0]);
                out.max_eigenvalue = out.max_eigenvalue.max(spec[spec.len() - 1]);
            }
            out.points += 1;
        }
        out.radii += 1;
        let (strict, reverse) = match verdict {
            Verdict::StrictHolds => (true, false),
            Verdict::ReverseHolds => (false, true),
            Verdict::Equality(_) => continue,
            Verdict::Violated => (false, false),
        };
        if strict || reverse {
            out.decided += 1;
        }
        if strict != all_pos || reverse != all_neg {
            out.exceptions += 1;
            out.exception_radii.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::sqrt_quadratic;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gradient_of_cylinder() {
        let th = RadialProfile::constant(1.0, 0.0, 10.0).unwrap();
        let p = BoundaryPoint::new(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        let g = rotational_gradient(&th, &p).unwrap();
        assert_eq!(g[0], c(0.0, -1.0));
        assert_eq!(g[1], c(0.0, 0.0));
    }

    #[test]
    fn gradient_of_line_profile() {
        let th = RadialProfile::affine(1.0, 2.0, 0.0, 10.0).unwrap();
        let y2 = (3.0f64 - 0.25).sqrt();
        let p = BoundaryPoint::new(vec![1.0, 0.0], vec![0.5, y2]).unwrap();
        let g = rotational_gradient(&th, &p).unwrap();
        assert_eq!(g[0], c(-2.0, -0.5));
    }

    #[test]
    fn hessian_closed_forms() {
        let p = BoundaryPoint::new(vec![0.3, -0.7], vec![1.0, 0.2]).unwrap();
        let cyl = RadialProfile::constant(4.0, 0.0, 10.0).unwrap();
        let h = rotational_hessian(&cyl, &p).unwrap().right();
        assert!(
            h.max_abs_diff(&HermitianForm::from_real(
                &DMatrix::identity(2, 2).scale(0.5)
            )) < 1e-15
        );
        let lin = RadialProfile::affine(0.0, 1.0, 0.0, 10.0).unwrap();
        let h = rotational_hessian(&lin, &p).unwrap().right();
        assert!(h.0.iter().all(|z| z.norm() == 0.0));
        let th = RadialProfile::affine(1.0, 2.0, 0.0, 10.0).unwrap();
        let h = rotational_hessian(&th, &p).unwrap().right();
        assert!(
            h.max_abs_diff(&HermitianForm::from_real(
                &DMatrix::identity(2, 2).scale(-0.5)
            )) < 1e-15
        );
    }

    #[test]
    fn frames_for_axis_gradients() {
        let g = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let f = tangent_frame(&g).unwrap();
        let v = f.vectors();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0][1], c(1.0, 0.0));
        assert_eq!(v[1][2], c(1.0, 0.0));
        let g = DVector::from_vec(vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)]);
        let f = tangent_frame(&g).unwrap();
        for v in f.vectors() {
            assert_eq!(v[1], c(0.0, 0.0));
        }
        assert!(f.orthonormality_defect() < 1e-15);
        let z = DVector::from_vec(vec![c(0.0, 0.0); 2]);
        assert_eq!(tangent_frame(&z), Err(Error::SingularPoint));
    }

    #[test]
    fn spectrum_of_cylinder_and_cone() {
        let cyl = RadialProfile::constant(1.0, 0.0, 10.0).unwrap();
        let p = BoundaryPoint::new(vec![0.0; 3], vec![1.0, 0.0, 0.0]).unwrap();
        let s = rotational_levi_spectrum(&cyl, &p).unwrap().right();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|v| (v - 0.5).abs() < 1e-15));
        let lin = RadialProfile::affine(0.0, 1.0, 0.0, 10.0).unwrap();
        let p = BoundaryPoint::new(vec![0.6, 0.8], vec![0.8, -0.6]).unwrap();
        let s = rotational_levi_spectrum(&lin, &p).unwrap().right();
        assert!(s.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn line_profiles_change_sign_across_lambda_one() {
        for (lam, positive) in [(0.5, true), (2.0, false)] {
            let th = RadialProfile::affine(1.0, lam, 0.0, 10.0).unwrap();
            let y2 = (lam + 1.0f64).sqrt();
            let p = BoundaryPoint::new(vec![1.0, 0.0], vec![0.0, y2]).unwrap();
            let s = rotational_levi_spectrum(&th, &p).unwrap().right();
            assert_eq!(s.len(), 1);
            assert_eq!(s[0] > 0.0, positive);
            let two_l = canonical_levi_value(&th, 1.0, 0.0, y2, c(1.0, 0.0), &[]).unwrap();
            // frame vector is the normalized canonical vector
            let v = canonical_tangent_vector(lam, 1.0, 0.0, y2, c(1.0, 0.0), &[]);
            let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((two_l / (2.0 * nv) - s[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn canonical_value_examples() {
        let th = RadialProfile::affine(1.0, 2.0, 0.0, 10.0).unwrap();
        let v = canonical_levi_value(&th, 1.0, 0.0, 3f64.sqrt(), c(1.0, 0.0), &[]).unwrap();
        assert!((v + 7.0).abs() < 1e-14);
        let one = RadialProfile::constant(1.0, 0.0, 10.0).unwrap();
        let v = canonical_levi_value(&one, 0.0, 0.0, 1.0, c(1.0, 0.0), &[]).unwrap();
        assert_eq!(v, 1.0);
        let z = canonical_levi_value(&one, 0.0, 0.0, 1.0, c(0.0, 0.0), &[c(0.0, 0.0)]).unwrap();
        assert_eq!(z, 0.0);
        assert!(matches!(
            canonical_levi_value(&one, 0.0, 0.0, 2.0, c(1.0, 0.0), &[]),
            Err(Error::NotOnHypersurface { .. })
        ));
    }

    #[test]
    fn fd_oracle_on_model_fields() {
        let p = [0.3, -0.2, 0.5, 0.9];
        let fd = fd_hessian(|v: &[f64]| v[2] * v[2] + v[3] * v[3], &p, 1e-4).unwrap();
        let half = HermitianForm::from_real(&DMatrix::identity(2, 2).scale(0.5));
        assert!(fd.form.max_abs_diff(&half) < 1e-7);
        let fd = fd_hessian(
            |v: &[f64]| v[0] * v[0] + v[1] * v[1] - v[2] * v[2] - v[3] * v[3],
            &p,
            1e-4,
        )
        .unwrap();
        assert!(fd.form.0.iter().all(|z| z.norm() < 1e-7));
    }

    #[test]
    fn fd_matches_closed_form_for_g() {
        let g = sqrt_quadratic(0.5, 1.0).unwrap();
        let th = crate::profiles::theta_of_f(&g).unwrap();
        let p = [0.4, 0.3, 0.1, 1.1];
        let fd = fd_hessian(rotational_field(&th), &p, 1e-4).unwrap();
        let h = rotational_hessian(&th, &BoundaryPoint::from_real(&p))
            .unwrap()
            .right();
        assert!(fd.form.max_abs_diff(&h) < 1e-7);
    }

    #[test]
    fn tau_hessian_flat_piece() {
        let a = DMatrix::from_element(1, 1, 2.0);
        let b = DMatrix::from_element(1, 1, 1.0);
        let h = quadratic_tau_hessian_from_jet(&a, &b, Jet::new(0.0, 0.25, 0.0), &[0.7]).unwrap();
        assert_eq!(h.0[(0, 0)].re, (2.0 - 0.25) / 2.0);
        assert_eq!(h.0[(1, 1)].re, 1.0);
        assert!(
            quadratic_tau_hessian_from_jet(&a, &b, Jet::new(0.0, 0.0, 0.0), &[0.1, 0.2]).is_err()
        );
    }

    #[test]
    fn n_equal_one_is_rejected() {
        let g = DVector::from_vec(vec![c(1.0, 0.0)]);
        assert!(matches!(tangent_frame(&g), Err(Error::ShapeError(_))));
    }
}
