//! Explicit handle constructions: the outer handle over `|y|² ≥ λ|x|² + a`
//! (λ > 1), the inner handle over `|y|² ≤ λ|x|² + 1` (λ < 1), and the
//! quadratic cap over `ρ = Q(y, w) − |x|²`.
//!
//! Every build ends in grid certification; nothing is trusted to the
//! "sufficiently small ε" asymptotics.

mod file;
mod quadratic;
mod rotational;
mod sampling;

use serde::Serialize;

use crate::error::Result;
use crate::profiles::RadialProfile;
use crate::pseudoconvexity::{certification_grid, sweep_points, Condition, VerificationReport};
use crate::smoothing::{Radius, SmoothingOutcome, WindowInfo};

pub use file::{CheckSpec, HandleFile, Matrices};
pub use quadratic::{
    build_quadratic_handle, build_quadratic_handle_with, quadratic_constants,
    symmetric_min_eigenvalue, QuadraticConstants, QuadraticHandle, QuadraticPoint,
};
pub use rotational::{
    assemble_inner_handle, assemble_outer_handle, build_inner_handle, build_outer_handle,
    derive_constants_inner, derive_constants_outer, inner_derivative_table, outer_derivative_table,
    rescale_outer, HandleConstants, HandleConstruction, HandleKind, HandleOptions,
};
pub use sampling::{ContainmentReport, PointSampler};

/// Grid size used by the constructions' own certificates.
pub const DEFAULT_GRID: usize = 2000;

/// A condition swept over an interval of one named profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub profile: String,
    pub lo: f64,
    pub hi: f64,
    pub grid: usize,
    pub report: VerificationReport,
}

impl Certificate {
    pub fn run(
        name: &str,
        profile_name: &str,
        p: &RadialProfile,
        cond: Condition,
        lo: f64,
        hi: f64,
        grid: usize,
    ) -> Result<Self> {
        let pts = certification_grid(p, lo, hi, grid)?;
        let report = sweep_points(p, cond, &pts)?.report();
        Ok(Certificate {
            name: name.into(),
            profile: profile_name.into(),
            lo,
            hi,
            grid,
            report,
        })
    }

    pub fn spec(&self) -> CheckSpec {
        CheckSpec {
            name: self.name.clone(),
            profile: self.profile.clone(),
            condition: self.report.condition,
            lo: self.lo,
            hi: self.hi,
            grid: self.grid,
        }
    }
}

/// A checked claim that is not a grid sweep (bounds from the proofs,
/// identities, containments).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub name: String,
    pub holds: bool,
    /// Smallest slack observed; positive when the claim holds strictly.
    pub slack: f64,
}

impl Claim {
    pub fn new(name: &str, slack: f64) -> Self {
        Claim {
            name: name.into(),
            holds: slack > 0.0,
            slack,
        }
    }
}

/// Summary of one smoothing pass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothingSummary {
    pub profile: String,
    pub radius: Radius,
    pub halvings: usize,
    pub accepted: bool,
    pub margin_before: f64,
    pub margin_after: f64,
    pub margin_loss: f64,
    pub windows: Vec<WindowInfo>,
    pub skipped: Vec<f64>,
}

impl SmoothingSummary {
    fn new(profile: &str, radius: Radius, o: &SmoothingOutcome) -> Self {
        let mut r = radius;
        for _ in 0..o.halvings {
            r = r.halved();
        }
        SmoothingSummary {
            profile: profile.into(),
            radius: r,
            halvings: o.halvings,
            accepted: o.accepted,
            margin_before: o.before.min_margin,
            margin_after: o.after.min_margin,
            margin_loss: o.margin_loss,
            windows: o.smoothed.windows.clone(),
            skipped: o.smoothed.skipped.clone(),
        }
    }
}

/// Everything a build checked, for `certify.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub passed: bool,
    pub certificates: Vec<Certificate>,
    pub smoothing: Vec<SmoothingSummary>,
    pub claims: Vec<Claim>,
}

impl CertificationReport {
    pub(crate) fn new(
        certificates: Vec<Certificate>,
        smoothing: Vec<SmoothingSummary>,
        claims: Vec<Claim>,
    ) -> Self {
        let passed = certificates.iter().all(|c| c.report.passed)
            && smoothing.iter().all(|s| s.accepted)
            && claims.iter().all(|c| c.holds);
        CertificationReport {
            passed,
            certificates,
            smoothing,
            claims,
        }
    }

    /// The first failure as an error, if any.
    pub fn ensure(&self) -> Result<()> {
        use crate::error::Error;
        if let Some(c) = self.certificates.iter().find(|c| !c.report.passed) {
            return Err(Error::VerificationFailed {
                what: c.name.clone(),
                location: c.report.location,
                margin: c.report.min_margin,
            });
        }
        if let Some(s) = self.smoothing.iter().find(|s| !s.accepted) {
            return Err(Error::VerificationFailed {
                what: format!("smoothing of {}", s.profile),
                location: f64::NAN,
                margin: s.margin_after,
            });
        }
        if let Some(c) = self.claims.iter().find(|c| !c.holds) {
            return Err(Error::VerificationFailed {
                what: c.name.clone(),
                location: f64::NAN,
                margin: c.slack,
            });
        }
        Ok(())
    }
}
