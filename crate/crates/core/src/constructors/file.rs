use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::quadratic::QuadraticHandle;
use super::rotational::{HandleConstruction, HandleKind};
use super::Certificate;
use crate::error::{Error, Result};
use crate::profiles::RadialProfile;
use crate::pseudoconvexity::Condition;

/// A certificate to re-run after reloading.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub name: String,
    pub profile: String,
    pub condition: Condition,
    pub lo: f64,
    pub hi: f64,
    pub grid: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrices {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::ShapeError("matrix rows have unequal length".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// On-disk form of a construction: named profiles, the constants, and the
/// checks that certified them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandleFile {
    /// `outer`, `inner` or `quadratic`.
    pub kind: String,
    pub constants: BTreeMap<String, f64>,
    pub profiles: BTreeMap<String, RadialProfile>,
    pub checks: Vec<CheckSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Matrices>,
}

fn constants_map<T: Serialize>(c: &T) -> Result<BTreeMap<String, f64>> {
    let v = serde_json::to_value(c)?;
    let mut out = BTreeMap::new();
    if let Some(obj) = v.as_object() {
        for (k, v) in obj {
            if let Some(x) = v.as_f64() {
                out.insert(k.clone(), x);
            }
        }
    }
    Ok(out)
}

impl HandleConstruction {
    pub fn to_file(&self) -> Result<HandleFile> {
        let mut profiles = BTreeMap::new();
        profiles.insert("f".to_string(), self.f.clone());
        profiles.insert("f_smoothed".to_string(), self.f_smoothed.clone());
        profiles.insert("inverse".to_string(), self.inverse.clone());
        profiles.insert(
            "inverse_smoothed".to_string(),
            self.inverse_smoothed.clone(),
        );
        let kind = match self.kind {
            HandleKind::Outer => "outer",
            HandleKind::Inner => "inner",
        };
        Ok(HandleFile {
            kind: kind.into(),
            constants: constants_map(&self.constants)?,
            profiles,
            checks: self
                .report
                .certificates
                .iter()
                .map(Certificate::spec)
                .collect(),
            matrices: None,
        })
    }
}

impl QuadraticHandle {
    pub fn to_file(&self) -> Result<HandleFile> {
        let mut profiles = BTreeMap::new();
        profiles.insert("h_piecewise".to_string(), self.h_piecewise.clone());
        profiles.insert("h".to_string(), self.h.clone());
        Ok(HandleFile {
            kind: "quadratic".into(),
            constants: constants_map(&self.constants)?,
            profiles,
            checks: self
                .report
                .certificates
                .iter()
                .map(Certificate::spec)
                .collect(),
            matrices: Some(Matrices {
                a: rows(&self.a),
                b: rows(&self.b),
            }),
        })
    }
}

impl HandleFile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn profile(&self, name: &str) -> Result<&RadialProfile> {
        self.profiles
            .get(name)
            .ok_or_else(|| Error::Format(format!("no profile named {name:?}")))
    }

    pub fn constant(&self, name: &str) -> Result<f64> {
        self.constants
            .get(name)
            .copied()
            .ok_or_else(|| Error::Format(format!("no constant named {name:?}")))
    }

    pub fn matrices(&self) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let m = self
            .matrices
            .as_ref()
            .ok_or_else(|| Error::Format("file carries no matrices".into()))?;
        Ok((matrix(&m.a)?, matrix(&m.b)?))
    }

    /// Re-runs the stored checks, optionally restricted to one condition and
    /// with a different grid size.
    pub fn rerun(&self, condition: Option<&str>, grid: Option<usize>) -> Result<Vec<Certificate>> {
        self.checks
            .iter()
            .filter(|c| condition.is_none_or(|l| c.condition.label() == l))
            .map(|c| {
                Certificate::run(
                    &c.name,
                    &c.profile,
                    self.profile(&c.profile)?,
                    c.condition,
                    c.lo,
                    c.hi,
                    grid.unwrap_or(c.grid),
                )
            })
            .collect()
    }

    /// The region's boundary in `(|x|, |y|)` coordinates (`(|x|, √Q)` for
    /// the quadratic handle) as a polyline of `n` points.
    pub fn region_boundary(&self, n: usize, level: f64) -> Result<Vec<(f64, f64)>> {
        match self.kind.as_str() {
            "outer" => {
                let h = self.profile("inverse_smoothed")?;
                let eps = self.constant("eps")? * self.constant("a")?.sqrt();
                let top = 2.0 * self.profile("f")?.value(4.0 * eps)?;
                (0..n)
                    .map(|i| {
                        let u = top * i as f64 / (n - 1) as f64;
                        Ok((h.value(u)?, u))
                    })
                    .collect()
            }
            "inner" => {
                let f = self.profile("f_smoothed")?;
                let sigma = self.constant("sigma")?;
                let d = f.domain();
                let hi = if d.hi.is_finite() {
                    d.hi
                } else {
                    8.0 * self.constant("eps")?
                };
                (0..n)
                    .map(|i| {
                        let t = sigma + (hi - sigma) * i as f64 / (n - 1) as f64;
                        Ok((t, f.value(t.min(d.hi))?))
                    })
                    .collect()
            }
            "quadratic" => {
                let h = self.profile("h")?;
                let big_r = self.constant("big_r")?;
                let tau = |r: f64, phi: f64| -> Result<f64> {
                    let (xn, qn) = (r * phi.cos(), r * phi.sin());
                    Ok(qn * qn - h.value(xn * xn)? - level)
                };
                // outermost sign change along rays from the origin, refined by
                // bisection; τ(0) = 0 makes the origin itself useless at c = 0
                let rmax = 4.0 * big_r.max(level.abs()).sqrt() + 1.0;
                let scan = 2000;
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    let phi = std::f64::consts::FRAC_PI_2 * (i as f64 + 0.5) / n as f64;
                    let at = |j: usize| rmax * j as f64 / scan as f64;
                    let mut bracket = None;
                    let mut upper = tau(at(scan), phi)?;
                    for j in (1..scan).rev() {
                        let lower = tau(at(j), phi)?;
                        if lower.signum() != upper.signum() {
                            bracket = Some((at(j), at(j + 1), lower));
                            break;
                        }
                        upper = lower;
                    }
                    let Some((mut lo, mut hi, f_lo)) = bracket else {
                        continue;
                    };
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if tau(mid, phi)?.signum() == f_lo.signum() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let r = 0.5 * (lo + hi);
                    out.push((r * phi.cos(), r * phi.sin()));
                }
                Ok(out)
            }
            other => Err(Error::Format(format!("unknown handle kind {other:?}"))),
        }
    }
}
