use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Seeded uniform sampler on a box, with an optional second half whose
/// leading coordinates are confined to a narrower slab around the handle.
#[derive(Clone, Debug)]
pub struct PointSampler {
    pub n: usize,
    pub box_radius: f64,
    pub focus: Option<f64>,
}

impl PointSampler {
    pub fn new(n: usize, box_radius: f64, focus: Option<f64>) -> Self {
        PointSampler {
            n,
            box_radius,
            focus,
        }
    }

    /// `count` real vectors of length `dim`; in the focused half the first
    /// `focus_dims` coordinates are drawn from `[−focus, focus]`.
    pub fn points(&self, count: usize, seed: u64, dim: usize, focus_dims: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = self.box_radius;
        (0..count)
            .map(|i| {
                let focused = self.focus.filter(|_| i % 2 == 1);
                (0..dim)
                    .map(|j| match focused {
                        Some(w) if j < focus_dims => rng.random_range(-w..=w),
                        _ => rng.random_range(-r..=r),
                    })
                    .collect()
            })
            .collect()
    }

    /// `(|x|, |y|)` of points `x + iy ∈ ℂⁿ`.
    pub fn rotational(&self, count: usize, seed: u64) -> Vec<(f64, f64)> {
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        self.points(count, seed, 2 * self.n, self.n)
            .into_iter()
            .map(|p| (norm(&p[..self.n]), norm(&p[self.n..])))
            .collect()
    }
}

/// Outcome of checking `inner ⊂ set ⊂ outer` on samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub samples: usize,
    pub inside: usize,
    /// Points of the inner set missing from the set.
    pub inner_violations: usize,
    /// Points of the set outside the outer set.
    pub outer_violations: usize,
    pub passed: bool,
}

impl ContainmentReport {
    /// `classify` returns `(in inner set, in set, in outer set)`.
    pub fn check<P: Sync, F: Fn(&P) -> (bool, bool, bool) + Sync>(pts: &[P], classify: F) -> Self {
        let (inside, iv, ov) = pts
            .par_iter()
            .map(|p| {
                let (a, b, c) = classify(p);
                (b as usize, (a && !b) as usize, (b && !c) as usize)
            })
            .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
        ContainmentReport {
            samples: pts.len(),
            inside,
            inner_violations: iv,
            outer_violations: ov,
            passed: iv == 0 && ov == 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_reproducible_and_bounded() {
        let s = PointSampler::new(2, 10.0, Some(1.0));
        let a = s.points(100, 42, 4, 2);
        assert_eq!(a, s.points(100, 42, 4, 2));
        assert_ne!(a, s.points(100, 43, 4, 2));
        assert!(a.iter().flatten().all(|v| v.abs() <= 10.0));
        assert!(a
            .iter()
            .skip(1)
            .step_by(2)
            .all(|p| p[0].abs() <= 1.0 && p[1].abs() <= 1.0));
    }

    #[test]
    fn containment_counts_both_directions() {
        let pts: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let r = ContainmentReport::check(&pts, |&t| (t < 3.0, t < 5.0, t < 4.0));
        assert_eq!(r.inside, 5);
        assert_eq!(r.inner_violations, 0);
        assert_eq!(r.outer_violations, 1);
        assert!(!r.passed);
    }
}
