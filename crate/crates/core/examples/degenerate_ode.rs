// Solutions of f(f″ + f′³/t) = 1 bound weakly pseudoconvex hypersurfaces:
// the Levi form has a zero eigenvalue where x·y = 0.
use handle_forge::levi::{levi_consistency, rotational_levi_spectrum, BoundaryPoint};
use handle_forge::profiles::theta_of_f;
use handle_forge::pseudoconvexity::{degenerate_profile, f_condition};

fn main() -> handle_forge::Result<()> {
    let f = degenerate_profile(0.5, 1.0, 0.2, 1.5, 1000)?;
    let theta = theta_of_f(&f)?;
    for t in [0.6, 1.0, 1.4] {
        let r = f_condition(&f, t)?.sides()[0];
        let q = theta.value(t * t)?.sqrt();
        let on =
            rotational_levi_spectrum(&theta, &BoundaryPoint::new(vec![t, 0.0], vec![0.0, q])?)?
                .right();
        let off =
            rotational_levi_spectrum(&theta, &BoundaryPoint::new(vec![t, 0.0], vec![q, 0.0])?)?
                .right();
        println!(
            "t = {t}: residual {:.1e}, ff′/t = {:.4}, λ_min(x⊥y) = {:.1e}, λ_min(x∥y) = {:.4e}",
            r.residual, r.first.lhs, on[0], off[0]
        );
    }
    let radii: Vec<f64> = (0..20).map(|i| 0.3 + 0.09 * i as f64).collect();
    let c = levi_consistency(&theta, &radii, 3, 10, 7)?;
    println!(
        "{} points: min eigenvalue {:.2e}, {} radii decided",
        c.points, c.min_eigenvalue, c.decided
    );
    Ok(())
}
