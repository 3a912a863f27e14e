// Inner handles inside |y|² ≤ λ|x|² + 1 for a tube, a cone-like quadric and an ellipsoid.
use handle_forge::constructors::{build_inner_handle, HandleOptions};

fn main() -> handle_forge::Result<()> {
    for lambda in [0.5, 0.0, -1.0] {
        let h = build_inner_handle(lambda, 0.5, &HandleOptions::default())?;
        let k = &h.constants;
        println!(
            "λ = {lambda}: k = {:.6}, c = {:.6}, η = {:e}, log σ = {:.3}{}",
            k.k.unwrap_or(f64::NAN),
            k.c,
            k.eta,
            k.log_sigma,
            if k.sigma == 0.0 {
                " (σ below double precision)"
            } else {
                ""
            }
        );
        for c in &h.report.certificates {
            println!("  {:<40} {:.4e}", c.name, c.report.min_margin);
        }
        let cont = h.containment(2, 50_000, 10.0, 42)?;
        println!("  containment passed: {}", cont.passed);
    }
    Ok(())
}
