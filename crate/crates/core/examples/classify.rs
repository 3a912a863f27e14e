// Which side of {|y| = f(|x|)} is strongly pseudoconvex, on a grid.
use handle_forge::profiles::{sqrt_quadratic, theta_of_f, RadialProfile};
use handle_forge::pseudoconvexity::{classify, duality_check, f_condition, theta_condition};

fn main() -> handle_forge::Result<()> {
    for lambda in [0.5, 1.0, 2.0] {
        let c = classify(&sqrt_quadratic(lambda, 1.0)?, 0.1, 10.0, 10_000)?;
        println!(
            "g(λ = {lambda}): {:?}, worst margin {:.3e} at t = {:.3}",
            c.class, c.worst_margin, c.worst_location
        );
    }

    let g = sqrt_quadratic(2.0, 1.0)?;
    let r = f_condition(&g, 1.0)?.sides()[0];
    println!(
        "f-form at t = 1: ff′/t = {}, f(f″ + f′³/t) = {:.6}, {:?}",
        r.first.lhs, r.second.lhs, r.verdict
    );
    let r = theta_condition(&theta_of_f(&g)?, 1.0)?.sides()[0];
    println!("θ-form at s = 1: {:?}", r.verdict);

    // inverting θ swaps the sides when θ′ > 0
    let theta = RadialProfile::affine(1.0, 0.5, 0.0, 10.0)?;
    let d = duality_check(&theta, 1.0)?;
    println!(
        "θ = s/2 + 1: θ {:?}, τ {:?}, consistent {}",
        d.theta.verdict, d.tau.verdict, d.consistent
    );
    Ok(())
}
