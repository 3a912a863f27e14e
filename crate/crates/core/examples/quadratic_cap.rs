// Handle for Q(y, w) − |x|² with A = diag(2), B = diag(1): the cap h and τ.
use handle_forge::constructors::{build_quadratic_handle, QuadraticPoint};
use nalgebra::DMatrix;

fn main() -> handle_forge::Result<()> {
    let a = DMatrix::from_element(1, 1, 2.0);
    let b = DMatrix::from_element(1, 1, 1.0);
    let q = build_quadratic_handle(&a, &b, 1.0, 0.5)?;
    let c = &q.constants;
    println!(
        "t₀ = {}, δ = {:.6}, μ = {:.6}, R = {:.9}, h(R) = {:.9}, c₀ = {:.9}",
        c.t0, c.delta, c.mu, c.big_r, c.h_big_r, c.c0
    );
    for cl in &q.report.claims {
        println!("  {:<34} slack {:.3e}", cl.name, cl.slack);
    }
    for x in [0.0, 1.0, 2.0, 3.0] {
        println!(
            "τ on Λ¹ at |x| = {x}: {:.6}",
            q.tau(&QuadraticPoint::on_lambda(vec![x], 1))
        );
    }
    println!(
        "min Levi eigenvalue of τ: {:.4e}",
        q.min_levi_eigenvalue(10_000, 42)?
    );
    println!(
        "containment passed: {}",
        q.containment(100_000, 10.0, 42)?.passed
    );
    Ok(())
}
