// g(t) = √(λt² + a), its jets, inverse, θ-form and JSON form.
use handle_forge::profiles::{invert, sqrt_quadratic, theta_of_f, RadialProfile};

fn main() -> handle_forge::Result<()> {
    let g = sqrt_quadratic(2.0, 1.0)?;
    for t in [0.0, 0.5, 1.0, 2.0] {
        let j = g.jet(t)?.right();
        println!("g({t}) = {:.7}  g′ = {:.7}  g″ = {:.7}", j.v, j.d1, j.d2);
    }

    let back = invert(&g, 3f64.sqrt())?;
    println!("g⁻¹(√3) = {} (slope {:.6})", back.t, back.derivative);

    // θ(s) = g(√s)² is the line 2s + 1
    let theta = theta_of_f(&g)?;
    let j = theta.jet(4.0)?.right();
    println!("θ(4) = {}, θ′ = {}, θ″ = {}", j.v, j.d1, j.d2);

    let json = g.to_json()?;
    println!("{json}");
    assert_eq!(RadialProfile::from_json(&json)?, g);
    Ok(())
}
