// Outer handle around |y|² ≥ 2|x|² + 1: constants, certificates, containment.
use handle_forge::constructors::{
    build_outer_handle, derive_constants_outer, rescale_outer, HandleOptions,
};

fn main() -> handle_forge::Result<()> {
    let k = derive_constants_outer(2.0, 0.5, None)?;
    println!(
        "c = {:.15}, η = {:.6e}, c₁ = {:.15}, log σ = {:.6}",
        k.c, k.eta, k.c1, k.log_sigma
    );

    let opts = HandleOptions {
        relax: true,
        ..HandleOptions::default()
    };
    let h = build_outer_handle(2.0, 1.0, 0.5, &opts)?;
    println!(
        "relaxed {} time(s): η = {:.4e}, σ = {:.3e}",
        h.relax_steps, h.constants.eta, h.constants.sigma
    );
    for c in &h.report.certificates {
        println!("  {:<32} min margin {:.4e}", c.name, c.report.min_margin);
    }
    for c in &h.report.claims {
        println!("  {:<32} slack {:.3e}", c.name, c.slack);
    }
    let cont = h.containment(2, 100_000, 10.0, 42)?;
    println!(
        "containment: {} of {} inside, passed {}",
        cont.inside, cont.samples, cont.passed
    );

    let wide = rescale_outer(&h, 4.0)?;
    println!(
        "a = 4: f(1) = {:.12} = 2 f(1/2) = {:.12}",
        wide.f.value(1.0)?,
        2.0 * h.f.value(0.5)?
    );
    Ok(())
}
