// Complex Hessian, tangent frame and restricted Levi spectrum of
// ρ = |y|² − θ(|x|²), checked against finite differences.
use handle_forge::levi::{
    canonical_levi_value, fd_hessian, rotational_field, rotational_gradient, rotational_hessian,
    rotational_levi_spectrum, tangent_frame, BoundaryPoint, C64,
};
use handle_forge::profiles::RadialProfile;

fn main() -> handle_forge::Result<()> {
    for lambda in [0.5, 2.0] {
        let theta = RadialProfile::affine(1.0, lambda, 0.0, 10.0)?;
        let p = BoundaryPoint::new(vec![1.0, 0.0], vec![0.0, (lambda + 1.0f64).sqrt()])?;
        let h = rotational_hessian(&theta, &p)?.right();
        let frame = tangent_frame(&rotational_gradient(&theta, &p)?)?;
        let spec = rotational_levi_spectrum(&theta, &p)?.right();
        let fd = fd_hessian(rotational_field(&theta), &p.to_real(), 1e-4)?;
        println!(
            "θ = {lambda}s + 1: spectrum {spec:?}, frame defect {:.1e}, |H − H_fd| = {:.1e}",
            frame.orthonormality_defect(),
            h.max_abs_diff(&fd.form)
        );
    }

    // the reduced-point formula: (1 − 2)(1·4 + 3) = −7
    let theta = RadialProfile::affine(1.0, 2.0, 0.0, 10.0)?;
    let v = canonical_levi_value(&theta, 1.0, 0.0, 3f64.sqrt(), C64::new(1.0, 0.0), &[])?;
    println!("2ℒ at the reduced point: {v}");
    Ok(())
}
