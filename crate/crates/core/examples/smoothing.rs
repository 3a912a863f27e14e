// C² smoothing of kinks and curvature jumps, and re-certification.
use handle_forge::profiles::{RadialProfile, Segment, SegmentKind};
use handle_forge::pseudoconvexity::Condition;
use handle_forge::smoothing::{
    edge_curvature_mismatch, mollify_breakpoints, smooth_and_certify, Radius,
};

fn quadratic(center: f64, value: f64, slope: f64, curvature: f64) -> SegmentKind {
    SegmentKind::AffineDerivativeIntegral {
        center,
        value,
        slope,
        curvature,
    }
}

fn main() -> handle_forge::Result<()> {
    // |t| on [−1, 1]
    let abs = RadialProfile::new(vec![
        Segment::new(-1.0, 0.0, quadratic(0.0, 0.0, -1.0, 0.0)),
        Segment::new(0.0, 1.0, quadratic(0.0, 0.0, 1.0, 0.0)),
    ])?;
    let s = mollify_breakpoints(&abs, 0.1)?;
    println!(
        "|t|: {:?} → {:?}, f(0) = {:.6}",
        abs.continuity(),
        s.profile.continuity(),
        s.profile.value(0.0)?
    );

    // curvature ½ → 2 at t = 2, a profile satisfying the reversed inequalities
    let step = RadialProfile::new(vec![
        Segment::new(1.0, 2.0, quadratic(2.0, 3.0, 1.0, 0.5)),
        Segment::new(2.0, 3.0, quadratic(2.0, 3.0, 1.0, 2.0)),
    ])?;
    let o = smooth_and_certify(
        &step,
        Condition::Ineq9,
        1.0,
        3.0,
        2000,
        Radius::Relative(0.01),
    )?;
    let w = &o.smoothed.windows[0];
    println!(
        "window [{:.4}, {:.4}]: edge mismatch {:.1e}, margin {:.4} → {:.4}, accepted {}",
        w.start,
        w.end,
        edge_curvature_mismatch(&o.smoothed)?,
        o.before.min_margin,
        o.after.min_margin,
        o.accepted
    );
    Ok(())
}
