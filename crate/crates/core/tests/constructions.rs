use handle_forge::constructors::{
    build_inner_handle, build_outer_handle, build_quadratic_handle, derive_constants_inner,
    derive_constants_outer, rescale_outer, HandleConstruction, HandleOptions, QuadraticPoint,
};
use handle_forge::profiles::{sqrt_quadratic, Side};
use handle_forge::pseudoconvexity::{classify, f_condition, Class};
use handle_forge::Error;
use nalgebra::DMatrix;

// Reference values below were computed with 40-digit arithmetic from the
// closed forms, independently of this crate.

fn close(got: f64, want: f64, rel: f64) {
    assert!(
        (got - want).abs() <= rel * want.abs().max(1e-300),
        "got {got:e}, want {want:e}"
    );
}

fn claim(h: &HandleConstruction, name: &str) -> f64 {
    let c = h
        .report
        .claims
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no claim {name}"));
    assert!(c.holds, "{c:?}");
    c.slack
}

#[test]
fn outer_constants_match_reference() {
    let k = derive_constants_outer(2.0, 0.5, None).unwrap();
    close(k.c, 0.27216552697590868, 1e-13);
    close(k.eta, 0.0033600682342704775, 1e-12);
    close(k.c1, 0.27582350594252962, 1e-13);
    close(k.log_sigma, -519.52628656636322, 1e-12);
    close(k.sigma, 2.358e-226, 1e-3);
    assert!(k.sigma_equation_residual().abs() < 1e-10);
    assert!(0.0 < 2.0 * k.sigma && 2.0 * k.sigma < k.eta);
    assert!(k.eta < k.eps.min(k.c.powi(3) / 3.0));
}

#[test]
fn outer_c_agrees_with_its_defining_form() {
    for &(lambda, eps) in &[(2.0, 0.5), (5.0, 0.1), (1.5, 0.01)] {
        let k = derive_constants_outer(lambda, eps, None).unwrap();
        let (_, gp, gpp) = k.g_at_eps();
        close(k.c, gp - eps * gpp, 1e-13);
    }
}

#[test]
fn outer_c_vanishes_cubically() {
    let c = |e: f64| derive_constants_outer(3.0, e, None).unwrap().c;
    let ratio = c(1e-3) / c(2e-3);
    assert!((ratio - 0.125).abs() < 1e-5, "{ratio}");
}

#[test]
fn inner_constants_match_reference() {
    let k = derive_constants_inner(0.5, 0.5, None, None).unwrap();
    close(k.k.unwrap(), 0.73570226039551584, 1e-13);
    close(k.c, -0.13214886980224208, 1e-13);
    close(k.eta, 0.001953125, 0.0);
    close(k.c1, -0.13071195132490709, 1e-13);
    close(k.log_sigma, -964.00695272724702, 1e-12);
    assert_eq!(k.sigma, 0.0, "σ underflows and is carried in log form");

    let k = derive_constants_inner(0.0, 0.5, None, None).unwrap();
    assert_eq!((k.k.unwrap(), k.c), (0.5, -0.25));
    close(k.eta, 0.0078125, 0.0);
    close(k.c1, -0.24609375, 1e-15);
    close(k.log_sigma, -230.04517744447956, 1e-12);

    let k = derive_constants_inner(-1.0, 0.5, None, None).unwrap();
    close(k.k.unwrap(), -0.077350269189625765, 1e-12);
    close(k.c, -0.53867513459481288, 1e-13);
    close(k.eta, 0.125, 0.0);
    close(k.c1, -0.54834391824351610, 1e-13);
    close(k.log_sigma, -14.385837376291652, 1e-12);
}

#[test]
fn inner_constants_satisfy_their_constraints() {
    for &lambda in &[-1.0, 0.0, 0.5, 0.9] {
        let k = derive_constants_inner(lambda, 0.5, None, None).unwrap();
        let (g, gp, _) = k.g_at_eps();
        let kk = k.k.unwrap();
        assert!(gp / k.eps < kk && kk < 1.0);
        close(gp / k.eps, lambda / g, 1e-14);
        assert!(k.c < 0.0 && k.c1 < 0.0 && k.eta + k.c1.powi(3) < 0.0);
        assert!(k.sigma_equation_residual().abs() < 1e-10, "{lambda}");
        assert!(k.log_sigma < (0.5 * k.eta).ln());
    }
}

#[test]
fn regimes_are_enforced() {
    assert!(matches!(
        derive_constants_outer(1.0, 0.5, None),
        Err(Error::NotStronglyPsh(_))
    ));
    assert!(matches!(
        derive_constants_outer(0.5, 0.5, None),
        Err(Error::NotStronglyPsh(_))
    ));
    assert!(matches!(
        derive_constants_inner(1.0, 0.5, None, None),
        Err(Error::WrongRegime(_))
    ));
    assert!(matches!(
        derive_constants_inner(3.0, 0.5, None, None),
        Err(Error::WrongRegime(_))
    ));
    assert!(matches!(
        derive_constants_outer(2.0, -1.0, None),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        derive_constants_inner(-8.0, 0.5, None, None),
        Err(Error::EpsilonTooLarge(_))
    ));
    let opts = HandleOptions::default();
    assert!(matches!(
        build_outer_handle(0.5, 1.0, 0.5, &opts),
        Err(Error::NotStronglyPsh(_))
    ));
    assert!(matches!(
        build_inner_handle(1.5, 0.5, &opts),
        Err(Error::WrongRegime(_))
    ));
}

#[test]
fn outer_handle_properties() {
    let h = build_outer_handle(2.0, 1.0, 0.5, &HandleOptions::default()).unwrap();
    assert!(h.report.passed);
    let k = &h.constants;
    let g = sqrt_quadratic(2.0, 1.0).unwrap();
    for i in 0..100 {
        let t = k.eps * (1.0 + 9.0 * i as f64 / 99.0);
        assert_eq!(h.f.value(t).unwrap(), g.value(t).unwrap(), "{t}");
    }
    for i in 0..1000 {
        let t = k.sigma + (k.eps - k.sigma) * i as f64 / 1000.0;
        assert!(h.f.value(t).unwrap() < g.value(t).unwrap(), "{t}");
    }
    let mut last = 0.0;
    for j in 1..=6 {
        let t = k.sigma + 10f64.powi(-j) * k.sigma;
        let d = h.f.one_sided(t, Side::Right).unwrap().d1;
        close(d, 2.0 * 10f64.powf(j as f64 / 2.0), 1e-6);
        assert!(d > last);
        last = d;
    }
    assert!(h.f.value(k.sigma).unwrap() > 0.0);
    claim(&h, "f > 1/g(ε) on [η, ε)");
    let c = classify(&h.f, k.sigma, k.eps, 2000).unwrap();
    assert_eq!(c.class, Class::DPlusStrong, "{c:?}");
    assert!(c.worst_margin > 0.0);
}

#[test]
fn relaxed_outer_handle_contains_and_is_contained() {
    let opts = HandleOptions {
        relax: true,
        ..HandleOptions::default()
    };
    let h = build_outer_handle(2.0, 1.0, 0.5, &opts).unwrap();
    assert_eq!(h.relax_steps, 1);
    assert!(h.constants.sigma > 1e-120);
    assert!(h.membership(&[0.0, 0.0], &[0.0, 0.0]) < 0.0);
    let c = h.containment(2, 100_000, 10.0, 42).unwrap();
    assert!(c.passed, "{c:?}");
}

#[test]
fn inner_handles_certify() {
    for &lambda in &[-1.0, 0.0, 0.5] {
        let h = build_inner_handle(lambda, 0.5, &HandleOptions::default()).unwrap();
        assert!(h.report.passed, "{lambda}");
        let k = &h.constants;
        let g = sqrt_quadratic(lambda, 1.0).unwrap();
        for i in 0..100 {
            let t = k.eps + (g.domain().hi.min(10.0 * k.eps) - k.eps) * i as f64 / 100.0;
            assert_eq!(h.f.value(t).unwrap(), g.value(t).unwrap());
        }
        claim(&h, "f > g on [σ, ε)");
        claim(&h, "f′ < λt/g(ε) on [η, ε)");
        let lo = if k.sigma > 0.0 {
            k.sigma
        } else {
            h.f.domain().lo
        };
        let c = classify(&h.f_smoothed, lo, k.eps, 2000).unwrap();
        assert_eq!(c.class, Class::DMinusStrong, "{lambda} {c:?}");
        let c = h.containment(2, 20_000, 10.0, 7).unwrap();
        assert!(c.passed, "{lambda} {c:?}");
    }
}

#[test]
fn rescaled_outer_handle_is_scale_invariant() {
    let h = build_outer_handle(2.0, 1.0, 0.5, &HandleOptions::default()).unwrap();
    assert_eq!(rescale_outer(&h, 1.0).unwrap().f, h.f);
    let h4 = rescale_outer(&h, 4.0).unwrap();
    assert!(h4.report.passed);
    let g = sqrt_quadratic(2.0, 4.0).unwrap();
    let k = &h.constants;
    for i in 0..200 {
        let t = k.eps * (0.01 + 0.99 * i as f64 / 199.0);
        close(
            h4.f.value(2.0 * t).unwrap(),
            2.0 * h.f.value(t).unwrap(),
            1e-14,
        );
        let a = f_condition(&h.f, t).unwrap().sides()[0].margins();
        let b = f_condition(&h4.f, 2.0 * t).unwrap().sides()[0].margins();
        for (x, y) in a.iter().zip(b) {
            close(y, *x, 1e-12);
        }
        let s = 2.0 * k.eps * (1.0 + i as f64 / 20.0);
        close(h4.f.value(s).unwrap(), g.value(s).unwrap(), 1e-15);
    }
    assert!(rescale_outer(&h4, 2.0).is_err());
    assert!(rescale_outer(&h, -1.0).is_err());
}

fn model() -> handle_forge::constructors::QuadraticHandle {
    build_quadratic_handle(
        &DMatrix::from_element(1, 1, 2.0),
        &DMatrix::from_element(1, 1, 1.0),
        1.0,
        0.5,
    )
    .unwrap()
}

#[test]
fn quadratic_constants_match_reference() {
    let q = model();
    let c = &q.constants;
    assert_eq!((c.k, c.n), (1, 2));
    close(c.t0, 1.5, 0.0);
    close(c.delta, 1.0 / 6.0, 1e-15);
    close(c.mu, 17.0 / 12.0, 1e-15);
    close(c.big_r, 8.846938775510204, 1e-14);
    close(c.h_big_r, 5.811224489795918, 1e-14);
    close(c.c0, 85.0 / 28.0, 1e-14);
    let rederived = c.delta * c.big_r + c.mu * (c.big_r.sqrt() - c.t0.sqrt()).powi(2);
    close(c.h_big_r, rederived, 1e-14);
    assert!(c.r < c.c0 && c.c0 < c.big_r);
    assert!(q.report.passed);
}

#[test]
fn quadratic_cap_shape() {
    let q = model();
    let c = &q.constants;
    let hp = &q.h_piecewise;
    close(hp.one_sided(c.t0, Side::Left).unwrap().d1, c.delta, 1e-12);
    close(hp.one_sided(c.t0, Side::Right).unwrap().d1, c.delta, 1e-12);
    close(hp.one_sided(c.big_r, Side::Left).unwrap().d1, 1.0, 1e-12);
    for i in 1..=100 {
        let t = c.t0 + (c.big_r - c.t0) * i as f64 / 101.0;
        let j = hp.one_sided(t, Side::Right).unwrap();
        assert!((2.0 * t * j.d2 + j.d1 - c.mu - c.delta).abs() < 1e-10);
    }
    // Convex outside the smoothing windows; inside, the curvature dips
    // below the smaller one-sided limit by a fraction of the jump.
    let windows = &q.report.smoothing[0].windows;
    let mut worst: f64 = 0.0;
    for i in 0..=40_000 {
        let t = 2.0 * c.big_r * i as f64 / 40_000.0;
        let j = q.h.jet(t).unwrap().right();
        worst = worst.max(2.0 * t * j.d2 + j.d1);
        assert!(j.d1 >= 0.99 * c.delta && j.d1 < c.lambda1);
        match windows.iter().find(|w| w.start <= t && t <= w.end) {
            Some(w) => assert!(j.d2 >= -0.1 * w.jump.abs(), "{t} {j:?}"),
            None => assert!(j.d2 >= 0.0, "{t} {j:?}"),
        }
    }
    assert!(worst <= c.mu + c.delta + 1e-6, "{worst}");
}

#[test]
fn quadratic_index_at_origin() {
    let q = model();
    // τ on Λᵏ is −h(|x|²): zero at 0, strictly decreasing outward
    let mut last = q.tau(&QuadraticPoint::on_lambda(vec![0.0], 1));
    assert_eq!(last, 0.0);
    for i in 1..=200 {
        let x = 4.0 * i as f64 / 200.0;
        let v = q.tau(&QuadraticPoint::on_lambda(vec![x], 1));
        close(v, -q.h.value(x * x).unwrap(), 1e-15);
        assert!(v < last);
        last = v;
    }
    // τ on {x = 0} is Q, positive away from 0
    for i in 1..=50 {
        let s = i as f64 / 10.0;
        let p = QuadraticPoint {
            x: vec![0.0],
            y: vec![s],
            u: vec![-s],
            v: vec![0.5 * s],
        };
        close(q.tau(&p), 2.0 * s * s + s * s + 0.25 * s * s, 1e-14);
    }
}

#[test]
fn quadratic_levi_and_containment() {
    let q = model();
    let c = &q.constants;
    assert!(q.min_levi_eigenvalue(10_000, 42).unwrap() > 0.0);
    for x in q.levi_grid(2000, 1) {
        let s: f64 = x.iter().map(|a| a * a).sum();
        if s > c.t0 * 1.01 && s < c.big_r * 0.99 {
            let h = q.tau_hessian(&x).unwrap();
            assert!(h.eigenvalues()[0] >= (c.lambda1 - c.mu - c.delta) / 2.0 - 1e-8);
        }
    }
    let r = q.containment(100_000, 10.0, 42).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn quadratic_rejects_bad_matrices() {
    let one = DMatrix::from_element(1, 1, 1.0);
    assert!(matches!(
        build_quadratic_handle(&one, &one, 1.0, 0.5),
        Err(Error::NotStronglyPsh(_))
    ));
    let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 2.0]);
    assert!(build_quadratic_handle(&a, &one, 1.0, 0.5).is_err());
}
