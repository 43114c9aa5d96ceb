use num_complex::Complex64;
use tfse_core::oracles::{self, ContourParams, InversionSpec};
use tfse_core::specfun::{self, FractionalOrder, KernelOptions, Ray};

fn ord(nu: f64) -> FractionalOrder {
    FractionalOrder::new(nu).unwrap()
}

#[test]
fn decomposition_matches_extended_series() {
    let opts = KernelOptions::with_tol(1e-12);
    for nu in [0.2, 0.3, 0.5, 0.7, 0.9, 1.2, 1.5, 1.8] {
        for sigma in [0.5, 1.0, 2.0] {
            for t in [0.05, 0.6, 2.0, 5.0] {
                for ray in [Ray::PlusI, Ray::MinusI] {
                    let d = specfun::ml_ray_decomposed(sigma, ray, ord(nu), t, &opts).unwrap();
                    let r = oracles::ml_series_extended_eval(sigma, ray, ord(nu), t).unwrap();
                    if r.error_bound > 1e-10 {
                        continue;
                    }
                    let err = (d.total - r.value).norm();
                    assert!(err < 1e-9, "nu={nu} sigma={sigma} t={t} {ray:?}: {} vs {} ({err:e})", d.total, r.value);
                }
            }
        }
    }
}

#[test]
fn decomposition_matches_contour_inversion() {
    let opts = KernelOptions::with_tol(1e-12);
    for nu in [0.25, 0.5, 0.8, 1.3, 1.6] {
        for ray in [Ray::PlusI, Ray::MinusI] {
            let spec = InversionSpec::with_contour(1.5, ord(nu), ray, ContourParams::default()).unwrap();
            for t in [0.1, 1.0, 4.0, 10.0] {
                let d = specfun::ml_ray_decomposed(1.5, ray, ord(nu), t, &opts).unwrap();
                let l = oracles::laplace_invert_ml(&spec, t).unwrap();
                assert!((d.total - l).norm() < 1e-7, "nu={nu} t={t} {ray:?}: {} vs {l}", d.total);
            }
        }
    }
}

#[test]
fn two_ic_matches_contour_inversion() {
    let a0 = Complex64::new(0.8, -0.3);
    let a1 = Complex64::new(-0.4, 1.1);
    for nu in [1.1, 1.4, 1.75, 2.0] {
        for ray in [Ray::PlusI, Ray::MinusI] {
            let spec = InversionSpec::with_contour(2.0, ord(nu), ray, ContourParams::default()).unwrap();
            for t in [0.2, 1.5, 6.0] {
                let v = specfun::ml_two_ic(2.0, ray, ord(nu), a0, a1, t, 1e-12).unwrap();
                let l = oracles::laplace_invert_two_ic(&spec, a0, a1, t).unwrap();
                assert!((v - l).norm() < 1e-7, "nu={nu} t={t} {ray:?}: {v} vs {l}");
            }
        }
    }
}

#[test]
fn half_order_closed_form() {
    // E_{1/2}(z) = e^{z²} erfc(−z); on the real axis this is checkable with
    // nothing but erfc.
    for z in [-3.0f64, -1.2, -0.3, 0.0, 0.4, 1.1] {
        let closed = (z * z).exp() * oracles::erfc_closed_form(-z);
        let series = specfun::ml_series(Complex64::new(z, 0.0), ord(0.5), 1e-15).unwrap();
        assert!((series.re - closed).abs() < 1e-10, "z={z}: {} vs {closed}", series.re);
    }
}

#[test]
fn swapped_ray_convention_is_detected() {
    // A decomposition wired to the wrong ray must fail the series comparison
    // by a wide margin, so the cross-check can catch that mistake.
    let opts = KernelOptions::with_tol(1e-12);
    let mut worst = 0.0f64;
    for nu in [0.3, 0.5, 0.7, 0.9] {
        for t in [0.5, 2.0, 5.0] {
            let wrong = specfun::ml_ray_decomposed(1.0, Ray::PlusI, ord(nu), t, &opts).unwrap();
            let reference = oracles::ml_series_extended_eval(1.0, Ray::MinusI, ord(nu), t).unwrap();
            worst = worst.max((wrong.total - reference.value).norm());
        }
    }
    assert!(worst > 1e-2, "{worst}");
}
