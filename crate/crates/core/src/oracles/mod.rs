//! Independent cross-checks for [`crate::specfun`].
//!
//! Nothing here calls the `specfun` evaluators. The Bromwich inversion works
//! from the Laplace-domain solution directly, the extended series sums the
//! power series in double-double arithmetic, and `erfc` is self-contained so it
//! can arbitrate the `ν = 1/2` closed form.

mod ddouble;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::{FractionalOrder, Ray};

use ddouble::Dd;

/// Contour discretisation for [`laplace_invert_ml`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourParams {
    /// Initial trapezoid node count `2N + 1` (`N` doubles until successive
    /// results agree).
    pub nodes: usize,
    /// Multiplier on the default parabola scale `μ = πN/(12t)`.
    pub scale: f64,
    /// Relative distance from a pole to the contour that counts as a clash.
    pub pole_margin: f64,
}

impl Default for ContourParams {
    fn default() -> Self {
        Self {
            nodes: 25,
            scale: 1.0,
            pole_margin: 1e-3,
        }
    }
}

/// Parameters of the inverted transform `s^{ν−1}/(s^ν − σ(±i)^ν)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionSpec {
    pub sigma: f64,
    pub order: FractionalOrder,
    pub ray: Ray,
    pub contour: ContourParams,
}

impl InversionSpec {
    pub fn new(sigma: f64, order: FractionalOrder) -> Result<Self> {
        Self::with_contour(sigma, order, Ray::PlusI, ContourParams::default())
    }

    pub fn with_contour(sigma: f64, order: FractionalOrder, ray: Ray, contour: ContourParams) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidInput(format!("sigma must be finite and > 0, got {sigma}")));
        }
        if contour.nodes < 16 {
            return Err(Error::InvalidInput("contour needs at least 16 nodes".into()));
        }
        if !(contour.scale > 0.0) {
            return Err(Error::InvalidInput("contour scale must be positive".into()));
        }
        Ok(Self {
            sigma,
            order,
            ray,
            contour,
        })
    }

    fn lambda(&self) -> Complex64 {
        let angle = self.ray.sign() * 0.5 * PI * self.order.value();
        Complex64::from_polar(self.sigma, angle)
    }

    /// Solutions of `s^ν = λ` with `|arg s| < π`.
    fn poles(&self) -> Vec<Complex64> {
        let nu = self.order.value();
        let lam = self.lambda();
        let modulus = lam.norm().powf(1.0 / nu);
        (-2i32..=2)
            .map(|k| (lam.arg() + 2.0 * PI * k as f64) / nu)
            .filter(|a| a.abs() < PI)
            .map(|a| Complex64::from_polar(modulus, a))
            .collect()
    }
}

/// Exact residue contribution `e^{iσ^{1/ν}t}/ν` of the pole `s₀ = iσ^{1/ν}`.
pub fn residue_term(sigma: f64, order: FractionalOrder, t: f64) -> Result<Complex64> {
    order.require_sub_unit()?;
    if !(sigma > 0.0) {
        return Err(Error::InvalidInput(format!("sigma must be > 0, got {sigma}")));
    }
    let nu = order.value();
    let w = sigma.powf(1.0 / nu);
    Ok(Complex64::from_polar(1.0 / nu, w * t))
}

/// `A(t)/A₀` for `D^ν A = σ(±i)^ν A` by direct quadrature of the Bromwich
/// integral on a parabolic contour, doubling the node count until two
/// successive values agree to `1e−7` (relative to `max(1, |A|)`).
pub fn laplace_invert_ml(spec: &InversionSpec, t: f64) -> Result<Complex64> {
    laplace_invert_two_ic(spec, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), t)
}

/// Inverse of `(a0 s^{ν−1} + a1 s^{ν−2})/(s^ν − λ)`: the Caputo problem with
/// `A(0) = a0`, `A'(0) = a1` (the second datum only matters for `ν > 1`).
pub fn laplace_invert_two_ic(spec: &InversionSpec, a0: Complex64, a1: Complex64, t: f64) -> Result<Complex64> {
    let mut nodes = spec.contour.nodes;
    let mut previous: Option<Complex64> = None;
    let mut last_err = None;
    for _ in 0..3 {
        let attempt = laplace_invert_fixed(spec, a0, a1, t, nodes)
            .or_else(|e| match e {
                // Nudge the parabola off the pole rather than give up.
                Error::ContourClash { .. } => laplace_invert_fixed(spec, a0, a1, t, nodes + nodes / 4 + 2),
                other => Err(other),
            });
        match attempt {
            Ok(v) => {
                if let Some(p) = previous {
                    if (v - p).norm() <= 1e-7 * v.norm().max(1.0) {
                        return Ok(v);
                    }
                }
                previous = Some(v);
            }
            Err(e) => last_err = Some(e),
        }
        nodes = 2 * nodes - 1;
    }
    match (previous, last_err) {
        (Some(v), _) => Ok(v),
        (None, Some(e)) => Err(e),
        (None, None) => unreachable!("at least one attempt is made"),
    }
}

/// One trapezoidal sum on `s(u) = μ(1 + iu)²`, `u = kh`, `h = 3/N`, `|k| ≤ N`
/// where `nodes = 2N + 1`.
///
/// The principal parts at the poles are subtracted from the transform and
/// inverted exactly, so the quadrature only sees the branch cut.
pub fn laplace_invert_fixed(spec: &InversionSpec, a0: Complex64, a1: Complex64, t: f64, nodes: usize) -> Result<Complex64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("t must be finite and > 0, got {t}")));
    }
    let nu = spec.order.value();
    let lam = spec.lambda();
    let n = (nodes / 2).max(8);
    let mu = spec.contour.scale * PI * n as f64 / (12.0 * t);

    // Residue of (a0 s^{ν−1} + a1 s^{ν−2})/(s^ν − λ) at s^ν = λ.
    let poles: Vec<(Complex64, Complex64)> = spec.poles().into_iter().map(|p| (p, (a0 + a1 / p) / nu)).collect();
    let mut out = Complex64::new(0.0, 0.0);
    for &(p, r) in &poles {
        // Parabola abscissa at the pole's height: Re s = μ − (Im s)²/(4μ).
        let edge = mu - p.im * p.im / (4.0 * mu);
        if (p.re - edge).abs() <= spec.contour.pole_margin * p.norm() {
            return Err(Error::ContourClash { pole: format!("{p}") });
        }
        out += r * (p * t).exp();
    }

    let h = 3.0 / n as f64;
    let i = Complex64::new(0.0, 1.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -(n as i64)..=(n as i64) {
        let u = k as f64 * h;
        let s = mu * (1.0 + i * u) * (1.0 + i * u);
        let ds = 2.0 * mu * i * (1.0 + i * u);
        let s_nu = (nu * s.ln()).exp();
        let mut g = (a0 * s_nu / s + a1 * s_nu / (s * s)) / (s_nu - lam);
        for &(p, r) in &poles {
            g -= r / (s - p);
        }
        sum += (s * t).exp() * g * ds;
    }
    Ok(out + sum * h / (2.0 * PI * i))
}

/// Extended-precision series value with a rigorous-in-spirit error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesReference {
    pub value: Complex64,
    /// Bound on the absolute error from the double-double arithmetic (each
    /// term's log-magnitude carries an absolute error proportional to its
    /// size) plus the truncated tail.
    pub error_bound: f64,
    pub terms: usize,
}

/// `E_ν(σ(±i)^ν t^ν)` by its power series in double-double arithmetic.
pub fn ml_series_extended(sigma: f64, ray: Ray, order: FractionalOrder, t: f64) -> Result<Complex64> {
    ml_series_extended_eval(sigma, ray, order, t).map(|r| r.value)
}

/// As [`ml_series_extended`], with the error accounting.
///
/// Terms are formed as `exp(n ln|z| − ln Γ(νn + 1))` times a unit phase, so
/// the result stays accurate until the largest term approaches ~1e20.
pub fn ml_series_extended_eval(sigma: f64, ray: Ray, order: FractionalOrder, t: f64) -> Result<SeriesReference> {
    if !(sigma >= 0.0) || !(t >= 0.0) || !sigma.is_finite() || !t.is_finite() {
        return Err(Error::InvalidInput("sigma and t must be finite and >= 0".into()));
    }
    if sigma == 0.0 || t == 0.0 {
        return Ok(SeriesReference {
            value: Complex64::new(1.0, 0.0),
            error_bound: 0.0,
            terms: 1,
        });
    }
    // Unit roundoff of double-double arithmetic, with headroom.
    const DD_EPS: f64 = 8.0 * 1.232_595_164_407_831e-32;
    let nu = Dd::from_f64(order.value());
    let ln_z = Dd::from_f64(sigma).ln() + nu * Dd::from_f64(t).ln();
    let theta = nu * Dd::PI / Dd::from_f64(2.0 * ray.sign());
    let (s, c) = theta.sin_cos();

    let (mut pr, mut pi) = (Dd::ONE, Dd::ZERO);
    let (mut sr, mut si) = (Dd::ONE, Dd::ZERO);
    let mut prev = 1.0f64;
    let mut err = 0.0f64;
    for n in 1..100_000usize {
        let nd = Dd::from_f64(n as f64);
        let (nr, ni) = (pr * c - pi * s, pr * s + pi * c);
        pr = nr;
        pi = ni;
        let growth = nd * ln_z;
        let lg = (nu * nd + Dd::ONE).ln_gamma();
        let mag = (growth - lg).exp();
        sr = sr + mag * pr;
        si = si + mag * pi;
        let m = mag.to_f64();
        err += m * DD_EPS * (growth.to_f64().abs() + lg.to_f64().abs() + n as f64 + 4.0);
        if m < prev && m < 1e-22 {
            return Ok(SeriesReference {
                value: Complex64::new(sr.to_f64(), si.to_f64()),
                // Past the peak the terms fall faster than geometrically.
                error_bound: err + 10.0 * m + f64::EPSILON * sr.to_f64().hypot(si.to_f64()),
                terms: n + 1,
            });
        }
        prev = m;
    }
    Err(Error::NonConvergence {
        terms: 100_000,
        last_term: prev,
    })
}

/// Complementary error function to ~1e−15 on `|z| ≤ 6`: a positive-term
/// series below 2 and a Lentz continued fraction above.
pub fn erfc_closed_form(z: f64) -> f64 {
    if z < 0.0 {
        return 2.0 - erfc_closed_form(-z);
    }
    let inv_sqrt_pi = 1.0 / PI.sqrt();
    if z < 2.0 {
        // erf z = (2/√π) e^{−z²} Σ 2ⁿ z^{2n+1} / (2n+1)!!
        let z2 = z * z;
        let mut term = z;
        let mut sum = z;
        let mut n = 0.0;
        while term > 1e-18 * sum {
            n += 1.0;
            term *= 2.0 * z2 / (2.0 * n + 1.0);
            sum += term;
        }
        return 1.0 - 2.0 * inv_sqrt_pi * (-z2).exp() * sum;
    }
    // erfc z = e^{−z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …))))
    let tiny = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    inv_sqrt_pi * (-z * z).exp() / f
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ord(nu: f64) -> FractionalOrder {
        FractionalOrder::new(nu).unwrap()
    }

    #[test]
    fn erfc_reference_values() {
        assert_eq!(erfc_closed_form(0.0), 1.0);
        assert_abs_diff_eq!(erfc_closed_form(-1.0), 1.842_700_792_949_714_9, epsilon = 1e-14);
        assert_abs_diff_eq!(erfc_closed_form(1.0), 0.157_299_207_050_285_13, epsilon = 1e-15);
        assert_abs_diff_eq!(erfc_closed_form(3.0), 2.209_049_699_858_544e-5, epsilon = 1e-18);
        // Either side of the branch switch.
        assert_abs_diff_eq!(erfc_closed_form(1.999_999), 0.004_677_755_648_073_953, epsilon = 1e-16);
        assert_abs_diff_eq!(erfc_closed_form(2.0), 0.004_677_734_981_047_265, epsilon = 1e-17);
        assert_abs_diff_eq!(erfc_closed_form(0.5), 0.479_500_122_186_953_5, epsilon = 1e-15);
        assert_abs_diff_eq!(erfc_closed_form(4.5), 1.966_160_441_542_887_3e-10, epsilon = 1e-24);
    }

    #[test]
    fn erfc_symmetry() {
        for k in -60..=60 {
            let z = 0.1 * k as f64;
            assert_abs_diff_eq!(erfc_closed_form(z) + erfc_closed_form(-z), 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn residue_term_values() {
        assert_eq!(residue_term(1.0, ord(0.5), 0.0).unwrap(), Complex64::new(2.0, 0.0));
        for t in [0.0, 0.7, 3.0, 11.0] {
            assert_abs_diff_eq!(residue_term(2.0, ord(0.4), t).unwrap().norm(), 2.5, epsilon = 1e-14);
        }
        assert!(residue_term(1.0, ord(1.5), 1.0).is_err());
    }

    #[test]
    fn inversion_unit_order_is_pure_residue() {
        let spec = InversionSpec::new(1.0, ord(1.0)).unwrap();
        let v = laplace_invert_ml(&spec, 1.0).unwrap();
        assert_abs_diff_eq!(v.re, 1f64.cos(), epsilon = 1e-9);
        assert_abs_diff_eq!(v.im, 1f64.sin(), epsilon = 1e-9);
    }

    #[test]
    fn inversion_small_time_tends_to_initial_value() {
        let spec = InversionSpec::new(1.0, ord(0.5)).unwrap();
        for t in [1e-2, 1e-4, 1e-6] {
            let v = laplace_invert_ml(&spec, t).unwrap();
            // |E_ν(λt^ν) − 1| ≈ σ t^ν / Γ(ν+1)
            assert!((v - 1.0).norm() <= 2.0 * t.sqrt() / 0.886, "t={t}: {v}");
        }
    }

    #[test]
    fn inversion_wave_limit_two_ic() {
        // ν = 2 on the +i ray: λ = −σ, solution a0 cos(√σ t) + a1 sin(√σ t)/√σ.
        let spec = InversionSpec::new(4.0, ord(2.0)).unwrap();
        let t: f64 = 1.3;
        let v = laplace_invert_two_ic(&spec, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), t).unwrap();
        assert_abs_diff_eq!(v.re, (2.0 * t).cos() + (2.0 * t).sin() / 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn inversion_rejects_bad_spec() {
        assert!(InversionSpec::new(0.0, ord(0.5)).is_err());
        let bad = ContourParams { nodes: 4, ..ContourParams::default() };
        assert!(InversionSpec::with_contour(1.0, ord(0.5), Ray::PlusI, bad).is_err());
        let spec = InversionSpec::new(1.0, ord(0.5)).unwrap();
        assert!(laplace_invert_ml(&spec, 0.0).is_err());
    }

    #[test]
    fn clash_is_reported_for_a_grazing_contour() {
        // Choose μ so the parabola crosses the imaginary axis exactly at the pole.
        let t = 1.0;
        let n = 17usize;
        let mu_default = PI * 8.0 / 12.0;
        let scale = 0.5 / mu_default; // 2μ = 1 = σ^{1/ν}
        let contour = ContourParams { nodes: n, scale, pole_margin: 0.05 };
        let spec = InversionSpec::with_contour(1.0, ord(0.5), Ray::PlusI, contour).unwrap();
        let r = laplace_invert_fixed(&spec, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), t, n);
        assert!(matches!(r, Err(Error::ContourClash { .. })));
    }

    #[test]
    fn extended_series_error_bound_tracks_peak() {
        let small = ml_series_extended_eval(1.0, Ray::PlusI, ord(0.5), 1.0).unwrap();
        assert!(small.error_bound < 1e-15);
        // Peak term near 3e26: double-double is no longer enough, and says so.
        let big = ml_series_extended_eval(2.0, Ray::PlusI, ord(0.2), 2.0).unwrap();
        assert!(big.error_bound > 1e-4, "{}", big.error_bound);
    }

    #[test]
    fn extended_series_closed_forms() {
        // ν = 1: e^{±iσt}
        let v = ml_series_extended(2.0, Ray::PlusI, ord(1.0), 7.0).unwrap();
        assert_abs_diff_eq!(v.re, 14f64.cos(), epsilon = 1e-13);
        assert_abs_diff_eq!(v.im, 14f64.sin(), epsilon = 1e-13);
        // ν = 2 on the +i ray: E_2(−σt²) = cos(√σ t)
        let v = ml_series_extended(1.0, Ray::PlusI, ord(2.0), 20.0).unwrap();
        assert_abs_diff_eq!(v.re, 20f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
    }
}
