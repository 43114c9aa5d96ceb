//! Mittag-Leffler evaluation on the two imaginary rays `σ(±i)^ν t^ν`.
//!
//! Two independent routes are provided:
//!
//! * the defining power series `E_ν(z) = Σ zⁿ / Γ(νn + 1)`, reliable while
//!   `|z|` is moderate;
//! * the residue / branch-cut decomposition
//!   `E_ν(σ i^ν t^ν) = e^{iσ^{1/ν} t}/ν − F_ν(σ i^ν, t)`, where
//!   `F_ν(ρ, t) = (ρ sin νπ / π) ∫₀^∞ e^{−rt} r^{ν−1} dr / (r^{2ν} − 2ρ cos(νπ) r^ν + ρ²)`
//!   is a non-oscillatory decay kernel.
//!
//! Branches are principal throughout: `i^ν = e^{iπν/2}`, `(−i)^ν = e^{−iπν/2}`
//! and `σ^{1/ν}` is the positive real root.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

/// Default absolute tolerance for the special functions.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Hard cap on the number of series terms before reporting non-convergence.
pub const SERIES_TERM_CAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `0 < ν ≤ 1`
    SubUnit,
    /// `1 < ν ≤ 2`
    SuperUnit,
}

/// Order `ν` of a Caputo time derivative, `0 < ν ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    nu: f64,
}

impl FractionalOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= 0.0 || nu > 2.0 {
            return Err(Error::InvalidOrder(nu));
        }
        Ok(Self { nu })
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.nu
    }

    pub fn regime(self) -> Regime {
        if self.nu <= 1.0 {
            Regime::SubUnit
        } else {
            Regime::SuperUnit
        }
    }

    /// True for the classical orders 1 and 2, where `sin(νπ)` vanishes exactly.
    pub fn is_integer(self) -> bool {
        self.nu == 1.0 || self.nu == 2.0
    }

    pub fn require_sub_unit(self) -> Result<Self> {
        match self.regime() {
            Regime::SubUnit => Ok(self),
            Regime::SuperUnit => Err(Error::WrongRegime {
                nu: self.nu,
                expected: "0 < nu <= 1",
            }),
        }
    }

    pub fn require_super_unit(self) -> Result<Self> {
        match self.regime() {
            Regime::SuperUnit => Ok(self),
            Regime::SubUnit => Err(Error::WrongRegime {
                nu: self.nu,
                expected: "1 < nu <= 2",
            }),
        }
    }
}

/// Which imaginary ray the argument lies on: `σ i^ν` or `σ (−i)^ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ray {
    PlusI,
    MinusI,
}

impl Ray {
    pub fn sign(self) -> f64 {
        match self {
            Ray::PlusI => 1.0,
            Ray::MinusI => -1.0,
        }
    }

    /// `(±i)^ν` on the principal branch.
    pub fn pow(self, nu: f64) -> Complex64 {
        let p = i_pow(nu);
        match self {
            Ray::PlusI => p,
            Ray::MinusI => p.conj(),
        }
    }
}

/// `i^ν = e^{iπν/2}`, exact at the integer orders.
pub fn i_pow(nu: f64) -> Complex64 {
    if nu == 0.0 {
        Complex64::new(1.0, 0.0)
    } else if nu == 1.0 {
        Complex64::new(0.0, 1.0)
    } else if nu == 2.0 {
        Complex64::new(-1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, FRAC_PI_2 * nu)
    }
}

/// `(ρ, ν)` parameterising the decay kernel `F_ν(ρ, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayKernelSpec {
    pub rho: Complex64,
    pub order: FractionalOrder,
}

impl DecayKernelSpec {
    pub fn new(rho: Complex64, order: FractionalOrder) -> Result<Self> {
        if !(rho.re.is_finite() && rho.im.is_finite()) {
            return Err(Error::InvalidInput(format!("rho must be finite, got {rho}")));
        }
        Ok(Self { rho, order })
    }

    /// Kernel on a ray: `ρ = σ (±i)^ν`.
    pub fn on_ray(sigma: f64, ray: Ray, order: FractionalOrder) -> Result<Self> {
        Self::new(sigma * ray.pow(order.value()), order)
    }
}

/// Oscillatory and decaying parts of `E_ν` on a ray; `total = oscillatory − decay`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlDecomposition {
    pub oscillatory: Complex64,
    pub decay: Complex64,
    pub total: Complex64,
}

impl MlDecomposition {
    fn assemble(oscillatory: Complex64, decay: Complex64) -> Self {
        Self {
            oscillatory,
            decay,
            total: oscillatory - decay,
        }
    }
}

/// Knobs for the decay-kernel quadrature.
#[derive(Debug, Clone, Copy)]
pub struct KernelOptions {
    /// Absolute accuracy requested for the kernel value.
    pub tol: f64,
    /// Relative angular distance below which a denominator root is considered
    /// to sit on the integration path.
    pub singularity_margin: f64,
    pub max_intervals: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            singularity_margin: 1e-4,
            max_intervals: 4000,
        }
    }
}

impl KernelOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Series value with its error accounting.
#[derive(Debug, Clone, Copy)]
pub struct SeriesEval {
    pub value: Complex64,
    pub terms: usize,
    /// Geometric bound on the discarded tail.
    pub truncation_bound: f64,
    /// Rounding error from summing terms of alternating phase, `~ ε Σ|termₙ|`.
    pub rounding_bound: f64,
}

/// `E_ν(z)` by its power series.
pub fn ml_series(z: Complex64, order: FractionalOrder, tol: f64) -> Result<Complex64> {
    ml_series_eval(z, order, tol).map(|s| s.value)
}

pub fn ml_series_eval(z: Complex64, order: FractionalOrder, tol: f64) -> Result<SeriesEval> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    let nu = order.value();
    let one = Complex64::new(1.0, 0.0);
    let r = z.norm();
    if r == 0.0 {
        return Ok(SeriesEval {
            value: one,
            terms: 1,
            truncation_bound: 0.0,
            rounding_bound: 0.0,
        });
    }
    let ln_r = r.ln();
    let theta = z.arg();
    let mut sum = one;
    let mut abs_sum = 1.0;
    let mut prev = 1.0;
    for n in 1..SERIES_TERM_CAP {
        let nf = n as f64;
        let ln_mag = nf * ln_r - libm::lgamma(nu * nf + 1.0);
        let mag = ln_mag.exp();
        sum += Complex64::from_polar(mag, nf * theta);
        abs_sum += mag;
        let ratio = if prev > 0.0 { mag / prev } else { 0.0 };
        prev = mag;
        // Only stop once past the peak of the term sequence.
        if ratio < 1.0 && mag <= tol * sum.norm().max(f64::MIN_POSITIVE) {
            let tail = if ratio < 1.0 { mag * ratio / (1.0 - ratio) } else { f64::INFINITY };
            return Ok(SeriesEval {
                value: sum,
                terms: n + 1,
                truncation_bound: tail,
                rounding_bound: 100.0 * f64::EPSILON * abs_sum,
            });
        }
    }
    Err(Error::NonConvergence {
        terms: SERIES_TERM_CAP,
        last_term: prev,
    })
}

/// Which moment of the branch-cut density is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Moment {
    /// `r^{ν−1}`: the decay kernel `F_ν` itself.
    Base,
    /// `r^ν`: `−∂ₜF_ν`.
    TimeDerivative,
    /// `r^{ν−2}`: branch-cut part of `t E_{ν,2}(λ t^ν)` (second initial condition).
    Integrated,
}

impl Moment {
    fn power(self, nu: f64) -> f64 {
        match self {
            Moment::Base => nu - 1.0,
            Moment::TimeDerivative => nu,
            Moment::Integrated => nu - 2.0,
        }
    }
}

/// Roots of `w² − 2ρ cos(νπ) w + ρ²` that lie near the positive real `w` axis.
fn check_denominator(rho: Complex64, nu: f64, margin: f64) -> Result<Vec<f64>> {
    let mut real_parts = Vec::new();
    for sgn in [1.0, -1.0] {
        let root = rho * Complex64::from_polar(1.0, sgn * nu * PI);
        if root.re > 0.0 {
            if root.im.abs() <= margin * root.norm() {
                return Err(Error::DenominatorSingularity {
                    root: format!("{root}"),
                    margin,
                });
            }
            real_parts.push(root.re);
        }
    }
    Ok(real_parts)
}

/// `(ρ sin νπ / π) ∫₀^∞ e^{−rt} r^p dr / (r^{2ν} − 2ρ cos(νπ) r^ν + ρ²)`.
///
/// The substitution `u = r^{p+1}` turns `r^p dr` into `du/(p+1)`, so the
/// integrand is bounded at the origin for every moment used here.
fn branch_cut_integral(rho: Complex64, nu: f64, moment: Moment, t: f64, opts: &KernelOptions) -> Result<Complex64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("t must be finite and >= 0, got {t}")));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol must be positive, got {}", opts.tol)));
    }
    let zero = Complex64::new(0.0, 0.0);
    if rho == zero || nu == 1.0 || nu == 2.0 {
        return Ok(zero);
    }
    if moment == Moment::TimeDerivative && t == 0.0 {
        return Err(Error::SingularTime);
    }
    let q = moment.power(nu) + 1.0;
    debug_assert!(q > 0.0);
    let root_re = check_denominator(rho, nu, opts.singularity_margin)?;

    let (sin_t, cos_t) = (nu * PI).sin_cos();
    let prefactor = rho * sin_t / (PI * q);
    let two_rho_cos = 2.0 * rho * cos_t;
    let rho2 = rho * rho;
    let inv_q = 1.0 / q;
    let integrand = move |u: f64| -> Complex64 {
        let r = u.powf(inv_q);
        let w = r.powf(nu);
        if !w.is_finite() {
            return zero;
        }
        let damp = (-r * t).exp();
        if damp == 0.0 {
            return zero;
        }
        // w² − 2ρcos w + ρ², factored by w² for large w to avoid overflow.
        if w > 1e100 {
            let inv = 1.0 / w;
            return damp * inv * inv / (1.0 - two_rho_cos * inv + rho2 * inv * inv);
        }
        damp / (w * w - two_rho_cos * w + rho2)
    };

    let exponent = q / nu;
    let mut marks: Vec<f64> = vec![rho.norm().powf(exponent)];
    marks.extend(root_re.iter().map(|re| re.powf(exponent)));
    let u_end = if t > 0.0 {
        let r_cut = (1e-2 * opts.tol).ln().abs() + 5.0;
        marks.push(t.powf(-q));
        (r_cut / t).powf(q)
    } else {
        f64::INFINITY
    };
    marks.retain(|m| m.is_finite() && *m > 0.0);
    let top = 4.0 * marks.iter().cloned().fold(0.0, f64::max);
    let finite_end = top.min(u_end);
    let mut points = vec![0.0];
    let mut sorted: Vec<f64> = marks.into_iter().filter(|&m| m < finite_end).collect();
    sorted.sort_by(f64::total_cmp);
    for m in sorted {
        if m > *points.last().unwrap() * (1.0 + 1e-12) {
            points.push(m);
        }
    }
    if finite_end > *points.last().unwrap() {
        points.push(finite_end);
    }

    let scale = prefactor.norm().max(f64::MIN_POSITIVE);
    let qopts = QuadOptions {
        abs_tol: 0.5 * opts.tol / scale,
        max_intervals: opts.max_intervals,
    };
    let mut total = quad::integrate(integrand, &points, &qopts)?.value;
    if u_end > finite_end {
        // u = B/s maps [B, u_end] onto [B/u_end, 1] and tames algebraic tails.
        let b = finite_end;
        let s_lo = if u_end.is_finite() { b / u_end } else { 0.0 };
        let tail = move |s: f64| -> Complex64 { integrand(b / s) * (b / (s * s)) };
        total += quad::integrate(tail, &[s_lo, 1.0], &qopts)?.value;
    }
    Ok(prefactor * total)
}

/// `F_ν(ρ, t)` to absolute accuracy `tol`.
pub fn f_nu(spec: &DecayKernelSpec, t: f64, tol: f64) -> Result<Complex64> {
    f_nu_with(spec, t, &KernelOptions::with_tol(tol))
}

pub fn f_nu_with(spec: &DecayKernelSpec, t: f64, opts: &KernelOptions) -> Result<Complex64> {
    branch_cut_integral(spec.rho, spec.order.value(), Moment::Base, t, opts)
}

/// `∂ₜF_ν(ρ, t)` for `t > 0`; differentiating under the integral multiplies the
/// density by `−r`.
pub fn f_nu_time_derivative(spec: &DecayKernelSpec, t: f64, tol: f64) -> Result<Complex64> {
    let k = branch_cut_integral(
        spec.rho,
        spec.order.value(),
        Moment::TimeDerivative,
        t,
        &KernelOptions::with_tol(tol),
    )?;
    Ok(-k)
}

/// Poles of `s^{ν−1}/(s^ν − σ(±i)^ν)` on the principal sheet `|arg s| < π`.
///
/// For `ν ≤ 4/3` only `s₀ = ±iσ^{1/ν}` qualifies; above `4/3` a second,
/// exponentially damped pole enters from across the branch cut.
pub fn principal_poles(sigma: f64, ray: Ray, order: FractionalOrder, margin: f64) -> Result<Vec<Complex64>> {
    let nu = order.value();
    let modulus = sigma.powf(1.0 / nu);
    let base = ray.sign() * FRAC_PI_2;
    let mut poles = Vec::with_capacity(2);
    for k in [-1i32, 0, 1] {
        let angle = base + 2.0 * PI * k as f64 / nu;
        let gap = PI - angle.abs();
        if gap.abs() <= margin * PI {
            return Err(Error::DenominatorSingularity {
                root: format!("pole at arg {angle:.6}"),
                margin,
            });
        }
        if gap > 0.0 {
            poles.push(if k == 0 {
                Complex64::new(0.0, ray.sign() * modulus)
            } else {
                Complex64::from_polar(modulus, angle)
            });
        }
    }
    Ok(poles)
}

fn validate_ray_args(sigma: f64, t: f64) -> Result<()> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("t must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// `E_ν(σ(±i)^ν t^ν)` split into its oscillatory and decaying parts, for `0 < ν ≤ 1`.
pub fn ml_complex_decomposed(sigma: f64, ray: Ray, order: FractionalOrder, t: f64, tol: f64) -> Result<MlDecomposition> {
    order.require_sub_unit()?;
    ml_ray_decomposed(sigma, ray, order, t, &KernelOptions::with_tol(tol))
}

/// As [`ml_complex_decomposed`] but for any `0 < ν ≤ 2`; above `ν = 4/3` the
/// oscillatory part carries the second principal-sheet pole.
pub fn ml_ray_decomposed(sigma: f64, ray: Ray, order: FractionalOrder, t: f64, opts: &KernelOptions) -> Result<MlDecomposition> {
    validate_ray_args(sigma, t)?;
    let one = Complex64::new(1.0, 0.0);
    if sigma == 0.0 {
        // Pole and branch point coincide; E_ν(0) = 1.
        return Ok(MlDecomposition::assemble(one, Complex64::new(0.0, 0.0)));
    }
    let nu = order.value();
    let poles = principal_poles(sigma, ray, order, opts.singularity_margin)?;
    let oscillatory = poles.iter().map(|s| (s * t).exp()).sum::<Complex64>() / nu;
    let decay = branch_cut_integral(sigma * ray.pow(nu), nu, Moment::Base, t, opts)?;
    Ok(MlDecomposition::assemble(oscillatory, decay))
}

/// Time derivative of `E_ν(σ(±i)^ν t^ν)` from the decomposition, `t > 0`.
pub fn ml_ray_time_derivative(sigma: f64, ray: Ray, order: FractionalOrder, t: f64, opts: &KernelOptions) -> Result<Complex64> {
    validate_ray_args(sigma, t)?;
    let nu = order.value();
    if sigma == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if t == 0.0 && !order.is_integer() {
        return Err(Error::SingularTime);
    }
    let poles = principal_poles(sigma, ray, order, opts.singularity_margin)?;
    let osc = poles.iter().map(|s| s * (s * t).exp()).sum::<Complex64>() / nu;
    if order.is_integer() {
        return Ok(osc);
    }
    let k = branch_cut_integral(sigma * ray.pow(nu), nu, Moment::TimeDerivative, t, opts)?;
    // d/dt(osc − F) with ∂ₜF = −K.
    Ok(osc + k)
}

/// Solution of `D^ν A = σ(±i)^ν A`, `A(0) = a0`, `A'(0) = a1` for `1 < ν ≤ 2`:
/// `A = a0 E_ν(λt^ν) + a1 t E_{ν,2}(λt^ν)` with `λ = σ(±i)^ν`, each written
/// as a principal-sheet residue sum plus a branch-cut integral.
pub fn ml_two_ic(
    sigma: f64,
    ray: Ray,
    order: FractionalOrder,
    a0: Complex64,
    a1: Complex64,
    t: f64,
    tol: f64,
) -> Result<Complex64> {
    ml_two_ic_with(sigma, ray, order, a0, a1, t, &KernelOptions::with_tol(tol))
}

pub fn ml_two_ic_with(
    sigma: f64,
    ray: Ray,
    order: FractionalOrder,
    a0: Complex64,
    a1: Complex64,
    t: f64,
    opts: &KernelOptions,
) -> Result<Complex64> {
    order.require_super_unit()?;
    validate_ray_args(sigma, t)?;
    let zero = Complex64::new(0.0, 0.0);
    if sigma == 0.0 {
        return Ok(a0 + a1 * t);
    }
    let nu = order.value();
    let lambda = sigma * ray.pow(nu);
    let poles = principal_poles(sigma, ray, order, opts.singularity_margin)?;
    let mut out = zero;
    if a0 != zero {
        let osc = poles.iter().map(|s| (s * t).exp()).sum::<Complex64>() / nu;
        let cut = branch_cut_integral(lambda, nu, Moment::Base, t, opts)?;
        out += a0 * (osc - cut);
    }
    if a1 != zero {
        let osc = poles.iter().map(|s| (s * t).exp() / s).sum::<Complex64>() / nu;
        let cut = branch_cut_integral(lambda, nu, Moment::Integrated, t, opts)?;
        out += a1 * (osc + cut);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ord(nu: f64) -> FractionalOrder {
        FractionalOrder::new(nu).unwrap()
    }
    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn order_validation() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(-0.1).is_err());
        assert!(FractionalOrder::new(2.0001).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
        assert_eq!(ord(1.0).regime(), Regime::SubUnit);
        assert_eq!(ord(1.5).regime(), Regime::SuperUnit);
        assert_eq!(ord(2.0).regime(), Regime::SuperUnit);
        assert!(ord(0.5).require_super_unit().is_err());
    }

    #[test]
    fn branch_powers() {
        assert_eq!(Ray::PlusI.pow(1.0), c(0.0, 1.0));
        assert_eq!(Ray::MinusI.pow(1.0), c(0.0, -1.0));
        let h = Ray::PlusI.pow(0.5);
        assert_abs_diff_eq!(h.re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(h.im, 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn series_trivial_values() {
        assert_eq!(ml_series(c(0.0, 0.0), ord(0.5), 1e-12).unwrap(), c(1.0, 0.0));
        let e = ml_series(c(1.0, 0.0), ord(1.0), 1e-14).unwrap();
        assert_abs_diff_eq!(e.re, std::f64::consts::E, epsilon = 1e-13);
    }

    #[test]
    fn series_half_order_at_one() {
        // E_{1/2}(1) = e·erfc(−1); erfc(−1) = 1.8427007929497148 (independent value).
        let v = ml_series(c(1.0, 0.0), ord(0.5), 1e-14).unwrap();
        assert_abs_diff_eq!(v.re, std::f64::consts::E * 1.842_700_792_949_714_9, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn series_reports_nonconvergence() {
        let r = ml_series(c(40.0, 0.0), ord(0.3), 1e-12);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn series_reports_bounds() {
        let s = ml_series_eval(c(-3.0, 0.0), ord(0.8), 1e-12).unwrap();
        assert!(s.truncation_bound < 1e-11);
        assert!(s.rounding_bound > 0.0 && s.rounding_bound < 1e-10);
    }

    #[test]
    fn kernel_special_values() {
        let k = DecayKernelSpec::new(c(0.0, 0.0), ord(0.5)).unwrap();
        assert_eq!(f_nu(&k, 1.3, 1e-10).unwrap(), c(0.0, 0.0));
        let k = DecayKernelSpec::new(c(1.0, 0.0), ord(1.0)).unwrap();
        assert_eq!(f_nu(&k, 2.0, 1e-10).unwrap(), c(0.0, 0.0));
        let k = DecayKernelSpec::new(c(1.0, 0.0), ord(0.5)).unwrap();
        let v = f_nu(&k, 0.0, 1e-12).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kernel_at_zero_time_on_rays() {
        // E_ν(0) = 1 ⇒ F_ν(σ(±i)^ν, 0) = (1 − ν)/ν for σ > 0.
        for nu in [0.2, 0.5, 0.9] {
            for ray in [Ray::PlusI, Ray::MinusI] {
                let k = DecayKernelSpec::on_ray(1.7, ray, ord(nu)).unwrap();
                let v = f_nu(&k, 0.0, 1e-11).unwrap();
                assert_abs_diff_eq!(v.re, (1.0 - nu) / nu, epsilon = 1e-9);
                assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn kernel_rejects_nan_rho() {
        assert!(DecayKernelSpec::new(c(f64::NAN, 0.0), ord(0.5)).is_err());
    }

    #[test]
    fn decomposition_euler_identity_at_unit_order() {
        let d = ml_complex_decomposed(1.0, Ray::MinusI, ord(1.0), PI, 1e-10).unwrap();
        assert_abs_diff_eq!(d.total.re, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.total.im, 0.0, epsilon = 1e-14);
        assert_eq!(d.decay, c(0.0, 0.0));
    }

    #[test]
    fn decomposition_zero_sigma_bypasses_to_series() {
        for nu in [0.3, 0.5, 1.0] {
            let d = ml_complex_decomposed(0.0, Ray::PlusI, ord(nu), 1.0, 1e-10).unwrap();
            assert_eq!(d.total, c(1.0, 0.0));
        }
    }

    #[test]
    fn decomposition_matches_series_at_half_order() {
        let t: f64 = 2.0;
        let d = ml_complex_decomposed(1.0, Ray::MinusI, ord(0.5), t, 1e-11).unwrap();
        let z = Ray::MinusI.pow(0.5) * t.sqrt();
        let s = ml_series(z, ord(0.5), 1e-15).unwrap();
        assert!((d.total - s).norm() < 1e-9, "{} vs {}", d.total, s);
        assert_eq!(d.total, d.oscillatory - d.decay);
    }

    #[test]
    fn decomposition_requires_sub_unit() {
        assert!(ml_complex_decomposed(1.0, Ray::PlusI, ord(1.5), 1.0, 1e-10).is_err());
        assert!(ml_complex_decomposed(-1.0, Ray::PlusI, ord(0.5), 1.0, 1e-10).is_err());
    }

    #[test]
    fn time_derivative_matches_finite_difference() {
        let o = ord(0.6);
        let opts = KernelOptions::with_tol(1e-12);
        let (t, h) = (1.3, 1e-4);
        let d = ml_ray_time_derivative(0.8, Ray::MinusI, o, t, &opts).unwrap();
        let fp = ml_ray_decomposed(0.8, Ray::MinusI, o, t + h, &opts).unwrap().total;
        let fm = ml_ray_decomposed(0.8, Ray::MinusI, o, t - h, &opts).unwrap().total;
        let fd = (fp - fm) / (2.0 * h);
        assert!((d - fd).norm() < 1e-6, "{d} vs {fd}");
        assert!(matches!(
            ml_ray_time_derivative(0.8, Ray::MinusI, o, 0.0, &opts),
            Err(Error::SingularTime)
        ));
    }

    #[test]
    fn poles_on_principal_sheet() {
        assert_eq!(principal_poles(1.0, Ray::PlusI, ord(0.5), 1e-6).unwrap().len(), 1);
        assert_eq!(principal_poles(1.0, Ray::PlusI, ord(1.2), 1e-6).unwrap().len(), 1);
        let p = principal_poles(1.0, Ray::PlusI, ord(2.0), 1e-6).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.iter().any(|s| (s - c(0.0, -1.0)).norm() < 1e-14));
        assert!(principal_poles(1.0, Ray::PlusI, ord(4.0 / 3.0), 1e-6).is_err());
    }

    #[test]
    fn two_ic_initial_values() {
        for nu in [1.2, 1.5, 1.8] {
            for ray in [Ray::PlusI, Ray::MinusI] {
                let a0 = c(0.7, -0.2);
                let a1 = c(0.3, 0.4);
                let v = ml_two_ic(1.3, ray, ord(nu), a0, a1, 0.0, 1e-12).unwrap();
                assert!((v - a0).norm() < 1e-9, "nu={nu}: {v}");
            }
        }
    }

    #[test]
    fn two_ic_linear_and_degenerate() {
        let z = c(0.0, 0.0);
        assert_eq!(ml_two_ic(1.0, Ray::PlusI, ord(1.5), z, z, 2.0, 1e-10).unwrap(), z);
        let v = ml_two_ic(0.0, Ray::PlusI, ord(1.5), c(1.0, 0.0), c(2.0, 0.0), 3.0, 1e-10).unwrap();
        assert_eq!(v, c(7.0, 0.0));
        assert!(ml_two_ic(1.0, Ray::PlusI, ord(0.5), c(1.0, 0.0), z, 1.0, 1e-10).is_err());
    }

    #[test]
    fn two_ic_wave_limit() {
        // ν = 2, λ = −σ: A = a0 cos(√σ t) + a1 sin(√σ t)/√σ.
        let sigma: f64 = 1.0;
        for k in 0..=10 {
            let t = 0.3 * k as f64;
            let v = ml_two_ic(sigma, Ray::PlusI, ord(2.0), c(1.0, 0.0), c(0.5, 0.0), t, 1e-12).unwrap();
            let expect = t.cos() + 0.5 * t.sin();
            assert_abs_diff_eq!(v.re, expect, epsilon = 1e-12);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn near_four_thirds_is_flagged() {
        let k = DecayKernelSpec::on_ray(1.0, Ray::PlusI, ord(4.0 / 3.0)).unwrap();
        assert!(matches!(f_nu(&k, 1.0, 1e-10), Err(Error::DenominatorSingularity { .. })));
    }
}
