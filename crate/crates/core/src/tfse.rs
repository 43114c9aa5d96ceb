//! Closed-form solutions of the time-fractional Schrödinger equation
//!
//! ```text
//! i^ν D_t^ν ψ = −β ∂ₓ²ψ + α ψ,    β = 1/(2 N_m),  α = N_v
//! ```
//!
//! in units where the Planck time, length and ħ are all 1, for a free particle
//! (evolved in Fourier space) and for the infinite square well (one mode at a
//! time), together with probability, current, source and energy diagnostics.
//!
//! Every spatial mode obeys `D^ν A = κ A` with `κ = (ω + α)(−i)^ν`, so all
//! time dependence comes from [`crate::specfun`] on the `−i` ray.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fraccalc::{self, OperatorResidual, ResidualWindow, SampledSignal};
use crate::specfun::{self, FractionalOrder, KernelOptions, Ray, Regime};

const GRID_TOL: f64 = 1e-12;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Physical parameters of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    nu: FractionalOrder,
    n_m: f64,
    n_v: f64,
}

impl RunConfig {
    /// `n_m`: mass in Planck masses; `n_v`: constant potential in Planck energies.
    pub fn new(nu: FractionalOrder, n_m: f64, n_v: f64) -> Result<Self> {
        if !(n_m > 0.0) || !n_m.is_finite() {
            return Err(Error::InvalidInput(format!("n_m must be finite and > 0, got {n_m}")));
        }
        if !(n_v >= 0.0) || !n_v.is_finite() {
            return Err(Error::InvalidInput(format!("n_v must be finite and >= 0, got {n_v}")));
        }
        Ok(Self { nu, n_m, n_v })
    }

    pub fn nu(&self) -> FractionalOrder {
        self.nu
    }

    pub fn n_m(&self) -> f64 {
        self.n_m
    }

    pub fn n_v(&self) -> f64 {
        self.n_v
    }

    /// Potential coefficient `α = N_v`.
    pub fn alpha(&self) -> f64 {
        self.n_v
    }

    /// Kinetic coefficient `β = 1/(2 N_m)`.
    pub fn beta(&self) -> f64 {
        0.5 / self.n_m
    }

    /// `ω(λ) = λ²/(2 N_m)`.
    pub fn dispersion(&self, lambda: f64) -> f64 {
        self.beta() * lambda * lambda
    }

    /// `(−i)^ν = 1/i^ν`.
    pub fn phase(&self) -> Complex64 {
        Ray::MinusI.pow(self.nu.value())
    }

    /// Growth rate `κ = (ω + α)(−i)^ν` of a mode with frequency `ω`.
    pub fn rate(&self, omega: f64) -> Complex64 {
        (omega + self.alpha()) * self.phase()
    }
}

fn check_uniform(points: &[f64], what: &str) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::GridMismatch(format!("{what} needs at least 3 nodes")));
    }
    let n = points.len() - 1;
    let step = (points[n] - points[0]) / n as f64;
    if !(step > 0.0) {
        return Err(Error::GridMismatch(format!("{what} must be increasing")));
    }
    let scale = points[0].abs().max(points[n].abs()).max(step);
    for (k, p) in points.iter().enumerate() {
        if (p - (points[0] + k as f64 * step)).abs() > GRID_TOL * scale {
            return Err(Error::GridMismatch(format!("{what} is not uniform at node {k}")));
        }
    }
    Ok(step)
}

/// Oscillatory and decaying parts of a spectral amplitude; their sum is the total.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSplit {
    pub oscillatory: Vec<Complex64>,
    pub decay: Vec<Complex64>,
}

/// Fourier amplitudes on a symmetric uniform wavenumber grid.
///
/// The forward transform is `Ψ(λ) = ∫ e^{−iλx} ψ(x) dx` and the inverse
/// carries the `1/(2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPacket {
    wavenumbers: Vec<f64>,
    amplitudes: Vec<Complex64>,
    split: Option<SpectralSplit>,
}

impl SpectralPacket {
    pub fn new(wavenumbers: Vec<f64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if wavenumbers.len() != amplitudes.len() {
            return Err(Error::GridMismatch(format!(
                "{} wavenumbers but {} amplitudes",
                wavenumbers.len(),
                amplitudes.len()
            )));
        }
        let step = check_uniform(&wavenumbers, "wavenumber grid")?;
        let n = wavenumbers.len();
        for k in 0..n / 2 {
            if (wavenumbers[k] + wavenumbers[n - 1 - k]).abs() > GRID_TOL * step.max(wavenumbers[k].abs()) {
                return Err(Error::GridMismatch("wavenumber grid must be symmetric about 0".into()));
            }
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidInput("amplitudes must be finite".into()));
        }
        Ok(Self {
            wavenumbers,
            amplitudes,
            split: None,
        })
    }

    /// `count` nodes spanning `[−lambda_max, lambda_max]`.
    pub fn symmetric_grid(lambda_max: f64, count: usize) -> Result<Vec<f64>> {
        if !(lambda_max > 0.0) || count < 3 {
            return Err(Error::InvalidInput("wavenumber grid needs lambda_max > 0 and >= 3 nodes".into()));
        }
        let step = 2.0 * lambda_max / (count - 1) as f64;
        Ok((0..count)
            .map(|k| {
                // Mirror the upper half so the grid is exactly symmetric.
                let j = k.min(count - 1 - k);
                let v = lambda_max - j as f64 * step;
                if k < count - 1 - k {
                    -v
                } else {
                    v
                }
            })
            .map(|v| if v.abs() < 0.5 * step * 1e-12 { 0.0 } else { v })
            .collect())
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn split(&self) -> Option<&SpectralSplit> {
        self.split.as_ref()
    }

    pub fn step(&self) -> f64 {
        (self.wavenumbers[self.wavenumbers.len() - 1] - self.wavenumbers[0]) / (self.wavenumbers.len() - 1) as f64
    }

    fn same_grid(&self, other: &SpectralPacket) -> bool {
        self.wavenumbers == other.wavenumbers
    }
}

/// Unit-norm Gaussian `ψ₀(x) = (2πw²)^{−1/4} exp(−(x − x₀)²/(4w²))` sampled in
/// Fourier space: `Ψ₀(λ) = (8πw²)^{1/4} e^{−iλx₀} e^{−w²λ²}`.
pub fn gaussian_packet(center: f64, width: f64, lambda_max: f64, count: usize) -> Result<SpectralPacket> {
    if !(width > 0.0) || !center.is_finite() {
        return Err(Error::InvalidInput(format!("gaussian needs width > 0 and finite centre, got {width}, {center}")));
    }
    let grid = SpectralPacket::symmetric_grid(lambda_max, count)?;
    let norm = (8.0 * PI * width * width).powf(0.25);
    let amps = grid
        .iter()
        .map(|&l| Complex64::from_polar(norm * (-width * width * l * l).exp(), -l * center))
        .collect();
    SpectralPacket::new(grid, amps)
}

/// Gaussian initial field on an explicit position grid.
pub fn gaussian_field(center: f64, width: f64, positions: Vec<f64>) -> Result<GridField> {
    let norm = (2.0 * PI * width * width).powf(-0.25);
    let values = positions
        .iter()
        .map(|&x| Complex64::new(norm * (-(x - center).powi(2) / (4.0 * width * width)).exp(), 0.0))
        .collect();
    GridField::new(positions, values, Domain::Line)
}

fn par_map<T, F>(len: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if len > 8 {
            return (0..len).into_par_iter().map(f).collect();
        }
    }
    (0..len).map(f).collect()
}

/// `Ψ(λ, t) = Ψ₀(λ) E_ν(ω(λ)(−it)^ν)` for `0 < ν ≤ 1`, carrying the
/// oscillatory/decay split.
pub fn free_spectrum_evolve(packet0: &SpectralPacket, cfg: &RunConfig, t: f64, opts: &KernelOptions) -> Result<SpectralPacket> {
    let order = cfg.nu().require_sub_unit()?;
    let parts = par_map(packet0.wavenumbers.len(), |k| {
        let sigma = cfg.dispersion(packet0.wavenumbers[k]) + cfg.alpha();
        let d = specfun::ml_ray_decomposed(sigma, Ray::MinusI, order, t, opts)?;
        let a = packet0.amplitudes[k];
        Ok((a * d.oscillatory, -a * d.decay))
    })?;
    let (oscillatory, decay): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    let amplitudes = oscillatory.iter().zip(&decay).map(|(o, d)| o + d).collect();
    Ok(SpectralPacket {
        wavenumbers: packet0.wavenumbers.clone(),
        amplitudes,
        split: Some(SpectralSplit { oscillatory, decay }),
    })
}

/// Two-datum evolution for `1 < ν ≤ 2`: `Ψ(λ, 0) = Ψ₀`, `∂ₜΨ(λ, 0) = Ψ₁`.
pub fn free_spectrum_high_order(
    packet0: &SpectralPacket,
    packet1: &SpectralPacket,
    cfg: &RunConfig,
    t: f64,
    opts: &KernelOptions,
) -> Result<SpectralPacket> {
    let order = cfg.nu().require_super_unit()?;
    if !packet0.same_grid(packet1) {
        return Err(Error::GridMismatch("the two initial packets must share a grid".into()));
    }
    let amplitudes = par_map(packet0.wavenumbers.len(), |k| {
        let sigma = cfg.dispersion(packet0.wavenumbers[k]) + cfg.alpha();
        specfun::ml_two_ic_with(sigma, Ray::MinusI, order, packet0.amplitudes[k], packet1.amplitudes[k], t, opts)
    })?;
    Ok(SpectralPacket {
        wavenumbers: packet0.wavenumbers.clone(),
        amplitudes,
        split: None,
    })
}

/// `(1/2π) ∫ |Ψ|² dλ`, equal to `∫ |ψ|² dx` by Parseval.
pub fn spectral_probability(packet: &SpectralPacket) -> f64 {
    trapezoid(packet.step(), packet.amplitudes.iter().map(|a| a.norm_sqr())) / (2.0 * PI)
}

fn trapezoid(step: f64, values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    let mut acc = 0.0;
    for (k, v) in values.enumerate() {
        acc += if k == 0 || k + 1 == n { 0.5 * v } else { v };
    }
    acc * step
}

fn trapezoid_c(step: f64, values: impl ExactSizeIterator<Item = Complex64>) -> Complex64 {
    let n = values.len();
    let mut acc = zero();
    for (k, v) in values.enumerate() {
        acc += if k == 0 || k + 1 == n { v * 0.5 } else { v };
    }
    acc * step
}

/// Spatial support of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Line,
    /// The well `[0, a]`; the grid must span it exactly.
    Box(f64),
}

/// Field sampled on a uniform position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    positions: Vec<f64>,
    values: Vec<Complex64>,
    domain: Domain,
}

impl GridField {
    pub fn new(positions: Vec<f64>, values: Vec<Complex64>, domain: Domain) -> Result<Self> {
        if positions.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} positions but {} values",
                positions.len(),
                values.len()
            )));
        }
        check_uniform(&positions, "position grid")?;
        if let Domain::Box(a) = domain {
            let n = positions.len() - 1;
            if positions[0].abs() > GRID_TOL * a || (positions[n] - a).abs() > GRID_TOL * a {
                return Err(Error::GridMismatch(format!("box grid must span [0, {a}]")));
            }
            if values[0].norm() > GRID_TOL || values[n].norm() > GRID_TOL {
                return Err(Error::InvalidInput("box field must vanish at both walls".into()));
            }
        }
        Ok(Self {
            positions,
            values,
            domain,
        })
    }

    pub fn zeros_like(&self) -> Self {
        self.with_values(vec![zero(); self.values.len()])
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn step(&self) -> f64 {
        (self.positions[self.positions.len() - 1] - self.positions[0]) / (self.positions.len() - 1) as f64
    }

    fn with_values(&self, values: Vec<Complex64>) -> Self {
        Self {
            positions: self.positions.clone(),
            values,
            domain: self.domain,
        }
    }

    fn same_grid(&self, other: &GridField) -> Result<()> {
        if self.positions != other.positions {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    /// Second-order `∂ₓ`.
    fn dx(&self) -> Vec<Complex64> {
        let f = &self.values;
        let n = f.len();
        let h = self.step();
        let mut d = Vec::with_capacity(n);
        d.push((-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h));
        for k in 1..n - 1 {
            d.push((f[k + 1] - f[k - 1]) / (2.0 * h));
        }
        d.push((3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h));
        d
    }

    /// `∂ₓ²` by the three-point stencil, extrapolated linearly at the ends.
    fn dxx(&self) -> Vec<Complex64> {
        let f = &self.values;
        let n = f.len();
        let h2 = self.step() * self.step();
        let mut d = vec![zero(); n];
        for k in 1..n - 1 {
            d[k] = (f[k + 1] - 2.0 * f[k] + f[k - 1]) / h2;
        }
        if n >= 4 {
            d[0] = 2.0 * d[1] - d[2];
            d[n - 1] = 2.0 * d[n - 2] - d[n - 3];
        } else {
            d[0] = d[1];
            d[n - 1] = d[n - 2];
        }
        d
    }
}

/// Position-space fields from a spectral packet.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeField {
    pub psi: GridField,
    /// Inverse transform of the oscillatory part (equals `psi` for a packet
    /// without a split).
    pub psi_s: GridField,
    /// Inverse transform of the decaying part (zero for a packet without a split).
    pub psi_d: GridField,
}

fn inverse_transform(wavenumbers: &[f64], step: f64, amps: &[Complex64], positions: &[f64]) -> Vec<Complex64> {
    let n = wavenumbers.len();
    positions
        .iter()
        .map(|&x| {
            let mut acc = zero();
            for k in 0..n {
                let w = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
                acc += amps[k] * Complex64::from_polar(w, wavenumbers[k] * x);
            }
            acc * step / (2.0 * PI)
        })
        .collect()
}

/// `ψ(x) = (1/2π) ∫ Ψ(λ) e^{iλx} dλ` by direct trapezoidal summation, for the
/// total and for each part of the split.
pub fn free_field(packet: &SpectralPacket, positions: &[f64]) -> Result<FreeField> {
    check_uniform(positions, "position grid")?;
    let step = packet.step();
    let psi = inverse_transform(&packet.wavenumbers, step, &packet.amplitudes, positions);
    let (psi_s, psi_d) = match &packet.split {
        Some(s) => (
            inverse_transform(&packet.wavenumbers, step, &s.oscillatory, positions),
            inverse_transform(&packet.wavenumbers, step, &s.decay, positions),
        ),
        None => (psi.clone(), vec![zero(); positions.len()]),
    };
    let make = |v| GridField::new(positions.to_vec(), v, Domain::Line);
    Ok(FreeField {
        psi: make(psi)?,
        psi_s: make(psi_s)?,
        psi_d: make(psi_d)?,
    })
}

/// Standing wave `√(2/a) sin(nπx/a)` of the infinite well on `[0, a]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellMode {
    pub n: u32,
    pub a: f64,
    /// `λ_n = (nπ/a)²/(2 N_m)`.
    pub lambda_n: f64,
    /// `ω_n = λ_n` in Planck units.
    pub omega_n: f64,
}

pub fn well_mode(n: u32, a: f64, cfg: &RunConfig) -> Result<WellMode> {
    if n == 0 {
        return Err(Error::InvalidInput("mode number must be >= 1".into()));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidInput(format!("well width must be finite and > 0, got {a}")));
    }
    let k = n as f64 * PI / a;
    let lambda_n = k * k / (2.0 * cfg.n_m());
    Ok(WellMode {
        n,
        a,
        lambda_n,
        omega_n: lambda_n,
    })
}

impl WellMode {
    pub fn wavenumber(&self) -> f64 {
        self.n as f64 * PI / self.a
    }

    pub fn eigenfunction(&self, x: f64) -> f64 {
        (2.0 / self.a).sqrt() * (self.wavenumber() * x).sin()
    }

    /// `nx` equally spaced nodes on `[0, a]`.
    pub fn positions(&self, nx: usize) -> Vec<f64> {
        let h = self.a / (nx - 1) as f64;
        let mut p: Vec<f64> = (0..nx).map(|k| k as f64 * h).collect();
        p[nx - 1] = self.a;
        p
    }

    /// The rate `κ` in `D^ν A = κ A`.
    pub fn rate(&self, cfg: &RunConfig) -> Complex64 {
        cfg.rate(self.omega_n)
    }

    /// Eigenvalue of `−β∂ₓ² + α` on this mode: `ω_n + α`.
    fn sigma(&self, cfg: &RunConfig) -> f64 {
        self.omega_n + cfg.alpha()
    }
}

/// `amplitude · B_n(x)` on `nx` nodes spanning the well (walls pinned to 0).
pub fn well_field(mode: &WellMode, amplitude: Complex64, nx: usize) -> Result<GridField> {
    if nx < 3 {
        return Err(Error::GridMismatch("well grid needs at least 3 nodes".into()));
    }
    let positions = mode.positions(nx);
    let mut values: Vec<Complex64> = positions.iter().map(|&x| amplitude * mode.eigenfunction(x)).collect();
    values[0] = zero();
    values[nx - 1] = zero();
    GridField::new(positions, values, Domain::Box(mode.a))
}

/// Modal amplitude `A(t) = E_ν((ω_n + α)(−it)^ν)` with `A(0) = 1`, `0 < ν ≤ 1`.
pub fn well_amplitude(mode: &WellMode, cfg: &RunConfig, t: f64, opts: &KernelOptions) -> Result<Complex64> {
    well_amplitude_parts(mode, cfg, t, opts).map(|d| d.total)
}

/// As [`well_amplitude`] with the oscillatory/decay split.
pub fn well_amplitude_parts(mode: &WellMode, cfg: &RunConfig, t: f64, opts: &KernelOptions) -> Result<specfun::MlDecomposition> {
    let order = cfg.nu().require_sub_unit()?;
    specfun::ml_ray_decomposed(mode.sigma(cfg), Ray::MinusI, order, t, opts)
}

/// Modal amplitude for `1 < ν ≤ 2` with `A(0) = 1`, `A′(0) = a1`.
pub fn well_amplitude_high_order(mode: &WellMode, cfg: &RunConfig, a1: Complex64, t: f64, opts: &KernelOptions) -> Result<Complex64> {
    let order = cfg.nu().require_super_unit()?;
    specfun::ml_two_ic_with(mode.sigma(cfg), Ray::MinusI, order, Complex64::new(1.0, 0.0), a1, t, opts)
}

/// `∂ₜA` from the decomposition, `t > 0` (singular at 0 for `ν < 1`).
pub fn well_amplitude_derivative(mode: &WellMode, cfg: &RunConfig, t: f64, opts: &KernelOptions) -> Result<Complex64> {
    let order = cfg.nu().require_sub_unit()?;
    specfun::ml_ray_time_derivative(mode.sigma(cfg), Ray::MinusI, order, t, opts)
}

/// `∫ |ψ|² dx` by the trapezoidal rule on the field's grid.
pub fn total_probability(field: &GridField) -> f64 {
    trapezoid(field.step(), field.values.iter().map(|v| v.norm_sqr()))
}

/// `∫ f dx` by the trapezoidal rule on the field's grid.
pub fn field_integral(field: &GridField) -> Complex64 {
    trapezoid_c(field.step(), field.values.iter().copied())
}

/// `J = (β/i^ν)(∂ₓψ̃)ψ* + (β/(−i)^ν)ψ(∂ₓψ̃*)` where `ψ̃ = D^{1−ν}ψ`.
pub fn probability_current(field: &GridField, weighted: &GridField, cfg: &RunConfig) -> Result<GridField> {
    field.same_grid(weighted)?;
    let c = cfg.beta() * cfg.phase();
    let dw = weighted.dx();
    let j = field
        .values
        .iter()
        .zip(&dw)
        .map(|(psi, dwv)| {
            let term = c * dwv * psi.conj();
            Complex64::new(2.0 * term.re, 0.0)
        })
        .collect();
    Ok(field.with_values(j))
}

/// `[D^ν ψ](0) = (−i)^ν (−β ∂ₓ²ψ₀ + α ψ₀)`, read off the equation at `t = 0`.
pub fn initial_caputo(psi0: &GridField, cfg: &RunConfig) -> GridField {
    let phase = cfg.phase();
    let d2 = psi0.dxx();
    let v = psi0
        .values
        .iter()
        .zip(&d2)
        .map(|(p, d)| phase * (-cfg.beta() * d + cfg.alpha() * p))
        .collect();
    psi0.with_values(v)
}

/// Probability source `S = ∂ₜP + ∂ₓJ`:
///
/// ```text
/// S = 2 Re[ (β/i^ν) ∂ₓψ̃ ∂ₓψ* + (α/i^ν) ψ̃ ψ* + ψ* [D^νψ](0) t^{ν−1}/Γ(ν) ]
/// ```
///
/// At `ν = 1` the memory term is not part of the equation and `S ≡ 0`.
pub fn source_term(field: &GridField, weighted: &GridField, initial: &GridField, cfg: &RunConfig, t: f64) -> Result<GridField> {
    field.same_grid(weighted)?;
    field.same_grid(initial)?;
    let nu = cfg.nu().value();
    if nu == 1.0 {
        return Ok(field.zeros_like());
    }
    if cfg.nu().regime() == Regime::SuperUnit {
        return Err(Error::WrongRegime {
            nu,
            expected: "SubUnit (0 < nu <= 1)",
        });
    }
    if !(t > 0.0) {
        return Err(Error::SingularTime);
    }
    let phase = cfg.phase();
    let memory = t.powf(nu - 1.0) / libm::tgamma(nu);
    let dpsi = field.dx();
    let dw = weighted.dx();
    let s = (0..field.values.len())
        .map(|k| {
            let psi_c = field.values[k].conj();
            let z = cfg.beta() * phase * dw[k] * dpsi[k].conj()
                + cfg.alpha() * phase * weighted.values[k] * psi_c
                + psi_c * initial.values[k] * memory;
            Complex64::new(2.0 * z.re, 0.0)
        })
        .collect();
    Ok(field.with_values(s))
}

/// `ψ̃ = D^{1−ν}ψ` at the last time of a uniformly sampled history starting at `t = 0`.
pub fn weighted_history(history: &[GridField], h: f64, order: FractionalOrder) -> Result<GridField> {
    let last = history
        .last()
        .ok_or_else(|| Error::GridMismatch("history is empty".into()))?;
    for f in history {
        last.same_grid(f)?;
    }
    let nu = order.require_sub_unit()?.value();
    if nu == 1.0 {
        return Ok(last.clone());
    }
    let inner = FractionalOrder::new(1.0 - nu)?;
    let values = (0..last.values.len())
        .map(|k| {
            let sig = SampledSignal::new(h, history.iter().map(|f| f.values[k]).collect())?;
            fraccalc::caputo_at_final(&sig, inner)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(last.with_values(values))
}

/// `∫ ψ* ψ̃ dx`.
pub fn energy_average(field: &GridField, weighted: &GridField) -> Result<Complex64> {
    field.same_grid(weighted)?;
    Ok(trapezoid_c(
        field.step(),
        field.values.iter().zip(&weighted.values).map(|(p, w)| p.conj() * w),
    ))
}

/// `E_n(t) = i A*(t) ∂ₜA(t)` (the spatial factor integrates to 1), `t > 0`.
pub fn energy_level(mode: &WellMode, cfg: &RunConfig, t: f64, opts: &KernelOptions) -> Result<Complex64> {
    let a = well_amplitude(mode, cfg, t, opts)?;
    let da = well_amplitude_derivative(mode, cfg, t, opts)?;
    Ok(Complex64::new(0.0, 1.0) * a.conj() * da)
}

/// Large-time energy `(ω_n + α)^{1/ν}/ν²`.
pub fn energy_limit(mode: &WellMode, cfg: &RunConfig) -> f64 {
    let nu = cfg.nu().value();
    mode.sigma(cfg).powf(1.0 / nu) / (nu * nu)
}

/// Strictly increasing times paired with values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub label: String,
    times: Vec<f64>,
    values: Vec<Complex64>,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::GridMismatch(format!("{} times but {} values", times.len(), values.len())));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("times must be strictly increasing".into()));
        }
        Ok(Self {
            label: label.into(),
            times,
            values,
        })
    }

    /// Evaluates `f` on each time in parallel.
    pub fn sample<F>(label: impl Into<String>, times: Vec<f64>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64> + Sync + Send,
    {
        let values = par_map(times.len(), |k| f(times[k]))?;
        Self::new(label, times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// One mode's time history, for [`hamiltonian_recast_residual`].
#[derive(Debug, Clone)]
pub struct ModalHistory {
    /// Amplitude on `t_k = k h` from `t = 0`.
    pub samples: SampledSignal,
    /// `κ` in `D^ν A = κ A`.
    pub rate: Complex64,
    /// `A′(0)`; only used for `ν > 1`.
    pub initial_derivative: Complex64,
}

/// Residual of the first-order recast of the equation, per mode:
///
/// * `ν ≤ 1`: `A′ − κ (D^{1−ν}A + A(0) t^{ν−1}/Γ(ν))` (at `ν = 1`, `A′ − κA`);
/// * `ν > 1`: `A′ − κ I^{ν−1}A − A′(0)`.
///
/// With several modes (the nodes of a spectral packet, spaced `dλ`) the
/// pointwise residual is combined as `sqrt((1/2π) Σ |r_λ|² dλ)`, the spatial
/// `L²` norm by Parseval.
pub fn hamiltonian_recast_residual(
    modes: &[ModalHistory],
    order: FractionalOrder,
    spectral_step: Option<f64>,
    window: ResidualWindow,
) -> Result<OperatorResidual> {
    let first = modes.first().ok_or_else(|| Error::InvalidInput("no modes supplied".into()))?;
    let (h, len) = (first.samples.h(), first.samples.len());
    if modes.iter().any(|m| m.samples.h() != h || m.samples.len() != len) {
        return Err(Error::GridMismatch("all modal histories must share a time grid".into()));
    }
    let per_mode = modes
        .iter()
        .map(|m| modal_recast(m, order))
        .collect::<Result<Vec<_>>>()?;
    let combined: Vec<Complex64> = (0..len)
        .map(|k| match spectral_step {
            None if modes.len() == 1 => per_mode[0][k],
            None => Complex64::new(per_mode.iter().map(|r| r[k].norm()).fold(0.0, f64::max), 0.0),
            Some(dl) => {
                let s = trapezoid(dl, per_mode.iter().map(|r| r[k].norm_sqr()).collect::<Vec<_>>().into_iter());
                Complex64::new((s / (2.0 * PI)).sqrt(), 0.0)
            }
        })
        .collect();
    OperatorResidual::from_pointwise(&first.samples, &combined, window)
}

fn modal_recast(m: &ModalHistory, order: FractionalOrder) -> Result<Vec<Complex64>> {
    let nu = order.value();
    let sig = &m.samples;
    let da = fraccalc::derivative(sig);
    let a0 = sig.values()[0];
    let out = match order.regime() {
        Regime::SubUnit if nu == 1.0 => (0..sig.len()).map(|k| da.values()[k] - m.rate * sig.values()[k]).collect(),
        Regime::SubUnit => {
            let w = fraccalc::caputo_derivative(sig, FractionalOrder::new(1.0 - nu)?)?;
            let g = libm::tgamma(nu);
            (0..sig.len())
                .map(|k| {
                    if k == 0 {
                        return zero();
                    }
                    let t = sig.time(k);
                    da.values()[k] - m.rate * (w.values()[k] + a0 * t.powf(nu - 1.0) / g)
                })
                .collect()
        }
        Regime::SuperUnit => {
            let i = fraccalc::rl_integral(sig, nu - 1.0)?;
            (0..sig.len())
                .map(|k| da.values()[k] - m.rate * i.values()[k] - m.initial_derivative)
                .collect()
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ord(nu: f64) -> FractionalOrder {
        FractionalOrder::new(nu).unwrap()
    }
    fn cfg(nu: f64) -> RunConfig {
        RunConfig::new(ord(nu), 0.5, 0.0).unwrap()
    }
    fn opts() -> KernelOptions {
        KernelOptions::with_tol(1e-11)
    }

    #[test]
    fn config_validation_and_derived_fields() {
        assert!(RunConfig::new(ord(0.5), 0.0, 0.0).is_err());
        assert!(RunConfig::new(ord(0.5), 1.0, -1.0).is_err());
        assert!(RunConfig::new(ord(0.5), f64::INFINITY, 0.0).is_err());
        let c = RunConfig::new(ord(0.5), 2.0, 0.3).unwrap();
        assert_eq!(c.beta(), 0.25);
        assert_eq!(c.alpha(), 0.3);
        assert_abs_diff_eq!(c.dispersion(2.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn well_mode_values() {
        let m = well_mode(1, PI, &cfg(0.5)).unwrap();
        assert_abs_diff_eq!(m.lambda_n, 1.0, epsilon = 1e-14);
        let m2 = well_mode(2, PI, &cfg(0.5)).unwrap();
        assert_abs_diff_eq!(m2.lambda_n / m.lambda_n, 4.0, epsilon = 1e-13);
        assert!(well_mode(0, 1.0, &cfg(0.5)).is_err());
        assert!(well_mode(1, 0.0, &cfg(0.5)).is_err());
        for n in 1..=5 {
            let m = well_mode(n, 2.3, &cfg(0.7)).unwrap();
            let f = well_field(&m, Complex64::new(1.0, 0.0), 2001).unwrap();
            assert_abs_diff_eq!(total_probability(&f), 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn box_fields_must_vanish_at_walls() {
        let p = vec![0.0, 0.5, 1.0];
        let v = vec![Complex64::new(0.1, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(GridField::new(p.clone(), v, Domain::Box(1.0)).is_err());
        assert!(GridField::new(p, vec![zero(); 3], Domain::Box(2.0)).is_err());
    }

    #[test]
    fn well_amplitude_limits() {
        let m = well_mode(1, PI, &cfg(0.5)).unwrap();
        assert!((well_amplitude(&m, &cfg(0.5), 0.0, &opts()).unwrap() - 1.0).norm() < 1e-15);
        for t in [0.3, 2.0, 9.0] {
            let a = well_amplitude(&m, &cfg(1.0), t, &opts()).unwrap();
            assert_abs_diff_eq!(a.norm(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(a.arg(), (-t + PI).rem_euclid(2.0 * PI) - PI, epsilon = 1e-12);
        }
        let far = well_amplitude(&m, &cfg(0.5), 1e4, &opts()).unwrap();
        assert!((far.norm() - 2.0).abs() < 0.02);
    }

    #[test]
    fn energy_levels() {
        let m = well_mode(1, PI, &cfg(1.0)).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let e = energy_level(&m, &cfg(1.0), t, &opts()).unwrap();
            assert_abs_diff_eq!(e.re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(e.im, 0.0, epsilon = 1e-12);
        }
        let m = well_mode(1, PI, &cfg(0.5)).unwrap();
        assert!(matches!(energy_level(&m, &cfg(0.5), 0.0, &opts()), Err(Error::SingularTime)));
        assert_abs_diff_eq!(energy_limit(&m, &cfg(0.5)), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn free_evolution_basics() {
        let p0 = gaussian_packet(0.0, 1.0, 8.0, 161).unwrap();
        assert_abs_diff_eq!(spectral_probability(&p0), 1.0, epsilon = 1e-10);
        let c = cfg(0.5);
        let p = free_spectrum_evolve(&p0, &c, 0.0, &opts()).unwrap();
        for (a, b) in p.amplitudes().iter().zip(p0.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
        // λ = 0 does not evolve.
        let mid = p0.wavenumbers().len() / 2;
        assert_eq!(p0.wavenumbers()[mid], 0.0);
        let p = free_spectrum_evolve(&p0, &c, 3.0, &opts()).unwrap();
        assert!((p.amplitudes()[mid] - p0.amplitudes()[mid]).norm() < 1e-14);
        // Away from λ = 0 the oscillatory part keeps |Ψ₀|²/ν².
        for t in [0.5, 3.0, 40.0] {
            let split = free_spectrum_evolve(&p0, &c, t, &opts()).unwrap().split().unwrap().clone();
            let nodes = split.oscillatory.iter().zip(p0.amplitudes()).enumerate();
            for (_, (o, a)) in nodes.filter(|(k, _)| *k != mid) {
                assert_abs_diff_eq!(o.norm_sqr(), a.norm_sqr() / 0.25, epsilon = 1e-12);
            }
        }

        let c1 = cfg(1.0);
        let p = free_spectrum_evolve(&p0, &c1, 1.7, &opts()).unwrap();
        for (k, l) in p0.wavenumbers().iter().enumerate() {
            let expect = p0.amplitudes()[k] * Complex64::from_polar(1.0, -c1.dispersion(*l) * 1.7);
            assert!((p.amplitudes()[k] - expect).norm() < 1e-10);
        }
        assert_abs_diff_eq!(spectral_probability(&p), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn free_field_split_is_additive() {
        let p0 = gaussian_packet(0.5, 1.0, 8.0, 161).unwrap();
        let p = free_spectrum_evolve(&p0, &cfg(0.5), 1.0, &opts()).unwrap();
        let xs: Vec<f64> = (0..201).map(|k| -10.0 + 0.1 * k as f64).collect();
        let f = free_field(&p, &xs).unwrap();
        for k in 0..xs.len() {
            let sum = f.psi_s.values()[k] + f.psi_d.values()[k];
            assert!((f.psi.values()[k] - sum).norm() < 1e-10);
        }
        let p1 = free_spectrum_evolve(&p0, &cfg(1.0), 1.0, &opts()).unwrap();
        let f1 = free_field(&p1, &xs).unwrap();
        assert!(f1.psi_d.values().iter().all(|v| v.norm() < 1e-14));
        // Spatial and spectral norms agree once the window holds the packet.
        assert_abs_diff_eq!(total_probability(&f1.psi), spectral_probability(&p1), epsilon = 1e-8);

        // The inverse transform recovers the initial Gaussian.
        let g = gaussian_field(0.5, 1.0, xs.clone()).unwrap();
        let f0 = free_field(&p0, &xs).unwrap();
        for k in 0..xs.len() {
            assert!((f0.psi.values()[k] - g.values()[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn high_order_free_evolution() {
        let p0 = gaussian_packet(0.0, 1.0, 6.0, 61).unwrap();
        let zeros = SpectralPacket::new(p0.wavenumbers().to_vec(), vec![zero(); 61]).unwrap();
        let c = cfg(1.5);
        let p = free_spectrum_high_order(&p0, &zeros, &c, 0.0, &opts()).unwrap();
        for (a, b) in p.amplitudes().iter().zip(p0.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
        let z = free_spectrum_high_order(&zeros, &zeros, &c, 2.0, &opts()).unwrap();
        assert!(z.amplitudes().iter().all(|a| a.norm() == 0.0));

        // ν = 2: Ψ₀ cos(√ω t) + Ψ₁ sin(√ω t)/√ω.
        let c2 = cfg(2.0);
        let t = 1.3;
        let p = free_spectrum_high_order(&p0, &p0, &c2, t, &opts()).unwrap();
        for (k, l) in p0.wavenumbers().iter().enumerate() {
            let w = c2.dispersion(*l).sqrt();
            let s = if w == 0.0 { t } else { (w * t).sin() / w };
            let expect = p0.amplitudes()[k] * ((w * t).cos() + s);
            assert!((p.amplitudes()[k] - expect).norm() < 1e-9, "k={k}");
        }
        assert!(free_spectrum_high_order(&p0, &zeros, &cfg(0.5), 1.0, &opts()).is_err());
    }

    #[test]
    fn current_and_source_trivial_cases() {
        let m = well_mode(1, PI, &cfg(1.0)).unwrap();
        let f = well_field(&m, Complex64::new(1.0, 0.0), 401).unwrap();
        let j = probability_current(&f, &f, &cfg(1.0)).unwrap();
        assert!(j.values().iter().all(|v| v.norm() < 1e-12));
        let zero_f = f.zeros_like();
        let c = cfg(0.5);
        let j = probability_current(&zero_f, &zero_f, &c).unwrap();
        assert!(j.values().iter().all(|v| v.norm() == 0.0));
        let s = source_term(&zero_f, &zero_f, &zero_f, &c, 1.0).unwrap();
        assert!(s.values().iter().all(|v| v.norm() == 0.0));
        assert!(matches!(source_term(&f, &f, &f, &c, 0.0), Err(Error::SingularTime)));
        let s1 = source_term(&f, &f, &f, &cfg(1.0), 0.0).unwrap();
        assert!(s1.values().iter().all(|v| v.norm() == 0.0));

        // Plane wave e^{ikx} at ν = 1: J = 2βk, and β = 1 here.
        let xs: Vec<f64> = (0..401).map(|k| 0.01 * k as f64).collect();
        let k = 3.0;
        let pw = GridField::new(xs.clone(), xs.iter().map(|&x| Complex64::from_polar(1.0, k * x)).collect(), Domain::Line).unwrap();
        let j = probability_current(&pw, &pw, &cfg(1.0)).unwrap();
        for v in &j.values()[1..400] {
            assert!((v.re - 2.0 * k).abs() < 1e-3 * k, "{v}");
        }
    }

    #[test]
    fn weighted_history_cases() {
        let m = well_mode(1, PI, &cfg(0.5)).unwrap();
        let base = well_field(&m, Complex64::new(1.0, 0.0), 51).unwrap();
        let hist = vec![base.clone(); 20];
        let w = weighted_history(&hist, 0.01, ord(0.5)).unwrap();
        assert!(w.values().iter().all(|v| v.norm() == 0.0));
        let w1 = weighted_history(&hist, 0.01, ord(1.0)).unwrap();
        assert_eq!(w1, base);
        let e = energy_average(&base, &w1).unwrap();
        assert_abs_diff_eq!(e.re, 1.0, epsilon = 1e-8);
        assert!(weighted_history(&[], 0.01, ord(0.5)).is_err());
    }

    #[test]
    fn recast_residual_unit_order_and_zero() {
        let c = cfg(1.0);
        let m = well_mode(1, PI, &c).unwrap();
        let h = 1e-3;
        let samples = SampledSignal::from_fn(h, 2001, |t| Complex64::from_polar(1.0, -t)).unwrap();
        let hist = ModalHistory {
            samples,
            rate: m.rate(&c),
            initial_derivative: zero(),
        };
        let r = hamiltonian_recast_residual(&[hist], ord(1.0), None, ResidualWindow::Fixed { start: 0.1, end: 2.0 }).unwrap();
        assert!(r.max_abs < 1e-6, "{}", r.max_abs);
        let zeros = ModalHistory {
            samples: SampledSignal::new(h, vec![zero(); 100]).unwrap(),
            rate: m.rate(&cfg(0.5)),
            initial_derivative: zero(),
        };
        let r = hamiltonian_recast_residual(&[zeros], ord(0.5), None, ResidualWindow::default()).unwrap();
        assert_eq!(r.max_abs, 0.0);
    }
}
