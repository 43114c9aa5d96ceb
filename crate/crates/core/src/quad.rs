//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature for complex-valued
//! integrands on a finite interval split by caller-supplied breakpoints.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets the absolute tolerance, or until the estimate is limited by
//! rounding in the integrand itself.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Kronrod abscissae on [-1, 1] (positive half; the last entry is the centre).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_293_238_677,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod abscissae XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut resabs = fc.norm() * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        kron += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let value = kron * half;
    let resabs = resabs * half.abs();
    let raw = ((kron - gauss) * half).norm();
    // Never trust an estimate below the rounding level of the panel sum.
    let error = raw.max(50.0 * f64::EPSILON * resabs);
    Panel {
        a,
        b,
        value,
        error,
        resabs,
    }
}

/// Integrate `f` over `[points[0], points[last]]`, starting from the panels
/// delimited by `points` (which must be strictly increasing).
pub fn integrate<F>(mut f: F, points: &[f64], opts: &QuadOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> Complex64,
{
    if points.len() < 2 || points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "quadrature breakpoints must be strictly increasing".into(),
        ));
    }
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        heap.push(kronrod21(&mut f, w[0], w[1]));
        evaluations += 21;
    }

    loop {
        let total_err: f64 = heap.iter().chain(frozen.iter()).map(|p| p.error).sum();
        let total_abs: f64 = heap.iter().chain(frozen.iter()).map(|p| p.resabs).sum();
        let intervals = heap.len() + frozen.len();
        let roundoff_limited = total_err <= 200.0 * f64::EPSILON * total_abs;
        if total_err <= opts.abs_tol || roundoff_limited || heap.is_empty() {
            if total_err > opts.abs_tol && !roundoff_limited {
                return Err(Error::QuadratureFailure {
                    error: total_err,
                    tolerance: opts.abs_tol,
                    intervals,
                });
            }
            let value = heap
                .iter()
                .chain(frozen.iter())
                .fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.value);
            return Ok(Quadrature {
                value,
                error: total_err,
                intervals,
                evaluations,
            });
        }
        if intervals >= opts.max_intervals {
            return Err(Error::QuadratureFailure {
                error: total_err,
                tolerance: opts.abs_tol,
                intervals,
            });
        }
        let worst = heap.pop().expect("heap checked non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-14 * worst.a.abs().max(worst.b.abs()) {
            frozen.push(worst);
            continue;
        }
        heap.push(kronrod21(&mut f, worst.a, mid));
        heap.push(kronrod21(&mut f, mid, worst.b));
        evaluations += 42;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real<F: Fn(f64) -> f64>(f: F) -> impl FnMut(f64) -> Complex64 {
        move |x| Complex64::new(f(x), 0.0)
    }

    #[test]
    fn kronrod_is_exact_for_high_degree_polynomials() {
        // K21 integrates degree 31 exactly; G10 only up to degree 19.
        let p = kronrod21(&mut real(|x: f64| x.powi(30) + x.powi(7)), -1.0, 1.0);
        assert!((p.value.re - 2.0 / 31.0).abs() < 1e-15);
        let p = kronrod21(&mut real(|x: f64| 3.0 * x * x), 0.0, 2.0);
        assert!((p.value.re - 8.0).abs() < 1e-13);
        assert!(p.error < 1e-12);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let k: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // Lorentzian of half-width 1e-4 centred inside the interval.
        let eps = 1e-4;
        let f = real(move |x: f64| eps / ((x - 0.3).powi(2) + eps * eps));
        let q = integrate(f, &[0.0, 1.0], &QuadOptions { abs_tol: 1e-10, max_intervals: 4000 }).unwrap();
        let exact = (0.7f64 / eps).atan() + (0.3f64 / eps).atan();
        assert!((q.value.re - exact).abs() < 1e-9, "{} vs {}", q.value.re, exact);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let f = real(|x: f64| x.powf(-0.5));
        let q = integrate(f, &[0.0, 1.0], &QuadOptions { abs_tol: 1e-9, max_intervals: 4000 }).unwrap();
        assert!((q.value.re - 2.0).abs() < 1e-8);
    }

    #[test]
    fn complex_oscillatory() {
        let f = |x: f64| Complex64::new(0.0, 5.0 * x).exp();
        let q = integrate(f, &[0.0, 1.0, 2.0], &QuadOptions::default()).unwrap();
        let exact = (Complex64::new(0.0, 10.0).exp() - 1.0) / Complex64::new(0.0, 5.0);
        assert!((q.value - exact).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(integrate(real(|x| x), &[1.0, 0.0], &QuadOptions::default()).is_err());
        assert!(integrate(real(|x| x), &[1.0], &QuadOptions::default()).is_err());
    }

    #[test]
    fn reports_failure_when_budget_exhausted() {
        let f = real(|x: f64| (1.0 / x).sin() / x);
        let r = integrate(f, &[1e-6, 1.0], &QuadOptions { abs_tol: 1e-14, max_intervals: 8 });
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}
