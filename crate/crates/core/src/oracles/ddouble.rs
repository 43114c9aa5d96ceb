//! Double-double arithmetic (~106-bit significand), just enough to sum the
//! Mittag-Leffler power series far past the point where `f64` cancellation
//! destroys it.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const LN2: Dd = Dd {
        hi: 6.931_471_805_599_452_862e-1,
        lo: 2.319_046_813_846_299_558e-17,
    };
    pub const PI: Dd = Dd {
        hi: 3.141_592_653_589_793_116,
        lo: 1.224_646_799_147_353_207e-16,
    };

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    #[cfg(test)]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / Self::LN2.hi).round();
        let r = (self - Self::LN2 * Dd::from_f64(k)).ldexp(-10);
        // e^r − 1 by Taylor series; |r| < 4e-4 so 14 terms reach 1e-40.
        let mut term = r;
        let mut sum = r;
        for n in 2..=14 {
            term = term * r / Dd::from_f64(n as f64);
            sum = sum + term;
        }
        // (1 + s)² − 1 = 2s + s², applied ten times.
        for _ in 0..10 {
            sum = sum * Dd::from_f64(2.0) + sum * sum;
        }
        (sum + Dd::ONE).ldexp(k as i32)
    }

    pub fn ln(self) -> Self {
        assert!(self.hi > 0.0, "ln of non-positive double-double");
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }

    /// `(sin x, cos x)` by Taylor series; intended for `|x| ≲ 2`.
    pub fn sin_cos(self) -> (Self, Self) {
        let x2 = self * self;
        let mut s_term = self;
        let mut c_term = Dd::ONE;
        let mut s = self;
        let mut c = Dd::ONE;
        for k in 1..=30 {
            let kf = k as f64;
            s_term = -(s_term * x2) / Dd::from_f64((2.0 * kf) * (2.0 * kf + 1.0));
            c_term = -(c_term * x2) / Dd::from_f64((2.0 * kf - 1.0) * (2.0 * kf));
            s = s + s_term;
            c = c + c_term;
        }
        (s, c)
    }

    /// `ln Γ(x)` for `x > 0`, via upward recurrence and the Stirling series.
    pub fn ln_gamma(self) -> Self {
        assert!(self.hi > 0.0, "ln_gamma needs a positive argument");
        let mut x = self;
        let mut shift = Dd::ONE;
        let mut shift_log = Dd::ZERO;
        while x.hi < 40.0 {
            shift = shift * x;
            if shift.hi > 1e250 {
                shift_log = shift_log + shift.ln();
                shift = Dd::ONE;
            }
            x = x + Dd::ONE;
        }
        shift_log = shift_log + shift.ln();

        // B_{2k} as exact numerator/denominator pairs, k = 1..12.
        const BERNOULLI: [(f64, f64); 12] = [
            (1.0, 6.0),
            (-1.0, 30.0),
            (1.0, 42.0),
            (-1.0, 30.0),
            (5.0, 66.0),
            (-691.0, 2730.0),
            (7.0, 6.0),
            (-3617.0, 510.0),
            (43867.0, 798.0),
            (-174611.0, 330.0),
            (854513.0, 138.0),
            (-236364091.0, 2730.0),
        ];
        let half = Dd::from_f64(0.5);
        let half_ln_two_pi = half * (Self::PI * Dd::from_f64(2.0)).ln();
        let mut acc = (x - half) * x.ln() - x + half_ln_two_pi;
        let inv = Dd::ONE / x;
        let inv2 = inv * inv;
        let mut pow = inv;
        for (k, (num, den)) in BERNOULLI.iter().enumerate() {
            let k2 = 2.0 * (k as f64 + 1.0);
            let coef = Dd::from_f64(*num) / (Dd::from_f64(*den) * Dd::from_f64(k2 * (k2 - 1.0)));
            acc = acc + coef * pow;
            pow = pow * inv2;
        }
        acc - shift_log
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}
