//! Double-double real and complex arithmetic (about 32 significant digits),
//! used where divided differences of close nodes cancel.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

fn fast_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact scaling by a power of two.
    fn scale2(self, k: i32) -> Dd {
        let s = 2f64.powi(k);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn div_usize(self, k: usize) -> Dd {
        self / Dd::from(k as f64)
    }
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};
/// pi/2 in three pieces, so that `x - k pi/2` is accurate to double-double for moderate `k`.
const PIO2: [f64; 3] = [
    std::f64::consts::FRAC_PI_2,
    6.123_233_995_736_766e-17,
    -1.497_384_904_859_169_8e-33,
];

/// Below this, a Taylor term no longer changes a double-double sum of magnitude about one.
const SERIES_CUTOFF: f64 = 1e-36;

/// `exp(x) - 1` for `|x| <= ln 2 / 2`, by scaling down, summing the series and
/// undoing the scaling with `(1 + p)^2 - 1 = p (2 + p)`.
fn expm1_reduced(r: Dd) -> Dd {
    const HALVINGS: i32 = 10;
    let s = r.scale2(-HALVINGS);
    let mut term = s;
    let mut p = s;
    for j in 2.. {
        term = (term * s).div_usize(j);
        p = p + term;
        if term.hi.abs() < SERIES_CUTOFF {
            break;
        }
    }
    for _ in 0..HALVINGS {
        p = p * (Dd::from(2.0) + p);
    }
    p
}

/// `e^x` to double-double accuracy for a double argument.
pub fn exp(x: f64) -> Dd {
    if x == 0.0 {
        return Dd::ONE;
    }
    let k = (x / LN2.hi).round();
    let r = Dd::from(x) - LN2 * Dd::from(k);
    (Dd::ONE + expm1_reduced(r)).scale2(k as i32)
}

fn sin_cos_reduced(r: Dd) -> (Dd, Dd) {
    let r2 = r * r;
    let (mut s, mut st) = (r, r);
    let (mut c, mut ct) = (Dd::ONE, Dd::ONE);
    for j in 1.. {
        st = -(st * r2).div_usize((2 * j) * (2 * j + 1));
        ct = -(ct * r2).div_usize((2 * j - 1) * (2 * j));
        s = s + st;
        c = c + ct;
        if st.hi.abs().max(ct.hi.abs()) < SERIES_CUTOFF {
            break;
        }
    }
    (s, c)
}

/// `(sin x, cos x)` to double-double accuracy for moderate `|x|`.
pub fn sin_cos(x: f64) -> (Dd, Dd) {
    let k = (x / PIO2[0]).round();
    let r = PIO2
        .iter()
        .fold(Dd::from(x), |acc, &p| acc - Dd::from(p) * Dd::from(k));
    let (s, c) = sin_cos_reduced(r);
    match (k as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// `(sinh x, cosh x)`; small arguments use the series to avoid cancellation in `sinh`.
pub fn sinh_cosh(x: f64) -> (Dd, Dd) {
    let e = exp(x);
    let inv = Dd::ONE / e;
    let cosh = (e + inv).scale2(-1);
    if x.abs() >= 0.5 {
        return ((e - inv).scale2(-1), cosh);
    }
    let x = Dd::from(x);
    let x2 = x * x;
    let (mut sinh, mut term) = (x, x);
    for j in 1.. {
        term = (term * x2).div_usize((2 * j) * (2 * j + 1));
        sinh = sinh + term;
        if term.hi.abs() < SERIES_CUTOFF {
            break;
        }
    }
    (sinh, cosh)
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let u = fast_two_sum(s.hi, s.lo + t.hi);
        fast_two_sum(u.hi, u.lo + t.lo)
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
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        let cross = self.hi.mul_add(o.lo, self.lo * o.hi);
        fast_two_sum(p.hi, p.lo + cross)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        // one Newton correction of the double quotient
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::from(q2);
        let q3 = r.hi / o.hi;
        fast_two_sum(q1, q2) + Dd::from(q3)
    }
}

/// Complex double-double.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: Cdd = Cdd {
        re: Dd { hi: 1.0, lo: 0.0 },
        im: Dd::ZERO,
    };

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> Cdd {
        Cdd {
            re: self.re,
            im: -self.im,
        }
    }

    /// `e^z` at a double-valued point.
    pub fn exp_at(z: Complex64) -> Cdd {
        let m = exp(z.re);
        let (s, c) = sin_cos(z.im);
        Cdd { re: m * c, im: m * s }
    }

    /// `sin z = sin x cosh y + i cos x sinh y` at a double-valued point.
    pub fn sin_at(z: Complex64) -> Cdd {
        let (s, c) = sin_cos(z.re);
        let (sh, ch) = sinh_cosh(z.im);
        Cdd {
            re: s * ch,
            im: c * sh,
        }
    }
}

impl From<Complex64> for Cdd {
    fn from(z: Complex64) -> Self {
        Cdd {
            re: z.re.into(),
            im: z.im.into(),
        }
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, o: Cdd) -> Cdd {
        let den = o.re * o.re + o.im * o.im;
        Cdd {
            re: (self.re * o.re + self.im * o.im) / den,
            im: (self.im * o.re - self.re * o.im) / den,
        }
    }
}
