//! Exact phases: rational multiples of π.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::ops::Add;

pub(crate) const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

/// `cos(kπ/6)` for `k = 0..12`, as exact as `f64` allows.
const COS_SIXTHS: [f64; 12] = [
    1.0,
    HALF_SQRT3,
    0.5,
    0.0,
    -0.5,
    -HALF_SQRT3,
    -1.0,
    -HALF_SQRT3,
    -0.5,
    0.0,
    0.5,
    HALF_SQRT3,
];

/// Cosine of `class · π/6`; `class` is taken mod 12.
pub fn cos_sixths(class: i64) -> f64 {
    COS_SIXTHS[class.rem_euclid(12) as usize]
}

/// The angle `num/den · π`, kept in lowest terms with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PiMultiple {
    num: i64,
    den: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

impl PiMultiple {
    pub const ZERO: PiMultiple = PiMultiple { num: 0, den: 1 };

    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        let s = den.signum();
        PiMultiple { num: s * num / g, den: s * den / g }
    }

    pub fn sixths(k: i64) -> Self {
        Self::new(k, 6)
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn radians(&self) -> f64 {
        self.num as f64 * PI / self.den as f64
    }

    /// The phase class `k mod 12` when the angle is `kπ/6`.
    pub fn sixths_class(&self) -> Option<u8> {
        let scaled = 6 * self.num;
        (scaled % self.den == 0).then(|| (scaled / self.den).rem_euclid(12) as u8)
    }

    pub fn cos(&self) -> f64 {
        match self.sixths_class() {
            Some(k) => COS_SIXTHS[k as usize],
            None => self.radians().cos(),
        }
    }
}

impl Add for PiMultiple {
    type Output = PiMultiple;
    fn add(self, rhs: PiMultiple) -> PiMultiple {
        let g = gcd(self.den, rhs.den);
        let den = self.den / g * rhs.den;
        PiMultiple::new(self.num * (den / self.den) + rhs.num * (den / rhs.den), den)
    }
}

impl fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (0, _) => write!(f, "0"),
            (1, 1) => write!(f, "π"),
            (n, 1) => write!(f, "{n}π"),
            (1, d) => write!(f, "π/{d}"),
            (n, d) => write!(f, "{n}π/{d}"),
        }
    }
}
