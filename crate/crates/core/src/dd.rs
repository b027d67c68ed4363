//! Double-double arithmetic for the series recurrences.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`, giving
//! roughly 106 bits of significand. Only the operations the three-term
//! recurrences need are provided.

use std::ops::{Add, Mul, Neg, Sub};

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

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// The exact product of two doubles.
    pub fn product(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Self { hi, lo }
    }

    pub fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let (s, t) = two_sum(self.hi, -p);
        let t = t - e + self.lo;
        let q2 = (s + t) / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

/// Real scalar the series recurrences are generic over.
pub trait Real:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    /// `a * b`, exactly when the representation allows it.
    fn product(a: f64, b: f64) -> Self;
    fn div_f64(self, d: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Real for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn product(a: f64, b: f64) -> Self {
        a * b
    }
    #[inline]
    fn div_f64(self, d: f64) -> Self {
        self / d
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for DoubleDouble {
    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble::new(x)
    }
    #[inline]
    fn product(a: f64, b: f64) -> Self {
        DoubleDouble::product(a, b)
    }
    #[inline]
    fn div_f64(self, d: f64) -> Self {
        DoubleDouble::div_f64(self, d)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigRational, ToPrimitive};
    use proptest::prelude::*;

    fn exact(x: DoubleDouble) -> BigRational {
        BigRational::from_float(x.hi).unwrap() + BigRational::from_float(x.lo).unwrap()
    }

    fn rat(x: f64) -> BigRational {
        BigRational::from_float(x).unwrap()
    }

    #[test]
    fn third_times_three() {
        let third = DoubleDouble::ONE.div_f64(3.0);
        let back = third * DoubleDouble::new(3.0) - DoubleDouble::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn cancellation_keeps_low_word() {
        let big = DoubleDouble::new(1e17);
        let sum = big + DoubleDouble::new(1.0) - big;
        assert_eq!(sum.to_f64(), 1.0);
    }

    proptest! {
        #[test]
        fn product_and_sum_are_exact(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            prop_assert_eq!(exact(DoubleDouble::product(a, b)), rat(a) * rat(b));
            prop_assert_eq!(exact(DoubleDouble::new(a) + DoubleDouble::new(b)), rat(a) + rat(b));
        }

        #[test]
        fn mul_and_div_relative_error(a in 1e-3f64..1e3, b in 1e-3f64..1e3, c in 1.0f64..1e6) {
            let x = DoubleDouble::product(a, 1.0 + 1e-9) ;
            let y = DoubleDouble::new(b);
            let want = exact(x) * rat(b) / rat(c);
            let got = exact((x * y).div_f64(c));
            let rel = ((got - want.clone()) / want).to_f64().unwrap().abs();
            prop_assert!(rel < 1e-30, "relative error {rel}");
        }
    }
}
