//! Exact phases: rational multiples of pi and monomial complex scalars.
//!
//! Every exact complex number needed by this crate has the form
//! `sqrt(m) * exp(i*pi*r)` with `m` a nonnegative rational and `r` rational —
//! a root of unity times a positive real square root. `ExactC` keeps that
//! normal form (phase reduced into `[0, 2)`, magnitude stored squared), so
//! products, quotients, conjugates, and equality are all exact. Sums are not
//! closed under this form and only ever happen after conversion to `f64`.

use crate::rat::{rat, rint, sign, to_f64, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An angle recorded as a rational multiple of pi: `AnglePi(r)` means `r*pi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnglePi(pub Rat);

impl AnglePi {
    /// The zero angle.
    #[must_use]
    pub fn zero() -> Self {
        AnglePi(Rat::zero())
    }

    /// Angle `p/q * pi`.
    #[must_use]
    pub fn new(p: i64, q: i64) -> Self {
        AnglePi(rat(p, q))
    }

    /// Reduces modulo `2*pi` into `[0, 2*pi)`.
    #[must_use]
    pub fn mod_two(&self) -> Self {
        let two = rint(2);
        let mut r = &self.0 % &two;
        if r.is_negative() {
            r += &two;
        }
        AnglePi(r)
    }

    /// Reduces modulo `2*pi` into the window `(-2*pi, 0]`.
    #[must_use]
    pub fn window_neg(&self) -> Self {
        let r = self.mod_two().0;
        if r.is_zero() {
            AnglePi(r)
        } else {
            AnglePi(r - rint(2))
        }
    }

    /// True iff the angle is an integer multiple of pi.
    #[must_use]
    pub fn is_multiple_of_pi(&self) -> bool {
        self.0.denom().is_one()
    }

    /// True iff the angle is an integer multiple of `2*pi`.
    #[must_use]
    pub fn is_multiple_of_two_pi(&self) -> bool {
        self.mod_two().0.is_zero()
    }

    /// Exact sign of `sin(angle)`: -1, 0, or +1.
    #[must_use]
    pub fn sin_sign(&self) -> i32 {
        let r = self.mod_two().0;
        if r.is_zero() || r == rint(1) {
            0
        } else if r < rint(1) {
            1
        } else {
            -1
        }
    }

    /// Exact sign of `cos(angle)`: -1, 0, or +1.
    #[must_use]
    pub fn cos_sign(&self) -> i32 {
        let r = self.mod_two().0;
        let half = rat(1, 2);
        let three_half = rat(3, 2);
        if r == half || r == three_half {
            0
        } else if r < half || r > three_half {
            1
        } else {
            -1
        }
    }

    /// Halves the angle (of the stored representative, no re-windowing).
    #[must_use]
    pub fn half(&self) -> Self {
        AnglePi(&self.0 / rint(2))
    }

    /// Numeric value in radians.
    #[must_use]
    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0) * PI
    }
}

impl Add for AnglePi {
    type Output = AnglePi;
    fn add(self, rhs: AnglePi) -> AnglePi {
        AnglePi(self.0 + rhs.0)
    }
}

impl Sub for AnglePi {
    type Output = AnglePi;
    fn sub(self, rhs: AnglePi) -> AnglePi {
        AnglePi(self.0 - rhs.0)
    }
}

impl Neg for AnglePi {
    type Output = AnglePi;
    fn neg(self) -> AnglePi {
        AnglePi(-self.0)
    }
}

impl fmt::Display for AnglePi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}pi", crate::rat::format_rat(&self.0))
    }
}

/// Exact complex scalar `sqrt(mag2) * exp(i * pi * phase_pi)`.
///
/// Normal form: `mag2 >= 0`; `phase_pi` in `[0, 2)`; `phase_pi == 0` when
/// `mag2 == 0`. The positive square root is always meant, so the pair is a
/// unique representation and derived equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactC {
    phase_pi: Rat,
    mag2: Rat,
}

impl ExactC {
    fn normalized(phase_pi: Rat, mag2: Rat) -> Self {
        assert!(!mag2.is_negative(), "negative squared magnitude");
        if mag2.is_zero() {
            return ExactC { phase_pi: Rat::zero(), mag2 };
        }
        ExactC { phase_pi: AnglePi(phase_pi).mod_two().0, mag2 }
    }

    /// Zero.
    #[must_use]
    pub fn zero() -> Self {
        Self::normalized(Rat::zero(), Rat::zero())
    }

    /// One.
    #[must_use]
    pub fn one() -> Self {
        Self::normalized(Rat::zero(), Rat::one())
    }

    /// The imaginary unit.
    #[must_use]
    pub fn i() -> Self {
        Self::normalized(rat(1, 2), Rat::one())
    }

    /// Embeds a rational (sign goes into the phase).
    #[must_use]
    pub fn from_rat(q: &Rat) -> Self {
        let mag2 = q * q;
        let phase = if q.is_negative() { Rat::one() } else { Rat::zero() };
        Self::normalized(phase, mag2)
    }

    /// Embeds an integer.
    #[must_use]
    pub fn from_int(n: i64) -> Self {
        Self::from_rat(&rint(n))
    }

    /// Unit scalar `exp(i * angle)`.
    #[must_use]
    pub fn unit(angle: &AnglePi) -> Self {
        Self::normalized(angle.0.clone(), Rat::one())
    }

    /// `sqrt(mag2) * exp(i * angle)` with `mag2 >= 0`.
    #[must_use]
    pub fn from_polar_mag2(angle: &AnglePi, mag2: &Rat) -> Self {
        Self::normalized(angle.0.clone(), mag2.clone())
    }

    /// `i^k` for any integer `k`.
    #[must_use]
    pub fn i_pow(k: i64) -> Self {
        Self::normalized(rat(k, 2), Rat::one())
    }

    /// Squared magnitude (exact).
    #[must_use]
    pub fn mag2(&self) -> &Rat {
        &self.mag2
    }

    /// Phase as a multiple of pi, in `[0, 2)`.
    #[must_use]
    pub fn phase_pi(&self) -> AnglePi {
        AnglePi(self.phase_pi.clone())
    }

    /// True iff the value is zero.
    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.mag2.is_zero()
    }

    /// The unit `z/|z|`; panics on zero.
    #[must_use]
    pub fn unit_part(&self) -> Self {
        assert!(!self.is_zero(), "unit part of zero");
        Self::normalized(self.phase_pi.clone(), Rat::one())
    }

    /// Complex conjugate.
    #[must_use]
    pub fn conj(&self) -> Self {
        Self::normalized(-self.phase_pi.clone(), self.mag2.clone())
    }

    /// Multiplicative inverse; panics on zero.
    #[must_use]
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::normalized(-self.phase_pi.clone(), self.mag2.recip())
    }

    /// Integer power (negative allowed for nonzero values).
    #[must_use]
    pub fn pow_int(&self, k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        if self.is_zero() {
            assert!(k > 0, "zero to a nonpositive power");
            return Self::zero();
        }
        let base = if k < 0 { self.inv() } else { self.clone() };
        let e = k.unsigned_abs();
        let phase = &base.phase_pi * rint(e as i64);
        let mut mag2 = Rat::one();
        for _ in 0..e {
            mag2 *= &base.mag2;
        }
        Self::normalized(phase, mag2)
    }

    /// True iff the value is a (possibly negative) real rational; if so,
    /// returns it. Requires `mag2` to be a perfect rational square.
    #[must_use]
    pub fn as_rat(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        let s = if self.phase_pi.is_zero() {
            1
        } else if self.phase_pi == Rat::one() {
            -1
        } else {
            return None;
        };
        let root = rat_sqrt(&self.mag2)?;
        Some(if s < 0 { -root } else { root })
    }

    /// Numeric value as `(re, im)`.
    #[must_use]
    pub fn to_c64(&self) -> (f64, f64) {
        if self.is_zero() {
            return (0.0, 0.0);
        }
        let m = to_f64(&self.mag2).sqrt();
        let th = to_f64(&self.phase_pi) * PI;
        (m * th.cos(), m * th.sin())
    }
}

impl Mul for &ExactC {
    type Output = ExactC;
    fn mul(self, rhs: &ExactC) -> ExactC {
        if self.is_zero() || rhs.is_zero() {
            return ExactC::zero();
        }
        ExactC::normalized(&self.phase_pi + &rhs.phase_pi, &self.mag2 * &rhs.mag2)
    }
}

impl Mul for ExactC {
    type Output = ExactC;
    fn mul(self, rhs: ExactC) -> ExactC {
        &self * &rhs
    }
}

impl Neg for ExactC {
    type Output = ExactC;
    fn neg(self) -> ExactC {
        if self.is_zero() {
            return self;
        }
        ExactC::normalized(self.phase_pi + Rat::one(), self.mag2)
    }
}

impl ExactC {
    /// Quotient; panics if `rhs` is zero.
    #[must_use]
    pub fn div(&self, rhs: &ExactC) -> ExactC {
        self * &rhs.inv()
    }
}

impl fmt::Display for ExactC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if let Some(r) = self.as_rat() {
            return write!(f, "{}", crate::rat::format_rat(&r));
        }
        write!(
            f,
            "sqrt({})*e^(i{})",
            crate::rat::format_rat(&self.mag2),
            AnglePi(self.phase_pi.clone())
        )
    }
}

/// Exact square root of a rational if it is a perfect square.
#[must_use]
pub fn rat_sqrt(q: &Rat) -> Option<Rat> {
    if q.is_negative() {
        return None;
    }
    let num = int_sqrt_exact(q.numer())?;
    let den = int_sqrt_exact(q.denom())?;
    Some(Rat::new(num, den))
}

fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Exact sign (+1, -1, or 0) of a product of `sin(theta)` over angles.
#[must_use]
pub fn sin_product_sign(angles: &[AnglePi]) -> i32 {
    let mut s = 1;
    for a in angles {
        let t = a.sin_sign();
        if t == 0 {
            return 0;
        }
        s *= t;
    }
    s
}

/// Exact sign of a product of rationals.
#[must_use]
pub fn rat_product_sign(values: &[Rat]) -> i32 {
    let mut s = 1;
    for v in values {
        let t = sign(v);
        if t == 0 {
            return 0;
        }
        s *= t;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eighth_roots_multiply_to_one() {
        let z = ExactC::unit(&AnglePi::new(1, 4));
        let w = ExactC::unit(&AnglePi::new(-1, 4));
        assert_eq!(&z * &w, ExactC::one());
        assert_eq!(z.pow_int(8), ExactC::one());
        assert_eq!(z.pow_int(4), -ExactC::one());
    }

    #[test]
    fn i_arithmetic() {
        let i = ExactC::i();
        assert_eq!(&i * &i, ExactC::from_int(-1));
        assert_eq!(i.conj(), ExactC::i_pow(-1));
        assert_eq!(ExactC::i_pow(7), ExactC::i_pow(-1));
    }

    #[test]
    fn rational_embedding_and_extraction() {
        let q = rat(-3, 2);
        let z = ExactC::from_rat(&q);
        assert_eq!(z.as_rat().unwrap(), q);
        assert_eq!((&z * &z).as_rat().unwrap(), rat(9, 4));
        let sqrt2 = ExactC::from_polar_mag2(&AnglePi::zero(), &rint(2));
        assert!(sqrt2.as_rat().is_none());
        assert_eq!((&sqrt2 * &sqrt2).as_rat().unwrap(), rint(2));
    }

    #[test]
    fn windowing_and_sin_signs() {
        let a = AnglePi::new(7, 2); // 7pi/2 = 3pi/2 mod 2pi
        assert_eq!(a.mod_two(), AnglePi::new(3, 2));
        assert_eq!(a.window_neg(), AnglePi::new(-1, 2));
        assert_eq!(AnglePi::new(1, 3).sin_sign(), 1);
        assert_eq!(AnglePi::new(4, 3).sin_sign(), -1);
        assert_eq!(AnglePi::new(1, 1).sin_sign(), 0);
        assert_eq!(AnglePi::new(1, 3).cos_sign(), 1);
        assert_eq!(AnglePi::new(2, 3).cos_sign(), -1);
        assert_eq!(AnglePi::new(1, 2).cos_sign(), 0);
        assert_eq!(AnglePi::new(0, 1).window_neg(), AnglePi::zero());
    }

    #[test]
    fn numeric_agrees_with_exact() {
        let z = ExactC::from_polar_mag2(&AnglePi::new(1, 3), &rat(9, 4));
        let (re, im) = z.to_c64();
        assert!((re - 1.5 * (PI / 3.0).cos()).abs() < 1e-12);
        assert!((im - 1.5 * (PI / 3.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn perfect_square_detection() {
        assert_eq!(rat_sqrt(&rat(9, 16)).unwrap(), rat(3, 4));
        assert!(rat_sqrt(&rat(2, 1)).is_none());
        assert!(rat_sqrt(&rat(-1, 1)).is_none());
    }
}
