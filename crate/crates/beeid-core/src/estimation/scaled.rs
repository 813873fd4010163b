//! Sign/mantissa/exponent reals for permanent-sized values.
//!
//! Pairwise-confusion entries look like p^d with d*M easily past 1000, far
//! below what an f64 can hold, while permanents of such matrices also need
//! signed additions (Glynn's formula), which rules out plain log-domain
//! accumulation. A [`ScaledReal`] keeps a double-precision mantissa in
//! [1, 2) next to a wide base-2 exponent: multiplications add exponents,
//! additions align them, and precision matches f64 while the representable
//! range covers |exponent| < 2^40 with room to spare.

use core::cmp::Ordering;

/// A real number `mantissa * 2^exponent` with |mantissa| in [1, 2), or zero
/// (both fields zero). The sign lives on the mantissa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledReal {
    mantissa: f64,
    exponent: i64,
}

/// Exponent gap beyond which the smaller addend cannot affect the sum.
const ALIGN_LIMIT: i64 = 1100;

impl ScaledReal {
    pub const ZERO: ScaledReal = ScaledReal { mantissa: 0.0, exponent: 0 };
    pub const ONE: ScaledReal = ScaledReal { mantissa: 1.0, exponent: 0 };

    /// Normalizes `m * 2^e`.
    fn normalized(m: f64, e: i64) -> Self {
        if m == 0.0 {
            return Self::ZERO;
        }
        debug_assert!(m.is_finite(), "non-finite mantissa");
        let (frac, k) = libm::frexp(m); // |frac| in [0.5, 1)
        ScaledReal { mantissa: frac * 2.0, exponent: e + i64::from(k) - 1 }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "ScaledReal::from_f64 needs a finite value");
        Self::normalized(x, 0)
    }

    pub fn from_u64(x: u64) -> Self {
        Self::from_f64(x as f64)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    /// -1, 0, or +1.
    pub fn sign(&self) -> i8 {
        if self.mantissa == 0.0 {
            0
        } else if self.mantissa < 0.0 {
            -1
        } else {
            1
        }
    }

    /// Mantissa in [1, 2) (0 for zero); the sign rides on it.
    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn abs(&self) -> Self {
        ScaledReal { mantissa: libm::fabs(self.mantissa), exponent: self.exponent }
    }

    pub fn neg(&self) -> Self {
        ScaledReal { mantissa: -self.mantissa, exponent: self.exponent }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self::normalized(self.mantissa * other.mantissa, self.exponent + other.exponent)
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero ScaledReal");
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::normalized(self.mantissa / other.mantissa, self.exponent - other.exponent)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.exponent >= other.exponent {
            (self, other)
        } else {
            (other, self)
        };
        let gap = hi.exponent - lo.exponent;
        if gap > ALIGN_LIMIT {
            return *hi;
        }
        let m = hi.mantissa + libm::scalbn(lo.mantissa, -(gap as i32));
        Self::normalized(m, hi.exponent)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Integer power by repeated squaring; x^0 = 1 including for x = 0.
    pub fn powi(&self, mut n: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// Square root of a non-negative value.
    pub fn sqrt(&self) -> Self {
        assert!(self.sign() >= 0, "sqrt of a negative ScaledReal");
        if self.is_zero() {
            return Self::ZERO;
        }
        if self.exponent.rem_euclid(2) == 0 {
            Self::normalized(libm::sqrt(self.mantissa), self.exponent / 2)
        } else {
            Self::normalized(libm::sqrt(2.0 * self.mantissa), (self.exponent - 1) / 2)
        }
    }

    /// Nearest f64, saturating to 0 / +-infinity outside the double range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.exponent > 1024 {
            return if self.mantissa > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if self.exponent < -1100 {
            return 0.0;
        }
        libm::scalbn(self.mantissa, self.exponent as i32)
    }

    /// log2 of a positive value.
    pub fn log2(&self) -> f64 {
        assert!(self.sign() > 0, "log2 needs a positive value");
        self.exponent as f64 + libm::log2(self.mantissa)
    }
}

impl PartialOrd for ScaledReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (sa, sb) = (self.sign(), other.sign());
        if sa != sb {
            return Some(sa.cmp(&sb));
        }
        if sa == 0 {
            return Some(Ordering::Equal);
        }
        // same nonzero sign: compare magnitudes, flip for negatives
        let mag = match self.exponent.cmp(&other.exponent) {
            Ordering::Equal => self
                .mantissa
                .abs_cmp(other.mantissa),
            ord => ord,
        };
        Some(if sa > 0 { mag } else { mag.reverse() })
    }
}

trait AbsCmp {
    fn abs_cmp(self, other: f64) -> Ordering;
}

impl AbsCmp for f64 {
    fn abs_cmp(self, other: f64) -> Ordering {
        libm::fabs(self)
            .partial_cmp(&libm::fabs(other))
            .expect("mantissas are finite")
    }
}

impl From<f64> for ScaledReal {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ScaledReal, x: f64) {
        assert!((a.to_f64() - x).abs() <= 1e-12 * x.abs().max(1.0), "{a:?} vs {x}");
    }

    #[test]
    fn normalization_and_roundtrip() {
        let x = ScaledReal::from_f64(0.375);
        assert_eq!(x.mantissa(), 1.5);
        assert_eq!(x.exponent(), -2);
        assert_eq!(x.to_f64(), 0.375);
        assert_eq!(ScaledReal::from_f64(0.0), ScaledReal::ZERO);
        assert_eq!(ScaledReal::from_f64(-3.0).sign(), -1);
    }

    #[test]
    fn arithmetic_matches_f64() {
        let cases = [0.3, -1.7, 42.0, 1e-8, 123456.789];
        for &a in &cases {
            for &b in &cases {
                let (sa, sb) = (ScaledReal::from_f64(a), ScaledReal::from_f64(b));
                close(&sa.add(&sb), a + b);
                close(&sa.sub(&sb), a - b);
                close(&sa.mul(&sb), a * b);
                close(&sa.div(&sb), a / b);
            }
        }
    }

    #[test]
    fn far_exponents_do_not_poison_sums() {
        let tiny = ScaledReal::from_f64(0.5).powi(20_000); // 2^-20000
        assert_eq!(tiny.exponent(), -20_000);
        let one = ScaledReal::ONE;
        assert_eq!(one.add(&tiny), ScaledReal::ONE);
        assert_eq!(tiny.add(&tiny).exponent(), -19_999);
    }

    #[test]
    fn deep_powers_are_exact_in_the_exponent() {
        let x = ScaledReal::from_f64(0.25);
        let p = x.powi(3000);
        assert_eq!(p.mantissa(), 1.0);
        assert_eq!(p.exponent(), -6000);
    }

    #[test]
    fn sqrt_both_parities() {
        close(&ScaledReal::from_f64(9.0).sqrt(), 3.0);
        close(&ScaledReal::from_f64(2.0).sqrt(), core::f64::consts::SQRT_2);
        let tiny = ScaledReal::from_f64(0.5).powi(101); // odd exponent
        let r = tiny.sqrt();
        close(&r.mul(&r), tiny.to_f64());
        assert_eq!(r.exponent(), -51);
    }

    #[test]
    fn ordering() {
        let a = ScaledReal::from_f64(0.001);
        let b = ScaledReal::from_f64(1000.0);
        assert!(a < b);
        assert!(b.neg() < a);
        assert!(ScaledReal::ZERO < a);
        assert!(b.neg() < ScaledReal::ZERO);
        let tiny = ScaledReal::from_f64(0.5).powi(5000);
        assert!(tiny > ScaledReal::ZERO);
        assert!(tiny < a);
    }

    #[test]
    fn log2_tracks_exponent() {
        let x = ScaledReal::from_f64(0.3).powi(1000);
        assert!((x.log2() - 1000.0 * 0.3f64.log2()).abs() < 1e-6);
    }
}
