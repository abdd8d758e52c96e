//! Fixed-point arithmetic on big integers: 60 decimal digits after the
//! point. Enough head-room that ten-digit reference constants checked at
//! 1e-9 carry no representation risk, without pulling in a full
//! multiple-precision float dependency.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num::{BigInt, BigRational, Signed, Zero};

/// Decimal digits kept after the point.
pub const DIGITS: u32 = 60;

fn scale() -> &'static BigInt {
    static SCALE: OnceLock<BigInt> = OnceLock::new();
    SCALE.get_or_init(|| {
        let ten = BigInt::from(10);
        num::pow::pow(ten, DIGITS as usize)
    })
}

/// A real number stored as `mantissa / 10^60`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed(BigInt);

impl Fixed {
    pub fn zero() -> Self {
        Fixed(BigInt::zero())
    }

    pub fn one() -> Self {
        Fixed(scale().clone())
    }

    pub fn from_int(v: i64) -> Self {
        Fixed(BigInt::from(v) * scale())
    }

    /// Exact rational, rounded to the working precision.
    pub fn from_rational(r: &BigRational) -> Self {
        let scaled = r * BigRational::from_integer(scale().clone());
        Fixed(scaled.round().to_integer())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()))
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.0.clone(), scale().clone())
    }

    pub fn to_f64(&self) -> f64 {
        use num::ToPrimitive;
        // Split at the decimal point so huge mantissas cannot overflow.
        let (int, frac) = (self.0.clone() / scale(), self.0.clone() % scale());
        int.to_f64().unwrap_or(f64::NAN)
            + frac.to_f64().unwrap_or(f64::NAN) / 10f64.powi(DIGITS as i32)
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Fixed(self.0.abs())
    }

    pub fn neg(&self) -> Self {
        Fixed(-&self.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Fixed(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Fixed(&self.0 - &other.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Fixed(div_round_nearest(&self.0 * &other.0, scale().clone()))
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.0.is_zero(), "fixed-point division by zero");
        Fixed(div_round_nearest(&self.0 * scale(), other.0.clone()))
    }

    pub fn powi(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Fixed::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// `10^(-k)`, handy for stopping thresholds.
    pub fn epsilon(k: u32) -> Self {
        assert!(k <= DIGITS);
        let ten = BigInt::from(10);
        Fixed(num::pow::pow(ten, (DIGITS - k) as usize))
    }
}

/// Round `num / den` to the nearest integer (ties toward +infinity).
fn div_round_nearest(num: BigInt, den: BigInt) -> BigInt {
    use num::Integer;
    let two = BigInt::from(2);
    let (num, den) = if den.is_negative() {
        (-num, -den)
    } else {
        (num, den)
    };
    (num * &two + &den).div_floor(&(den * two))
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fixed {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(30).min(DIGITS as usize);
        let neg = self.0.is_negative();
        let mag = self.0.abs();
        let int = &mag / scale();
        let mut frac = (&mag % scale()).to_string();
        while frac.len() < DIGITS as usize {
            frac.insert(0, '0');
        }
        frac.truncate(digits);
        write!(f, "{}{int}.{frac}", if neg { "-" } else { "" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_arithmetic() {
        let a = Fixed::from_ratio(1, 3);
        let b = Fixed::from_int(3);
        let p = a.mul(&b);
        // 3 * (1/3 rounded) is within one ulp of 1.
        assert!(p.sub(&Fixed::one()).abs() <= Fixed::epsilon(59));
        assert_eq!(
            Fixed::from_int(2).div(&Fixed::from_int(4)),
            Fixed::from_ratio(1, 2)
        );
    }

    #[test]
    fn powers_and_sign() {
        let half = Fixed::from_ratio(-1, 2);
        assert_eq!(half.powi(2), Fixed::from_ratio(1, 4));
        assert!(half.is_negative());
        assert!(!half.powi(2).is_negative());
    }

    #[test]
    fn f64_round_trip_accuracy() {
        let x = Fixed::from_ratio(5248885986, 10_000_000_000);
        assert!((x.to_f64() - 0.5248885986).abs() < 1e-15);
    }

    #[test]
    fn display_precision() {
        let x = Fixed::from_ratio(1, 8);
        assert_eq!(format!("{x:.5}"), "0.12500");
    }
}
