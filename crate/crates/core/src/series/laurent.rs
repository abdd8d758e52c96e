//! Truncated Laurent series: a power series times a fixed (possibly negative)
//! power of `z`.
//!
//! Kept as a separate type rather than allowing negative indices inside
//! [`TruncatedSeries`]: the common power-series path stays simple and
//! valuation bugs become type-visible. The air-pocket kernel root starts at
//! `z^-2`, which is the reason this type exists at all.

use std::fmt;

use num::{BigRational, Zero};

use super::truncated::write_term;
use super::{SeriesError, TruncatedSeries};

/// `z^valuation * body`, normalized so that a nonzero `body` has a nonzero
/// constant term. Coefficients of `z^e` are known exactly for all
/// `e <= valuation + body.order()` (they are zero below the valuation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    valuation: i64,
    body: TruncatedSeries,
}

impl LaurentSeries {
    /// Normalizing constructor: strips leading zero coefficients into the
    /// valuation. The zero series is canonicalized to valuation 0.
    pub fn new(valuation: i64, body: TruncatedSeries) -> Self {
        match body.valuation() {
            None => LaurentSeries {
                valuation: 0,
                body: TruncatedSeries::zero(
                    usize::try_from(valuation + body.order() as i64).unwrap_or(0),
                ),
            },
            Some(0) => LaurentSeries { valuation, body },
            Some(v) => {
                let shifted = TruncatedSeries::from_coeffs(body.coeffs()[v..].to_vec());
                LaurentSeries {
                    valuation: valuation + v as i64,
                    body: shifted,
                }
            }
        }
    }

    /// Embed a power series (valuation shift 0).
    pub fn from_series(s: &TruncatedSeries) -> Self {
        Self::new(0, s.clone())
    }

    pub fn zero(order: usize) -> Self {
        LaurentSeries {
            valuation: 0,
            body: TruncatedSeries::zero(order),
        }
    }

    pub fn one(order: usize) -> Self {
        LaurentSeries {
            valuation: 0,
            body: TruncatedSeries::one(order),
        }
    }

    /// The monomial `z^power`, known through `z^(power + order)`.
    pub fn monomial(coeff: BigRational, power: i64, order: usize) -> Self {
        Self::new(power, TruncatedSeries::constant(coeff, order))
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    /// Exponent of the lowest nonzero term; `None` for the zero series.
    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.valuation)
        }
    }

    /// Highest exponent with a known coefficient.
    pub fn top(&self) -> i64 {
        self.valuation + self.body.order() as i64
    }

    /// The underlying power-series body (nonzero constant term unless zero).
    pub fn body(&self) -> &TruncatedSeries {
        &self.body
    }

    /// Coefficient of `z^e`. Exponents below the valuation are exactly zero;
    /// panics above [`top`](Self::top), where the coefficient is unknown.
    pub fn coeff(&self, e: i64) -> BigRational {
        assert!(
            e <= self.top(),
            "coefficient z^{e} requested beyond known top {}",
            self.top()
        );
        if e < self.valuation {
            BigRational::zero()
        } else {
            self.body.coeff((e - self.valuation) as usize).clone()
        }
    }

    /// Check the normalization invariant (used by tests and debug assertions).
    pub fn is_normalized(&self) -> bool {
        self.is_zero() || !self.body.coeff(0).is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.valuation.min(other.valuation);
        let top = self.top().min(other.top());
        if top < lo {
            // Windows do not overlap enough to know anything; treat as an
            // empty window at the low end. This does not arise in practice.
            return LaurentSeries::zero(0);
        }
        let mut coeffs = vec![BigRational::zero(); (top - lo + 1) as usize];
        for (series, val) in [(self, self.valuation), (other, other.valuation)] {
            for (i, c) in series.body.coeffs().iter().enumerate() {
                let e = val + i as i64;
                if e <= top {
                    coeffs[(e - lo) as usize] += c;
                }
            }
        }
        LaurentSeries::new(lo, TruncatedSeries::from_coeffs(coeffs))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            valuation: self.valuation,
            body: self.body.neg(),
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        LaurentSeries::new(self.valuation, self.body.scale(factor))
    }

    /// Product; valuations add (`val(a*b) = val(a) + val(b)`).
    pub fn mul(&self, other: &Self) -> Self {
        LaurentSeries::new(
            self.valuation + other.valuation,
            self.body.mul(&other.body),
        )
    }

    /// Reciprocal; any nonzero Laurent series is invertible.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::DivisionByZero);
        }
        // Normalization guarantees the body has a unit constant term.
        let body = self.body.reciprocal().expect("normalized body is invertible");
        Ok(LaurentSeries {
            valuation: -self.valuation,
            body,
        })
    }

    /// Exact division `self / other`; `val(result) = val(self) - val(other)`.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.reciprocal()?))
    }

    /// Integer power, negative exponents via the reciprocal.
    pub fn pow(&self, exp: i64) -> Result<Self, SeriesError> {
        let base = if exp < 0 {
            self.reciprocal()?
        } else {
            self.clone()
        };
        let mut acc = LaurentSeries::one(self.body.order());
        for _ in 0..exp.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Restrict the known window to exponents `<= top`.
    pub fn truncated_top(&self, top: i64) -> Self {
        if self.is_zero() {
            return LaurentSeries::zero(usize::try_from(top).unwrap_or(0));
        }
        assert!(
            top >= self.valuation && top <= self.top(),
            "top {top} outside the known window [{}, {}]",
            self.valuation,
            self.top()
        );
        LaurentSeries {
            valuation: self.valuation,
            body: self.body.truncated((top - self.valuation) as usize),
        }
    }

    /// Collapse back to a power series. Fails when a genuinely negative power
    /// survives; zero-pads below a positive valuation.
    pub fn to_series(&self) -> Result<TruncatedSeries, SeriesError> {
        if self.is_zero() {
            return Ok(TruncatedSeries::zero(self.body.order()));
        }
        if self.valuation < 0 {
            return Err(SeriesError::NegativeValuation {
                valuation: self.valuation,
            });
        }
        Ok(self.body.shift_up(self.valuation as usize))
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, c) in self.body.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            write_term(f, c, self.valuation + i as i64, &mut wrote)?;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::qi;

    #[test]
    fn monomial_quotients() {
        let z3 = LaurentSeries::monomial(qi(1), 3, 8);
        let z1 = LaurentSeries::monomial(qi(1), 1, 8);
        let q = z3.div(&z1).unwrap();
        assert_eq!(q.valuation(), Some(2));
        assert_eq!(q.coeff(2), qi(1));
    }

    #[test]
    fn self_division_is_one() {
        let a = LaurentSeries::monomial(qi(1), -2, 10);
        let q = a.div(&a).unwrap();
        assert_eq!(q, LaurentSeries::one(10));
    }

    #[test]
    fn addition_aligns_valuations_and_normalizes() {
        // (z^-1 + 1) + (-z^-1) = 1
        let a = LaurentSeries::new(-1, TruncatedSeries::from_ints(&[1, 1, 0, 0]));
        let b = LaurentSeries::monomial(qi(-1), -1, 3);
        let s = a.add(&b);
        assert_eq!(s.valuation(), Some(0));
        assert!(s.is_normalized());
        assert_eq!(s.coeff(0), qi(1));
    }

    #[test]
    fn valuations_add_under_product() {
        let a = LaurentSeries::new(-2, TruncatedSeries::from_ints(&[1, 0, 5, 0, 0]));
        let b = LaurentSeries::new(3, TruncatedSeries::from_ints(&[2, 1, 0, 0, 0]));
        let p = a.mul(&b);
        assert_eq!(p.valuation(), Some(1));
        assert!(p.is_normalized());
    }

    #[test]
    fn negative_valuation_rejected_as_power_series() {
        let a = LaurentSeries::monomial(qi(1), -2, 5);
        assert_eq!(
            a.to_series(),
            Err(SeriesError::NegativeValuation { valuation: -2 })
        );
    }

    #[test]
    fn positive_valuation_pads_with_zeros() {
        let a = LaurentSeries::monomial(qi(7), 2, 3);
        let s = a.to_series().unwrap();
        assert_eq!(s.order(), 5);
        assert_eq!(s.coeff(2), &qi(7));
        assert_eq!(s.coeff(0), &qi(0));
    }
}
