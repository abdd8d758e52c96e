//! Polynomials in the level-marking variable `u` whose coefficients are
//! truncated Laurent series in `z`.
//!
//! Carrier of the bivariate kernels: the catastrophe kernel
//! `z^2 u^3 - u^2 + 2zu - z^2`, the air-pocket kernel, and the quadratic
//! factors split off them. Coefficients must admit negative `z`-valuations
//! because the factor `(u - z/t)` has a `z^-2` coefficient.

use num::BigRational;

use super::{LaurentSeries, SeriesError, TruncatedSeries};

/// `coeffs[i]` is the coefficient of `u^i`. The representation is not kept
/// trimmed; [`degree`](Self::degree) skips known-zero leading coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPolynomial {
    coeffs: Vec<LaurentSeries>,
}

impl UPolynomial {
    pub fn new(coeffs: Vec<LaurentSeries>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        UPolynomial { coeffs }
    }

    /// Build from power-series coefficients in `z`.
    pub fn from_series_coeffs(coeffs: Vec<TruncatedSeries>) -> Self {
        Self::new(coeffs.iter().map(LaurentSeries::from_series).collect())
    }

    pub fn zero(order: usize) -> Self {
        UPolynomial {
            coeffs: vec![LaurentSeries::zero(order)],
        }
    }

    /// Degree after skipping zero leading coefficients; `None` when the
    /// polynomial is identically zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Coefficient of `u^i` (zero beyond the stored degree).
    pub fn coeff(&self, i: usize) -> LaurentSeries {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| LaurentSeries::zero(self.min_body_order()))
    }

    pub fn coeffs(&self) -> &[LaurentSeries] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    fn min_body_order(&self) -> usize {
        self.coeffs
            .iter()
            .map(|c| c.body().order())
            .min()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        UPolynomial { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect();
        UPolynomial { coeffs }
    }

    pub fn neg(&self) -> Self {
        UPolynomial {
            coeffs: self.coeffs.iter().map(LaurentSeries::neg).collect(),
        }
    }

    pub fn scale(&self, factor: &LaurentSeries) -> Self {
        UPolynomial {
            coeffs: self.coeffs.iter().map(|c| c.mul(factor)).collect(),
        }
    }

    pub fn scale_rational(&self, factor: &BigRational) -> Self {
        UPolynomial {
            coeffs: self.coeffs.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.min_body_order().min(other.min_body_order());
        let mut coeffs =
            vec![LaurentSeries::zero(order); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        UPolynomial { coeffs }
    }

    /// Long division: returns `(quotient, remainder)` with
    /// `self = den * quotient + remainder` and `deg(remainder) < deg(den)`,
    /// exact per coefficient up to truncation.
    pub fn divrem(&self, den: &Self) -> Result<(Self, Self), SeriesError> {
        let dden = den.degree().ok_or(SeriesError::ZeroDivisor)?;
        let lead = den.coeff(dden);
        let lead_inv = lead.reciprocal()?;

        let order = self.min_body_order().min(den.min_body_order());
        let mut rem: Vec<LaurentSeries> = (0..self.coeffs.len()).map(|i| self.coeff(i)).collect();
        let qlen = self.coeffs.len().saturating_sub(dden);
        let mut quot = vec![LaurentSeries::zero(order); qlen.max(1)];

        let mut dnum = UPolynomial { coeffs: rem.clone() }.degree();
        while let Some(d) = dnum {
            if d < dden {
                break;
            }
            let factor = rem[d].mul(&lead_inv);
            let shift = d - dden;
            for i in 0..=dden {
                let t = den.coeff(i).mul(&factor);
                rem[shift + i] = rem[shift + i].sub(&t);
            }
            // The leading term cancels by construction; enforce it so that a
            // truncation artifact can never stall the loop.
            rem[d] = LaurentSeries::zero(rem[d].body().order());
            quot[shift] = quot[shift].add(&factor);
            dnum = UPolynomial { coeffs: rem.clone() }.degree();
        }

        Ok((UPolynomial { coeffs: quot }, UPolynomial { coeffs: rem }))
    }

    /// Horner evaluation at a Laurent-series point.
    pub fn eval(&self, point: &LaurentSeries) -> LaurentSeries {
        let mut acc = LaurentSeries::zero(point.body().order().min(self.min_body_order()));
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(point).add(c);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::qi;

    fn upoly_ints(coeffs: &[&[i64]]) -> UPolynomial {
        UPolynomial::from_series_coeffs(
            coeffs
                .iter()
                .map(|c| TruncatedSeries::from_ints(c))
                .collect(),
        )
    }

    #[test]
    fn divide_u_squared_minus_one_by_u_minus_one() {
        let num = upoly_ints(&[&[-1, 0, 0], &[0, 0, 0], &[1, 0, 0]]);
        let den = upoly_ints(&[&[-1, 0, 0], &[1, 0, 0]]);
        let (q, r) = num.divrem(&den).unwrap();
        assert!(r.is_zero());
        assert_eq!(q.degree(), Some(1));
        assert_eq!(q.coeff(0).coeff(0), qi(1));
        assert_eq!(q.coeff(1).coeff(0), qi(1));
    }

    #[test]
    fn divrem_reconstructs_with_remainder() {
        // (u^3 + z) / (u^2 - 1): quotient u, remainder u + z.
        let num = upoly_ints(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0], &[1, 0, 0]]);
        let den = upoly_ints(&[&[-1, 0, 0], &[0, 0, 0], &[1, 0, 0]]);
        let (q, r) = num.divrem(&den).unwrap();
        let back = den.mul(&q).add(&r);
        for i in 0..4 {
            assert!(
                back.coeff(i).sub(&num.coeff(i)).is_zero(),
                "u^{i} mismatch within the known window"
            );
        }
        assert_eq!(r.degree(), Some(1));
    }

    #[test]
    fn eval_horner() {
        // p(u) = u^2 + 2u + 3 at u = z gives z^2 + 2z + 3.
        let p = upoly_ints(&[&[3, 0, 0], &[2, 0, 0], &[1, 0, 0]]);
        let at = LaurentSeries::monomial(qi(1), 1, 2);
        let v = p.eval(&at);
        assert_eq!(v.coeff(0), qi(3));
        assert_eq!(v.coeff(1), qi(2));
        assert_eq!(v.coeff(2), qi(1));
    }

    #[test]
    fn division_by_zero_polynomial_fails() {
        let num = upoly_ints(&[&[1, 0]]);
        let den = UPolynomial::zero(1);
        assert!(matches!(num.divrem(&den), Err(SeriesError::ZeroDivisor)));
    }
}
