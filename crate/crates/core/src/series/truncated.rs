//! Dense truncated power series with exact rational coefficients.

use std::fmt;

use num::{BigRational, One, Signed, Zero};

use super::SeriesError;

/// A power series in `z` truncated at an inclusive order `N`: coefficients of
/// `z^0 .. z^N` are known exactly, everything above is unknown.
///
/// The coefficient vector always has length `order + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    /// The zero series known through `z^order`.
    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    /// The constant series 1.
    pub fn one(order: usize) -> Self {
        Self::constant(BigRational::one(), order)
    }

    /// A constant series.
    pub fn constant(value: BigRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    /// The monomial `coeff * z^power`; panics if `power > order`.
    pub fn monomial(coeff: BigRational, power: usize, order: usize) -> Self {
        assert!(power <= order, "monomial power {power} beyond order {order}");
        let mut s = Self::zero(order);
        s.coeffs[power] = coeff;
        s
    }

    /// The variable `z` itself.
    pub fn var(order: usize) -> Self {
        Self::monomial(BigRational::one(), 1, order)
    }

    /// Build from an explicit coefficient vector (`coeffs[k]` is the
    /// coefficient of `z^k`); the truncation order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the z^0 coefficient");
        TruncatedSeries { coeffs }
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| super::qi(c)).collect())
    }

    /// Inclusive truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `z^k`; panics beyond the truncation order, where the
    /// coefficient is genuinely unknown.
    pub fn coeff(&self, k: usize) -> &BigRational {
        assert!(
            k <= self.order(),
            "coefficient z^{k} requested beyond truncation order {}",
            self.order()
        );
        &self.coeffs[k]
    }

    /// All known coefficients, lowest power first.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// True if every known coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the lowest nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Extend with explicit zeros, treating the series as an exact
    /// polynomial. Distinct from truncation bookkeeping: only use this when
    /// all higher coefficients are known to vanish.
    pub fn pad_to(&self, order: usize) -> Self {
        assert!(order >= self.order());
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, BigRational::zero());
        TruncatedSeries { coeffs }
    }

    /// Restrict to a smaller truncation order.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(
            order <= self.order(),
            "cannot extend a series from order {} to {order}",
            self.order()
        );
        TruncatedSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| &self.coeffs[k] + &other.coeffs[k])
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| &self.coeffs[k] - &other.coeffs[k])
            .collect();
        TruncatedSeries { coeffs }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Cauchy product, truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n + 1 - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        TruncatedSeries { coeffs }
    }

    /// Multiply by `z^k`. The known window shifts up with the coefficients, so
    /// the result has order `order + k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + k];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i + k] = c.clone();
        }
        TruncatedSeries { coeffs }
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    ///
    /// Uses the standard recurrence `c_0 = 1/a_0`,
    /// `c_n = -(1/a_0) * sum_{k=1..n} a_k c_{n-k}`.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let n = self.order();
        let inv_a0 = a0.recip();
        let mut out = vec![BigRational::zero(); n + 1];
        out[0] = inv_a0.clone();
        for m in 1..=n {
            let mut acc = BigRational::zero();
            for k in 1..=m {
                if !self.coeffs[k].is_zero() && !out[m - k].is_zero() {
                    acc += &self.coeffs[k] * &out[m - k];
                }
            }
            out[m] = -(&inv_a0 * acc);
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, exp: usize) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// True when the two series agree on all coefficients up to `z^n`
    /// (both must know that far).
    pub fn eq_through(&self, other: &Self, n: usize) -> bool {
        self.first_difference(other, n).is_none()
    }

    /// Lowest `k <= n` where the coefficients differ, if any. Panics if either
    /// series is truncated below `n`.
    pub fn first_difference(&self, other: &Self, n: usize) -> Option<usize> {
        (0..=n).find(|&k| self.coeff(k) != other.coeff(k))
    }
}

impl fmt::Display for TruncatedSeries {
    /// Prints in the conventional compact style, e.g. `1 + z^3 + 3z^6 - z^8`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            write_term(f, c, k as i64, &mut wrote)?;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Shared term formatter for power and Laurent series display.
pub(super) fn write_term(
    f: &mut fmt::Formatter<'_>,
    c: &BigRational,
    power: i64,
    wrote: &mut bool,
) -> fmt::Result {
    let mag = c.abs();
    if *wrote {
        write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
    } else if c.is_negative() {
        write!(f, "-")?;
    }
    *wrote = true;
    if power == 0 {
        write!(f, "{mag}")?;
    } else {
        if !mag.is_one() {
            write!(f, "{mag}")?;
        }
        if power == 1 {
            write!(f, "z")?;
        } else {
            write!(f, "z^{power}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::qi;

    #[test]
    fn difference_of_squares() {
        let one_plus = TruncatedSeries::from_ints(&[1, 1, 0, 0]);
        let one_minus = TruncatedSeries::from_ints(&[1, -1, 0, 0]);
        let expect = TruncatedSeries::from_ints(&[1, 0, -1, 0]);
        assert_eq!(one_plus.mul(&one_minus), expect);
    }

    #[test]
    fn mul_by_one_is_identity() {
        let s = TruncatedSeries::from_ints(&[3, -1, 7, 0, 2]);
        assert_eq!(s.mul(&TruncatedSeries::one(4)), s);
    }

    #[test]
    fn geometric_series_inverts_one_minus_z() {
        let geo = TruncatedSeries::from_coeffs(vec![qi(1); 13]);
        let mut c = vec![qi(0); 13];
        c[0] = qi(1);
        c[1] = qi(-1);
        let one_minus_z = TruncatedSeries::from_coeffs(c);
        assert_eq!(geo.mul(&one_minus_z), TruncatedSeries::one(12));
    }

    #[test]
    fn reciprocal_of_geometric_ratio_two() {
        // 1/(1-2z) = sum 2^k z^k, verified by multiplying back.
        let mut c = vec![qi(0); 11];
        c[0] = qi(1);
        c[1] = qi(-2);
        let s = TruncatedSeries::from_coeffs(c);
        let r = s.reciprocal().unwrap();
        for k in 0..=10 {
            assert_eq!(r.coeff(k), &qi(1 << k));
        }
        assert_eq!(s.mul(&r), TruncatedSeries::one(10));
    }

    #[test]
    fn reciprocal_of_one_is_one() {
        let one = TruncatedSeries::one(6);
        assert_eq!(one.reciprocal().unwrap(), one);
    }

    #[test]
    fn reciprocal_requires_unit_constant_term() {
        let z = TruncatedSeries::var(4);
        assert_eq!(z.reciprocal(), Err(SeriesError::NotInvertible));
    }

    #[test]
    fn min_order_semantics() {
        let a = TruncatedSeries::zero(10);
        let b = TruncatedSeries::one(4);
        assert_eq!(a.add(&b).order(), 4);
        assert_eq!(a.mul(&b).order(), 4);
    }

    #[test]
    fn display_matches_paper_style() {
        let s = TruncatedSeries::from_ints(&[1, 0, 0, 1, 0, 1, 3]);
        assert_eq!(s.to_string(), "1 + z^3 + z^5 + 3z^6");
    }
}
