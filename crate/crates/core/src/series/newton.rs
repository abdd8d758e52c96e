//! Newton iteration for power-series roots of polynomial equations.

use num::Zero;

use super::{SeriesError, TruncatedSeries};

/// Solve `P(y) = 0` in the power-series ring, where `P` is a polynomial in
/// `y` with truncated-series coefficients (`poly[j]` multiplies `y^j`).
///
/// Requirements: the seed must already satisfy `P(seed) ≡ 0 mod z` (an
/// approximate root) and `P'(seed)` must have a nonzero constant term. Each
/// step at least doubles the order through which `P(y)` vanishes; this
/// quadratic convergence is asserted, not assumed. The result is returned at
/// the truncation order `n` and satisfies `P(y) ≡ 0 mod z^(n+1)`.
pub fn newton_algebraic_root(
    poly: &[TruncatedSeries],
    seed: &TruncatedSeries,
    n: usize,
) -> Result<TruncatedSeries, SeriesError> {
    assert!(!poly.is_empty(), "empty polynomial");
    let poly: Vec<TruncatedSeries> = poly.iter().map(|c| c.truncated(c.order().min(n))).collect();
    let derivative: Vec<TruncatedSeries> = poly
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| c.scale(&super::qi(j as i64)))
        .collect();

    let mut y = if seed.order() >= n {
        seed.truncated(n)
    } else {
        // A short seed is treated as an exact polynomial.
        seed.pad_to(n)
    };

    let mut residual = eval_poly(&poly, &y, n);
    let mut valid = match residual.valuation() {
        None => return Ok(y),
        Some(0) => return Err(SeriesError::SeedNotRoot),
        Some(v) => v,
    };

    // Each Newton step: y <- y - P(y)/P'(y).
    let max_steps = usize::BITS as usize + 4;
    for _ in 0..max_steps {
        let dp = eval_poly(&derivative, &y, n);
        if dp.coeff(0).is_zero() {
            return Err(SeriesError::SingularNewtonStep);
        }
        let step = residual.mul(&dp.reciprocal()?);
        y = y.sub(&step);
        residual = eval_poly(&poly, &y, n);
        let new_valid = residual.valuation().unwrap_or(n + 1);
        let expected = (2 * valid).min(n + 1);
        if new_valid < expected {
            return Err(SeriesError::NewtonStalled {
                got: new_valid,
                expected,
            });
        }
        if new_valid > n {
            return Ok(y);
        }
        valid = new_valid;
    }
    unreachable!("Newton order doubling terminates within the step bound")
}

fn eval_poly(poly: &[TruncatedSeries], y: &TruncatedSeries, n: usize) -> TruncatedSeries {
    let mut acc = TruncatedSeries::zero(n);
    for c in poly.iter().rev() {
        acc = acc.mul(y).add(c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::qi;

    /// `P(y) = y - z`, seed 0: the unique root is `z` after one step.
    #[test]
    fn linear_equation() {
        let n = 10;
        let poly = vec![TruncatedSeries::var(n).neg(), TruncatedSeries::one(n)];
        let root = newton_algebraic_root(&poly, &TruncatedSeries::zero(n), n).unwrap();
        assert_eq!(root, TruncatedSeries::var(n));
    }

    /// `t(1-t)^2 = z^3` with seed `z^3`; the expansion starts
    /// `z^3 + 2 z^6 + 7 z^9 + 30 z^12`, i.e. coefficient `binom(3m-2, m-1)/m`
    /// of `z^(3m)`.
    #[test]
    fn cubic_root_for_t() {
        let n = 13;
        // y - 2y^2 + y^3 - z^3
        let poly = vec![
            TruncatedSeries::monomial(qi(-1), 3, n),
            TruncatedSeries::one(n),
            TruncatedSeries::constant(qi(-2), n),
            TruncatedSeries::one(n),
        ];
        let seed = TruncatedSeries::monomial(qi(1), 3, n);
        let t = newton_algebraic_root(&poly, &seed, n).unwrap();
        let expected = [0, 0, 0, 1, 0, 0, 2, 0, 0, 7, 0, 0, 30, 0];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(t.coeff(k), &qi(*e), "coefficient of z^{k}");
        }
        // Residual really vanishes through the truncation order.
        let residual = eval_poly(&poly, &t, n);
        assert!(residual.is_zero());
    }

    #[test]
    fn rejects_seed_with_nonzero_constant_residual() {
        let n = 6;
        // y - 1 with seed 0: P(0) = -1 has a unit constant term.
        let poly = vec![
            TruncatedSeries::constant(qi(-1), n),
            TruncatedSeries::one(n),
        ];
        let err = newton_algebraic_root(&poly, &TruncatedSeries::zero(n), n).unwrap_err();
        assert_eq!(err, SeriesError::SeedNotRoot);
    }

    #[test]
    fn rejects_singular_derivative() {
        let n = 6;
        // y^2 - z^2 at seed z: P(seed) = 0 already... use y^2 - z^3, seed 0:
        // P(0) = -z^3 (ok), P'(0) = 0 (singular).
        let poly = vec![
            TruncatedSeries::monomial(qi(-1), 3, n),
            TruncatedSeries::zero(n),
            TruncatedSeries::one(n),
        ];
        let err = newton_algebraic_root(&poly, &TruncatedSeries::zero(n), n).unwrap_err();
        assert_eq!(err, SeriesError::SingularNewtonStep);
    }
}
