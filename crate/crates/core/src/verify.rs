//! The full cross-check suite in one callable report: brute force vs dynamic
//! programming, dynamic programming vs closed forms, the algebraic kernel
//! identities, and structural properties. The CLI `verify` subcommand is a
//! thin wrapper over [`run`].

use num::{BigRational, One, Zero};

use crate::asymptotics;
use crate::dp::{self, DpError};
use crate::kernel;
use crate::models::{self, Layer, ModelId};
use crate::series::{LaurentSeries, TruncatedSeries};

/// One named check with its outcome; `detail` names the first divergent
/// coefficient or cell when a comparison fails.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: false,
            detail: detail.into(),
        }
    }

    fn comparison(
        name: impl Into<String>,
        lhs: &TruncatedSeries,
        rhs: &TruncatedSeries,
        through: usize,
    ) -> Self {
        let n = through.min(lhs.order()).min(rhs.order());
        match lhs.first_difference(rhs, n) {
            None => Check::pass(name, format!("equal through z^{n}")),
            Some(k) => Check::fail(
                name,
                format!(
                    "first divergent coefficient at z^{k}: {} vs {}",
                    lhs.coeff(k),
                    rhs.coeff(k)
                ),
            ),
        }
    }
}

/// Options for [`run`].
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Order for the series cross-checks (closed form vs DP).
    pub order: usize,
    /// Order for the algebraic identities.
    pub identity_order: usize,
    /// Length cap for the brute-force oracle comparison.
    pub brute_cap: usize,
    /// Deliberately perturb `g_1` in the cancellation checks (negative
    /// control; makes the run fail).
    pub perturb_g1: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            order: 30,
            identity_order: 40,
            brute_cap: 12,
            perturb_g1: false,
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// Run every check; failures are collected, not short-circuited.
pub fn run(opts: &VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    oracle_checks(opts, &mut checks);
    closed_form_checks(opts, &mut checks);
    identity_checks(opts, &mut checks);
    structural_checks(opts, &mut checks);
    asymptotics_checks(&mut checks);
    checks
}

/// Brute force == DP for every model, every state, all lengths up to the cap.
fn oracle_checks(opts: &VerifyOptions, checks: &mut Vec<Check>) {
    for model in ModelId::ALL {
        let name = format!("brute force vs dp ({model})");
        let brute = models::brute_force_counts(model, opts.brute_cap);
        let table = dp::dp_counts(model, opts.brute_cap);
        match table.first_difference(&brute) {
            None => checks.push(Check::pass(
                name,
                format!("all states equal through length {}", opts.brute_cap),
            )),
            Some((n, layer, level)) => checks.push(Check::fail(
                name,
                format!(
                    "first divergent cell at n = {n}, state ({layer}, {level}): dp {} vs brute {}",
                    table.count(n, layer, level),
                    brute.count(n, layer, level)
                ),
            )),
        }
    }
}

/// Every closed form equals the corresponding DP series.
fn closed_form_checks(opts: &VerifyOptions, checks: &mut Vec<Check>) {
    let n = opts.order;
    let build = n + 10;

    match kernel::build_kernel_basis(build) {
        Ok(basis) => {
            let table = dp::dp_counts(ModelId::Cata, n);
            push_series(checks, "cata.f0 vs dp", basis.f0(), &table.series(Layer::F, 0), n);
            push_series(checks, "cata.g0 vs dp", basis.g0(), &table.series(Layer::G, 0), n);
            for k in 0..=4usize {
                push_series(
                    checks,
                    format!("cata.f{} vs dp", k + 1),
                    basis.fk(k),
                    &table.series(Layer::F, k + 1),
                    n,
                );
                push_series(
                    checks,
                    format!("cata.g{} vs dp", k + 1),
                    basis.gk(k),
                    &table.series(Layer::G, k + 1),
                    n,
                );
            }
            match (basis.open_total(), dp::open_total(ModelId::Cata, n)) {
                (Ok(cf), Ok(dp_side)) => {
                    checks.push(Check::comparison("cata.open vs dp", &cf, &dp_side, n))
                }
                (cf, dp_side) => checks.push(Check::fail(
                    "cata.open vs dp",
                    format!("closed {:?} / dp {:?}", cf.err(), dp_side.err()),
                )),
            }
        }
        Err(e) => checks.push(Check::fail("kernel basis", e.to_string())),
    }

    match kernel::rtl_closed(build) {
        Ok(forms) => {
            let table = dp::dp_counts(ModelId::CataRtl, n);
            checks.push(Check::comparison("rtl.a0 vs dp", &forms.a0, &table.series(Layer::A, 0), n));
            checks.push(Check::comparison("rtl.a1 vs dp", &forms.a1, &table.series(Layer::A, 1), n));
            checks.push(Check::comparison("rtl.b0 vs dp", &forms.b0, &table.series(Layer::B, 0), n));
            checks.push(Check::comparison("rtl.b1 vs dp", &forms.b1, &table.series(Layer::B, 1), n));
        }
        Err(e) => checks.push(Check::fail("rtl closed forms", e.to_string())),
    }

    match kernel::build_air_kernel(build) {
        Ok(air) => {
            let table = dp::dp_counts(ModelId::AirPockets, n);
            for k in 0..=5usize {
                push_series(checks, format!("air.a{k} vs dp"), air.ak(k), &table.series(Layer::A, k), n);
                push_series(checks, format!("air.b{k} vs dp"), air.bk(k), &table.series(Layer::B, k), n);
                push_series(checks, format!("air.c{k} vs dp"), air.ck(k), &table.series(Layer::C, k), n);
                push_series(checks, format!("air.d{k} vs dp"), air.dk(k), &table.series(Layer::D, k), n);
            }
            match air.a1_c1() {
                Ok((a1, c1)) => {
                    // Level sums over the DP table across all levels <= n.
                    let mut a_sum = TruncatedSeries::zero(n);
                    let mut c_sum = TruncatedSeries::zero(n);
                    for level in 0..=n {
                        a_sum = a_sum.add(&table.series(Layer::A, level));
                        c_sum = c_sum.add(&table.series(Layer::C, level));
                    }
                    checks.push(Check::comparison("air.A1 vs dp level sum", &a1, &a_sum, n));
                    checks.push(Check::comparison("air.C1 vs dp level sum", &c1, &c_sum, n));
                }
                Err(e) => checks.push(Check::fail("air.A1/C1", e.to_string())),
            }

            // Cross-layer identities read off the DP table directly.
            let mut ok = true;
            let mut detail = String::new();
            'outer: for len in 1..=n {
                for level in 0..n {
                    if table.count(len, Layer::C, level) != table.count(len - 1, Layer::B, level) {
                        ok = false;
                        detail = format!("c != z b at n = {len}, level {level}");
                        break 'outer;
                    }
                }
            }
            checks.push(if ok {
                Check::pass("air c_i = z b_i on tables", format!("through length {n}"))
            } else {
                Check::fail("air c_i = z b_i on tables", detail)
            });
        }
        Err(e) => checks.push(Check::fail("air kernel", e.to_string())),
    }

    // RTL cross-layer identities on the tables.
    let table = dp::dp_counts(ModelId::CataRtl, n);
    let b0_shift_ok = (1..=n)
        .all(|len| table.count(len, Layer::B, 0) == table.count(len - 1, Layer::A, 1));
    checks.push(if b0_shift_ok {
        Check::pass("rtl b0 = z a1 on tables", format!("through length {n}"))
    } else {
        Check::fail("rtl b0 = z a1 on tables", "divergent cell".to_string())
    });
    let a0_ok = (1..=n)
        .all(|len| table.count(len, Layer::A, 0) == table.count(len - 1, Layer::B, 0))
        && table.count(0, Layer::A, 0).is_one();
    checks.push(if a0_ok {
        Check::pass("rtl a0 = 1 + z b0 on tables", format!("through length {n}"))
    } else {
        Check::fail("rtl a0 = 1 + z b0 on tables", "divergent cell".to_string())
    });
}

fn push_series(
    checks: &mut Vec<Check>,
    name: impl Into<String>,
    lhs: Result<TruncatedSeries, kernel::KernelError>,
    rhs: &TruncatedSeries,
    n: usize,
) {
    match lhs {
        Ok(series) => checks.push(Check::comparison(name, &series, rhs, n)),
        Err(e) => checks.push(Check::fail(name, e.to_string())),
    }
}

/// The algebraic identities at the (higher) identity order.
fn identity_checks(opts: &VerifyOptions, checks: &mut Vec<Check>) {
    let n = opts.identity_order;

    // Building the bases runs the identities internally (defining equations,
    // Newton vs explicit formula, factorizations with zero remainder,
    // multiply-back, the scalar identity at rho); report them as checks.
    match kernel::build_kernel_basis(n) {
        Ok(basis) => {
            checks.push(Check::pass(
                "t(1-t)^2 = z^3 and t Newton == t explicit",
                format!("order {n}"),
            ));
            checks.push(Check::pass(
                "kernel cubic == z^2 (u - u1) * bad quadratic",
                "zero remainder, product verified".to_string(),
            ));
            let unit = basis.u1.mul(&basis.t_over_z);
            checks.push(if unit.sub(&LaurentSeries::one(0)).is_zero() {
                Check::pass("u1 * t/z = 1", format!("through z^{}", unit.top()))
            } else {
                Check::fail("u1 * t/z = 1", format!("got {unit}"))
            });
        }
        Err(e) => checks.push(Check::fail("kernel basis identities", e.to_string())),
    }

    match kernel::build_air_kernel(n) {
        Ok(_) => {
            checks.push(Check::pass(
                "air kernel == z^2 (u - rho)(u^2 + Ku + L)",
                "zero remainder, product verified".to_string(),
            ));
            checks.push(Check::pass(
                "scalar identity D(rho) = 0",
                format!("order {n}"),
            ));
        }
        Err(e) => checks.push(Check::fail("air kernel identities", e.to_string())),
    }

    match kernel::kernel_cancellation_check_with(n, opts.perturb_g1) {
        Ok(report) => {
            for c in report.checks {
                checks.push(Check {
                    name: c.name.to_string(),
                    passed: c.passed,
                    detail: c.detail,
                });
            }
        }
        Err(e) => checks.push(Check::fail("kernel cancellations", e.to_string())),
    }
}

/// Structural properties of the models themselves.
fn structural_checks(opts: &VerifyOptions, checks: &mut Vec<Check>) {
    let cap = opts.brute_cap;

    // Plain closed-path counts vanish unless the length is divisible by 3.
    let plain = dp::dp_counts(ModelId::Plain, cap);
    let bad = (0..=cap).find(|&n| n % 3 != 0 && !plain.count(n, Layer::F, 0).is_zero());
    checks.push(match bad {
        None => Check::pass(
            "plain closed counts vanish unless 3 | n",
            format!("through length {cap}"),
        ),
        Some(n) => Check::fail(
            "plain closed counts vanish unless 3 | n",
            format!("nonzero count at n = {n}"),
        ),
    });

    // Reversal duality: right-to-left counts at (A, 0) equal the forward
    // catastrophe counts at (F, 0).
    let rtl = dp::dp_counts(ModelId::CataRtl, cap);
    let cata = dp::dp_counts(ModelId::Cata, cap);
    let bad = (0..=cap).find(|&n| rtl.count(n, Layer::A, 0) != cata.count(n, Layer::F, 0));
    checks.push(match bad {
        None => Check::pass(
            "reversal duality rtl(A,0) == cata(F,0)",
            format!("through length {cap}"),
        ),
        Some(n) => Check::fail(
            "reversal duality rtl(A,0) == cata(F,0)",
            format!("first divergence at n = {n}"),
        ),
    });

    // Open totals are rejected for the right-to-left model with a
    // divergence diagnostic.
    checks.push(match dp::open_total(ModelId::CataRtl, 6) {
        Err(DpError::OpenTotalDiverges) => Check::pass(
            "open total rejected for cata-rtl",
            DpError::OpenTotalDiverges.to_string(),
        ),
        other => Check::fail(
            "open total rejected for cata-rtl",
            format!("got {other:?}"),
        ),
    });
}

/// Pole location residuals and growth comparisons.
fn asymptotics_checks(checks: &mut Vec<Check>) {
    match asymptotics::cata_pole() {
        Ok(pole) => {
            let tol = BigRational::new(1.into(), 1_000_000_000_000i64.into());
            let ok = pole.residual_norm.to_rational() < tol;
            checks.push(if ok {
                Check::pass(
                    "pole residuals below 1e-12",
                    format!("|E| = {:.3e}", pole.residual_norm.to_f64()),
                )
            } else {
                Check::fail(
                    "pole residuals below 1e-12",
                    format!("|E| = {}", pole.residual_norm),
                )
            });
            let plain = asymptotics::plain_singularity();
            checks.push(if pole.growth > plain.growth {
                Check::pass(
                    "catastrophes increase the growth rate",
                    format!(
                        "{:.9} > {:.9}",
                        pole.growth.to_f64(),
                        plain.growth.to_f64()
                    ),
                )
            } else {
                Check::fail("catastrophes increase the growth rate", String::new())
            });
        }
        Err(e) => checks.push(Check::fail("pole location", e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes_everywhere() {
        let opts = VerifyOptions {
            order: 16,
            identity_order: 18,
            brute_cap: 8,
            ..VerifyOptions::default()
        };
        let checks = run(&opts);
        let failures: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
        assert!(failures.is_empty(), "{failures:?}");
    }

    #[test]
    fn perturbed_run_names_the_failed_identity() {
        let opts = VerifyOptions {
            order: 12,
            identity_order: 14,
            brute_cap: 6,
            perturb_g1: true,
        };
        let checks = run(&opts);
        assert!(!all_passed(&checks));
        assert!(checks
            .iter()
            .any(|c| !c.passed && c.name.contains("F(u) numerator")));
    }
}
