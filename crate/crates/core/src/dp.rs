//! Exact count tables for all four models by dynamic programming over the
//! layer recursions, scaling to hundreds of terms where brute force cannot.
//!
//! The recursions transcribed here (counts of words of length `n` ending at
//! level `i`):
//!
//! * catastrophes: `f_0 = 1 + z(f_1 + f_2 + ...)`, `f_i = z g_(i-1) + z
//!   f_(i+1)`, `g_0 = z f_0 + z(g_1 + g_2 + ...)`, `g_i = z f_i + z g_(i+1)`
//!   (the plain model drops the two infinite sums);
//! * right-to-left: `a_0 = 1 + z b_0`, `a_1 = z b_1 + z a_0`, `a_i = z b_i +
//!   z a_(i-1) + z a_0` for `i >= 2`; `b_0 = z a_1`, `b_1 = z b_0 + z a_2`,
//!   `b_i = z a_(i+1) + z b_(i-1) + z b_0` for `i >= 2`;
//! * air pockets: `a_0 = 1`, `a_i = z d_(i-1)`, `b_i = a_i + z sum_(j>i)
//!   a_j`, `c_i = z b_i`, `d_i = c_i + z sum_(j>i) c_j`.
//!
//! Counts at length `n` depend only on length `n - 1` (plus, for the air
//! pockets, same-length epsilon contributions, resolved in layer order
//! a, b, c, d), so the computation runs length-major; the infinite sums are
//! suffix sums over the previous row, giving `O(max_len^2)` work per layer.

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

use crate::models::{Layer, ModelId};
use crate::series::TruncatedSeries;

/// Errors from table-level operations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DpError {
    #[error(
        "open-path totals diverge for the right-to-left catastrophe model: \
         every length n >= 1 already admits infinitely many open paths"
    )]
    OpenTotalDiverges,
    #[error("open-path totals are only defined for the catastrophe model, not {model}")]
    OpenTotalUnsupported { model: ModelId },
}

/// Exact integer counts indexed by (word length, layer, level), with levels
/// recorded up to `max_len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    model: ModelId,
    max_len: usize,
    counts: Vec<BigInt>,
}

impl CountTable {
    pub fn zeroed(model: ModelId, max_len: usize) -> Self {
        let cells = (max_len + 1) * model.layers().len() * (max_len + 1);
        CountTable {
            model,
            max_len,
            counts: vec![BigInt::zero(); cells],
        }
    }

    pub fn model(&self) -> ModelId {
        self.model
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    fn layer_index(&self, layer: Layer) -> usize {
        self.model
            .layers()
            .iter()
            .position(|&l| l == layer)
            .unwrap_or_else(|| panic!("layer {layer} does not belong to model {}", self.model))
    }

    fn idx(&self, n: usize, layer: Layer, level: usize) -> usize {
        assert!(n <= self.max_len && level <= self.max_len);
        (n * self.model.layers().len() + self.layer_index(layer)) * (self.max_len + 1) + level
    }

    pub fn count(&self, n: usize, layer: Layer, level: usize) -> &BigInt {
        &self.counts[self.idx(n, layer, level)]
    }

    pub(crate) fn set(&mut self, n: usize, layer: Layer, level: usize, value: BigInt) {
        let i = self.idx(n, layer, level);
        self.counts[i] = value;
    }

    pub(crate) fn increment(&mut self, n: usize, layer: Layer, level: usize) {
        let i = self.idx(n, layer, level);
        self.counts[i] += 1;
    }

    /// Fold the zero-length epsilon arrivals of the air-pocket model into the
    /// `B` and `D` layers (`b_i += a_i`, `d_i += c_i` at every length).
    pub(crate) fn add_air_epsilon_credits(&mut self) {
        assert_eq!(self.model, ModelId::AirPockets);
        for n in 0..=self.max_len {
            for level in 0..=self.max_len {
                let a = self.count(n, Layer::A, level).clone();
                let i = self.idx(n, Layer::B, level);
                self.counts[i] += a;
                let c = self.count(n, Layer::C, level).clone();
                let i = self.idx(n, Layer::D, level);
                self.counts[i] += c;
            }
        }
    }

    /// The coefficient series of one state: `z^n` carries the number of words
    /// of length `n` ending there.
    pub fn series(&self, layer: Layer, level: usize) -> TruncatedSeries {
        TruncatedSeries::from_coeffs(
            (0..=self.max_len)
                .map(|n| BigRational::from_integer(self.count(n, layer, level).clone()))
                .collect(),
        )
    }

    /// First cell where two tables differ, scanning length-major.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, Layer, usize)> {
        assert_eq!(self.model, other.model);
        let n_max = self.max_len.min(other.max_len);
        for n in 0..=n_max {
            for &layer in self.model.layers() {
                for level in 0..=n_max {
                    if self.count(n, layer, level) != other.count(n, layer, level) {
                        return Some((n, layer, level));
                    }
                }
            }
        }
        None
    }

    /// Iterate all cells as `(n, layer, level, count)` rows for export.
    pub fn rows(&self) -> impl Iterator<Item = (usize, Layer, usize, &BigInt)> + '_ {
        (0..=self.max_len).flat_map(move |n| {
            self.model.layers().iter().flat_map(move |&layer| {
                (0..=self.max_len).map(move |level| (n, layer, level, self.count(n, layer, level)))
            })
        })
    }
}

/// Count tables for every model, computed by the layer recursions.
///
/// Level truncation is lossless for the recorded range: in the plain,
/// catastrophe and air-pocket models one step raises the level by at most
/// one, so levels above `max_len` are unreachable; the right-to-left climbs
/// can overshoot, and the computation therefore runs over working levels up
/// to `2 * max_len` (descending costs two steps per level, so higher levels
/// cannot influence any recorded cell).
pub fn dp_counts(model: ModelId, max_len: usize) -> CountTable {
    match model {
        ModelId::Plain | ModelId::Cata => dp_two_layer(model, max_len),
        ModelId::CataRtl => dp_rtl(max_len),
        ModelId::AirPockets => dp_air(max_len),
    }
}

fn dp_two_layer(model: ModelId, max_len: usize) -> CountTable {
    let with_catastrophes = model == ModelId::Cata;
    let width = max_len + 1;
    let mut table = CountTable::zeroed(model, max_len);
    let mut f = vec![BigInt::zero(); width];
    let mut g = vec![BigInt::zero(); width];
    f[0] = BigInt::one();
    table.set(0, Layer::F, 0, BigInt::one());

    for n in 1..=max_len {
        // Reverse-running suffix sums over the previous row.
        let sf = suffix_sums(&f);
        let sg = suffix_sums(&g);
        let mut nf = vec![BigInt::zero(); width];
        let mut ng = vec![BigInt::zero(); width];

        nf[0] = at(&f, 1).clone();
        if with_catastrophes {
            nf[0] += &sf[2.min(width)];
        }
        for i in 1..width {
            nf[i] = &g[i - 1] + at(&f, i + 1);
        }
        ng[0] = f[0].clone() + at(&g, 1);
        if with_catastrophes {
            ng[0] += &sg[2.min(width)];
        }
        for i in 1..width {
            ng[i] = &f[i] + at(&g, i + 1);
        }

        for i in 0..width {
            table.set(n, Layer::F, i, nf[i].clone());
            table.set(n, Layer::G, i, ng[i].clone());
        }
        f = nf;
        g = ng;
    }
    table
}

fn dp_rtl(max_len: usize) -> CountTable {
    let work = 2 * max_len + 1;
    let mut table = CountTable::zeroed(ModelId::CataRtl, max_len);
    let mut a = vec![BigInt::zero(); work + 1];
    let mut b = vec![BigInt::zero(); work + 1];
    a[0] = BigInt::one();
    table.set(0, Layer::A, 0, BigInt::one());

    for n in 1..=max_len {
        let mut na = vec![BigInt::zero(); work + 1];
        let mut nb = vec![BigInt::zero(); work + 1];

        na[0] = b[0].clone();
        if work >= 1 {
            na[1] = &b[1] + &a[0];
        }
        for i in 2..=work {
            na[i] = &b[i] + &a[i - 1] + &a[0];
        }
        nb[0] = a[1].clone();
        if work >= 1 {
            nb[1] = &b[0] + at(&a, 2);
        }
        for i in 2..=work {
            nb[i] = at(&a, i + 1) + &b[i - 1] + &b[0];
        }

        for i in 0..=max_len {
            table.set(n, Layer::A, i, na[i].clone());
            table.set(n, Layer::B, i, nb[i].clone());
        }
        a = na;
        b = nb;
    }
    table
}

fn dp_air(max_len: usize) -> CountTable {
    let width = max_len + 1;
    let mut table = CountTable::zeroed(ModelId::AirPockets, max_len);
    // Row 0: the empty word sits at A_0, and B_0 sees it through the epsilon
    // edge; layers C and D are empty.
    let mut a = vec![BigInt::zero(); width];
    let mut b = vec![BigInt::zero(); width];
    let mut c = vec![BigInt::zero(); width];
    let mut d = vec![BigInt::zero(); width];
    a[0] = BigInt::one();
    b[0] = BigInt::one();
    table.set(0, Layer::A, 0, BigInt::one());
    table.set(0, Layer::B, 0, BigInt::one());

    for n in 1..=max_len {
        let sa = suffix_sums(&a);
        let sc = suffix_sums(&c);
        let mut na = vec![BigInt::zero(); width];
        let mut nb = vec![BigInt::zero(); width];
        let mut nc = vec![BigInt::zero(); width];
        let mut nd = vec![BigInt::zero(); width];

        for i in 1..width {
            na[i] = d[i - 1].clone();
        }
        // b and d include the same-length epsilon contribution from a and c.
        for i in 0..width {
            nb[i] = &na[i] + &sa[i + 1];
        }
        for i in 0..width {
            nc[i] = b[i].clone();
        }
        for i in 0..width {
            nd[i] = &nc[i] + &sc[i + 1];
        }

        for i in 0..width {
            table.set(n, Layer::A, i, na[i].clone());
            table.set(n, Layer::B, i, nb[i].clone());
            table.set(n, Layer::C, i, nc[i].clone());
            table.set(n, Layer::D, i, nd[i].clone());
        }
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
    table
}

/// `out[i] = sum of row[i..]`, with `out[len] = 0` (and one extra slot so
/// `out[len + 1]` style lookups are unnecessary).
fn suffix_sums(row: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); row.len() + 1];
    for i in (0..row.len()).rev() {
        out[i] = &out[i + 1] + &row[i];
    }
    out
}

fn at(row: &[BigInt], i: usize) -> &BigInt {
    static ZERO: std::sync::OnceLock<BigInt> = std::sync::OnceLock::new();
    row.get(i).unwrap_or_else(|| ZERO.get_or_init(BigInt::zero))
}

/// The coefficient series of one state, straight from [`dp_counts`].
pub fn dp_series(model: ModelId, layer: Layer, level: usize, n: usize) -> TruncatedSeries {
    dp_counts(model, n).series(layer, level)
}

/// Total number of open paths (arbitrary endpoint) by length, i.e. the sum of
/// the state series over all layers and levels. Only the catastrophe model
/// supports this: the right-to-left model has infinitely many open paths of
/// every positive length (climbs reach arbitrarily high in one step), and the
/// total is not a meaningful quantity for the other models here.
pub fn open_total(model: ModelId, n: usize) -> Result<TruncatedSeries, DpError> {
    match model {
        ModelId::Cata => {}
        ModelId::CataRtl => return Err(DpError::OpenTotalDiverges),
        other => return Err(DpError::OpenTotalUnsupported { model: other }),
    }
    let table = dp_counts(model, n);
    let coeffs = (0..=n)
        .map(|len| {
            let mut acc = BigInt::zero();
            for &layer in model.layers() {
                for level in 0..=n {
                    acc += table.count(len, layer, level);
                }
            }
            BigRational::from_integer(acc)
        })
        .collect();
    Ok(TruncatedSeries::from_coeffs(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn series_prefix(t: &CountTable, layer: Layer, level: usize, upto: usize) -> Vec<BigInt> {
        (0..=upto).map(|n| t.count(n, layer, level).clone()).collect()
    }

    #[test]
    fn cata_f0_and_g0_match_the_displayed_expansions() {
        let t = dp_counts(ModelId::Cata, 17);
        assert_eq!(
            series_prefix(&t, Layer::F, 0, 17),
            ints(&[1, 0, 0, 1, 0, 1, 3, 1, 7, 13, 11, 43, 70, 89, 264, 424, 650, 1657])
        );
        assert_eq!(
            series_prefix(&t, Layer::G, 0, 17),
            ints(&[0, 1, 0, 0, 2, 0, 2, 7, 2, 15, 32, 23, 96, 174, 192, 604, 1048, 1434])
        );
    }

    #[test]
    fn every_model_starts_with_a_single_empty_word() {
        for model in ModelId::ALL {
            let t = dp_counts(model, 3);
            let start = model.start();
            assert_eq!(t.count(0, start.layer, 0), &BigInt::one(), "{model}");
        }
    }

    #[test]
    fn air_a0_series_is_constant_one() {
        let t = dp_counts(ModelId::AirPockets, 10);
        assert_eq!(t.count(0, Layer::A, 0), &BigInt::one());
        for n in 1..=10 {
            assert_eq!(t.count(n, Layer::A, 0), &BigInt::zero(), "n = {n}");
        }
    }

    #[test]
    fn rtl_b0_equals_z_times_a1_and_a0_is_one_plus_z_b0() {
        let t = dp_counts(ModelId::CataRtl, 14);
        for n in 1..=14 {
            assert_eq!(
                t.count(n, Layer::B, 0),
                t.count(n - 1, Layer::A, 1),
                "b0 = z a1 at n = {n}"
            );
        }
        for n in 1..=14 {
            assert_eq!(
                t.count(n, Layer::A, 0),
                t.count(n - 1, Layer::B, 0),
                "a0 = 1 + z b0 at n = {n}"
            );
        }
    }

    #[test]
    fn air_c_is_z_times_b() {
        let t = dp_counts(ModelId::AirPockets, 12);
        for n in 1..=12 {
            for level in 0..=11 {
                assert_eq!(
                    t.count(n, Layer::C, level),
                    t.count(n - 1, Layer::B, level),
                    "c = z b at n = {n}, level {level}"
                );
            }
        }
    }

    #[test]
    fn open_total_matches_displayed_expansion() {
        let s = open_total(ModelId::Cata, 11).unwrap();
        let expect = TruncatedSeries::from_ints(&[1, 1, 1, 2, 3, 5, 10, 16, 30, 58, 98, 189]);
        assert_eq!(s, expect);
    }

    #[test]
    fn open_total_rejections() {
        assert_eq!(
            open_total(ModelId::CataRtl, 5),
            Err(DpError::OpenTotalDiverges)
        );
        assert_eq!(
            open_total(ModelId::Plain, 5),
            Err(DpError::OpenTotalUnsupported {
                model: ModelId::Plain
            })
        );
    }

    #[test]
    fn dp_agrees_with_brute_force_spot_check() {
        for model in ModelId::ALL {
            let dp = dp_counts(model, 8);
            let bf = crate::models::brute_force_counts(model, 8);
            assert_eq!(dp.first_difference(&bf), None, "{model}");
        }
    }
}
