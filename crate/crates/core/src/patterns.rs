//! Residue words W_p and the pattern counts n_p(S).
//!
//! Two independent routes compute n_p(S): a direct scan of W_p
//! ([`count_pattern`]) and the expansion into complete character sums
//! [`char_sum`] ([`count_pattern_charsum`]). The chain of quadrics
//! x_{j+1}² − x_j² = 1 gives a third route for the all-X word.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::FieldContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    /// quadratic residue
    X,
    /// non-residue
    Y,
}

impl Letter {
    #[inline]
    pub fn sign(self) -> i64 {
        match self {
            Letter::X => 1,
            Letter::Y => -1,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::X => 'X',
            Letter::Y => 'Y',
        }
    }
}

/// A nonempty word over {X, Y}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternWord(Vec<Letter>);

impl PatternWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyPattern);
        }
        Ok(PatternWord(letters))
    }

    pub fn repeat(letter: Letter, len: usize) -> Result<Self> {
        Self::new(vec![letter; len])
    }

    /// All 2^ℓ words of length ℓ, in lexicographic order with X < Y.
    pub fn all_of_length(len: usize) -> Vec<PatternWord> {
        assert!((1..=20).contains(&len), "pattern length {len} out of range");
        (0u32..1 << len)
            .map(|mask| {
                PatternWord(
                    (0..len)
                        .map(|j| {
                            if mask >> (len - 1 - j) & 1 == 0 {
                                Letter::X
                            } else {
                                Letter::Y
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }
}

impl FromStr for PatternWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                _ => Err(Error::InvalidPattern(c)),
            })
            .collect::<Result<Vec<_>>>()?;
        PatternWord::new(letters)
    }
}

impl fmt::Display for PatternWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.as_char()))
    }
}

impl Serialize for PatternWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Offsets 0 ≤ i_1 < … < i_r naming the polynomial f_I(a) = Π (a + i_j).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSet(Vec<u64>);

impl IndexSet {
    pub fn new(offsets: Vec<u64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidIndexSet("empty".into()));
        }
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndexSet(format!(
                "{offsets:?} is not strictly increasing"
            )));
        }
        Ok(IndexSet(offsets))
    }

    /// The subset of 0..len selected by the set bits of `mask` (bit j ↦ offset j).
    pub fn from_mask(mask: u32, len: usize) -> Result<Self> {
        Self::new((0..len as u64).filter(|&j| mask >> j & 1 == 1).collect())
    }

    pub fn offsets(&self) -> &[u64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

/// W_p: letter i (1-based) is X iff i is a nonzero square mod p.
pub fn residue_word(ctx: &FieldContext) -> PatternWord {
    PatternWord(
        ctx.chi_table()[1..]
            .iter()
            .map(|&c| if c == 1 { Letter::X } else { Letter::Y })
            .collect(),
    )
}

fn check_fits(ctx: &FieldContext, len: usize) -> Result<()> {
    if len as u64 > ctx.p() - 1 {
        return Err(Error::PatternTooLong { len, p: ctx.p() });
    }
    Ok(())
}

/// n_p(S) by scanning every length-ℓ window of W_p.
pub fn count_pattern(ctx: &FieldContext, pattern: &PatternWord) -> Result<u64> {
    check_fits(ctx, pattern.len())?;
    let word = residue_word(ctx);
    Ok(word
        .letters()
        .windows(pattern.len())
        .filter(|w| *w == pattern.letters())
        .count() as u64)
}

/// J(k) as the complete sum of χ(a(a+1)(a+2)) over 𝔽_p.
pub fn jacobsthal(ctx: &FieldContext) -> Result<i64> {
    ctx.require_one_mod_four()?;
    let p = ctx.p();
    Ok((0..p)
        .map(|a| {
            let f = a * ((a + 1) % p) % p * ((a + 2) % p) % p;
            ctx.chi(f) as i64
        })
        .sum())
}

/// Σ_{a ∈ 𝔽_p} χ(f_I(a)).
pub fn char_sum(ctx: &FieldContext, index: &IndexSet) -> i64 {
    let p = ctx.p();
    let shifts: Vec<u64> = index.offsets().iter().map(|&i| i % p).collect();
    (0..p)
        .map(|a| {
            let f = shifts.iter().fold(1u64, |acc, &i| acc * ((a + i) % p) % p);
            ctx.chi(f) as i64
        })
        .sum()
}

/// n_p(S) from the character-sum expansion.
///
/// Over all a ∈ 𝔽_p, Π_j (1 + ε_j χ(a + j)) is 2^ℓ on a matching window and 0 on
/// any other zero-free window. Expanding the product gives p plus
/// Σ_{I≠∅} ε_I Σ_a χ(f_I(a)). The ℓ windows starting in Z = {0, −1, …, −(ℓ−1)}
/// contain the letter at 0 and are subtracted exactly.
pub fn count_pattern_charsum(ctx: &FieldContext, pattern: &PatternWord) -> Result<u64> {
    let len = pattern.len();
    check_fits(ctx, len)?;
    let p = ctx.p();
    let signs: Vec<i64> = pattern.letters().iter().map(|l| l.sign()).collect();

    let mut full = p as i64;
    for mask in 1u32..1 << len {
        let index = IndexSet::from_mask(mask, len)?;
        let eps: i64 = index.offsets().iter().map(|&j| signs[j as usize]).product();
        full += eps * char_sum(ctx, &index);
    }

    let window_weight = |a: u64| -> i64 {
        signs
            .iter()
            .enumerate()
            .map(|(j, &e)| 1 + e * ctx.chi((a + j as u64) % p) as i64)
            .product()
    };
    let boundary: i64 = (0..len as u64).map(|j| window_weight((p - j) % p)).sum();

    let scaled = full - boundary;
    let denom = 1i64 << len;
    assert!(
        scaled >= 0 && scaled % denom == 0,
        "character-sum expansion not divisible by 2^{len} at p = {p}"
    );
    Ok((scaled / denom) as u64)
}

/// Genus of the chain-of-quadrics curve for words of length ℓ ≥ 2.
pub fn pattern_curve_genus(ell: u32) -> i64 {
    assert!(ell >= 2, "genus formula needs ell >= 2");
    (1i64 << (ell - 2)) * (ell as i64 - 3) + 1
}

/// #C°(𝔽_p): points of x_{j+1}² − x_j² = 1 (j < ℓ) with every coordinate nonzero.
pub fn pattern_curve_count(ctx: &FieldContext, ell: usize) -> Result<u64> {
    if ell < 2 {
        return Err(Error::InvalidIndexSet(format!("ell = {ell} < 2")));
    }
    check_fits(ctx, ell)?;
    let p = ctx.p();
    let sq = ctx.squares();
    let mut total = 0u64;
    for x1 in 1..p {
        let mut branches = 1u64;
        let mut t = sq[x1 as usize] as u64;
        for _ in 1..ell {
            t = (t + 1) % p;
            // x_{j+1} must be nonzero, so t = 0 contributes nothing
            if t == 0 {
                branches = 0;
                break;
            }
            branches *= ctx.sqrt_count_reduced(t) as u64;
            if branches == 0 {
                break;
            }
        }
        total += branches;
    }
    Ok(total)
}

/// n_p(S) − (p−1)/16 for a length-4 word, with its Weil-type bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeilDeviation {
    pub count: u64,
    /// 16·n_p(S) − (p − 1); the deviation is this over 16.
    pub sixteenths: i64,
    /// (11√p + 16)/16
    pub bound: f64,
}

impl WeilDeviation {
    pub fn deviation(&self) -> f64 {
        self.sixteenths as f64 / 16.0
    }

    /// |16n − (p−1)| ≤ 11√p + 16, decided in integers.
    pub fn within_bound(&self, p: u64) -> bool {
        let excess = self.sixteenths.unsigned_abs() as i128 - 16;
        excess <= 0 || excess * excess <= 121 * p as i128
    }
}

pub fn weil_deviation(ctx: &FieldContext, pattern: &PatternWord) -> Result<WeilDeviation> {
    if pattern.len() != 4 {
        return Err(Error::InvalidIndexSet(format!(
            "weil deviation needs a length-4 word, got {}",
            pattern.len()
        )));
    }
    let count = count_pattern(ctx, pattern)?;
    let p = ctx.p();
    Ok(WeilDeviation {
        count,
        sixteenths: 16 * count as i64 - (p as i64 - 1),
        bound: (11.0 * (p as f64).sqrt() + 16.0) / 16.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::{build_context, primes_in};

    fn ctx(p: u64) -> FieldContext {
        build_context(p).unwrap()
    }

    fn w(s: &str) -> PatternWord {
        s.parse().unwrap()
    }

    // independent scan: letters from Euler's criterion, positions compared directly
    fn oracle_count(p: u64, pattern: &str) -> u64 {
        let is_res = |i: u64| (1..p).any(|y| y * y % p == i);
        let pat: Vec<bool> = pattern.chars().map(|c| c == 'X').collect();
        let l = pat.len() as u64;
        (1..=p - l)
            .filter(|&a| (0..l).all(|j| is_res(a + j) == pat[j as usize]))
            .count() as u64
    }

    #[test]
    fn word_examples() {
        assert_eq!(residue_word(&ctx(17)).to_string(), "XXYXYYYXXYYYXYXX");
        assert_eq!(residue_word(&ctx(5)).to_string(), "XYYX");
        assert_eq!(residue_word(&ctx(13)).to_string(), "XYXXYYYYXXYX");
        for p in primes_in(3, 300, None) {
            let wp = residue_word(&ctx(p));
            assert_eq!(wp.len() as u64, p - 1);
            assert_eq!(wp.count(Letter::X), wp.count(Letter::Y));
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(w("xYx"), w("XYX"));
        assert_eq!("XZ".parse::<PatternWord>().unwrap_err(), Error::InvalidPattern('Z'));
        assert_eq!("".parse::<PatternWord>().unwrap_err(), Error::EmptyPattern);
        assert_eq!(
            PatternWord::all_of_length(2)
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>(),
            ["XX", "XY", "YX", "YY"]
        );
    }

    #[test]
    fn count_examples() {
        let c = ctx(17);
        assert_eq!(count_pattern(&c, &w("XXX")).unwrap(), 0);
        for s in PatternWord::all_of_length(3) {
            let expected = if s == w("XXX") { 0 } else { 2 };
            assert_eq!(count_pattern(&c, &s).unwrap(), expected, "{s}");
        }
        for p in primes_in(3, 200, None) {
            let c = ctx(p);
            assert_eq!(count_pattern(&c, &w("X")).unwrap(), (p - 1) / 2);
            assert_eq!(count_pattern(&c, &w("Y")).unwrap(), (p - 1) / 2);
        }
        assert_eq!(
            count_pattern(&ctx(5), &w("XYYXX")).unwrap_err(),
            Error::PatternTooLong { len: 5, p: 5 }
        );
        assert_eq!(count_pattern(&ctx(5), &w("XYYX")).unwrap(), 1);
    }

    #[test]
    fn count_matches_oracle() {
        for p in [3, 5, 7, 11, 13, 17, 29, 31, 101] {
            for len in 1..=4.min(p as usize - 1) {
                for s in PatternWord::all_of_length(len) {
                    assert_eq!(
                        count_pattern(&ctx(p), &s).unwrap(),
                        oracle_count(p, &s.to_string()),
                        "p={p} S={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn jacobsthal_examples() {
        assert_eq!(jacobsthal(&ctx(5)).unwrap(), 2);
        assert_eq!(jacobsthal(&ctx(13)).unwrap(), -6);
        assert_eq!(jacobsthal(&ctx(17)).unwrap().abs(), 2);
        assert_eq!(jacobsthal(&ctx(7)).unwrap_err(), Error::WrongResidueClass { p: 7 });
    }

    #[test]
    fn jacobsthal_matches_truncated_range() {
        for p in primes_in(5, 2000, Some((1, 4))) {
            let c = ctx(p);
            let truncated: i64 = (1..=p - 3)
                .map(|i| c.legendre((i * (i + 1) * (i + 2)) as i64) as i64)
                .sum();
            assert_eq!(jacobsthal(&c).unwrap(), truncated, "p={p}");
        }
    }

    #[test]
    fn jacobsthal_arithmetic_properties() {
        for p in primes_in(5, 10_000, Some((1, 4))) {
            let j = jacobsthal(&ctx(p)).unwrap();
            assert_eq!(j % 2, 0, "p={p}");
            assert_eq!((j * j - 4) % 32, 0, "p={p}");
            let rest = p as i64 - j * j / 4;
            let b = (rest as u64).isqrt() as i64;
            assert_eq!(b * b, rest, "J²/4 not a summand of p = {p}");
        }
    }

    #[test]
    fn char_sum_examples() {
        for p in primes_in(3, 300, None) {
            let c = ctx(p);
            assert_eq!(char_sum(&c, &IndexSet::new(vec![0]).unwrap()), 0);
            assert_eq!(char_sum(&c, &IndexSet::new(vec![0, 1]).unwrap()), -1);
        }
        let c13 = ctx(13);
        assert_eq!(char_sum(&c13, &IndexSet::new(vec![0, 1, 2]).unwrap()), -6);
        assert!(IndexSet::new(vec![1, 1]).is_err());
        assert!(IndexSet::new(vec![]).is_err());
    }

    #[test]
    fn charsum_route_examples() {
        assert_eq!(count_pattern_charsum(&ctx(17), &w("XXX")).unwrap(), 0);
        assert_eq!(count_pattern_charsum(&ctx(13), &w("XX")).unwrap(), 2);
        assert_eq!(count_pattern_charsum(&ctx(5), &w("Y")).unwrap(), 2);
        assert!(count_pattern_charsum(&ctx(3), &w("XXX")).is_err());
    }

    #[test]
    fn charsum_route_agrees_with_scan() {
        for p in primes_in(3, 400, None) {
            let c = ctx(p);
            for len in 1..=5.min(p as usize - 1) {
                for s in PatternWord::all_of_length(len) {
                    assert_eq!(
                        count_pattern_charsum(&c, &s).unwrap(),
                        count_pattern(&c, &s).unwrap(),
                        "p={p} S={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn window_census_sums_to_p_minus_len() {
        for p in primes_in(7, 1000, None) {
            let c = ctx(p);
            for len in 1..=5 {
                let total: u64 = PatternWord::all_of_length(len)
                    .iter()
                    .map(|s| count_pattern(&c, s).unwrap())
                    .sum();
                assert_eq!(total, p - len as u64);
            }
        }
    }

    #[test]
    fn genus_examples() {
        assert_eq!(pattern_curve_genus(2), 0);
        assert_eq!(pattern_curve_genus(3), 1);
        assert_eq!(pattern_curve_genus(4), 5);
        assert_eq!(pattern_curve_genus(5), 17);
    }

    #[test]
    fn curve_count_examples() {
        assert_eq!(pattern_curve_count(&ctx(17), 3).unwrap(), 0);
        assert_eq!(pattern_curve_count(&ctx(17), 2).unwrap(), 12);
        assert_eq!(pattern_curve_count(&ctx(13), 2).unwrap(), 8);
    }

    #[test]
    fn curve_count_matches_pattern_count() {
        for p in primes_in(5, 1000, None) {
            let c = ctx(p);
            for ell in 2..=4usize {
                let n = count_pattern(&c, &PatternWord::repeat(Letter::X, ell).unwrap()).unwrap();
                assert_eq!(
                    pattern_curve_count(&c, ell).unwrap(),
                    (1u64 << ell) * n,
                    "p={p} l={ell}"
                );
            }
        }
    }

    #[test]
    fn curve_count_matches_coordinate_enumeration() {
        // all (x1, x2, x3) with nonzero entries on both quadrics
        for p in [5u64, 7, 11, 13, 17, 19] {
            let mut n = 0;
            for x1 in 1..p {
                for x2 in 1..p {
                    for x3 in 1..p {
                        if (x2 * x2 + p * p - x1 * x1) % p == 1 && (x3 * x3 + p * p - x2 * x2) % p == 1 {
                            n += 1;
                        }
                    }
                }
            }
            assert_eq!(pattern_curve_count(&ctx(p), 3).unwrap(), n, "p={p}");
        }
    }

    #[test]
    fn weil_examples() {
        let d = weil_deviation(&ctx(17), &w("XXXX")).unwrap();
        assert_eq!(d.count, 0);
        assert_eq!(d.sixteenths, -16);
        assert_eq!(d.deviation(), -1.0);
        assert!((d.bound - 3.8340).abs() < 1e-3);
        assert!(d.within_bound(17));
        let e = weil_deviation(&ctx(17), &w("XYXY")).unwrap();
        assert!(e.deviation().abs() <= e.bound);
        for p in [17u64, 101, 997] {
            let c = ctx(p);
            let total: u64 = PatternWord::all_of_length(4)
                .iter()
                .map(|s| weil_deviation(&c, s).unwrap().count)
                .sum();
            assert_eq!(total, p - 4);
        }
        assert!(weil_deviation(&ctx(17), &w("XXX")).is_err());
    }

    #[test]
    fn weil_integer_test_matches_float() {
        for p in primes_in(5, 3000, None) {
            let c = ctx(p);
            for s in PatternWord::all_of_length(4) {
                let d = weil_deviation(&c, &s).unwrap();
                let float = d.deviation().abs() <= d.bound + 1e-12;
                assert_eq!(d.within_bound(p), float, "p={p} S={s}");
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn word_text_round_trips(bits in proptest::collection::vec(proptest::bool::ANY, 1..40)) {
            let letters: Vec<Letter> = bits.iter().map(|&b| if b { Letter::X } else { Letter::Y }).collect();
            let w = PatternWord::new(letters).unwrap();
            let back: PatternWord = w.to_string().to_lowercase().parse().unwrap();
            proptest::prop_assert_eq!(back, w);
        }

        #[test]
        fn charsum_expansion_matches_scan(idx in 0usize..300, bits in proptest::collection::vec(proptest::bool::ANY, 1..7)) {
            let primes = primes_in(17, 3000, None);
            let c = ctx(primes[idx % primes.len()]);
            let letters: Vec<Letter> = bits.iter().map(|&b| if b { Letter::X } else { Letter::Y }).collect();
            let w = PatternWord::new(letters).unwrap();
            proptest::prop_assert_eq!(count_pattern_charsum(&c, &w).unwrap(), count_pattern(&c, &w).unwrap());
        }
    }
}
