//! Prime-field arithmetic shared by every counting kernel.
//!
//! A [`FieldContext`] owns the quadratic-character table of 𝔽_p together with
//! the table of squares, so point-counting loops cost one lookup per term.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest prime for which a context (two O(p) tables) is built.
pub const MAX_TABLE_PRIME: u64 = 1 << 28;

/// Congruence restriction applied when enumerating primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidueFilter {
    #[default]
    None,
    #[serde(rename = "1mod4")]
    OneMod4,
    #[serde(rename = "3mod4")]
    ThreeMod4,
}

impl ResidueFilter {
    pub fn as_pair(self) -> Option<(u64, u64)> {
        match self {
            ResidueFilter::None => None,
            ResidueFilter::OneMod4 => Some((1, 4)),
            ResidueFilter::ThreeMod4 => Some((3, 4)),
        }
    }

    pub fn admits(self, p: u64) -> bool {
        self.as_pair().is_none_or(|(r, m)| p % m == r % m)
    }

    pub fn name(self) -> &'static str {
        match self {
            ResidueFilter::None => "none",
            ResidueFilter::OneMod4 => "1mod4",
            ResidueFilter::ThreeMod4 => "3mod4",
        }
    }
}

impl std::str::FromStr for ResidueFilter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "all" => Ok(ResidueFilter::None),
            "1mod4" => Ok(ResidueFilter::OneMod4),
            "3mod4" => Ok(ResidueFilter::ThreeMod4),
            other => Err(format!("unknown filter {other:?} (expected 1mod4, 3mod4 or none)")),
        }
    }
}

/// An odd prime p with its quadratic character tabulated.
#[derive(Debug, Clone)]
pub struct FieldContext {
    p: u64,
    k: Option<u64>,
    delta: u64,
    chi: Vec<i8>,
    squares: Vec<u32>,
}

impl FieldContext {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if p > MAX_TABLE_PRIME {
            return Err(Error::FieldTooLarge(p));
        }
        let n = p as usize;
        let mut chi = vec![-1i8; n];
        let mut squares = vec![0u32; n];
        chi[0] = 0;
        for (x, slot) in squares.iter_mut().enumerate().skip(1) {
            let sq = ((x as u64 * x as u64) % p) as usize;
            *slot = sq as u32;
            chi[sq] = 1;
        }
        let delta = (1..p)
            .find(|&a| chi[a as usize] == -1)
            .expect("every odd prime has a non-residue");
        let k = (p % 4 == 1).then_some((p - 1) / 4);
        Ok(FieldContext {
            p,
            k,
            delta,
            chi,
            squares,
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// `k` with p = 4k + 1, absent for p ≡ 3 mod 4.
    #[inline]
    pub fn k(&self) -> Option<u64> {
        self.k
    }

    /// The smallest quadratic non-residue.
    #[inline]
    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn is_one_mod_four(&self) -> bool {
        self.k.is_some()
    }

    pub fn require_one_mod_four(&self) -> Result<u64> {
        self.k.ok_or(Error::WrongResidueClass { p: self.p })
    }

    pub fn chi_table(&self) -> &[i8] {
        &self.chi
    }

    /// x² mod p, indexed by x in 0..p.
    pub fn squares(&self) -> &[u32] {
        &self.squares
    }

    /// Character of an already reduced residue.
    #[inline]
    pub fn chi(&self, r: u64) -> i8 {
        self.chi[r as usize]
    }

    #[inline]
    pub fn reduce(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    /// The Legendre symbol (a / p).
    #[inline]
    pub fn legendre(&self, a: i64) -> i8 {
        self.chi[self.reduce(a) as usize]
    }

    /// Number of y in 𝔽_p with y² = t.
    #[inline]
    pub fn sqrt_count(&self, t: i64) -> u32 {
        self.sqrt_count_reduced(self.reduce(t))
    }

    #[inline]
    pub fn sqrt_count_reduced(&self, r: u64) -> u32 {
        (1 + self.chi[r as usize] as i32) as u32
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod(base % self.p, exp, self.p)
    }

    /// Inverse of a nonzero residue.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow(a, self.p - 2)
    }

    /// A square root of −1, present iff p ≡ 1 mod 4.
    pub fn sqrt_minus_one(&self) -> Option<u64> {
        self.k.map(|_| self.pow(self.delta, (self.p - 1) / 4))
    }

    /// Every x with x² = r, ascending.
    pub fn square_roots(&self, r: u64) -> Vec<u64> {
        if r == 0 {
            return vec![0];
        }
        if self.chi(r) != 1 {
            return Vec::new();
        }
        let root = tonelli_shanks(r, self.p, self.delta);
        let mut roots = vec![root, self.p - root];
        roots.sort_unstable();
        roots
    }
}

/// Convenience constructor matching the free-function style of the other modules.
pub fn build_context(p: u64) -> Result<FieldContext> {
    FieldContext::new(p)
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut b = base as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

fn tonelli_shanks(n: u64, p: u64, non_residue: u64) -> u64 {
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut m = s;
    let mut c = pow_mod(non_residue, q, p);
    let mut t = pow_mod(n, q, p);
    let mut r = pow_mod(n, q.div_ceil(2), p);
    let mulp = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulp(tt, tt);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = mulp(b, b);
        }
        m = i;
        c = mulp(b, b);
        t = mulp(t, c);
        r = mulp(r, b);
    }
    r
}

/// Deterministic Miller–Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes in `[lo, hi]`, ascending, optionally restricted to p ≡ r mod m.
pub fn primes_in(lo: u64, hi: u64, residue_filter: Option<(u64, u64)>) -> Vec<u64> {
    if hi < lo || hi < 2 {
        return Vec::new();
    }
    let lo = lo.max(2);
    let keep = |p: u64| residue_filter.is_none_or(|(r, m)| p % m == r % m);

    // segmented sieve over [lo, hi]
    let root = hi.isqrt();
    let mut base = vec![true; root as usize + 1];
    let mut small = Vec::new();
    for i in 2..=root as usize {
        if base[i] {
            small.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                base[j] = false;
                j += i;
            }
        }
    }
    let width = (hi - lo + 1) as usize;
    let mut mark = vec![true; width];
    for &q in &small {
        let start = (q * q).max(lo.div_ceil(q) * q);
        let mut j = start;
        while j <= hi {
            mark[(j - lo) as usize] = false;
            j += q;
        }
    }
    mark.iter()
        .enumerate()
        .filter(|&(_, &is_p)| is_p)
        .map(|(i, _)| lo + i as u64)
        .filter(|&p| keep(p))
        .collect()
}

/// a + bi in ℤ[i].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GaussianInteger {
    pub a: i64,
    pub b: i64,
}

impl GaussianInteger {
    pub fn new(a: i64, b: i64) -> Self {
        GaussianInteger { a, b }
    }

    pub fn norm(self) -> i64 {
        self.a * self.a + self.b * self.b
    }

    /// Whether (a − 1) + bi is divisible by 2 + 2i.
    ///
    /// (x + yi)/(2 + 2i) = ((x + y) + (y − x)i)/4, so divisibility is the pair
    /// of integer congruences x + y ≡ 0 and y − x ≡ 0 mod 4.
    pub fn is_gauss_primary(self) -> bool {
        let x = self.a - 1;
        let y = self.b;
        (x + y).rem_euclid(4) == 0 && (y - x).rem_euclid(4) == 0
    }

    /// The eight associates and conjugates ±a±bi, ±b±ai.
    pub fn variants(self) -> [GaussianInteger; 8] {
        let GaussianInteger { a, b } = self;
        [(a, b), (a, -b), (-a, b), (-a, -b), (b, a), (b, -a), (-b, a), (-b, -a)].map(|(a, b)| GaussianInteger { a, b })
    }
}

/// The two normalized prime divisors of p = a² + b² in ℤ[i].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CmDecomposition {
    /// a − 1 + bi divisible by 2 + 2i; b reported nonnegative.
    pub gauss: GaussianInteger,
    /// a ≡ 1 mod 4; b reported nonnegative.
    pub jacobsthal: GaussianInteger,
}

/// Solve p = x² + y² by Cornacchia's algorithm (p ≡ 1 mod 4).
fn cornacchia(ctx: &FieldContext) -> (i64, i64) {
    let p = ctx.p();
    let mut r = ctx.sqrt_minus_one().expect("p ≡ 1 mod 4");
    if r > p / 2 {
        r = p - r;
    }
    let (mut a, mut b) = (p, r);
    while b * b > p {
        let t = a % b;
        a = b;
        b = t;
    }
    let x = b;
    let y = (p - x * x).isqrt();
    (x as i64, y as i64)
}

pub fn cm_decompose(ctx: &FieldContext) -> Result<CmDecomposition> {
    ctx.require_one_mod_four()?;
    let p = ctx.p() as i64;
    let (x, y) = cornacchia(ctx);
    assert_eq!(x * x + y * y, p, "Cornacchia failed for p = {p}");

    let base = if x % 2 != 0 {
        GaussianInteger::new(x, y)
    } else {
        GaussianInteger::new(y, x)
    };

    let passing: Vec<GaussianInteger> = base.variants().into_iter().filter(|g| g.is_gauss_primary()).collect();
    assert!(
        passing.len() == 2 && passing[0].a == passing[1].a,
        "2+2i normalization is not unique at p = {p}: {passing:?}"
    );
    let gauss = GaussianInteger::new(passing[0].a, passing[0].b.abs());

    let odd = base.a.abs();
    let a_j = if odd % 4 == 1 { odd } else { -odd };
    let jacobsthal = GaussianInteger::new(a_j, base.b.abs());

    Ok(CmDecomposition { gauss, jacobsthal })
}
