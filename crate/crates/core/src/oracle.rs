//! Brute-force recomputations that avoid the character table.
//!
//! Square-root counts come from enumerating z ↦ z², and Legendre symbols from
//! Euler's criterion, so these paths share no arithmetic shortcuts with the
//! fast kernels.

use crate::modarith::FieldContext;

/// `roots[v]` = #{z ∈ 𝔽_p : z² = v}, by enumeration.
pub fn root_counts(p: u64) -> Vec<u32> {
    let mut roots = vec![0u32; p as usize];
    for z in 0..p {
        roots[(z * z % p) as usize] += 1;
    }
    roots
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Legendre symbol by Euler's criterion.
pub fn euler_chi(a: u64, p: u64) -> i64 {
    match pow_mod(a, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Σ_{a ∈ 𝔽_p} χ(a(a+1)(a+2)) with χ from Euler's criterion.
pub fn jacobsthal(ctx: &FieldContext) -> i64 {
    let p = ctx.p();
    (0..p)
        .map(|a| euler_chi(a * ((a + 1) % p) % p * ((a + 2) % p) % p, p))
        .sum()
}

/// #{(x, y) : y² = x³ − x}.
pub fn count_np(ctx: &FieldContext) -> u64 {
    let p = ctx.p();
    let roots = root_counts(p);
    (0..p)
        .map(|x| roots[((x * x % p * x + p - x) % p) as usize] as u64)
        .sum()
}

/// #{(x, y, z) : z² = (x²y² + 1)(x² + y²)}.
pub fn count_mp(ctx: &FieldContext) -> u64 {
    let p = ctx.p();
    let roots = root_counts(p);
    let mut n = 0u64;
    for x in 0..p {
        for y in 0..p {
            let x2 = x * x % p;
            let y2 = y * y % p;
            let f = (x2 * y2 % p + 1) % p * ((x2 + y2) % p) % p;
            n += roots[f as usize] as u64;
        }
    }
    n
}

/// #S with y₁₂, y₂₃ enumerated and y₃₄, y₁₃, y₂₄ resolved by root counts.
pub fn count_s(ctx: &FieldContext) -> u64 {
    let p = ctx.p();
    let roots = root_counts(p);
    let mut n = 0u64;
    for y12 in 0..p {
        for y23 in 0..p {
            let s12 = y12 * y12 % p;
            let s23 = y23 * y23 % p;
            let s34 = (2 * p + 1 - s12 - s23) % p;
            let k34 = roots[s34 as usize] as u64;
            if k34 == 0 {
                continue;
            }
            n += k34 * roots[((s12 + s23) % p) as usize] as u64 * roots[((s23 + s34) % p) as usize] as u64;
        }
    }
    n
}

/// #{(t, x₁, y₁) : y₁² = (t²x₁⁴ + 1)(t² + 1)}.
pub fn count_xprime(ctx: &FieldContext) -> u64 {
    let p = ctx.p();
    let roots = root_counts(p);
    let mut n = 0u64;
    for t in 0..p {
        let t2 = t * t % p;
        for x in 0..p {
            let x2 = x * x % p;
            let f = (t2 * (x2 * x2 % p) % p + 1) % p * ((t2 + 1) % p) % p;
            n += roots[f as usize] as u64;
        }
    }
    n
}

/// Pairs (x, y) with x² + y² = 1 − x²y², by direct enumeration.
pub fn edwards_affine(ctx: &FieldContext) -> u64 {
    let p = ctx.p();
    let mut n = 0u64;
    for x in 0..p {
        let x2 = x * x % p;
        for y in 0..p {
            let y2 = y * y % p;
            if (x2 + y2 + x2 * y2 % p) % p == 1 % p {
                n += 1;
            }
        }
    }
    n
}
