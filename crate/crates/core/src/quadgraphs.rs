//! Residue-difference graphs on quadruples and n_p(Γ) for the 11 graph classes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::FieldContext;
use crate::patterns::jacobsthal;

/// Isomorphism classes of simple graphs on four vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GraphClass {
    Empty,
    OneEdge,
    TwoDisjointEdges,
    PathP3,
    TrianglePlusVertex,
    PathP4,
    StarK13,
    CycleC4,
    Paw,
    Diamond,
    K4,
}

/// Vertex pairs in edge-bit order: bit e of an edge mask is the pair `EDGES[e]`.
pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl GraphClass {
    pub const ALL: [GraphClass; 11] = [
        GraphClass::Empty,
        GraphClass::OneEdge,
        GraphClass::TwoDisjointEdges,
        GraphClass::PathP3,
        GraphClass::TrianglePlusVertex,
        GraphClass::PathP4,
        GraphClass::StarK13,
        GraphClass::CycleC4,
        GraphClass::Paw,
        GraphClass::Diamond,
        GraphClass::K4,
    ];

    /// (edge count, ascending degree sequence).
    pub fn key(self) -> (u8, [u8; 4]) {
        match self {
            GraphClass::Empty => (0, [0, 0, 0, 0]),
            GraphClass::OneEdge => (1, [0, 0, 1, 1]),
            GraphClass::TwoDisjointEdges => (2, [1, 1, 1, 1]),
            GraphClass::PathP3 => (2, [0, 1, 1, 2]),
            GraphClass::TrianglePlusVertex => (3, [0, 2, 2, 2]),
            GraphClass::PathP4 => (3, [1, 1, 2, 2]),
            GraphClass::StarK13 => (3, [1, 1, 1, 3]),
            GraphClass::CycleC4 => (4, [2, 2, 2, 2]),
            GraphClass::Paw => (4, [1, 2, 2, 3]),
            GraphClass::Diamond => (5, [2, 2, 3, 3]),
            GraphClass::K4 => (6, [3, 3, 3, 3]),
        }
    }

    pub fn from_key(edges: u8, degrees: [u8; 4]) -> Option<GraphClass> {
        GraphClass::ALL.into_iter().find(|c| c.key() == (edges, degrees))
    }

    /// Classify the labeled graph whose edges are the set bits of `mask`.
    pub fn from_edge_mask(mask: u8) -> GraphClass {
        let mut degrees = [0u8; 4];
        for (e, &(i, j)) in EDGES.iter().enumerate() {
            if mask >> e & 1 == 1 {
                degrees[i] += 1;
                degrees[j] += 1;
            }
        }
        degrees.sort_unstable();
        GraphClass::from_key(mask.count_ones() as u8, degrees)
            .expect("degree sequences of 4-vertex graphs are exhausted by the 11 keys")
    }

    pub fn name(self) -> &'static str {
        match self {
            GraphClass::Empty => "Empty",
            GraphClass::OneEdge => "OneEdge",
            GraphClass::TwoDisjointEdges => "TwoDisjointEdges",
            GraphClass::PathP3 => "PathP3",
            GraphClass::TrianglePlusVertex => "TrianglePlusVertex",
            GraphClass::PathP4 => "PathP4",
            GraphClass::StarK13 => "StarK13",
            GraphClass::CycleC4 => "CycleC4",
            GraphClass::Paw => "Paw",
            GraphClass::Diamond => "Diamond",
            GraphClass::K4 => "K4",
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GraphClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownClass(s.to_string()))
    }
}

/// Four pairwise distinct residues mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadruple([u64; 4]);

impl Quadruple {
    pub fn new(ctx: &FieldContext, residues: [i64; 4]) -> Result<Self> {
        let r = residues.map(|a| ctx.reduce(a));
        for i in 0..4 {
            for j in i + 1..4 {
                if r[i] == r[j] {
                    return Err(Error::DuplicateResidues { p: ctx.p() });
                }
            }
        }
        Ok(Quadruple(r))
    }

    pub fn residues(&self) -> [u64; 4] {
        self.0
    }
}

fn edge_mask(ctx: &FieldContext, a: [u64; 4]) -> u8 {
    let p = ctx.p();
    EDGES.iter().enumerate().fold(0u8, |mask, (e, &(i, j))| {
        let diff = (a[i] + p - a[j]) % p;
        mask | ((ctx.chi(diff) == 1) as u8) << e
    })
}

pub fn classify_quadruple(ctx: &FieldContext, quad: &Quadruple) -> Result<GraphClass> {
    ctx.require_one_mod_four()?;
    Ok(GraphClass::from_edge_mask(edge_mask(ctx, quad.0)))
}

/// n_p(Γ) for all 11 classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphCensus(BTreeMap<GraphClass, u64>);

impl GraphCensus {
    pub fn get(&self, class: GraphClass) -> u64 {
        self.0.get(&class).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (GraphClass, u64)> + '_ {
        self.0.iter().map(|(&c, &n)| (c, n))
    }
}

/// Count quadruples up to permutation and translation.
///
/// Each translation class holds exactly four subsets containing 0, so the
/// subsets {0 < a < b < c} are classified and each tally divided by 4.
pub fn count_graph_classes(ctx: &FieldContext) -> Result<GraphCensus> {
    ctx.require_one_mod_four()?;
    let p = ctx.p() as usize;
    let res: Vec<u8> = ctx.chi_table().iter().map(|&c| (c == 1) as u8).collect();
    let class_of: [usize; 64] = std::array::from_fn(|m| {
        let c = GraphClass::from_edge_mask(m as u8);
        GraphClass::ALL.iter().position(|&x| x == c).unwrap()
    });

    // partitioned by the smallest nonzero element; integer tallies merge exactly
    let tallies = (1..p)
        .into_par_iter()
        .map(|a| {
            let mut t = [0u64; 11];
            for b in a + 1..p {
                // bits: 0:(0,a) 1:(0,b) 2:(0,c) 3:(a,b) 4:(a,c) 5:(b,c)
                let base = res[a] | res[b] << 1 | res[b - a] << 3;
                for c in b + 1..p {
                    let mask = base | res[c] << 2 | res[c - a] << 4 | res[c - b] << 5;
                    t[class_of[mask as usize]] += 1;
                }
            }
            t
        })
        .reduce(
            || [0u64; 11],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(a, b)| *a += b);
                x
            },
        );

    let mut census = BTreeMap::new();
    for (class, n) in GraphClass::ALL.into_iter().zip(tallies) {
        assert_eq!(n % 4, 0, "{class} tally {n} not divisible by 4 at p = {p}");
        census.insert(class, n / 4);
    }
    Ok(GraphCensus(census))
}

/// d(k) = (J² − 4)/32.
pub fn d_of_j(j: i64) -> Result<i64> {
    let num = j * j - 4;
    if num % 32 != 0 {
        return Err(Error::NotIntegral { j });
    }
    Ok(num / 32)
}

/// Closed form for n_p(K4): (k(k−1)(k−4) + 2k·d(k))/24.
pub fn goncharova_k4(ctx: &FieldContext) -> Result<u64> {
    let k = ctx.require_one_mod_four()? as i64;
    let d = d_of_j(jacobsthal(ctx)?)?;
    let num = k * (k - 1) * (k - 4) + 2 * k * d;
    assert!(
        num >= 0 && num % 24 == 0,
        "formula numerator {num} is not a nonnegative multiple of 24 at p = {}",
        ctx.p()
    );
    Ok((num / 24) as u64)
}
