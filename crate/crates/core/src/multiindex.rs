//! The ordered exponent set `A(r_1, ..., r_s)` and the bookkeeping derived
//! from it.
//!
//! Exponents are ordered by their last differing coordinate: `a < b` iff
//! `a[j] < b[j]` where `j` is the largest index with `a[j] != b[j]`. That is
//! exactly mixed-radix counting with the first block as the least significant
//! digit, so the table is generated in order without sorting.

use std::cmp::Ordering;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{CPoint, C64};

/// Largest supported number of blocks `s`.
pub const MAX_BLOCKS: usize = 8;
/// Largest supported matrix dimension `n = r_1 + ... + r_s`.
pub const MAX_DIM: usize = 16;

/// One exponent tuple, one entry per block.
pub type Exponent = ArrayVec<u8, MAX_BLOCKS>;

/// Ordered exponent table for a block structure `(r_1, ..., r_s)`.
///
/// Index `j` (0-based) of [`alphas`](Self::alphas) is the exponent attached to
/// coordinate `x_{j+1}` of a point of `C^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexTable {
    blocks: Vec<usize>,
    n: usize,
    alphas: Vec<Exponent>,
    degrees: Vec<u32>,
}

impl MultiIndexTable {
    /// Builds the full table for `blocks`.
    pub fn new(blocks: &[usize]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidSpec("block list is empty".into()));
        }
        if let Some(pos) = blocks.iter().position(|&r| r == 0) {
            return Err(Error::InvalidSpec(format!("block {} has size 0", pos + 1)));
        }
        if blocks.len() > MAX_BLOCKS {
            return Err(Error::Budget(format!(
                "{} blocks requested, at most {MAX_BLOCKS} supported",
                blocks.len()
            )));
        }
        let n: usize = blocks.iter().sum();
        if n > MAX_DIM {
            return Err(Error::Budget(format!(
                "dimension {n} exceeds the supported maximum {MAX_DIM}"
            )));
        }

        let total: usize = blocks.iter().map(|r| r + 1).product();
        let mut alphas = Vec::with_capacity(total - 1);
        let mut degrees = Vec::with_capacity(total - 1);
        for mut k in 1..total {
            let mut alpha = Exponent::new();
            for &r in blocks {
                alpha.push((k % (r + 1)) as u8);
                k /= r + 1;
            }
            degrees.push(alpha.iter().map(|&a| a as u32).sum());
            alphas.push(alpha);
        }
        Ok(MultiIndexTable {
            blocks: blocks.to_vec(),
            n,
            alphas,
            degrees,
        })
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    /// Number of blocks `s`.
    pub fn s(&self) -> usize {
        self.blocks.len()
    }

    /// Matrix dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Domain dimension `N`.
    pub fn big_n(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Exponent] {
        &self.alphas
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Radices `r_j + 1` of the mixed-radix layout.
    pub fn radices(&self) -> Vec<usize> {
        self.blocks.iter().map(|r| r + 1).collect()
    }

    /// First matrix index (0-based) of each block.
    pub fn block_offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, &r| {
                let start = *acc;
                *acc += r;
                Some(start)
            })
            .collect()
    }

    /// True for blocks of the form `(r_1, 1, ..., 1)` with `s >= 2`.
    pub fn has_unit_tail(&self) -> bool {
        self.s() >= 2 && self.blocks[1..].iter().all(|&r| r == 1)
    }

    /// Checks that `x` has length `N`.
    pub fn check_point(&self, x: &[C64]) -> Result<()> {
        if x.len() != self.big_n() {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, the domain needs N = {}",
                x.len(),
                self.big_n()
            )));
        }
        Ok(())
    }

    /// Checks that `z` has length `s`.
    pub fn check_argument(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.s() {
            return Err(Error::InvalidArgument(format!(
                "argument has {} coordinates, expected s = {}",
                z.len(),
                self.s()
            )));
        }
        Ok(())
    }
}

/// Convenience wrapper for [`MultiIndexTable::new`].
pub fn build_table(blocks: &[usize]) -> Result<MultiIndexTable> {
    MultiIndexTable::new(blocks)
}

/// Compares two exponents by their last differing coordinate.
pub fn compare(a: &[u8], b: &[u8]) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "exponent lengths differ ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter()
        .zip(b)
        .rev()
        .find(|(x, y)| x != y)
        .map_or(Ordering::Equal, |(x, y)| x.cmp(y)))
}

/// The weighted action `(lambda^{m_1} x_1, ..., lambda^{m_N} x_N)`.
pub fn quasibalanced_act(weights: &[u32], lambda: C64, x: &[C64]) -> Result<CPoint> {
    if weights.len() != x.len() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for a point with {} coordinates",
            weights.len(),
            x.len()
        )));
    }
    Ok(weights
        .iter()
        .zip(x)
        .map(|(&m, &v)| v * lambda.powu(m))
        .collect())
}

/// Bookkeeping for splitting the first `s'` blocks off a table.
///
/// Coordinates `0..N'` of a point form `x'`, the rest form `x''`. The fiber
/// coordinate `k (N'+1) + j` (1-based `k`, 0-based `j`) carries the exponent
/// `((alpha^j)', beta^k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitTable {
    parent: MultiIndexTable,
    prefix: MultiIndexTable,
    s_prime: usize,
    fiber_weights: Vec<u32>,
    betas: Vec<Exponent>,
}

impl SplitTable {
    pub fn parent(&self) -> &MultiIndexTable {
        &self.parent
    }

    /// The table of the first `s'` blocks.
    pub fn prefix(&self) -> &MultiIndexTable {
        &self.prefix
    }

    pub fn s_prime(&self) -> usize {
        self.s_prime
    }

    /// `N'`.
    pub fn n_prime(&self) -> usize {
        self.prefix.big_n()
    }

    /// `N'' = N - N'`.
    pub fn n_dprime(&self) -> usize {
        self.parent.big_n() - self.prefix.big_n()
    }

    /// Number of fiber exponents `M`.
    pub fn m(&self) -> usize {
        self.betas.len()
    }

    /// Weights under which every fiber is balanced.
    pub fn fiber_weights(&self) -> &[u32] {
        &self.fiber_weights
    }

    pub fn betas(&self) -> &[Exponent] {
        &self.betas
    }

    /// Splits `x` into `(x', x'')`.
    pub fn split_point<'a>(&self, x: &'a [C64]) -> (&'a [C64], &'a [C64]) {
        x.split_at(self.n_prime())
    }
}

/// Builds the split bookkeeping for the first `s_prime` blocks.
pub fn split_table(table: &MultiIndexTable, s_prime: usize) -> Result<SplitTable> {
    if s_prime == 0 || s_prime >= table.s() {
        return Err(Error::InvalidArgument(format!(
            "split point s' = {s_prime} must satisfy 1 <= s' < s = {}",
            table.s()
        )));
    }
    let prefix = MultiIndexTable::new(&table.blocks()[..s_prime])?;
    let run = prefix.big_n() + 1;
    let m: usize = table.blocks()[s_prime..]
        .iter()
        .map(|r| r + 1)
        .product::<usize>()
        - 1;

    let mut fiber_weights = Vec::with_capacity(run * m);
    let mut betas = Vec::with_capacity(m);
    for k in 1..=m {
        // 1-based alpha^{k(N'+1)} is 0-based index k*run - 1.
        let alpha = &table.alphas()[k * run - 1];
        let degree = table.degrees()[k * run - 1];
        fiber_weights.extend(std::iter::repeat_n(degree, run));
        betas.push(alpha[s_prime..].iter().copied().collect());
    }
    Ok(SplitTable {
        parent: table.clone(),
        prefix,
        s_prime,
        fiber_weights,
        betas,
    })
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    blocks: Vec<usize>,
    #[serde(rename = "N")]
    big_n: usize,
    alphas: Vec<Vec<u8>>,
    degrees: Vec<u32>,
}

impl Serialize for MultiIndexTable {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        TableJson {
            blocks: self.blocks.clone(),
            big_n: self.big_n(),
            alphas: self.alphas.iter().map(|a| a.to_vec()).collect(),
            degrees: self.degrees.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiIndexTable {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TableJson::deserialize(deserializer)?;
        let table = MultiIndexTable::new(&raw.blocks).map_err(D::Error::custom)?;
        let alphas: Vec<Vec<u8>> = table.alphas.iter().map(|a| a.to_vec()).collect();
        if alphas != raw.alphas || table.degrees != raw.degrees || table.big_n() != raw.big_n {
            return Err(D::Error::custom("table contents do not match its blocks"));
        }
        Ok(table)
    }
}
