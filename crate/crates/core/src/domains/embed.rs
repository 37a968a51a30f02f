//! Embedding into a symmetrized polydisc along `z = (z_0^{m_1}, ..., z_0^{m_s})`.

use serde::{Deserialize, Serialize};

use super::DomainHandle;
use crate::error::{Error, Result};
use crate::multiindex::MultiIndexTable;
use crate::point::{CPoint, C64};

/// Largest odd weight tried per coordinate.
pub const MAX_ODD_WEIGHT: u32 = 99;
const MAX_SEARCH_NODES: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingResult {
    pub m_weights: Vec<u32>,
    #[serde(rename = "M")]
    pub big_m: usize,
    pub x_tilde: CPoint,
}

fn pairing(m: &[u32], alpha: &[u8]) -> u32 {
    m.iter().zip(alpha).map(|(&w, &a)| w * a as u32).sum()
}

/// Whether the exponents supported on the first `m.len()` blocks have
/// pairwise distinct pairings with `m`.
fn prefix_distinct(table: &MultiIndexTable, m: &[u32]) -> bool {
    let count = table.blocks()[..m.len()]
        .iter()
        .map(|r| r + 1)
        .product::<usize>()
        - 1;
    let mut seen: Vec<u32> = table.alphas()[..count]
        .iter()
        .map(|a| pairing(m, &a[..m.len()]))
        .collect();
    seen.sort_unstable();
    seen.windows(2).all(|w| w[0] != w[1])
}

fn search(table: &MultiIndexTable, m: &mut Vec<u32>, nodes: &mut u64) -> Result<bool> {
    if m.len() == table.s() {
        return Ok(true);
    }
    for w in (1..=MAX_ODD_WEIGHT).step_by(2) {
        *nodes += 1;
        if *nodes > MAX_SEARCH_NODES {
            return Err(Error::Budget(
                "odd weight search exceeded its node budget".into(),
            ));
        }
        m.push(w);
        if prefix_distinct(table, m) && search(table, m, nodes)? {
            return Ok(true);
        }
        m.pop();
    }
    Ok(false)
}

/// Lexicographically smallest all-odd `m` (entries up to [`MAX_ODD_WEIGHT`])
/// with pairwise distinct `<m, alpha^j>`.
pub fn odd_weights(table: &MultiIndexTable) -> Result<Vec<u32>> {
    let mut m = Vec::with_capacity(table.s());
    let mut nodes = 0;
    if search(table, &mut m, &mut nodes)? {
        Ok(m)
    } else {
        Err(Error::Budget(format!(
            "no odd weights up to {MAX_ODD_WEIGHT} separate the exponents"
        )))
    }
}

/// `x~` in `C^M`, `M = <m, (r_1, ..., r_s)>`, with `x_j` at position
/// `<m, alpha^j>` (1-based) and zeros elsewhere, so that
/// `R_x(z_0^{m_1}, ..., z_0^{m_s})` is the one-variable polynomial of `x~`.
pub fn embed_symmetrized(handle: &DomainHandle, x: &[C64]) -> Result<EmbeddingResult> {
    let table = handle.table();
    table.check_point(x)?;
    let m = odd_weights(table)?;
    let big_m = table
        .blocks()
        .iter()
        .zip(&m)
        .map(|(&r, &w)| r * w as usize)
        .sum();
    let mut x_tilde = vec![C64::new(0.0, 0.0); big_m];
    for (alpha, &v) in table.alphas().iter().zip(x) {
        x_tilde[pairing(&m, alpha) as usize - 1] = v;
    }
    Ok(EmbeddingResult {
        m_weights: m,
        big_m,
        x_tilde: CPoint(x_tilde),
    })
}
