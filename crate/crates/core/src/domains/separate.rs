//! Complex affine hyperplanes through an exterior point that miss the
//! domain, for blocks `(r_1, 1, ..., 1)`.

use serde::{Deserialize, Serialize};

use super::{psi_trace, DomainHandle, MemberStatus};
use crate::cpoly::parity_sign;
use crate::error::{Error, Result};
use crate::point::{CPoint, C64};

/// `y -> sum_j coeffs[j] y_j + constant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineFunctional {
    pub coeffs: CPoint,
    pub constant: C64,
    /// Recursion level (0 = base symmetrized polydisc) that produced it.
    pub level: usize,
}

impl AffineFunctional {
    pub fn eval(&self, y: &[C64]) -> C64 {
        self.constant + self.coeffs.iter().zip(y).map(|(a, b)| a * b).sum::<C64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Separation {
    Hyperplane(AffineFunctional),
    /// The point lies in the boundary band or the oracle was inconclusive.
    Undetermined {
        reason: String,
    },
}

/// Newton steps on `R_{x'}` to tighten a base-level root.
fn polish_root(coeffs: &[C64], mut z: C64) -> C64 {
    for _ in 0..4 {
        let (mut p, mut dp) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for &c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        z -= p / dp;
    }
    z
}

/// Functional vanishing at `x0` and nowhere on the domain.
///
/// At the base level a root `z_0` of `R_{x0'}` in the unit disc gives
/// `y -> R_{y'}(z_0)`. At a higher level a point `z'` of the torus with
/// `|Psi_{z'}(x0)| > 1` gives `y -> P_{y''}(z') - omega R'_{y'}(z')`, where
/// `omega = Psi_{z'}(x0)`; a member on it would have `|Psi_{z'}| > 1`.
pub fn separating_hyperplane(handle: &DomainHandle, x0: &[C64]) -> Result<Separation> {
    handle.table().check_point(x0)?;
    if !handle.is_recursive() {
        return Err(Error::InvalidArgument(format!(
            "separating hyperplanes need blocks (r, 1, ..., 1), got {:?}",
            handle.blocks()
        )));
    }
    let trace = psi_trace(handle, x0)?;
    match trace.status {
        MemberStatus::Inside => {
            return Err(Error::InvalidArgument(
                "the point is a member of the domain".into(),
            ))
        }
        MemberStatus::Boundary | MemberStatus::Undetermined => {
            return Ok(Separation::Undetermined {
                reason: format!("membership status {:?}", trace.status),
            })
        }
        MemberStatus::Outside => {}
    }
    let level = trace.level.expect("outside verdicts record their level");
    let table = handle.table();
    let mut coeffs = vec![C64::new(0.0, 0.0); handle.dim()];
    let constant;
    if let Some(root) = trace.base_root {
        let r1 = table.blocks()[0];
        let base: Vec<C64> = std::iter::once(C64::new(1.0, 0.0))
            .chain((0..r1).map(|j| parity_sign(j as u32 + 1) * x0[j]))
            .collect();
        let z0 = polish_root(&base, root);
        let mut power = C64::new(1.0, 0.0);
        for (j, c) in coeffs.iter_mut().take(r1).enumerate() {
            power *= z0;
            *c = parity_sign(j as u32 + 1) * power;
        }
        constant = C64::new(1.0, 0.0);
    } else {
        let z = trace
            .argmax
            .as_ref()
            .expect("higher levels record the maximizer");
        let omega = trace
            .omega
            .ok_or_else(|| Error::NumericFailure("quotient has a pole at the maximizer".into()))?;
        // Level `level` uses the first `level + 1` blocks; its prefix has
        // `run - 1` coordinates and the last block contributes one more run.
        let run: usize = table.blocks()[..level].iter().map(|r| r + 1).product();
        for j in 0..2 * run - 1 {
            let alpha = &table.alphas()[j];
            let monomial: C64 = z
                .iter()
                .zip(alpha.iter())
                .map(|(zi, &a)| zi.powu(a as u32))
                .product();
            let signed = parity_sign(table.degrees()[j]) * monomial;
            // Coordinates before `run - 1` feed R'; the rest feed P = -sum.
            coeffs[j] = if j < run - 1 {
                -omega * signed
            } else {
                -signed
            };
        }
        constant = -omega;
    }
    Ok(Separation::Hyperplane(AffineFunctional {
        coeffs: CPoint(coeffs),
        constant,
        level,
    }))
}
