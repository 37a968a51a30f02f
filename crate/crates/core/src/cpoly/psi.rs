//! The quotient `Psi_{z'}(x) = P_{x''}(z') / R'_{x'}(z')` for tables whose
//! last block has size one, where `R_x(z', z_s) = R'_{x'}(z') - z_s P_{x''}(z')`.

use serde::{Deserialize, Serialize};

use super::{horner_mixed, roots_univariate, RPoly};
use crate::error::{Error, Result};
use crate::multiindex::{MultiIndexTable, SplitTable};
use crate::optimize::{capped_grid, torus_maximize};
use crate::point::{CPoint, C64};

/// Grid points per torus angle used by default.
pub const DEFAULT_TORUS_GRID: usize = 256;
/// Denominators below this modulus are treated as poles.
pub const POLE_TOL: f64 = 1e-14;

const MAX_TORUS_POINTS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiValue {
    pub numerator: C64,
    pub denominator: C64,
    /// Absent when the denominator is below the pole tolerance.
    pub value: Option<C64>,
}

/// Precomputed numerator and denominator coefficients for one point `x`.
#[derive(Debug, Clone)]
pub struct PsiEvaluator {
    radices: Vec<usize>,
    den: Vec<C64>,
    neg_num: Vec<C64>,
}

impl PsiEvaluator {
    pub fn new(table: &MultiIndexTable, split: &SplitTable, x: &[C64]) -> Result<Self> {
        let s = table.s();
        if split.parent() != table {
            return Err(Error::InvalidArgument(
                "split bookkeeping belongs to a different table".into(),
            ));
        }
        if split.s_prime() + 1 != s || table.blocks()[s - 1] != 1 {
            return Err(Error::InvalidArgument(
                "the quotient needs the last block split off and of size one".into(),
            ));
        }
        let poly = RPoly::new(table, x)?;
        let run = split.n_prime() + 1;
        let coeffs = poly.coeffs();
        Ok(PsiEvaluator {
            radices: split.prefix().radices(),
            den: coeffs[..run].to_vec(),
            neg_num: coeffs[run..2 * run].to_vec(),
        })
    }

    pub fn torus_dim(&self) -> usize {
        self.radices.len()
    }

    /// `(P_{x''}(z'), R'_{x'}(z'))`.
    pub fn parts(&self, z_prime: &[C64]) -> (C64, C64) {
        (
            -horner_mixed(&self.neg_num, &self.radices, z_prime),
            horner_mixed(&self.den, &self.radices, z_prime),
        )
    }

    pub fn eval(&self, z_prime: &[C64]) -> PsiValue {
        let (numerator, denominator) = self.parts(z_prime);
        PsiValue {
            numerator,
            denominator,
            value: (denominator.norm() >= POLE_TOL).then(|| numerator / denominator),
        }
    }

    /// Coefficients of `R'` (ascending) when the torus is one-dimensional.
    fn denominator_coeffs(&self) -> Option<&[C64]> {
        (self.radices.len() == 1).then_some(&self.den[..])
    }

    fn modulus_at(&self, angles: &[f64]) -> Result<f64> {
        let z: Vec<C64> = angles.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let (num, den) = self.parts(&z);
        if den.norm() < POLE_TOL {
            return Err(Error::InvalidState(format!(
                "denominator vanishes on the torus at {z:?}"
            )));
        }
        Ok((num / den).norm())
    }
}

/// `Psi_{z'}(x)` with its numerator and denominator.
pub fn eval_psi(
    table: &MultiIndexTable,
    split: &SplitTable,
    x: &[C64],
    z_prime: &[C64],
) -> Result<PsiValue> {
    if z_prime.len() + 1 != table.s() {
        return Err(Error::InvalidArgument(format!(
            "z' needs {} coordinates, got {}",
            table.s() - 1,
            z_prime.len()
        )));
    }
    Ok(PsiEvaluator::new(table, split, x)?.eval(z_prime))
}

/// Result of the torus scan: a lower bound on `max |Psi|` over the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusSup {
    pub value: f64,
    pub argmax: CPoint,
    /// Grid points per angle actually used.
    pub grid: usize,
}

/// Maximum of `|Psi_{z'}(x)|` over the torus by a grid scan followed by
/// coordinate-wise golden-section refinement of the best grid points.
///
/// The caller guarantees that `R'_{x'}` has no zero on the closed polydisc;
/// hitting a pole reports [`Error::InvalidState`]. The per-angle grid is
/// reduced when `grid^{s-1}` would exceed about a million points.
pub fn sup_psi_torus(
    table: &MultiIndexTable,
    split: &SplitTable,
    x: &[C64],
    grid: usize,
    refine_steps: usize,
) -> Result<TorusSup> {
    let ev = PsiEvaluator::new(table, split, x)?;
    sup_psi_torus_eval(&ev, grid, refine_steps)
}

pub(crate) fn sup_psi_torus_eval(
    ev: &PsiEvaluator,
    grid: usize,
    refine_steps: usize,
) -> Result<TorusSup> {
    if grid < 1 {
        return Err(Error::InvalidArgument("torus grid must be positive".into()));
    }
    let g = capped_grid(ev.torus_dim(), grid, MAX_TORUS_POINTS);
    // Peaks of a one-variable quotient sit near the arguments of the poles.
    let mut extra = Vec::new();
    if let Some(den) = ev.denominator_coeffs() {
        if den.len() > 1 {
            if let Ok(poles) = roots_univariate(den, 1e-10) {
                extra.extend(poles.iter().map(|p| vec![p.arg()]));
            }
        }
    }
    let (value, angles) =
        torus_maximize(ev.torus_dim(), g, refine_steps, extra, |a| ev.modulus_at(a))?;
    Ok(TorusSup {
        value,
        argmax: angles.iter().map(|&t| C64::from_polar(1.0, t)).collect(),
        grid: g,
    })
}
