//! Structured singular value `mu_E` for repeated scalar blocks
//! `E = {diag(z_1 I_{r_1}, ..., z_s I_{r_s})}`.

use serde::{Deserialize, Serialize};

use crate::clinalg::{operator_norm, pi_map, spectral_radius, CMatrix, DEFAULT_NORM_TOL};
use crate::cpoly::{certify_nonvanishing_with, CertStatus, CertifySettings};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndexTable;
use crate::optimize::{capped_grid, torus_maximize};
use crate::point::C64;

/// Grid points per angle used when the caller has no preference.
pub const DEFAULT_MU_GRID: usize = 64;
/// Cap on the number of torus grid points per search.
const MAX_TORUS_POINTS: usize = 1 << 16;
const REFINE_STEPS: usize = 40;
/// Bisection step cap.
pub const MAX_BISECTION_STEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuInterval {
    pub lo: f64,
    pub hi: f64,
    /// False when inconclusive certificates kept the width above the
    /// requested tolerance.
    pub exact: bool,
    pub steps: usize,
    pub cells: u64,
}

impl MuInterval {
    pub fn contains(&self, v: f64, slack: f64) -> bool {
        self.lo - slack <= v && v <= self.hi + slack
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuResult {
    /// Torus-search lower bound.
    pub lower: f64,
    /// Operator norm.
    pub upper: f64,
    pub certified: Option<MuInterval>,
    pub grid: usize,
}

fn check_dim(table: &MultiIndexTable, a: &CMatrix) -> Result<()> {
    if a.n() != table.n() {
        return Err(Error::InvalidArgument(format!(
            "matrix dimension {} does not match n = {}",
            a.n(),
            table.n()
        )));
    }
    Ok(())
}

/// Diagonal of `X = diag(e^{i t_1} I_{r_1}, ...)` with `t_1 = 0`.
fn torus_diagonal(blocks: &[usize], tail_angles: &[f64]) -> Vec<C64> {
    let mut d = Vec::with_capacity(blocks.iter().sum());
    for (k, &r) in blocks.iter().enumerate() {
        let z = if k == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::from_polar(1.0, tail_angles[k - 1])
        };
        d.extend(std::iter::repeat_n(z, r));
    }
    d
}

/// Lower bound for `mu_E(A)`: the maximum of `rho(X A)` over unimodular
/// block-scalar `X`.
///
/// The first angle is fixed at zero because `rho(e^{it} X A) = rho(X A)`.
pub fn mu_lower_torus(table: &MultiIndexTable, a: &CMatrix, grid: usize) -> Result<f64> {
    check_dim(table, a)?;
    if grid < 4 {
        return Err(Error::InvalidArgument(
            "torus grid must be at least 4".into(),
        ));
    }
    let dim = table.s() - 1;
    if dim == 0 || a.frobenius_norm() == 0.0 {
        return spectral_radius(a);
    }
    let g = capped_grid(dim, grid, MAX_TORUS_POINTS);
    let blocks = table.blocks();
    let (value, _) = torus_maximize(dim, g, REFINE_STEPS, Vec::new(), |angles| {
        spectral_radius(&a.left_diag_mul(&torus_diagonal(blocks, angles)))
    })?;
    Ok(value)
}

/// [`mu_bisection_with`] with default certification settings at the given
/// resolution.
pub fn mu_bisection(
    table: &MultiIndexTable,
    a: &CMatrix,
    tol: f64,
    resolution: usize,
) -> Result<MuInterval> {
    mu_bisection_with(
        table,
        a,
        tol,
        &CertifySettings {
            resolution,
            ..CertifySettings::default()
        },
    )
}

/// Encloses `mu_E(A)` by bisection on `t`, using that `mu_E(A) < t` exactly
/// when `R_{pi_E(A)}` has no zero on the closed polydisc of radius `1/t`.
///
/// Inconclusive certificates leave their abscissa undecided; the search
/// keeps bisecting the remaining gaps and reports `exact = false` if the
/// width stays above `tol`.
pub fn mu_bisection_with(
    table: &MultiIndexTable,
    a: &CMatrix,
    tol: f64,
    settings: &CertifySettings,
) -> Result<MuInterval> {
    check_dim(table, a)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let norm = operator_norm(a, DEFAULT_NORM_TOL);
    let mut out = MuInterval {
        lo: 0.0,
        hi: norm * (1.0 + 1e-9),
        exact: true,
        steps: 0,
        cells: 0,
    };
    if norm == 0.0 {
        out.hi = 0.0;
        return Ok(out);
    }
    let x = pi_map(table, a)?;
    let mut undecided: Vec<f64> = Vec::new();
    while out.steps < MAX_BISECTION_STEPS && out.hi - out.lo > tol {
        let mut marks = Vec::with_capacity(undecided.len() + 2);
        marks.push(out.lo);
        marks.extend(undecided.iter().copied());
        marks.push(out.hi);
        let (gap, left) = marks
            .windows(2)
            .map(|w| (w[1] - w[0], w[0]))
            .max_by(|p, q| p.0.total_cmp(&q.0))
            .unwrap();
        if gap <= tol {
            break;
        }
        let t = left + gap / 2.0;
        out.steps += 1;
        let cert = certify_nonvanishing_with(table, &x, 1.0 / t, settings)?;
        out.cells += cert.grid_cells;
        match cert.status {
            CertStatus::Inside => {
                out.hi = t;
                undecided.retain(|&u| u < t);
            }
            CertStatus::Outside => {
                out.lo = t;
                undecided.retain(|&u| u > t);
            }
            CertStatus::Undetermined => {
                let pos = undecided.partition_point(|&u| u < t);
                undecided.insert(pos, t);
            }
        }
    }
    out.exact = out.hi - out.lo <= tol;
    Ok(out)
}

/// Lower bound, norm bound and (when `tol` is given) a certified enclosure.
pub fn mu(
    table: &MultiIndexTable,
    a: &CMatrix,
    grid: usize,
    tol: Option<f64>,
    settings: &CertifySettings,
) -> Result<MuResult> {
    let lower = mu_lower_torus(table, a, grid)?;
    let upper = operator_norm(a, DEFAULT_NORM_TOL);
    let certified = tol
        .map(|tol| mu_bisection_with(table, a, tol, settings))
        .transpose()?;
    Ok(MuResult {
        lower,
        upper,
        certified,
        grid: capped_grid(table.s() - 1, grid, MAX_TORUS_POINTS),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaStatus {
    Yes,
    No,
    Undetermined,
}

/// Default width of the band around `mu = 1` reported as undetermined.
pub const DEFAULT_OMEGA_TOL: f64 = 1e-6;

/// Whether `mu_E(A) < 1`, with the default band and settings.
pub fn in_omega(table: &MultiIndexTable, a: &CMatrix) -> Result<OmegaStatus> {
    in_omega_with(table, a, DEFAULT_OMEGA_TOL, &CertifySettings::default())
}

/// `Yes` when `||A|| < 1 - tol` or `R_{pi_E(A)}` is certified nonvanishing on
/// the closed unit polydisc; `No` when a lower bound exceeds `1 + tol` or a
/// zero is found at modulus below `1 - tol`.
pub fn in_omega_with(
    table: &MultiIndexTable,
    a: &CMatrix,
    tol: f64,
    settings: &CertifySettings,
) -> Result<OmegaStatus> {
    check_dim(table, a)?;
    if operator_norm(a, DEFAULT_NORM_TOL) < 1.0 - tol {
        return Ok(OmegaStatus::Yes);
    }
    let lower = mu_lower_torus(table, a, DEFAULT_MU_GRID)?;
    if lower > 1.0 + tol {
        return Ok(OmegaStatus::No);
    }
    if lower >= 1.0 - tol {
        return Ok(OmegaStatus::Undetermined);
    }
    let cert = certify_nonvanishing_with(table, &pi_map(table, a)?, 1.0, settings)?;
    Ok(match cert.status {
        CertStatus::Inside => OmegaStatus::Yes,
        CertStatus::Outside
            if cert
                .witness
                .as_ref()
                .is_some_and(|w| w.max_modulus() < 1.0 - tol) =>
        {
            OmegaStatus::No
        }
        _ => OmegaStatus::Undetermined,
    })
}

/// Grid used for the sub-mean-value probe.
pub const PSH_GRID: usize = 64;
/// Allowed excess of `log mu(A)` over the circle mean.
pub const PSH_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PshOutcome {
    /// `deficit = log mu(A) - mean log mu(A + r e^{it} B)`.
    Pass {
        deficit: f64,
    },
    Fail {
        deficit: f64,
    },
    /// `mu` vanished at the centre or on the circle.
    Skip,
}

/// Sampled sub-mean-value inequality for `log mu_E` on the circle
/// `A + radius e^{it} B`, with `mu` estimated by [`mu_lower_torus`].
pub fn psh_circle_test(
    table: &MultiIndexTable,
    a: &CMatrix,
    b: &CMatrix,
    radius: f64,
    samples: usize,
) -> Result<PshOutcome> {
    check_dim(table, a)?;
    check_dim(table, b)?;
    if samples < 16 {
        return Err(Error::InvalidArgument(
            "at least 16 circle samples are needed".into(),
        ));
    }
    let centre = mu_lower_torus(table, a, PSH_GRID)?;
    if centre == 0.0 {
        return Ok(PshOutcome::Skip);
    }
    let mut sum = 0.0;
    for k in 0..samples {
        let w = C64::from_polar(radius, std::f64::consts::TAU * k as f64 / samples as f64);
        let m = mu_lower_torus(table, &a.add(&b.scaled(w)), PSH_GRID)?;
        if m == 0.0 {
            return Ok(PshOutcome::Skip);
        }
        sum += m.ln();
    }
    let deficit = centre.ln() - sum / samples as f64;
    Ok(if deficit <= PSH_TOL {
        PshOutcome::Pass { deficit }
    } else {
        PshOutcome::Fail { deficit }
    })
}
