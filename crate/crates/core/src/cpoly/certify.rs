//! Certified nonvanishing of `R_x` on a closed polydisc.
//!
//! Each variable's disc is cut into annular sectors; a cell of the polydisc is
//! a product of sectors. On a cell with center `c`,
//! `|R(z)| >= |R(c)| - sum_i L_i delta_i`, where `delta_i` bounds `|z_i - c_i|`
//! over the sector and `L_i` bounds `|dR/dz_i|` on the polydisc spanned by the
//! sectors' outer radii. A centered form, the gradient at `c` plus a
//! second-order majorant remainder, is used instead when it is smaller.
//! Cells where the lower bound is not positive are subdivided up to a depth
//! cap. Near-zeros found along the way are polished into explicit witnesses.

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use super::{roots_univariate, RPoly};
use crate::error::{Error, Result};
use crate::multiindex::{MultiIndexTable, MAX_BLOCKS};
use crate::optimize::{capped_grid, torus_maximize};
use crate::point::{CPoint, C64};

/// A witness `z` must satisfy `|R(z)| <= ZERO_TOL`.
pub const ZERO_TOL: f64 = 1e-9;
/// Default cap on evaluated cells.
pub const DEFAULT_CELL_BUDGET: u64 = 100_000_000;

const MAX_POLISH_ATTEMPTS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifySettings {
    /// Radial cells per variable; each variable also gets `4 * resolution` angular cells.
    pub resolution: usize,
    /// Maximum number of subdivisions of a base cell.
    pub depth_cap: usize,
    /// Maximum number of evaluated cells (base grid and refinement together).
    pub cell_budget: u64,
    pub zero_tol: f64,
}

impl Default for CertifySettings {
    fn default() -> Self {
        CertifySettings {
            resolution: 4,
            depth_cap: 14,
            cell_budget: DEFAULT_CELL_BUDGET,
            zero_tol: ZERO_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertStatus {
    Inside,
    Outside,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonvanishingCertificate {
    pub status: CertStatus,
    /// Certified lower bound on `|R|` over the polydisc when `Inside`, else 0.
    pub margin: f64,
    /// A point of the closed polydisc where `|R| <= zero_tol` when `Outside`.
    pub witness: Option<CPoint>,
    #[serde(rename = "cells")]
    pub grid_cells: u64,
    /// `sum_i L_i` for the whole polydisc.
    pub lipschitz_bound: f64,
}

#[derive(Debug, Clone, Copy)]
struct Sector {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
}

impl Sector {
    fn center(&self) -> C64 {
        C64::from_polar(0.5 * (self.r0 + self.r1), 0.5 * (self.t0 + self.t1))
    }

    /// Largest distance from the center to a point of the sector. The
    /// squared distance is convex in the radius and increasing in the angle
    /// offset, so a corner attains it.
    fn covering_radius(&self) -> f64 {
        let rc = 0.5 * (self.r0 + self.r1);
        let half = 0.5 * (self.t1 - self.t0);
        let cos = half.min(std::f64::consts::PI).cos();
        [self.r0, self.r1]
            .iter()
            .map(|&r| (r * r + rc * rc - 2.0 * r * rc * cos).max(0.0).sqrt())
            .fold(0.0, f64::max)
    }

    fn split(&self) -> [Sector; 4] {
        let rm = 0.5 * (self.r0 + self.r1);
        let tm = 0.5 * (self.t0 + self.t1);
        [
            Sector {
                r0: self.r0,
                r1: rm,
                t0: self.t0,
                t1: tm,
            },
            Sector {
                r0: self.r0,
                r1: rm,
                t0: tm,
                t1: self.t1,
            },
            Sector {
                r0: rm,
                r1: self.r1,
                t0: self.t0,
                t1: tm,
            },
            Sector {
                r0: rm,
                r1: self.r1,
                t0: tm,
                t1: self.t1,
            },
        ]
    }
}

type Cell = ArrayVec<Sector, MAX_BLOCKS>;

struct Evaluated {
    lower: f64,
    value: f64,
    center: ArrayVec<C64, MAX_BLOCKS>,
}

fn evaluate(poly: &RPoly, cell: &Cell) -> Evaluated {
    let center: ArrayVec<C64, MAX_BLOCKS> = cell.iter().map(Sector::center).collect();
    let outer: ArrayVec<f64, MAX_BLOCKS> = cell.iter().map(|s| s.r1).collect();
    let delta: ArrayVec<f64, MAX_BLOCKS> = cell.iter().map(Sector::covering_radius).collect();
    let value = poly.eval(&center).norm();
    let slack: f64 = poly
        .lipschitz_bounds(&outer)
        .iter()
        .zip(&delta)
        .map(|(l, d)| l * d)
        .sum();
    let mut lower = value - slack;
    if lower <= 0.0 {
        // Centered form: the gradient at the center sees cancellation that
        // the majorant misses.
        let rho: ArrayVec<f64, MAX_BLOCKS> = center.iter().map(|c| c.norm()).collect();
        let centered = poly
            .gradient(&center)
            .iter()
            .zip(&delta)
            .map(|(g, d)| g.norm() * d)
            .sum::<f64>()
            + poly.taylor_remainder_bound(&rho, &delta);
        lower = lower.max(value - centered);
    }
    Evaluated {
        lower,
        value,
        center,
    }
}

fn within_radius(z: &[C64], radius: f64, tol: f64) -> bool {
    z.iter().all(|v| v.norm() <= radius + tol)
}

fn clamp_to_radius(v: C64, radius: f64) -> C64 {
    let m = v.norm();
    if m > radius {
        v * (radius / m)
    } else {
        v
    }
}

/// Tries to turn `start` into a point of the closed polydisc of radius
/// `radius` with `|R| <= zero_tol`.
///
/// Runs projected minimum-norm Newton steps, then alternates exact
/// one-variable root solves with the other coordinates frozen.
pub fn polish_zero(poly: &RPoly, start: &[C64], radius: f64, zero_tol: f64) -> Option<CPoint> {
    let s = poly.s();
    let mut z: Vec<C64> = start.iter().map(|&v| clamp_to_radius(v, radius)).collect();
    let accept = |z: &[C64]| poly.eval(z).norm() <= zero_tol && within_radius(z, radius, zero_tol);

    for _ in 0..25 {
        if accept(&z) {
            return Some(CPoint(z));
        }
        let v = poly.eval(&z);
        let g = poly.gradient(&z);
        let gn: f64 = g.iter().map(|q| q.norm_sqr()).sum();
        if gn == 0.0 || !gn.is_finite() {
            break;
        }
        let step = v / gn;
        for (zi, gi) in z.iter_mut().zip(&g) {
            *zi = clamp_to_radius(*zi - step * gi.conj(), radius);
        }
    }

    for _ in 0..6 {
        for i in 0..s {
            let slice = poly.slice_coeffs(&z, i);
            let Ok(roots) = roots_univariate(&slice, 1e-12) else {
                continue;
            };
            let current = z[i];
            let inside = roots
                .iter()
                .filter(|r| r.norm() <= radius * (1.0 + 1e-12))
                .min_by(|a, b| (*a - current).norm().total_cmp(&(*b - current).norm()));
            match inside {
                Some(&root) => {
                    let mut candidate = z.clone();
                    candidate[i] = root;
                    if accept(&candidate) {
                        return Some(CPoint(candidate));
                    }
                    z = candidate;
                }
                None => {
                    if let Some(&nearest) = roots
                        .iter()
                        .min_by(|a, b| (*a - current).norm().total_cmp(&(*b - current).norm()))
                    {
                        z[i] = clamp_to_radius(nearest, radius);
                    }
                }
            }
        }
        if accept(&z) {
            return Some(CPoint(z));
        }
    }
    None
}

/// Radial levels, as fractions of the radius, for the frozen variables of
/// [`slice_zero_search`].
fn slice_levels(frozen: usize) -> Vec<Vec<f64>> {
    let per: &[f64] = match frozen {
        1 => &[1.0, 0.875, 0.75, 0.625, 0.5, 0.375, 0.25, 0.125],
        2 => &[1.0, 0.75, 0.5, 0.25],
        _ => &[1.0, 0.5],
    };
    let mut out = vec![Vec::new()];
    for _ in 0..frozen {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                per.iter().map(move |&f| {
                    let mut v = prefix.clone();
                    v.push(f);
                    v
                })
            })
            .collect();
    }
    out
}

/// Looks for a zero of `R` in the closed polydisc by solving for one
/// variable exactly while the others range over circles of fixed radii.
///
/// For each choice of solved variable and radial profile, the smallest root
/// modulus is minimized over the frozen angles; a root within `radius` is
/// polished into a witness.
pub fn slice_zero_search(poly: &RPoly, radius: f64, zero_tol: f64) -> Option<CPoint> {
    let s = poly.s();
    for i in 0..s {
        let frozen = s - 1;
        let grid = capped_grid(frozen, 64, 4096);
        for levels in slice_levels(frozen) {
            let point = |angles: &[f64]| -> Vec<C64> {
                let mut z = vec![C64::new(0.0, 0.0); s];
                let mut k = 0;
                for (j, v) in z.iter_mut().enumerate() {
                    if j != i {
                        *v = C64::from_polar(radius * levels[k], angles[k]);
                        k += 1;
                    }
                }
                z
            };
            let smallest = |z: &[C64]| -> Option<C64> {
                let roots = roots_univariate(&poly.slice_coeffs(z, i), 1e-12).ok()?;
                roots
                    .into_iter()
                    .min_by(|a, b| a.norm().total_cmp(&b.norm()))
            };
            let best = torus_maximize(frozen, grid, 30, Vec::new(), |angles| {
                Ok(smallest(&point(angles)).map_or(f64::NEG_INFINITY, |r| -r.norm()))
            });
            let Ok((value, angles)) = best else {
                continue;
            };
            if -value > radius {
                continue;
            }
            let mut z = point(&angles);
            if let Some(root) = smallest(&z) {
                z[i] = clamp_to_radius(root, radius);
                if poly.eval(&z).norm() <= zero_tol {
                    return Some(CPoint(z));
                }
                if let Some(w) = polish_zero(poly, &z, radius, zero_tol) {
                    return Some(w);
                }
            }
        }
    }
    None
}

/// [`certify_nonvanishing_with`] with default settings at the given resolution.
pub fn certify_nonvanishing(
    table: &MultiIndexTable,
    x: &[C64],
    radius: f64,
    resolution: usize,
) -> Result<NonvanishingCertificate> {
    certify_nonvanishing_with(
        table,
        x,
        radius,
        &CertifySettings {
            resolution,
            ..CertifySettings::default()
        },
    )
}

/// Decides whether `R_x` vanishes somewhere on the closed polydisc of radius
/// `radius`.
pub fn certify_nonvanishing_with(
    table: &MultiIndexTable,
    x: &[C64],
    radius: f64,
    settings: &CertifySettings,
) -> Result<NonvanishingCertificate> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if settings.resolution < 2 {
        return Err(Error::InvalidArgument(
            "resolution must be at least 2".into(),
        ));
    }
    let poly = RPoly::new(table, x)?;
    let s = table.s();
    let n_r = settings.resolution;
    let n_t = 4 * settings.resolution;
    let per_var = (n_r * n_t) as u64;
    let base_cells = per_var
        .checked_pow(s as u32)
        .filter(|&c| c <= settings.cell_budget)
        .ok_or_else(|| {
            Error::Budget(format!(
                "base grid of {per_var}^{s} cells exceeds the budget of {}",
                settings.cell_budget
            ))
        })?;

    let lipschitz_bound: f64 = poly.lipschitz_bounds(&vec![radius; s]).iter().sum();
    let sector = |idx: usize| {
        let (ri, ti) = (idx % n_r, idx / n_r);
        let dt = std::f64::consts::TAU / n_t as f64;
        Sector {
            r0: radius * ri as f64 / n_r as f64,
            r1: radius * (ri + 1) as f64 / n_r as f64,
            t0: dt * ti as f64,
            t1: dt * (ti + 1) as f64,
        }
    };

    let mut margin = f64::INFINITY;
    let mut evaluated = 0u64;
    let mut pending: Vec<(Cell, usize, f64)> = Vec::new();
    let mut best: Option<(f64, ArrayVec<C64, MAX_BLOCKS>)> = None;
    for mut idx in 0..base_cells {
        let mut cell = Cell::new();
        for _ in 0..s {
            cell.push(sector((idx % per_var) as usize));
            idx /= per_var;
        }
        let ev = evaluate(&poly, &cell);
        evaluated += 1;
        if best.as_ref().is_none_or(|(v, _)| ev.value < *v) {
            best = Some((ev.value, ev.center.clone()));
        }
        if ev.lower > 0.0 {
            margin = margin.min(ev.lower);
        } else {
            pending.push((cell, 0, ev.value));
        }
    }

    let outside = |witness: CPoint, evaluated: u64| NonvanishingCertificate {
        status: CertStatus::Outside,
        margin: 0.0,
        witness: Some(witness),
        grid_cells: evaluated,
        lipschitz_bound,
    };
    let undetermined = |evaluated: u64| NonvanishingCertificate {
        status: CertStatus::Undetermined,
        margin: 0.0,
        witness: None,
        grid_cells: evaluated,
        lipschitz_bound,
    };

    let mut polish_budget = MAX_POLISH_ATTEMPTS;
    if !pending.is_empty() {
        if let Some((_, center)) = &best {
            polish_budget -= 1;
            if let Some(w) = polish_zero(&poly, center, radius, settings.zero_tol) {
                return Ok(outside(w, evaluated));
            }
        }
    }

    // Smallest |R| processed last so it is popped first.
    pending.sort_by(|a, b| b.2.total_cmp(&a.2));
    while let Some((cell, depth, _)) = pending.pop() {
        if depth >= settings.depth_cap {
            if polish_budget > 0 {
                let center: Vec<C64> = cell.iter().map(Sector::center).collect();
                if let Some(w) = polish_zero(&poly, &center, radius, settings.zero_tol) {
                    return Ok(outside(w, evaluated));
                }
            }
            if let Some(w) = slice_zero_search(&poly, radius, settings.zero_tol) {
                return Ok(outside(w, evaluated));
            }
            return Ok(undetermined(evaluated));
        }
        let pieces: ArrayVec<[Sector; 4], MAX_BLOCKS> = cell.iter().map(Sector::split).collect();
        let children = 4usize.pow(s as u32);
        let mut failing = Vec::new();
        for mut code in 0..children {
            let mut child = Cell::new();
            for p in &pieces {
                child.push(p[code % 4]);
                code /= 4;
            }
            let ev = evaluate(&poly, &child);
            evaluated += 1;
            if evaluated > settings.cell_budget {
                if let Some(w) = slice_zero_search(&poly, radius, settings.zero_tol) {
                    return Ok(outside(w, evaluated));
                }
                return Ok(undetermined(evaluated));
            }
            if ev.lower > 0.0 {
                margin = margin.min(ev.lower);
            } else {
                if ev.value <= 1e3 * settings.zero_tol && polish_budget > 0 {
                    polish_budget -= 1;
                    if let Some(w) = polish_zero(&poly, &ev.center, radius, settings.zero_tol) {
                        return Ok(outside(w, evaluated));
                    }
                }
                failing.push((child, depth + 1, ev.value));
            }
        }
        failing.sort_by(|a, b| b.2.total_cmp(&a.2));
        pending.extend(failing);
    }

    Ok(NonvanishingCertificate {
        status: CertStatus::Inside,
        margin,
        witness: None,
        grid_cells: evaluated,
        lipschitz_bound,
    })
}
