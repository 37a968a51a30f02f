//! Maximization over the torus `[0, 2pi)^d`: a full grid scan followed by
//! coordinate-wise golden-section refinement of the best grid points.

use rayon::prelude::*;

use crate::error::Result;

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const REFINE_CANDIDATES: usize = 4;
const MAX_SWEEPS: usize = 8;

/// Maximizes `f` on `[lo, hi]` assuming it is unimodal there; returns the
/// best probe `(t, f(t))`.
pub(crate) fn golden_max<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..steps {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Per-angle grid size after capping the total number of grid points.
pub(crate) fn capped_grid(dim: usize, grid: usize, max_points: usize) -> usize {
    if dim == 0 {
        return 1;
    }
    let fits = |g: usize| g.checked_pow(dim as u32).is_some_and(|p| p <= max_points);
    let mut cap = (max_points as f64).powf(1.0 / dim as f64).round() as usize;
    while cap > 1 && !fits(cap) {
        cap -= 1;
    }
    grid.min(cap.max(4))
}

/// Returns `(max value, argmax angles)`. `extra` angle vectors are evaluated
/// alongside the grid and compete for refinement.
pub(crate) fn torus_maximize<F>(
    dim: usize,
    grid: usize,
    refine_steps: usize,
    extra: Vec<Vec<f64>>,
    f: F,
) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if dim == 0 {
        return Ok((f(&[])?, Vec::new()));
    }
    let step = std::f64::consts::TAU / grid as f64;
    let total = grid.pow(dim as u32);
    let angles_of = |mut idx: usize| -> Vec<f64> {
        (0..dim)
            .map(|_| {
                let a = step * (idx % grid) as f64;
                idx /= grid;
                a
            })
            .collect()
    };
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| f(&angles_of(idx)))
        .collect::<Result<_>>()?;

    let mut top: Vec<(f64, Vec<f64>)> = Vec::with_capacity(REFINE_CANDIDATES + 1);
    let mut push = |value: f64, angles: Vec<f64>| {
        if top.len() < REFINE_CANDIDATES || value > top[top.len() - 1].0 {
            top.push((value, angles));
            top.sort_by(|a, b| b.0.total_cmp(&a.0));
            top.truncate(REFINE_CANDIDATES);
        }
    };
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    for &idx in order.iter().take(REFINE_CANDIDATES) {
        push(values[idx], angles_of(idx));
    }
    for angles in extra {
        let v = f(&angles)?;
        push(v, angles);
    }

    let refined: Vec<(f64, Vec<f64>)> = top
        .into_par_iter()
        .map(|(mut value, mut point)| {
            for _ in 0..MAX_SWEEPS {
                let before = value;
                for i in 0..dim {
                    let centre = point[i];
                    let mut probe = point.clone();
                    let (t, v) = golden_max(
                        |t| {
                            probe[i] = t;
                            f(&probe)
                        },
                        centre - step,
                        centre + step,
                        refine_steps,
                    )?;
                    if v > value {
                        value = v;
                        point[i] = t;
                    }
                }
                if value - before <= 1e-15 * value.abs().max(1.0) {
                    break;
                }
            }
            Ok((value, point))
        })
        .collect::<Result<_>>()?;
    let mut best = refined[0].clone();
    for cand in refined.into_iter().skip(1) {
        if cand.0 > best.0 {
            best = cand;
        }
    }
    Ok(best)
}
