//! Univariate complex roots by simultaneous (Aberth) iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::C64;

/// Iteration cap for the simultaneous iteration.
pub const MAX_ITERATIONS: usize = 200;

/// Residual tolerance used when a caller has no opinion.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;

/// Value and derivative of `sum coeffs[k] z^k`.
fn horner_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn magnitude_sum(coeffs: &[C64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// All roots of `coeffs[0] + coeffs[1] z + ... + coeffs[d] z^d`, with
/// multiplicity.
///
/// Trailing zero coefficients are trimmed; a nonzero constant yields no roots.
/// Every returned root satisfies
/// `|p(root)| <= tol * max(1 + max_k |c_k|, sum_k |c_k| |root|^k)`.
pub fn roots_univariate(coeffs: &[C64], tol: f64) -> Result<Vec<C64>> {
    let degree_plus_one = coeffs
        .iter()
        .rposition(|c| *c != C64::new(0.0, 0.0))
        .map(|i| i + 1)
        .ok_or_else(|| Error::InvalidArgument("zero polynomial has no finite root set".into()))?;
    let coeffs = &coeffs[..degree_plus_one];

    // Exact zero roots.
    let zero_roots = coeffs
        .iter()
        .take_while(|c| **c == C64::new(0.0, 0.0))
        .count();
    let mut roots = vec![C64::new(0.0, 0.0); zero_roots];
    let p = &coeffs[zero_roots..];
    let d = p.len() - 1;
    match d {
        0 => return Ok(roots),
        1 => {
            roots.push(-p[0] / p[1]);
            return Ok(roots);
        }
        _ => {}
    }

    let lead = p[d];
    let monic: Vec<C64> = p.iter().map(|c| c / lead).collect();
    let mut radius = monic[0].norm().powf(1.0 / d as f64);
    if !radius.is_finite() || radius == 0.0 {
        radius = 1.0;
    }
    let mut z: Vec<C64> = (0..d)
        .map(|k| C64::from_polar(radius, 0.7 + std::f64::consts::TAU * k as f64 / d as f64))
        .collect();

    for _ in 0..MAX_ITERATIONS {
        let mut max_step = 0.0f64;
        for k in 0..d {
            let (pv, dpv) = horner_with_derivative(&monic, z[k]);
            if pv == C64::new(0.0, 0.0) {
                continue;
            }
            let ratio = pv / dpv;
            let repulsion: C64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| {
                    let diff = z[k] - z[j];
                    if diff == C64::new(0.0, 0.0) {
                        C64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let denom = C64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 || !denom.is_finite() {
                ratio
            } else {
                ratio / denom
            };
            if !step.is_finite() {
                continue;
            }
            z[k] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
        }
        if max_step <= 4.0 * f64::EPSILON {
            break;
        }
    }

    let scale = 1.0 + monic.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for &root in &z {
        let (pv, _) = horner_with_derivative(&monic, root);
        let bound = tol * scale.max(magnitude_sum(&monic, root.norm()));
        if !(pv.norm() <= bound) {
            return Err(Error::NumericFailure(format!(
                "root iteration did not converge: residual {:.3e} at {root}",
                pv.norm()
            )));
        }
    }
    roots.extend(z);
    Ok(roots)
}

/// Outcome of testing whether a polynomial has all its roots off the closed
/// unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DiscVerdict {
    /// Every root has modulus above `1 + tol`.
    Yes { min_modulus: f64 },
    /// Some root has modulus below `1 - tol`.
    No { root: C64 },
    /// The smallest root modulus lies in `[1 - tol, 1 + tol]`.
    Marginal { min_modulus: f64 },
}

/// Classifies `R(z) = sum coeffs[k] z^k` (constant term normally 1) by the
/// smallest modulus of its roots.
///
/// Works on the reversed polynomial `z^d R(1/z)`, whose roots are the
/// reciprocals and are bounded when `R` has a small leading coefficient.
pub fn all_roots_outside_closed_disc(coeffs: &[C64], tol: f64) -> Result<DiscVerdict> {
    let Some(top) = coeffs.iter().rposition(|c| *c != C64::new(0.0, 0.0)) else {
        return Err(Error::InvalidArgument("zero polynomial".into()));
    };
    if coeffs[0] == C64::new(0.0, 0.0) {
        return Ok(DiscVerdict::No {
            root: C64::new(0.0, 0.0),
        });
    }
    if top == 0 {
        return Ok(DiscVerdict::Yes {
            min_modulus: f64::INFINITY,
        });
    }
    let reversed: Vec<C64> = coeffs[..=top].iter().rev().copied().collect();
    let inverse_roots = roots_univariate(&reversed, DEFAULT_RESIDUAL_TOL)?;
    let largest = inverse_roots
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(C64::new(0.0, 0.0));
    let min_modulus = if largest.norm() == 0.0 {
        f64::INFINITY
    } else {
        1.0 / largest.norm()
    };
    Ok(if min_modulus > 1.0 + tol {
        DiscVerdict::Yes { min_modulus }
    } else if min_modulus < 1.0 - tol {
        DiscVerdict::No {
            root: largest.inv(),
        }
    } else {
        DiscVerdict::Marginal { min_modulus }
    })
}
