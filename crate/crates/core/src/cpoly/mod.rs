//! The polynomial engine.
//!
//! A point `x` of `C^N` defines
//! `R_x(z) = 1 + sum_j (-1)^{|alpha^j|} x_j z^{alpha^j}`, a polynomial in
//! `z in C^s`. The domain attached to a block structure is the set of `x` for
//! which `R_x` has no zero on the closed unit polydisc.

mod certify;
mod psi;
mod roots;

pub use certify::{
    certify_nonvanishing, certify_nonvanishing_with, polish_zero, slice_zero_search, CertStatus,
    CertifySettings, NonvanishingCertificate, DEFAULT_CELL_BUDGET, ZERO_TOL,
};
pub(crate) use psi::sup_psi_torus_eval;
pub use psi::{eval_psi, sup_psi_torus, PsiEvaluator, PsiValue, TorusSup, DEFAULT_TORUS_GRID};
pub use roots::{
    all_roots_outside_closed_disc, roots_univariate, DiscVerdict, DEFAULT_RESIDUAL_TOL,
};

use crate::error::Result;
use crate::multiindex::{Exponent, MultiIndexTable, SplitTable};
use crate::point::C64;

/// Sign `(-1)^d`.
pub(crate) fn parity_sign(d: u32) -> f64 {
    if d.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Evaluates a polynomial stored in mixed-radix order (first variable least
/// significant) by nested Horner steps, one block at a time.
pub(crate) fn horner_mixed(coeffs: &[C64], radices: &[usize], z: &[C64]) -> C64 {
    match radices.split_last() {
        None => coeffs[0],
        Some((&r, rest)) => {
            let chunk = coeffs.len() / r;
            let var = z[rest.len()];
            let mut acc = C64::new(0.0, 0.0);
            for a in (0..r).rev() {
                acc = acc * var + horner_mixed(&coeffs[a * chunk..(a + 1) * chunk], rest, z);
            }
            acc
        }
    }
}

/// `R_x` with its signed coefficients laid out in table order, constant first.
#[derive(Debug, Clone)]
pub struct RPoly {
    radices: Vec<usize>,
    exps: Vec<Exponent>,
    coeffs: Vec<C64>,
}

impl RPoly {
    pub fn new(table: &MultiIndexTable, x: &[C64]) -> Result<Self> {
        table.check_point(x)?;
        let mut coeffs = Vec::with_capacity(x.len() + 1);
        coeffs.push(C64::new(1.0, 0.0));
        coeffs.extend(
            x.iter()
                .zip(table.degrees())
                .map(|(&v, &d)| v * parity_sign(d)),
        );
        let mut exps = Vec::with_capacity(coeffs.len());
        exps.push(std::iter::repeat_n(0u8, table.s()).collect());
        exps.extend(table.alphas().iter().cloned());
        Ok(RPoly {
            radices: table.radices(),
            exps,
            coeffs,
        })
    }

    pub fn s(&self) -> usize {
        self.radices.len()
    }

    /// Signed coefficients, constant term first.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exps
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        horner_mixed(&self.coeffs, &self.radices, z)
    }

    fn powers(&self, z: &[C64]) -> Vec<Vec<C64>> {
        self.radices
            .iter()
            .zip(z)
            .map(|(&r, &v)| {
                let mut p = Vec::with_capacity(r);
                let mut acc = C64::new(1.0, 0.0);
                for _ in 0..r {
                    p.push(acc);
                    acc *= v;
                }
                p
            })
            .collect()
    }

    /// Partial derivatives `dR/dz_i`.
    pub fn gradient(&self, z: &[C64]) -> Vec<C64> {
        let pw = self.powers(z);
        let mut grad = vec![C64::new(0.0, 0.0); self.s()];
        for (c, e) in self.coeffs.iter().zip(&self.exps).skip(1) {
            for (i, g) in grad.iter_mut().enumerate() {
                let ai = e[i] as usize;
                if ai == 0 {
                    continue;
                }
                let mut term = *c * ai as f64 * pw[i][ai - 1];
                for (l, &al) in e.iter().enumerate() {
                    if l != i {
                        term *= pw[l][al as usize];
                    }
                }
                *g += term;
            }
        }
        grad
    }

    /// Bounds the part of `R(c + h)` beyond first order in `h`, for any
    /// center with `|c_i| = rho_i` and `|h_i| <= delta_i`.
    ///
    /// Uses the majorant `Q(w) = sum |coeff| w^alpha`: the bound is
    /// `Q(rho + delta) - Q(rho) - grad Q(rho) . delta`, plus a rounding guard.
    pub fn taylor_remainder_bound(&self, rho: &[f64], delta: &[f64]) -> f64 {
        let mut total = 0.0;
        let mut scale = 0.0;
        for (c, e) in self.coeffs.iter().zip(&self.exps).skip(1) {
            let m = c.norm();
            let degree: u32 = e.iter().map(|&a| a as u32).sum();
            if m == 0.0 || degree < 2 {
                continue;
            }
            let mut far = m;
            let mut near = m;
            for (i, &a) in e.iter().enumerate() {
                far *= (rho[i] + delta[i]).powi(a as i32);
                near *= rho[i].powi(a as i32);
            }
            let mut linear = 0.0;
            for (i, &ai) in e.iter().enumerate() {
                if ai == 0 {
                    continue;
                }
                let mut t = m * ai as f64 * rho[i].powi(ai as i32 - 1) * delta[i];
                for (l, &al) in e.iter().enumerate() {
                    if l != i {
                        t *= rho[l].powi(al as i32);
                    }
                }
                linear += t;
            }
            total += (far - near - linear).max(0.0);
            scale += far;
        }
        total + 16.0 * f64::EPSILON * scale
    }

    /// Upper bounds on `|dR/dz_i|` over the polydisc with per-variable radii
    /// `rho`.
    pub fn lipschitz_bounds(&self, rho: &[f64]) -> Vec<f64> {
        let mut bounds = vec![0.0; self.s()];
        for (c, e) in self.coeffs.iter().zip(&self.exps).skip(1) {
            let m = c.norm();
            if m == 0.0 {
                continue;
            }
            for (i, b) in bounds.iter_mut().enumerate() {
                let ai = e[i] as i32;
                if ai == 0 {
                    continue;
                }
                let mut term = m * ai as f64 * rho[i].powi(ai - 1);
                for (l, &al) in e.iter().enumerate() {
                    if l != i {
                        term *= rho[l].powi(al as i32);
                    }
                }
                *b += term;
            }
        }
        bounds
    }

    /// Coefficients of `R` as a polynomial in `z_i` alone, the other
    /// variables fixed at `z`.
    pub fn slice_coeffs(&self, z: &[C64], i: usize) -> Vec<C64> {
        let pw = self.powers(z);
        let mut out = vec![C64::new(0.0, 0.0); self.radices[i]];
        for (c, e) in self.coeffs.iter().zip(&self.exps) {
            let mut term = *c;
            for (l, &al) in e.iter().enumerate() {
                if l != i {
                    term *= pw[l][al as usize];
                }
            }
            out[e[i] as usize] += term;
        }
        out
    }

    /// Sum of the absolute values of all terms at `z`, the natural scale for
    /// rounding errors in [`eval`](Self::eval).
    pub fn magnitude(&self, z: &[C64]) -> f64 {
        let rho: Vec<f64> = z.iter().map(|v| v.norm()).collect();
        self.coeffs
            .iter()
            .zip(&self.exps)
            .map(|(c, e)| {
                c.norm()
                    * e.iter()
                        .zip(&rho)
                        .map(|(&a, r)| r.powi(a as i32))
                        .product::<f64>()
            })
            .sum()
    }
}

/// `R_x(z)`.
#[allow(non_snake_case)]
pub fn eval_R(table: &MultiIndexTable, x: &[C64], z: &[C64]) -> Result<C64> {
    table.check_argument(z)?;
    Ok(RPoly::new(table, x)?.eval(z))
}

/// `R_x(z)` computed through the split identity
/// `R_x(z) = R'_{x'}(z') + sum_k (-1)^{|beta^k|} (z'')^{beta^k} sum_j (-1)^{|(alpha^j)'|} x_{k(N'+1)+j} (z')^{(alpha^j)'}`.
pub fn eval_split(
    table: &MultiIndexTable,
    split: &SplitTable,
    x: &[C64],
    z: &[C64],
) -> Result<C64> {
    table.check_point(x)?;
    table.check_argument(z)?;
    if split.parent() != table {
        return Err(crate::Error::InvalidArgument(
            "split bookkeeping belongs to a different table".into(),
        ));
    }
    let prefix = split.prefix();
    let (x_prime, x_dprime) = split.split_point(x);
    let (z_prime, z_dprime) = z.split_at(split.s_prime());

    let r_prime = RPoly::new(prefix, x_prime)?.eval(z_prime);
    let radices = prefix.radices();
    let run = split.n_prime() + 1;
    let prefix_signs: Vec<f64> = std::iter::once(1.0)
        .chain(prefix.degrees().iter().map(|&d| parity_sign(d)))
        .collect();

    let mut total = r_prime;
    for (k, beta) in split.betas().iter().enumerate() {
        let chunk: Vec<C64> = x_dprime[k * run..(k + 1) * run]
            .iter()
            .zip(&prefix_signs)
            .map(|(&v, &sg)| v * sg)
            .collect();
        let inner = horner_mixed(&chunk, &radices, z_prime);
        let degree: u32 = beta.iter().map(|&b| b as u32).sum();
        let monomial: C64 = beta
            .iter()
            .zip(z_dprime)
            .map(|(&b, &v)| v.powu(b as u32))
            .product();
        total += inner * monomial * parity_sign(degree);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::{build_table, quasibalanced_act, split_table};
    use crate::seed::{gaussian_point, task_rng, uniform_disc, uniform_polydisc};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Term-by-term evaluation straight from the definition, as an oracle.
    fn eval_direct(table: &MultiIndexTable, x: &[C64], z: &[C64]) -> C64 {
        let mut acc = c(1.0, 0.0);
        for ((a, &d), &xj) in table.alphas().iter().zip(table.degrees()).zip(x) {
            let mono: C64 = a.iter().zip(z).map(|(&e, &v)| v.powu(e as u32)).product();
            acc += xj * mono * parity_sign(d);
        }
        acc
    }

    #[test]
    fn zero_point_gives_one() {
        let t = build_table(&[2, 1]).unwrap();
        let x = vec![c(0.0, 0.0); 5];
        assert_eq!(
            eval_R(&t, &x, &[c(0.3, 0.1), c(-2.0, 1.0)]).unwrap(),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn symmetrized_bidisc_boundary_zero() {
        let t = build_table(&[2]).unwrap();
        assert_eq!(
            eval_R(&t, &[c(2.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0)]).unwrap(),
            c(0.0, 0.0)
        );
    }

    #[test]
    fn fiber_free_point_ignores_last_variable() {
        let t = build_table(&[2, 1]).unwrap();
        let tp = build_table(&[2]).unwrap();
        let x = vec![
            c(0.4, 0.1),
            c(-0.2, 0.3),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ];
        let z1 = c(0.3, -0.7);
        let rp = eval_R(&tp, &x[..2], &[z1]).unwrap();
        for z2 in [c(0.0, 0.0), c(0.9, 0.1), c(-3.0, 2.0)] {
            assert!((eval_R(&t, &x, &[z1, z2]).unwrap() - rp).norm() < 1e-15);
        }
    }

    #[test]
    fn split_tetrablock_expansion() {
        let t = build_table(&[1, 1]).unwrap();
        let sp = split_table(&t, 1).unwrap();
        let x = [c(0.3, 0.2), c(-0.5, 0.1), c(0.25, -0.4)];
        let z = [c(0.6, -0.2), c(-0.1, 0.9)];
        let expected = (c(1.0, 0.0) - x[0] * z[0]) - z[1] * (x[1] - x[2] * z[0]);
        assert!((eval_split(&t, &sp, &x, &z).unwrap() - expected).norm() < 1e-15);
        assert!((eval_R(&t, &x, &z).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn split_mu_quotient_expansion() {
        let t = build_table(&[2, 1]).unwrap();
        let sp = split_table(&t, 1).unwrap();
        let x: Vec<C64> = (0..5)
            .map(|k| c(0.1 * k as f64 + 0.05, -0.07 * k as f64))
            .collect();
        let z = [c(0.6, -0.2), c(-0.4, 0.5)];
        let (z1, z2) = (z[0], z[1]);
        let expected =
            (c(1.0, 0.0) - x[0] * z1 + x[1] * z1 * z1) - z2 * (x[2] - x[3] * z1 + x[4] * z1 * z1);
        assert!((eval_split(&t, &sp, &x, &z).unwrap() - expected).norm() < 1e-15);
        assert!((eval_R(&t, &x, &z).unwrap() - expected).norm() < 1e-15);
        // z'' = 0 leaves only R'.
        let zp = [z1, c(0.0, 0.0)];
        let rp = eval_R(&build_table(&[2]).unwrap(), &x[..2], &[z1]).unwrap();
        assert!((eval_split(&t, &sp, &x, &zp).unwrap() - rp).norm() < 1e-15);
    }

    #[test]
    fn dimension_errors() {
        let t = build_table(&[1, 1]).unwrap();
        assert!(eval_R(&t, &[c(0.0, 0.0); 2], &[c(0.0, 0.0); 2]).is_err());
        assert!(eval_R(&t, &[c(0.0, 0.0); 3], &[c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn horner_matches_direct_and_split() {
        let tables = [
            vec![3],
            vec![1, 1],
            vec![2, 1],
            vec![1, 1, 1],
            vec![2, 2],
            vec![1, 2, 1],
        ];
        for (ti, blocks) in tables.iter().enumerate() {
            let t = build_table(blocks).unwrap();
            for trial in 0..2000u64 {
                let mut rng = task_rng(ti as u64, trial);
                let x = gaussian_point(&mut rng, t.big_n());
                let z = uniform_polydisc(&mut rng, t.s(), 1.2);
                let poly = RPoly::new(&t, &x).unwrap();
                let v = poly.eval(&z);
                let scale = poly.magnitude(&z);
                assert!((v - eval_direct(&t, &x, &z)).norm() <= 1e-12 * scale);
                for sp in 1..t.s() {
                    let split = split_table(&t, sp).unwrap();
                    let w = eval_split(&t, &split, &x, &z).unwrap();
                    assert!((v - w).norm() <= 1e-12 * scale, "{blocks:?} s'={sp}");
                }
            }
        }
    }

    #[test]
    fn quasibalanced_identity() {
        let t = build_table(&[2, 1]).unwrap();
        let mut rng = task_rng(99, 0);
        for _ in 0..1000 {
            let x = gaussian_point(&mut rng, t.big_n());
            let z = uniform_polydisc(&mut rng, 2, 1.0);
            let lambda = uniform_disc(&mut rng, 1.0);
            let acted = quasibalanced_act(t.degrees(), lambda, &x).unwrap();
            let lz: Vec<C64> = z.iter().map(|v| v * lambda).collect();
            let lhs = eval_R(&t, &acted, &z).unwrap();
            let rhs = eval_R(&t, &x, &lz).unwrap();
            let scale = RPoly::new(&t, &x).unwrap().magnitude(&lz);
            assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let t = build_table(&[2, 1]).unwrap();
        let mut rng = task_rng(5, 0);
        let x = gaussian_point(&mut rng, t.big_n());
        let poly = RPoly::new(&t, &x).unwrap();
        let z = uniform_polydisc(&mut rng, 2, 1.0);
        let g = poly.gradient(&z);
        let h = 1e-6;
        for i in 0..2 {
            let mut zp = z.0.clone();
            let mut zm = z.0.clone();
            zp[i] += h;
            zm[i] -= h;
            let fd = (poly.eval(&zp) - poly.eval(&zm)) / (2.0 * h);
            assert!((fd - g[i]).norm() < 1e-7);
        }
        let bounds = poly.lipschitz_bounds(&[1.0, 1.0]);
        assert!(g[0].norm() <= bounds[0] && g[1].norm() <= bounds[1]);
    }

    #[test]
    fn slice_coefficients_reconstruct_value() {
        let t = build_table(&[1, 2, 1]).unwrap();
        let mut rng = task_rng(6, 0);
        let x = gaussian_point(&mut rng, t.big_n());
        let poly = RPoly::new(&t, &x).unwrap();
        let z = uniform_polydisc(&mut rng, 3, 1.0);
        for i in 0..3 {
            let sc = poly.slice_coeffs(&z, i);
            let v: C64 = sc.iter().rev().fold(c(0.0, 0.0), |acc, &k| acc * z[i] + k);
            assert!((v - poly.eval(&z)).norm() < 1e-12);
        }
    }
}
