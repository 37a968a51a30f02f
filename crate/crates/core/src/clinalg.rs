//! Small dense complex linear algebra: determinants, principal minors over
//! the block index families, the minor-sum map, spectral radius and
//! operator norm.

use std::ops::{Index, IndexMut};

use itertools::Itertools;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cpoly::{roots_univariate, DEFAULT_RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::multiindex::{Exponent, MultiIndexTable, MAX_DIM};
use crate::point::{CPoint, C64};
use crate::seed::complex_gaussian;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument(
                "matrix must have at least one row".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not square ({n} rows)"
            )));
        }
        let data: Vec<C64> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(CMatrix { n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| C64::new(v, 0.0)).collect())
                .collect(),
        )
    }

    /// Matrix with independent standard complex Gaussian entries.
    pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        CMatrix {
            n,
            data: (0..n * n).map(|_| complex_gaussian(rng)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.n).map(<[C64]>::to_vec).collect()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn scaled(&self, lambda: C64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * lambda).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &CMatrix) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// `diag(d) * self`.
    pub fn left_diag_mul(&self, d: &[C64]) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] *= d[i];
            }
        }
        out
    }

    /// `self * diag(d)`.
    pub fn right_diag_mul(&self, d: &[C64]) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] *= d[j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Principal submatrix on the given (zero-based, increasing) indices.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        let mut out = Self::zeros(k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out.data[a * k + b] = self.data[i * self.n + j];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<C64>>::deserialize(deserializer)?;
        CMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(a: &CMatrix) -> C64 {
    let n = a.n;
    let mut m = a.data.clone();
    let mut result = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].norm().total_cmp(&m[j * n + col].norm()))
            .unwrap();
        let pv = m[pivot * n + col];
        if pv == C64::new(0.0, 0.0) {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
            }
            result = -result;
        }
        result *= pv;
        for i in col + 1..n {
            let f = m[i * n + col] / pv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in col + 1..n {
                let v = m[col * n + j];
                m[i * n + j] -= f * v;
            }
        }
    }
    result
}

/// Index sets `I` (zero-based, increasing) whose principal minors feed the
/// component of the minor-sum map attached to `alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorFamily {
    pub alpha: Vec<u8>,
    pub index_sets: Vec<Vec<usize>>,
}

fn family_for(alpha: &Exponent, blocks: &[usize], offsets: &[usize]) -> MinorFamily {
    let per_block: Vec<Vec<Vec<usize>>> = alpha
        .iter()
        .zip(blocks)
        .zip(offsets)
        .map(|((&a, &r), &off)| (off..off + r).combinations(a as usize).collect())
        .collect();
    let index_sets = per_block
        .into_iter()
        .multi_cartesian_product()
        .map(|parts| parts.concat())
        .collect();
    MinorFamily {
        alpha: alpha.to_vec(),
        index_sets,
    }
}

/// For each exponent of the table, the index sets choosing exactly
/// `alpha_k` indices from the range of block `k`.
pub fn minor_families(table: &MultiIndexTable) -> Vec<MinorFamily> {
    let offsets = table.block_offsets();
    table
        .alphas()
        .iter()
        .map(|a| family_for(a, table.blocks(), &offsets))
        .collect()
}

fn check_dim(table: &MultiIndexTable, a: &CMatrix) -> Result<()> {
    if a.n != table.n() {
        return Err(Error::InvalidArgument(format!(
            "matrix dimension {} does not match n = {}",
            a.n,
            table.n()
        )));
    }
    Ok(())
}

/// Component `j` is the sum of the principal minors of `a` over the family
/// of `alpha^j`.
pub fn pi_map(table: &MultiIndexTable, a: &CMatrix) -> Result<CPoint> {
    check_dim(table, a)?;
    Ok(minor_families(table)
        .par_iter()
        .map(|f| f.index_sets.iter().map(|idx| det(&a.principal(idx))).sum())
        .collect::<Vec<C64>>()
        .into())
}

/// `1 + sum_I (-1)^{|I|} det(A_I) z_I` over all nonempty index sets.
pub fn det_expansion(a: &CMatrix, z: &[C64]) -> Result<C64> {
    let n = a.n;
    if z.len() != n {
        return Err(Error::InvalidArgument(format!(
            "argument has length {}, matrix dimension is {n}",
            z.len()
        )));
    }
    if n > MAX_DIM {
        return Err(Error::Budget(format!(
            "minor enumeration capped at n = {MAX_DIM}"
        )));
    }
    let mut total = C64::new(1.0, 0.0);
    let mut idx = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        idx.clear();
        idx.extend((0..n).filter(|i| mask & (1 << i) != 0));
        let zi: C64 = idx.iter().map(|&i| z[i]).product();
        let sign = if idx.len() % 2 == 0 { 1.0 } else { -1.0 };
        total += det(&a.principal(&idx)) * zi * sign;
    }
    Ok(total)
}

/// Coefficients (ascending) of `det(t I - A)` by the Faddeev-LeVerrier
/// recursion.
pub fn characteristic_polynomial(a: &CMatrix) -> Vec<C64> {
    let n = a.n;
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[n] = C64::new(1.0, 0.0);
    let mut m = CMatrix::zeros(n);
    for k in 1..=n {
        let mut next = a.mul(&m);
        for i in 0..n {
            next[(i, i)] += c[n - k + 1];
        }
        m = next;
        c[n - k] = -a.mul(&m).trace() / k as f64;
    }
    c
}

/// Largest eigenvalue modulus, from the roots of the characteristic
/// polynomial of `A / ||A||_F`.
pub fn spectral_radius(a: &CMatrix) -> Result<f64> {
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let cp = characteristic_polynomial(&a.scaled(C64::new(1.0 / scale, 0.0)));
    let roots = roots_univariate(&cp, DEFAULT_RESIDUAL_TOL)?;
    Ok(scale * roots.iter().map(|r| r.norm()).fold(0.0, f64::max))
}

/// Default relative accuracy for [`operator_norm`].
pub const DEFAULT_NORM_TOL: f64 = 1e-10;

/// Largest singular value by power iteration on `A^H A`.
pub fn operator_norm(a: &CMatrix, tol: f64) -> f64 {
    let n = a.n;
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return 0.0;
    }
    let ah = a.adjoint();
    // A fixed start with no special alignment; not orthogonal to generic
    // singular vectors.
    let mut v: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(1.0 + 0.1 * k as f64, 0.7 * (k * k) as f64 + 0.3))
        .collect();
    let mut estimate = 0.0;
    for _ in 0..20_000 {
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let w = ah.apply(&a.apply(&v));
        // Rayleigh quotient v^H A^H A v = |A v|^2 with |v| = 1.
        let next = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (vi.conj() * wi).re)
            .sum::<f64>()
            .max(0.0);
        v = w;
        if (next - estimate).abs() <= tol * next {
            estimate = next;
            break;
        }
        estimate = next;
    }
    estimate.sqrt()
}
