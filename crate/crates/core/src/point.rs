use std::ops::{Deref, DerefMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// A point of `C^N` (or an argument `z` of `C^s`).
///
/// Serializes as a JSON array of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CPoint(pub Vec<C64>);

impl CPoint {
    pub fn zeros(len: usize) -> Self {
        CPoint(vec![C64::new(0.0, 0.0); len])
    }

    pub fn from_real(values: &[f64]) -> Self {
        CPoint(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// Plain scalar multiple `t * x` (not the quasibalanced action).
    pub fn scaled(&self, t: C64) -> Self {
        CPoint(self.0.iter().map(|v| v * t).collect())
    }

    /// Largest coordinate modulus.
    pub fn max_modulus(&self) -> f64 {
        self.0.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn concat(&self, other: &CPoint) -> CPoint {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        CPoint(v)
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }
}

impl Deref for CPoint {
    type Target = [C64];

    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl DerefMut for CPoint {
    fn deref_mut(&mut self) -> &mut [C64] {
        &mut self.0
    }
}

impl From<Vec<C64>> for CPoint {
    fn from(v: Vec<C64>) -> Self {
        CPoint(v)
    }
}

impl FromIterator<C64> for CPoint {
    fn from_iter<I: IntoIterator<Item = C64>>(iter: I) -> Self {
        CPoint(iter.into_iter().collect())
    }
}
