//! Numerical toolkit for the domains cut out by structured singular values:
//! the polynomial `R_x`, membership and certification, `mu_E` bounds, the
//! pentablock, and experiment drivers.

pub mod clinalg;
pub mod cpoly;
pub mod domains;
pub mod error;
pub mod multiindex;
mod optimize;
pub mod pentablock;
pub mod point;
pub mod prober;
pub mod seed;
pub mod selftest;
pub mod ssv;

pub use clinalg::CMatrix;
pub use error::{Error, Result};
pub use multiindex::{build_table, split_table, MultiIndexTable, SplitTable};
pub use point::{CPoint, C64};
