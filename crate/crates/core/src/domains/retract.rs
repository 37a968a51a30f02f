//! The retraction pair `theta: x' -> (x', 0)`, `iota: x -> x'` onto the
//! domain of the first `s'` blocks, and the fibers over it.

use super::{member, DomainHandle, MemberStatus, MembershipResult};
use crate::error::{Error, Result};
use crate::multiindex::SplitTable;
use crate::point::{CPoint, C64};

fn check_split(handle: &DomainHandle, split: &SplitTable) -> Result<()> {
    if split.parent() != handle.table() {
        return Err(Error::InvalidArgument(
            "split bookkeeping belongs to a different table".into(),
        ));
    }
    Ok(())
}

fn require_inside(handle: &DomainHandle, x: &[C64], what: &str) -> Result<()> {
    let res = member(handle, x)?;
    if res.status != MemberStatus::Inside {
        return Err(Error::InvalidArgument(format!(
            "{what} is not a member (status {:?})",
            res.status
        )));
    }
    Ok(())
}

/// `(x', 0, ..., 0)`. With `verify`, `x'` must test Inside the prefix domain.
pub fn retract_theta(
    handle: &DomainHandle,
    split: &SplitTable,
    x_prime: &[C64],
    verify: bool,
) -> Result<CPoint> {
    check_split(handle, split)?;
    split.prefix().check_point(x_prime)?;
    if verify {
        require_inside(&handle.prefix_handle(split.s_prime())?, x_prime, "x'")?;
    }
    let mut out = x_prime.to_vec();
    out.resize(handle.dim(), C64::new(0.0, 0.0));
    Ok(CPoint(out))
}

/// The first `N'` coordinates. With `verify`, `x` must test Inside.
pub fn retract_iota(
    handle: &DomainHandle,
    split: &SplitTable,
    x: &[C64],
    verify: bool,
) -> Result<CPoint> {
    check_split(handle, split)?;
    handle.table().check_point(x)?;
    if verify {
        require_inside(handle, x, "x")?;
    }
    Ok(CPoint(split.split_point(x).0.to_vec()))
}

/// `(s, p) -> (s/2, s/2, p)` from `G_2` into the tetrablock.
pub fn tetrablock_theta(sp: &[C64]) -> Result<CPoint> {
    match sp {
        [s, p] => Ok(CPoint(vec![s / 2.0, s / 2.0, *p])),
        _ => Err(Error::InvalidArgument(format!(
            "expected (s, p), got {} values",
            sp.len()
        ))),
    }
}

/// `(x_1, x_2, x_3) -> (x_1 + x_2, x_3)` from the tetrablock onto `G_2`.
pub fn tetrablock_iota(x: &[C64]) -> Result<CPoint> {
    match x {
        [a, b, c] => Ok(CPoint(vec![a + b, *c])),
        _ => Err(Error::InvalidArgument(format!(
            "expected 3 coordinates, got {}",
            x.len()
        ))),
    }
}

/// Membership of `(x', x'')`, i.e. of `x''` in the fiber over `x'`.
pub fn fiber_member(
    handle: &DomainHandle,
    split: &SplitTable,
    x_prime: &[C64],
    x_dprime: &[C64],
) -> Result<MembershipResult> {
    check_split(handle, split)?;
    split.prefix().check_point(x_prime)?;
    if x_dprime.len() != split.n_dprime() {
        return Err(Error::InvalidArgument(format!(
            "fiber point needs {} coordinates, got {}",
            split.n_dprime(),
            x_dprime.len()
        )));
    }
    let x: Vec<C64> = x_prime.iter().chain(x_dprime).copied().collect();
    member(handle, &x)
}
