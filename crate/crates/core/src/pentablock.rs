//! The pentablock: points `(a, s, p)` with `(s, p)` in `G_2` and
//! `|a| < |1 - (s conj(beta) / 2) / (1 + sqrt(1 - |beta|^2))|`,
//! `beta = (s - conj(s) p) / (1 - |p|^2)`.

use serde::{Deserialize, Serialize};

use crate::domains::{
    gauge_bisection, member, member_closure, DomainHandle, GaugeResult, MemberStatus,
    MembershipResult, Method,
};
use crate::error::{Error, Result};
use crate::point::C64;

/// Band around `|a| = bound` reported as Boundary.
pub const PENTA_BAND: f64 = 1e-9;
/// `|p|` closer than this to 1 is a pole of `beta`.
pub const POLE_TOL: f64 = 1e-12;
/// Largest tolerated excess of `|beta|` over 1 for `(s, p)` in `G_2`.
const BETA_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PentaPoint {
    pub a: C64,
    pub s: C64,
    pub p: C64,
}

impl PentaPoint {
    pub fn new(a: C64, s: C64, p: C64) -> Self {
        PentaPoint { a, s, p }
    }

    pub fn from_slice(v: &[C64]) -> Result<Self> {
        match v {
            [a, s, p] => Ok(PentaPoint::new(*a, *s, *p)),
            _ => Err(Error::InvalidArgument(format!(
                "a pentablock point has 3 coordinates, got {}",
                v.len()
            ))),
        }
    }

    pub fn to_vec(self) -> Vec<C64> {
        vec![self.a, self.s, self.p]
    }
}

/// `(s - conj(s) p) / (1 - |p|^2)`.
pub fn beta(s: C64, p: C64) -> Result<C64> {
    let den = 1.0 - p.norm_sqr();
    if (p.norm() - 1.0).abs() < POLE_TOL {
        return Err(Error::InvalidArgument(format!(
            "|p| = {} is a pole of beta",
            p.norm()
        )));
    }
    Ok((s - s.conj() * p) / den)
}

/// `|1 - (s conj(beta) / 2) / (1 + sqrt(1 - |beta|^2))|`.
pub fn a_bound(s: C64, p: C64) -> Result<f64> {
    let b = beta(s, p)?;
    let mut slack = 1.0 - b.norm_sqr();
    if slack < 0.0 {
        if b.norm() > 1.0 + BETA_SLACK {
            return Err(Error::InconsistentState(format!(
                "|beta| = {} exceeds 1 for (s, p) = ({s}, {p})",
                b.norm()
            )));
        }
        slack = 0.0;
    }
    Ok((C64::new(1.0, 0.0) - (s * b.conj() / 2.0) / (1.0 + slack.sqrt())).norm())
}

fn g2() -> DomainHandle {
    DomainHandle::symmetrized(2).expect("fixed blocks")
}

fn result(status: MemberStatus, margin: Option<f64>) -> MembershipResult {
    MembershipResult {
        status,
        method: Method::Roots,
        margin,
        witness: None,
    }
}

/// Membership in the open pentablock. The margin is `bound - |a|` when
/// `(s, p)` lies in `G_2`, otherwise the `G_2` margin.
pub fn member_penta(pt: &PentaPoint) -> Result<MembershipResult> {
    let base = member(&g2(), &[pt.s, pt.p])?;
    if base.status != MemberStatus::Inside {
        return Ok(base);
    }
    let bound = a_bound(pt.s, pt.p)?;
    let margin = bound - pt.a.norm();
    let status = if margin > PENTA_BAND {
        MemberStatus::Inside
    } else if margin >= -PENTA_BAND {
        MemberStatus::Boundary
    } else {
        MemberStatus::Outside
    };
    Ok(result(status, Some(margin)))
}

/// Membership in the closure: `(s, p)` in the closure of `G_2` and
/// `|a| <= bound`. Inside means "in the closure".
pub fn member_penta_closure(pt: &PentaPoint) -> Result<MembershipResult> {
    let base = member_closure(&g2(), &[pt.s, pt.p])?;
    if base.status != MemberStatus::Inside {
        return Ok(base);
    }
    if (pt.p.norm() - 1.0).abs() < POLE_TOL {
        // beta degenerates on the part of the boundary with |p| = 1.
        return Ok(result(MemberStatus::Undetermined, None));
    }
    let margin = a_bound(pt.s, pt.p)? - pt.a.norm();
    let status = if margin >= -PENTA_BAND {
        MemberStatus::Inside
    } else {
        MemberStatus::Outside
    };
    Ok(result(status, Some(margin)))
}

/// `(lambda^k a, lambda s, lambda^2 p)`.
pub fn penta_act(pt: &PentaPoint, k: u32, lambda: C64) -> PentaPoint {
    PentaPoint::new(lambda.powu(k) * pt.a, lambda * pt.s, lambda * lambda * pt.p)
}

/// Minkowski functional for the weights `(k, 1, 2)`, `k >= 1`.
pub fn penta_minkowski(pt: &PentaPoint, k: u32, tol: f64) -> Result<GaugeResult> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "the a-weight k must be at least 1".into(),
        ));
    }
    if pt.to_vec().iter().all(|v| *v == C64::new(0.0, 0.0)) {
        return Ok(GaugeResult {
            value: 0.0,
            widened: false,
            evaluations: 0,
        });
    }
    gauge_bisection(
        |lambda| Ok(member_penta(&penta_act(pt, k, C64::new(lambda, 0.0)))?.status),
        tol,
    )
}

/// `(s, p) -> (0, s, p)`. With `verify`, `(s, p)` must test Inside `G_2`.
pub fn penta_theta(s: C64, p: C64, verify: bool) -> Result<PentaPoint> {
    if verify && !member(&g2(), &[s, p])?.is_inside() {
        return Err(Error::InvalidArgument("(s, p) is not in G_2".into()));
    }
    Ok(PentaPoint::new(C64::new(0.0, 0.0), s, p))
}

/// `(a, s, p) -> (s, p)`. With `verify`, the point must test Inside.
pub fn penta_iota(pt: &PentaPoint, verify: bool) -> Result<(C64, C64)> {
    if verify && !member_penta(pt)?.is_inside() {
        return Err(Error::InvalidArgument(
            "the point is not in the pentablock".into(),
        ));
    }
    Ok((pt.s, pt.p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::sample_members;
    use crate::seed::{task_rng, uniform_disc};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pt(a: f64, s: f64, p: f64) -> PentaPoint {
        PentaPoint::new(c(a, 0.0), c(s, 0.0), c(p, 0.0))
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta(c(0.0, 0.0), c(0.3, 0.2)).unwrap(), c(0.0, 0.0));
        assert_eq!(beta(c(0.4, -0.1), c(0.0, 0.0)).unwrap(), c(0.4, -0.1));
        assert!((beta(c(1.0, 0.0), c(0.5, 0.0)).unwrap() - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(beta(c(1.0, 0.0), c(0.0, 1.0)).is_err());
    }

    #[test]
    fn membership_examples() {
        assert_eq!(
            member_penta(&pt(0.0, 0.0, 0.0)).unwrap().status,
            MemberStatus::Inside
        );
        assert_eq!(
            member_penta(&pt(0.999, 0.0, 0.0)).unwrap().status,
            MemberStatus::Inside
        );
        assert_eq!(
            member_penta(&pt(1.0, 0.0, 0.0)).unwrap().status,
            MemberStatus::Boundary
        );
        assert_eq!(
            member_penta(&pt(0.0, 0.8, 0.15)).unwrap().status,
            MemberStatus::Inside
        );
        assert_eq!(
            member_penta(&pt(0.0, 2.5, 1.5)).unwrap().status,
            MemberStatus::Outside
        );
    }

    #[test]
    fn closure_examples() {
        assert_eq!(
            member_penta_closure(&pt(0.5, 0.1, 0.0)).unwrap().status,
            MemberStatus::Inside
        );
        assert_eq!(
            member_penta_closure(&pt(1.0, 0.0, 0.0)).unwrap().status,
            MemberStatus::Inside
        );
        assert_ne!(
            member_penta(&pt(1.0, 0.0, 0.0)).unwrap().status,
            MemberStatus::Inside
        );
        assert_eq!(
            member_penta_closure(&pt(2.0, 0.0, 0.0)).unwrap().status,
            MemberStatus::Outside
        );
        assert_eq!(
            member_penta_closure(&pt(0.0, 2.0, 1.0)).unwrap().status,
            MemberStatus::Undetermined
        );
    }

    #[test]
    fn minkowski_examples() {
        assert_eq!(
            penta_minkowski(&pt(0.0, 0.0, 0.0), 1, 1e-8).unwrap().value,
            0.0
        );
        let h = penta_minkowski(&pt(1.0, 0.0, 0.0), 1, 1e-8).unwrap();
        assert!((h.value - 1.0).abs() <= 1e-8, "{h:?}");
        assert!(penta_minkowski(&pt(1.0, 0.0, 0.0), 0, 1e-8).is_err());
        let x = pt(0.3, 0.5, -0.2);
        let tol = 1e-8;
        for k in 1..=3 {
            let lambda = c(0.3, -1.1);
            let hx = penta_minkowski(&x, k, tol).unwrap().value;
            let hy = penta_minkowski(&penta_act(&x, k, lambda), k, tol)
                .unwrap()
                .value;
            assert!(
                (hy - lambda.norm() * hx).abs() <= 2.0 * tol + 4.0 * PENTA_BAND,
                "k={k}"
            );
        }
    }

    #[test]
    fn retract_pair() {
        let t = penta_theta(c(0.8, 0.0), c(0.15, 0.0), true).unwrap();
        assert_eq!(t, pt(0.0, 0.8, 0.15));
        assert!(member_penta(&t).unwrap().is_inside());
        assert_eq!(penta_iota(&t, true).unwrap(), (c(0.8, 0.0), c(0.15, 0.0)));
        assert_eq!(
            penta_iota(&pt(0.7, 0.1, 0.0), false).unwrap(),
            (c(0.1, 0.0), c(0.0, 0.0))
        );
        assert!(penta_theta(c(3.0, 0.0), c(2.0, 0.0), true).is_err());
    }

    #[test]
    fn weighted_balancedness() {
        let mut rng = task_rng(51, 0);
        let sp = sample_members(&g2(), 52, 40, 0.95).unwrap();
        for k in 0..=3 {
            for x in &sp {
                let bound = a_bound(x[0], x[1]).unwrap();
                let a = uniform_disc(&mut rng, bound * 0.999);
                let point = PentaPoint::new(a, x[0], x[1]);
                assert!(member_penta(&point).unwrap().is_inside());
                for _ in 0..5 {
                    let lambda = uniform_disc(&mut rng, 1.0);
                    assert!(
                        member_penta(&penta_act(&point, k, lambda))
                            .unwrap()
                            .is_inside(),
                        "k={k}"
                    );
                    let fiber = PentaPoint::new(lambda * a, x[0], x[1]);
                    assert!(member_penta(&fiber).unwrap().is_inside());
                }
            }
        }
    }

    #[test]
    fn boundary_points_from_the_gauge() {
        let x = pt(0.2, 0.4, 0.1);
        let tol = 1e-10;
        let h = penta_minkowski(&x, 2, tol).unwrap().value;
        let b = penta_act(&x, 2, c(1.0 / h, 0.0));
        assert!((penta_minkowski(&b, 2, tol).unwrap().value - 1.0).abs() <= 1e-8);
        assert_eq!(
            member_penta_closure(&b).unwrap().status,
            MemberStatus::Inside
        );
        // The rescaled point sits within the band around the boundary.
        let res = member_penta(&b).unwrap();
        assert_ne!(res.status, MemberStatus::Outside);
        assert!(res.margin.unwrap().abs() <= 4.0 * PENTA_BAND, "{res:?}");
    }
}
