//! Randomized geometric audits over membership oracles: starlikeness
//! witnesses, line-section topology, balanced-action spot checks and
//! separating-functional checks.

mod raster;

pub use raster::{
    disconnection_search, line_section_scan, raster_topology, DisconnectionReport, SectionMap,
    SectionSummary, Window, MAX_RESOLUTION,
};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clinalg::CMatrix;
use crate::domains::{
    gauge_bisection, member, member_with, sample_member_rng, sample_members, AffineFunctional,
    DomainHandle, MemberStatus, Method,
};
use crate::error::{Error, Result};
use crate::multiindex::{quasibalanced_act, MultiIndexTable};
use crate::pentablock::{a_bound, member_penta, PentaPoint};
use crate::point::{CPoint, C64};
use crate::seed::{gaussian_point, task_rng, uniform_disc};
use crate::ssv::{psh_circle_test, PshOutcome};

/// A domain queried only through membership.
pub trait MembershipOracle: Sync {
    fn dim(&self) -> usize;
    /// Weights of the quasibalanced action preserving the domain.
    fn weights(&self) -> Vec<u32>;
    fn member(&self, x: &[C64]) -> Result<MemberStatus>;
    /// Status from an independent method with tighter tolerances, if any.
    fn member_alternate(&self, _x: &[C64]) -> Result<Option<MemberStatus>> {
        Ok(None)
    }
    /// A random member.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<CPoint>;
}

/// `x = (e_1(l), ..., e_n(l))` for `l` uniform in the unit polydisc.
fn symmetrized_roots_sample(n: usize, rng: &mut ChaCha8Rng) -> CPoint {
    // Coefficients of prod (1 - l_i w) = 1 - e_1 w + e_2 w^2 - ...
    let mut poly = vec![C64::new(1.0, 0.0)];
    for _ in 0..n {
        let l = uniform_disc(rng, 1.0);
        let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
        for (k, &c) in poly.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= c * l;
        }
        poly = next;
    }
    poly[1..]
        .iter()
        .enumerate()
        .map(|(j, &c)| if j % 2 == 0 { -c } else { c })
        .collect()
}

impl MembershipOracle for DomainHandle {
    fn dim(&self) -> usize {
        DomainHandle::dim(self)
    }

    fn weights(&self) -> Vec<u32> {
        DomainHandle::weights(self).to_vec()
    }

    fn member(&self, x: &[C64]) -> Result<MemberStatus> {
        Ok(member(self, x)?.status)
    }

    fn member_alternate(&self, x: &[C64]) -> Result<Option<MemberStatus>> {
        if self.default_method() == Method::CertifiedGrid {
            return Ok(None);
        }
        let mut settings = *self.settings();
        settings.zero_tol /= 10.0;
        settings.band /= 10.0;
        if self.table().s() == 1 {
            settings.depth_cap += 6;
        }
        let strict = self.clone().with_settings(settings);
        Ok(Some(member_with(&strict, x, Method::CertifiedGrid)?.status))
    }

    /// One block: symmetrized uniform points of the polydisc. Otherwise
    /// `pi_E(A)` with `||A|| = 0.95`.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<CPoint> {
        if self.table().s() == 1 {
            Ok(symmetrized_roots_sample(self.table().n(), rng))
        } else {
            sample_member_rng(self, rng, 0.95)
        }
    }
}

/// The open Euclidean ball, a convex test double.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanBall {
    pub dim: usize,
    pub radius: f64,
}

impl MembershipOracle for EuclideanBall {
    fn dim(&self) -> usize {
        self.dim
    }

    fn weights(&self) -> Vec<u32> {
        vec![1; self.dim]
    }

    fn member(&self, x: &[C64]) -> Result<MemberStatus> {
        let r = CPoint(x.to_vec()).norm();
        Ok(if r < self.radius - 1e-12 {
            MemberStatus::Inside
        } else if r > self.radius + 1e-12 {
            MemberStatus::Outside
        } else {
            MemberStatus::Boundary
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<CPoint> {
        let g = gaussian_point(rng, self.dim);
        let r = self.radius * rng.gen::<f64>().powf(1.0 / (2 * self.dim) as f64) / g.norm();
        Ok(g.scaled(C64::new(r, 0.0)))
    }
}

/// The pentablock with the action weights `(k, 1, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PentablockOracle {
    pub k: u32,
}

impl MembershipOracle for PentablockOracle {
    fn dim(&self) -> usize {
        3
    }

    fn weights(&self) -> Vec<u32> {
        vec![self.k, 1, 2]
    }

    fn member(&self, x: &[C64]) -> Result<MemberStatus> {
        Ok(member_penta(&PentaPoint::from_slice(x)?)?.status)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<CPoint> {
        let sp = symmetrized_roots_sample(2, rng);
        let a = uniform_disc(rng, a_bound(sp[0], sp[1])?);
        Ok(CPoint(vec![a, sp[0], sp[1]]))
    }
}

/// Minkowski functional of an oracle for its own weights.
pub fn oracle_gauge<O: MembershipOracle + ?Sized>(oracle: &O, x: &[C64], tol: f64) -> Result<f64> {
    if x.iter().all(|v| *v == C64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    let w = oracle.weights();
    Ok(gauge_bisection(
        |l| oracle.member(&quasibalanced_act(&w, C64::new(l, 0.0), x)?),
        tol,
    )?
    .value)
}

/// A member `x` and `t in (0, 1)` with `t x` (plain scaling) outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarlikeWitness {
    pub x: CPoint,
    pub t: f64,
    /// Minkowski functional of `x` after rescaling.
    pub gauge: f64,
    /// Whether an independent method confirmed both statuses; false when
    /// none exists or it was inconclusive.
    pub alternate_verified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarlikeSettings {
    /// Target gauge range for the rescaled samples.
    pub gauge_range: (f64, f64),
    /// Scalings `t = i / t_grid`, `i = 1, ..., t_grid - 1`.
    pub t_grid: usize,
    pub gauge_tol: f64,
}

impl Default for StarlikeSettings {
    fn default() -> Self {
        StarlikeSettings {
            gauge_range: (0.9, 0.99),
            t_grid: 32,
            gauge_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarlikeSearch {
    pub witness: Option<StarlikeWitness>,
    pub samples_tried: usize,
    /// Candidates dropped because an independent method contradicted them.
    pub rejected: usize,
}

const SEARCH_CHUNK: usize = 256;

enum Probe {
    Nothing,
    Rejected,
    Found(StarlikeWitness),
}

fn verify_pair<O: MembershipOracle + ?Sized>(
    oracle: &O,
    x: &[C64],
    tx: &[C64],
) -> Result<Option<bool>> {
    if oracle.member(x)? != MemberStatus::Inside || oracle.member(tx)? != MemberStatus::Outside {
        return Ok(None);
    }
    use MemberStatus::*;
    match (oracle.member_alternate(x)?, oracle.member_alternate(tx)?) {
        (Some(Inside), Some(Outside)) => Ok(Some(true)),
        // A decisive contrary answer rejects; an inconclusive one does not.
        (Some(Outside | Boundary), _) | (_, Some(Inside | Boundary)) => Ok(None),
        _ => Ok(Some(false)),
    }
}

fn probe_sample<O: MembershipOracle + ?Sized>(
    oracle: &O,
    settings: &StarlikeSettings,
    seed: u64,
    index: u64,
) -> Result<Probe> {
    let mut rng = task_rng(seed, index);
    let x0 = oracle.sample(&mut rng)?;
    let h = oracle_gauge(oracle, &x0, settings.gauge_tol)?;
    if h == 0.0 {
        return Ok(Probe::Nothing);
    }
    let (lo, hi) = settings.gauge_range;
    let rho = rng.gen_range(lo..hi);
    let y = quasibalanced_act(&oracle.weights(), C64::new(rho / h, 0.0), &x0)?;
    if oracle.member(&y)? != MemberStatus::Inside {
        return Ok(Probe::Nothing);
    }
    for i in 1..settings.t_grid {
        let t = i as f64 / settings.t_grid as f64;
        let ty = y.scaled(C64::new(t, 0.0));
        if oracle.member(&ty)? == MemberStatus::Outside {
            return Ok(match verify_pair(oracle, &y, &ty)? {
                Some(alternate_verified) => Probe::Found(StarlikeWitness {
                    x: y,
                    t,
                    gauge: rho,
                    alternate_verified,
                }),
                None => Probe::Rejected,
            });
        }
    }
    Ok(Probe::Nothing)
}

/// Samples `budget` members, rescales each to a gauge in
/// `settings.gauge_range`, and scans `t x` for a point outside. Returns the
/// lowest-index verified witness, so the outcome is independent of the
/// thread count.
pub fn starlike_witness_search_with<O: MembershipOracle + ?Sized>(
    oracle: &O,
    budget: usize,
    seed: u64,
    settings: &StarlikeSettings,
) -> Result<StarlikeSearch> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let mut out = StarlikeSearch {
        witness: None,
        samples_tried: 0,
        rejected: 0,
    };
    let mut start = 0;
    while start < budget {
        let end = (start + SEARCH_CHUNK).min(budget);
        let probes: Vec<Probe> = (start as u64..end as u64)
            .into_par_iter()
            .map(|i| probe_sample(oracle, settings, seed, i))
            .collect::<Result<_>>()?;
        for probe in probes {
            out.samples_tried += 1;
            match probe {
                Probe::Nothing => {}
                Probe::Rejected => out.rejected += 1,
                Probe::Found(w) => {
                    out.witness = Some(w);
                    return Ok(out);
                }
            }
        }
        start = end;
    }
    Ok(out)
}

pub fn starlike_witness_search<O: MembershipOracle + ?Sized>(
    oracle: &O,
    budget: usize,
    seed: u64,
) -> Result<StarlikeSearch> {
    starlike_witness_search_with(oracle, budget, seed, &StarlikeSettings::default())
}

/// Pads a witness of the first-block domain with zeros, `x -> (x, 0)`, and
/// re-verifies it in `target`. `None` if verification fails.
pub fn lift_witness(
    target: &DomainHandle,
    witness: &StarlikeWitness,
) -> Result<Option<StarlikeWitness>> {
    let n1 = target.blocks()[0];
    if witness.x.len() != n1 {
        return Err(Error::InvalidArgument(format!(
            "witness has {} coordinates, the first block section has {n1}",
            witness.x.len()
        )));
    }
    let mut x = witness.x.0.clone();
    x.resize(target.dim(), C64::new(0.0, 0.0));
    let tx: Vec<C64> = x.iter().map(|v| v * witness.t).collect();
    Ok(
        verify_pair(target, &x, &tx)?.map(|alternate_verified| StarlikeWitness {
            x: CPoint(x),
            t: witness.t,
            gauge: witness.gauge,
            alternate_verified,
        }),
    )
}

/// Threshold below which a functional value counts as hitting the domain.
pub const SEPARATOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatorReport {
    pub samples: usize,
    pub min_modulus: f64,
    pub pass: bool,
}

/// Evaluates `functional` on `samples` sampled members.
pub fn verify_separator(
    handle: &DomainHandle,
    functional: &AffineFunctional,
    samples: usize,
    seed: u64,
) -> Result<SeparatorReport> {
    let members = sample_members(handle, seed, samples, 0.95)?;
    let min_modulus = members
        .iter()
        .map(|x| functional.eval(x).norm())
        .fold(f64::INFINITY, f64::min);
    Ok(SeparatorReport {
        samples,
        min_modulus,
        pass: min_modulus > SEPARATOR_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheckReport {
    pub members: usize,
    pub checks: usize,
    pub violations: usize,
}

/// Applies `|lambda| <= 1` scalings of the oracle's weights to sampled
/// members and counts results that are no longer Inside.
pub fn balanced_spot_check<O: MembershipOracle + ?Sized>(
    oracle: &O,
    members: usize,
    scalings: usize,
    seed: u64,
) -> Result<SpotCheckReport> {
    let w = oracle.weights();
    let violations: usize = (0..members as u64)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let mut rng = task_rng(seed, i);
            let x = oracle.sample(&mut rng)?;
            if oracle.member(&x)? != MemberStatus::Inside {
                return Ok(0);
            }
            let mut bad = 0;
            for _ in 0..scalings {
                let l = uniform_disc(&mut rng, 1.0);
                if oracle.member(&quasibalanced_act(&w, l, &x)?)? != MemberStatus::Inside {
                    bad += 1;
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(SpotCheckReport {
        members,
        checks: members * scalings,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PshReport {
    pub pairs: usize,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub worst_deficit: f64,
}

/// Runs the circle sub-mean-value test for `log mu_E` on `pairs` random
/// Gaussian pairs `(A, B)`.
pub fn psh_probe(
    table: &MultiIndexTable,
    pairs: usize,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<PshReport> {
    let outcomes: Vec<PshOutcome> = (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, i);
            let a = CMatrix::gaussian(&mut rng, table.n());
            let b = CMatrix::gaussian(&mut rng, table.n());
            psh_circle_test(table, &a, &b, radius, samples)
        })
        .collect::<Result<_>>()?;
    let mut report = PshReport {
        pairs,
        pass: 0,
        fail: 0,
        skip: 0,
        worst_deficit: f64::NEG_INFINITY,
    };
    for o in outcomes {
        match o {
            PshOutcome::Pass { deficit } => {
                report.pass += 1;
                report.worst_deficit = report.worst_deficit.max(deficit);
            }
            PshOutcome::Fail { deficit } => {
                report.fail += 1;
                report.worst_deficit = report.worst_deficit.max(deficit);
            }
            PshOutcome::Skip => report.skip += 1,
        }
    }
    Ok(report)
}
