//! Domain handles for the generalized tetrablocks `E_E`, the symmetrized
//! polydiscs `G_n` and the quotients `E_n`, with their membership oracles.

mod embed;
mod retract;
mod separate;

pub use embed::{embed_symmetrized, EmbeddingResult, MAX_ODD_WEIGHT};
pub use retract::{fiber_member, retract_iota, retract_theta, tetrablock_iota, tetrablock_theta};
pub use separate::{separating_hyperplane, AffineFunctional, Separation};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clinalg::{operator_norm, pi_map, CMatrix, DEFAULT_NORM_TOL};
use crate::cpoly::{
    all_roots_outside_closed_disc, certify_nonvanishing_with, sup_psi_torus_eval, CertStatus,
    CertifySettings, DiscVerdict, PsiEvaluator, DEFAULT_CELL_BUDGET, DEFAULT_TORUS_GRID, ZERO_TOL,
};
use crate::error::{Error, Result};
use crate::multiindex::{quasibalanced_act, split_table, MultiIndexTable, SplitTable};
use crate::point::{CPoint, C64};
use crate::seed::{derive_seed, task_rng};

/// Width of the band around criticality reported as [`MemberStatus::Boundary`].
pub const BOUNDARY_BAND: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    GeneralizedTetrablock,
    SymmetrizedPolydisc,
    MuQuotient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberStatus {
    Inside,
    Outside,
    Boundary,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Roots,
    PsiRecursive,
    CertifiedGrid,
}

/// Classification of a point. For closure queries `Inside` means "in the
/// closure".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipResult {
    pub status: MemberStatus,
    pub method: Method,
    /// Roots and PsiRecursive: `1 - (largest critical modulus)`, positive
    /// inside. CertifiedGrid: certified lower bound of `|R_x|`.
    pub margin: Option<f64>,
    /// A zero of `R_x` in the closed unit polydisc.
    pub witness: Option<CPoint>,
}

impl MembershipResult {
    pub fn is_inside(&self) -> bool {
        self.status == MemberStatus::Inside
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    pub resolution: usize,
    pub depth_cap: usize,
    pub cell_budget: u64,
    pub zero_tol: f64,
    pub band: f64,
    pub torus_grid: usize,
    pub refine_steps: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            resolution: 4,
            depth_cap: 14,
            cell_budget: DEFAULT_CELL_BUDGET,
            zero_tol: ZERO_TOL,
            band: BOUNDARY_BAND,
            torus_grid: DEFAULT_TORUS_GRID,
            refine_steps: 40,
        }
    }
}

impl OracleSettings {
    pub fn certify(&self) -> CertifySettings {
        CertifySettings {
            resolution: self.resolution,
            depth_cap: self.depth_cap,
            cell_budget: self.cell_budget,
            zero_tol: self.zero_tol,
        }
    }
}

/// Immutable description of one domain.
#[derive(Debug, Clone)]
pub struct DomainHandle {
    table: MultiIndexTable,
    kind: DomainKind,
    settings: OracleSettings,
    /// For blocks `(r_1, 1, ..., 1)`: level `k` (0-based) holds the table of
    /// the first `k + 1` blocks and, for `k >= 1`, its split at `k`.
    levels: Vec<(MultiIndexTable, Option<SplitTable>)>,
}

impl DomainHandle {
    /// Handle for the given blocks; the kind is inferred (`s = 1` gives the
    /// symmetrized polydisc, everything else the generalized tetrablock).
    pub fn new(blocks: &[usize]) -> Result<Self> {
        let kind = if blocks.len() == 1 {
            DomainKind::SymmetrizedPolydisc
        } else {
            DomainKind::GeneralizedTetrablock
        };
        Self::with_kind(blocks, kind)
    }

    pub fn with_kind(blocks: &[usize], kind: DomainKind) -> Result<Self> {
        let table = MultiIndexTable::new(blocks)?;
        match kind {
            DomainKind::SymmetrizedPolydisc if table.s() != 1 => {
                return Err(Error::InvalidSpec(
                    "the symmetrized polydisc has one block".into(),
                ))
            }
            DomainKind::MuQuotient if !(table.s() == 2 && blocks[1] == 1) => {
                return Err(Error::InvalidSpec(
                    "the quotient E_n has blocks (n-1, 1)".into(),
                ))
            }
            _ => {}
        }
        let mut levels = Vec::new();
        if table.s() == 1 || table.has_unit_tail() {
            for k in 0..table.s() {
                let t = MultiIndexTable::new(&blocks[..=k])?;
                let split = (k > 0).then(|| split_table(&t, k)).transpose()?;
                levels.push((t, split));
            }
        }
        Ok(DomainHandle {
            table,
            kind,
            settings: OracleSettings::default(),
            levels,
        })
    }

    /// `G_n`.
    pub fn symmetrized(n: usize) -> Result<Self> {
        Self::with_kind(&[n], DomainKind::SymmetrizedPolydisc)
    }

    /// `E_n`, blocks `(n - 1, 1)`, `n >= 2`.
    pub fn mu_quotient(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec("E_n needs n >= 2".into()));
        }
        Self::with_kind(&[n - 1, 1], DomainKind::MuQuotient)
    }

    /// The tetrablock `E_2`.
    pub fn tetrablock() -> Self {
        Self::mu_quotient(2).expect("fixed blocks")
    }

    pub fn with_settings(mut self, settings: OracleSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn table(&self) -> &MultiIndexTable {
        &self.table
    }

    pub fn blocks(&self) -> &[usize] {
        self.table.blocks()
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn settings(&self) -> &OracleSettings {
        &self.settings
    }

    /// Dimension `N` of the ambient space.
    pub fn dim(&self) -> usize {
        self.table.big_n()
    }

    /// The weights `|alpha^j|` of the quasibalanced action.
    pub fn weights(&self) -> &[u32] {
        self.table.degrees()
    }

    /// Method used by [`member`] for this handle.
    pub fn default_method(&self) -> Method {
        if self.table.s() == 1 {
            Method::Roots
        } else if self.table.has_unit_tail() {
            Method::PsiRecursive
        } else {
            Method::CertifiedGrid
        }
    }

    pub fn supports(&self, method: Method) -> bool {
        match method {
            Method::Roots => self.table.s() == 1,
            Method::PsiRecursive => self.table.has_unit_tail(),
            Method::CertifiedGrid => true,
        }
    }

    /// Handle of the first `s_prime` blocks, sharing the oracle settings.
    /// True for blocks `(r_1, 1, ..., 1)`, including a single block.
    pub fn is_recursive(&self) -> bool {
        !self.levels.is_empty()
    }

    pub fn prefix_handle(&self, s_prime: usize) -> Result<DomainHandle> {
        if s_prime == 0 || s_prime > self.table.s() {
            return Err(Error::InvalidArgument(format!(
                "prefix length {s_prime} out of range"
            )));
        }
        Ok(DomainHandle::new(&self.blocks()[..s_prime])?.with_settings(self.settings))
    }
}

/// Result of the level-by-level test for blocks `(r_1, 1, ..., 1)`.
#[derive(Debug, Clone)]
pub(crate) struct PsiTrace {
    pub status: MemberStatus,
    pub margin: f64,
    /// Level (0-based) that decided a non-Inside status.
    pub level: Option<usize>,
    /// Base level: a root of `R_{x'}` of smallest modulus.
    pub base_root: Option<C64>,
    /// Higher level: maximizer on the torus and the value of `Psi` there.
    pub argmax: Option<CPoint>,
    pub omega: Option<C64>,
}

fn base_coeffs(x: &[C64]) -> Vec<C64> {
    std::iter::once(C64::new(1.0, 0.0))
        .chain(
            x.iter()
                .enumerate()
                .map(|(j, &v)| if j % 2 == 0 { -v } else { v }),
        )
        .collect()
}

pub(crate) fn psi_trace(handle: &DomainHandle, x: &[C64]) -> Result<PsiTrace> {
    let band = handle.settings.band;
    let (base, _) = &handle.levels[0];
    let coeffs = base_coeffs(&x[..base.big_n()]);
    let mut trace = PsiTrace {
        status: MemberStatus::Inside,
        margin: 1.0,
        level: None,
        base_root: None,
        argmax: None,
        omega: None,
    };
    match all_roots_outside_closed_disc(&coeffs, band)? {
        DiscVerdict::Yes { min_modulus } => trace.margin = 1.0 - 1.0 / min_modulus,
        DiscVerdict::No { root } => {
            trace.status = MemberStatus::Outside;
            trace.margin = 1.0 - 1.0 / root.norm();
            trace.level = Some(0);
            trace.base_root = Some(root);
            return Ok(trace);
        }
        DiscVerdict::Marginal { min_modulus } => {
            trace.status = MemberStatus::Boundary;
            trace.margin = 1.0 - 1.0 / min_modulus;
            trace.level = Some(0);
            return Ok(trace);
        }
    }
    for (k, (t, split)) in handle.levels.iter().enumerate().skip(1) {
        let split = split.as_ref().expect("levels above the base carry a split");
        let xk = &x[..t.big_n()];
        let ev = PsiEvaluator::new(t, split, xk)?;
        let sup = match sup_psi_torus_eval(
            &ev,
            handle.settings.torus_grid,
            handle.settings.refine_steps,
        ) {
            Ok(sup) => sup,
            Err(Error::InvalidState(_)) => {
                trace.status = MemberStatus::Undetermined;
                trace.level = Some(k);
                return Ok(trace);
            }
            Err(e) => return Err(e),
        };
        trace.margin = trace.margin.min(1.0 - sup.value);
        if sup.value > 1.0 - band {
            trace.status = if sup.value >= 1.0 + band {
                MemberStatus::Outside
            } else {
                MemberStatus::Boundary
            };
            trace.level = Some(k);
            trace.omega = ev.eval(&sup.argmax).value;
            trace.argmax = Some(sup.argmax);
            return Ok(trace);
        }
    }
    Ok(trace)
}

fn psi_witness(handle: &DomainHandle, trace: &PsiTrace) -> Option<CPoint> {
    let s = handle.table.s();
    let mut z = vec![C64::new(0.0, 0.0); s];
    if let Some(root) = trace.base_root {
        z[0] = root;
        return Some(CPoint(z));
    }
    // R(z', z_k) = R'(z') - z_k P(z') vanishes at z_k = 1 / Psi.
    let (argmax, omega) = (trace.argmax.as_ref()?, trace.omega?);
    let level = trace.level?;
    z[..level].copy_from_slice(argmax);
    z[level] = omega.inv();
    Some(CPoint(z))
}

fn member_psi(handle: &DomainHandle, x: &[C64]) -> Result<MembershipResult> {
    let trace = psi_trace(handle, x)?;
    let witness = (trace.status == MemberStatus::Outside)
        .then(|| psi_witness(handle, &trace))
        .flatten();
    Ok(MembershipResult {
        status: trace.status,
        method: if handle.table.s() == 1 {
            Method::Roots
        } else {
            Method::PsiRecursive
        },
        margin: Some(trace.margin),
        witness,
    })
}

fn member_grid(handle: &DomainHandle, x: &[C64]) -> Result<MembershipResult> {
    let settings = handle.settings.certify();
    let band = handle.settings.band;
    let cert = certify_nonvanishing_with(&handle.table, x, 1.0, &settings)?;
    let result = |status, margin, witness| MembershipResult {
        status,
        method: Method::CertifiedGrid,
        margin,
        witness,
    };
    Ok(match cert.status {
        CertStatus::Inside => result(MemberStatus::Inside, Some(cert.margin), None),
        CertStatus::Undetermined => result(MemberStatus::Undetermined, None, None),
        CertStatus::Outside => {
            let w = cert.witness.expect("outside certificates carry a witness");
            if w.max_modulus() <= 1.0 - band {
                result(MemberStatus::Outside, None, Some(w))
            } else {
                // A zero near the torus: look for one strictly inside.
                let inner =
                    certify_nonvanishing_with(&handle.table, x, 1.0 - 10.0 * band, &settings)?;
                match inner.status {
                    CertStatus::Outside => result(MemberStatus::Outside, None, inner.witness),
                    CertStatus::Inside => result(MemberStatus::Boundary, None, Some(w)),
                    CertStatus::Undetermined => result(MemberStatus::Undetermined, None, Some(w)),
                }
            }
        }
    })
}

/// Membership in the open domain with the handle's default method.
pub fn member(handle: &DomainHandle, x: &[C64]) -> Result<MembershipResult> {
    member_with(handle, x, handle.default_method())
}

/// Membership with an explicit method; fails if the method does not apply
/// to the handle's blocks.
pub fn member_with(handle: &DomainHandle, x: &[C64], method: Method) -> Result<MembershipResult> {
    handle.table.check_point(x)?;
    if !handle.supports(method) {
        return Err(Error::InvalidArgument(format!(
            "method {method:?} does not apply to blocks {:?}",
            handle.blocks()
        )));
    }
    match method {
        Method::Roots | Method::PsiRecursive => member_psi(handle, x),
        Method::CertifiedGrid => member_grid(handle, x),
    }
}

/// Scales at which the closure test re-checks `|alpha|_r . x`.
pub const CLOSURE_LADDER: [f64; 4] = [0.9, 0.99, 0.999, 0.9999];

/// Membership in the closure, for blocks `(r_1, 1, ..., 1)`.
///
/// For one block the root moduli are compared with `1 - band` directly.
/// Otherwise `x` is in the closure when `|alpha|_r . x` lies in the domain
/// for every `r < 1`, checked on [`CLOSURE_LADDER`].
pub fn member_closure(handle: &DomainHandle, x: &[C64]) -> Result<MembershipResult> {
    handle.table.check_point(x)?;
    if !handle.is_recursive() {
        return Err(Error::InvalidArgument(format!(
            "closure test needs blocks (r, 1, ..., 1), got {:?}",
            handle.blocks()
        )));
    }
    let band = handle.settings.band;
    if handle.table.s() == 1 {
        let verdict = all_roots_outside_closed_disc(&base_coeffs(x), band)?;
        let (status, margin, witness) = match verdict {
            DiscVerdict::Yes { min_modulus } | DiscVerdict::Marginal { min_modulus } => {
                (MemberStatus::Inside, 1.0 - 1.0 / min_modulus, None)
            }
            DiscVerdict::No { root } => (
                MemberStatus::Outside,
                1.0 - 1.0 / root.norm(),
                Some(CPoint(vec![root])),
            ),
        };
        return Ok(MembershipResult {
            status,
            method: Method::Roots,
            margin: Some(margin),
            witness,
        });
    }
    let mut last = None;
    for r in CLOSURE_LADDER {
        let scaled = quasibalanced_act(handle.weights(), C64::new(r, 0.0), x)?;
        let res = member(handle, &scaled)?;
        match res.status {
            MemberStatus::Inside => last = Some(res),
            MemberStatus::Outside => return Ok(res),
            MemberStatus::Boundary | MemberStatus::Undetermined => {
                return Ok(MembershipResult {
                    status: MemberStatus::Undetermined,
                    ..res
                })
            }
        }
    }
    Ok(last.expect("ladder is nonempty"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeResult {
    pub value: f64,
    /// Set when an inconclusive membership answer fell inside the bracket.
    pub widened: bool,
    pub evaluations: usize,
}

const GAUGE_BRACKET_STEPS: usize = 200;

/// Gauge `h = inf{t > 0 : status(1/t) = Inside}` of a quasibalanced domain,
/// where `status(lambda)` classifies `m_lambda . x`.
///
/// Brackets by doubling or halving from `t = 1`, then bisects to width
/// `tol` and returns the midpoint. Boundary answers count as not inside.
pub fn gauge_bisection<F>(mut status: F, tol: f64) -> Result<GaugeResult>
where
    F: FnMut(f64) -> Result<MemberStatus>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let mut out = GaugeResult {
        value: 0.0,
        widened: false,
        evaluations: 0,
    };
    let mut inside_at = |t: f64, out: &mut GaugeResult| -> Result<bool> {
        out.evaluations += 1;
        Ok(match status(1.0 / t)? {
            MemberStatus::Inside => true,
            MemberStatus::Outside | MemberStatus::Boundary => false,
            MemberStatus::Undetermined => {
                out.widened = true;
                false
            }
        })
    };
    let (mut lo, mut hi);
    if inside_at(1.0, &mut out)? {
        hi = 1.0;
        lo = 0.5;
        let mut steps = 0;
        while inside_at(lo, &mut out)? {
            hi = lo;
            lo /= 2.0;
            steps += 1;
            if steps >= GAUGE_BRACKET_STEPS {
                out.value = 0.0;
                return Ok(out);
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        let mut steps = 0;
        while !inside_at(hi, &mut out)? {
            lo = hi;
            hi *= 2.0;
            steps += 1;
            if steps >= GAUGE_BRACKET_STEPS {
                return Err(Error::NumericFailure(
                    "no scaled copy of the point tested inside".into(),
                ));
            }
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside_at(mid, &mut out)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.value = 0.5 * (lo + hi);
    Ok(out)
}

/// Quasibalanced Minkowski functional `h(x) = inf{t > 0 : |alpha|_{1/t} . x in E_E}`,
/// so that `E_E = {h < 1}` and `h(|alpha|_lambda . x) = |lambda| h(x)`.
pub fn minkowski(handle: &DomainHandle, x: &[C64], tol: f64) -> Result<GaugeResult> {
    handle.table.check_point(x)?;
    if x.iter().all(|v| *v == C64::new(0.0, 0.0)) {
        return Ok(GaugeResult {
            value: 0.0,
            widened: false,
            evaluations: 0,
        });
    }
    gauge_bisection(
        |lambda| {
            let y = quasibalanced_act(handle.weights(), C64::new(lambda, 0.0), x)?;
            Ok(member(handle, &y)?.status)
        },
        tol,
    )
}

/// `pi_E(A)` for a complex Gaussian `A` rescaled to operator norm `norm_cap`.
pub fn sample_member(handle: &DomainHandle, seed: u64, norm_cap: f64) -> Result<CPoint> {
    let mut rng = task_rng(seed, 0);
    sample_member_rng(handle, &mut rng, norm_cap)
}

pub fn sample_member_rng<R: Rng + ?Sized>(
    handle: &DomainHandle,
    rng: &mut R,
    norm_cap: f64,
) -> Result<CPoint> {
    if !(norm_cap > 0.0 && norm_cap < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "norm cap must lie in (0, 1), got {norm_cap}"
        )));
    }
    let n = handle.table.n();
    let a = loop {
        let a = CMatrix::gaussian(rng, n);
        let norm = operator_norm(&a, DEFAULT_NORM_TOL);
        if norm > 0.0 {
            break a.scaled(C64::new(norm_cap / norm, 0.0));
        }
    };
    pi_map(&handle.table, &a)
}

/// `count` samples; sample `i` uses seed `derive_seed(root_seed, i)`, so the
/// output does not depend on the thread count.
pub fn sample_members(
    handle: &DomainHandle,
    root_seed: u64,
    count: usize,
    norm_cap: f64,
) -> Result<Vec<CPoint>> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| sample_member(handle, derive_seed(root_seed, i), norm_cap))
        .collect()
}
