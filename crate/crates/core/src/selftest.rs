//! A compact run of the invariant checks of every module, with per-suite
//! pass/fail counts. Deterministic for a given seed.

use serde::{Deserialize, Serialize};

use crate::clinalg::{det, det_expansion, pi_map, spectral_radius, CMatrix};
use crate::cpoly::{eval_R, eval_split, parity_sign};
use crate::domains::{
    embed_symmetrized, member, minkowski, retract_iota, retract_theta, sample_members,
    tetrablock_iota, tetrablock_theta, DomainHandle, BOUNDARY_BAND,
};
use crate::error::Result;
use crate::multiindex::{build_table, compare, quasibalanced_act, split_table, MultiIndexTable};
use crate::pentablock::{a_bound, member_penta, penta_act, PentaPoint};
use crate::point::C64;
use crate::prober::raster_topology;
use crate::seed::{complex_gaussian, gaussian_point, task_rng, uniform_disc, uniform_polydisc};
use crate::ssv::mu_lower_torus;

pub const DEFAULT_SELFTEST_SEED: u64 = 20240917;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestOptions {
    /// Replace `R_x` by a copy with one coefficient sign flipped; the
    /// determinant suite must then fail.
    pub canary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestSummary {
    pub seed: u64,
    pub canary: bool,
    pub suites: Vec<SuiteResult>,
}

impl SelftestSummary {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.failed == 0)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

struct Tally {
    name: &'static str,
    passed: usize,
    failed: usize,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            passed: 0,
            failed: 0,
        }
    }

    fn check(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    /// Errors count as failures.
    fn check_with(&mut self, f: impl FnOnce() -> Result<bool>) {
        self.check(f().unwrap_or(false));
    }

    fn done(self) -> SuiteResult {
        SuiteResult {
            name: self.name.to_string(),
            passed: self.passed,
            failed: self.failed,
        }
    }
}

const TABLES: &[&[usize]] = &[&[2], &[3], &[1, 1], &[2, 1], &[1, 1, 1], &[3, 1]];

fn close(a: C64, b: C64, rel: f64) -> bool {
    (a - b).norm() <= rel * (1.0 + b.norm())
}

/// `R_x` with the sign of the last coefficient flipped.
#[allow(non_snake_case)]
fn eval_R_corrupted(table: &MultiIndexTable, x: &[C64], z: &[C64]) -> Result<C64> {
    let mut acc = C64::new(1.0, 0.0);
    for (j, ((a, &d), &xj)) in table
        .alphas()
        .iter()
        .zip(table.degrees())
        .zip(x)
        .enumerate()
    {
        let mono: C64 = a.iter().zip(z).map(|(&e, &v)| v.powu(e as u32)).product();
        let sign = if j + 1 == x.len() {
            -parity_sign(d)
        } else {
            parity_sign(d)
        };
        acc += xj * mono * sign;
    }
    Ok(acc)
}

fn table_suite(seed: u64) -> SuiteResult {
    let mut t = Tally::new("multiindex");
    let mut rng = task_rng(seed, 0);
    for blocks in TABLES {
        t.check_with(|| {
            let table = build_table(blocks)?;
            let expect = blocks.iter().map(|r| r + 1).product::<usize>() - 1;
            let sorted = table
                .alphas()
                .windows(2)
                .map(|w| compare(&w[0], &w[1]))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .all(|o| o.is_lt());
            Ok(table.big_n() == expect && sorted)
        });
    }
    for _ in 0..50 {
        t.check_with(|| {
            let table = build_table(&[2, 1])?;
            let x = gaussian_point(&mut rng, table.big_n());
            let l = complex_gaussian(&mut rng);
            let m = complex_gaussian(&mut rng);
            let w = table.degrees();
            let twice = quasibalanced_act(w, l, &quasibalanced_act(w, m, &x)?)?;
            let once = quasibalanced_act(w, l * m, &x)?;
            Ok(twice
                .iter()
                .zip(once.iter())
                .all(|(a, b)| close(*a, *b, 1e-12)))
        });
    }
    t.done()
}

fn polynomial_suite(seed: u64) -> SuiteResult {
    let mut t = Tally::new("quasibalanced_identity");
    let mut rng = task_rng(seed, 1);
    for blocks in TABLES {
        let Ok(table) = build_table(blocks) else {
            t.check(false);
            continue;
        };
        for _ in 0..40 {
            t.check_with(|| {
                let x = gaussian_point(&mut rng, table.big_n());
                let z = uniform_polydisc(&mut rng, table.s(), 1.0);
                let l = uniform_disc(&mut rng, 1.0);
                let lhs = eval_R(&table, &quasibalanced_act(table.degrees(), l, &x)?, &z)?;
                let lz: Vec<C64> = z.iter().map(|v| v * l).collect();
                Ok(close(lhs, eval_R(&table, &x, &lz)?, 1e-12))
            });
        }
    }
    t.done()
}

fn split_suite(seed: u64) -> SuiteResult {
    let mut t = Tally::new("split_identity");
    let mut rng = task_rng(seed, 2);
    for blocks in TABLES.iter().filter(|b| b.len() >= 2) {
        let Ok(table) = build_table(blocks) else {
            t.check(false);
            continue;
        };
        for s_prime in 1..table.s() {
            for _ in 0..20 {
                t.check_with(|| {
                    let split = split_table(&table, s_prime)?;
                    let x = gaussian_point(&mut rng, table.big_n());
                    let z = uniform_polydisc(&mut rng, table.s(), 1.0);
                    Ok(close(
                        eval_split(&table, &split, &x, &z)?,
                        eval_R(&table, &x, &z)?,
                        1e-12,
                    ))
                });
            }
        }
    }
    t.done()
}

/// `det(I - A diag z)` three ways: directly, by the minor expansion, and as
/// `R_{pi(A)}` at the block-repeated argument.
fn determinant_suite(seed: u64, options: SelftestOptions) -> SuiteResult {
    let mut t = Tally::new("determinant_expansion");
    let mut rng = task_rng(seed, 3);
    let eval = if options.canary {
        eval_R_corrupted
    } else {
        eval_R
    };
    for blocks in TABLES {
        let Ok(table) = build_table(blocks) else {
            t.check(false);
            continue;
        };
        let n = table.n();
        for _ in 0..30 {
            t.check_with(|| {
                let a = CMatrix::gaussian(&mut rng, n);
                let z = gaussian_point(&mut rng, table.s());
                let expanded: Vec<C64> = blocks
                    .iter()
                    .zip(z.iter())
                    .flat_map(|(&r, &v)| std::iter::repeat_n(v, r))
                    .collect();
                let direct = det(&CMatrix::identity(n)
                    .add(&a.right_diag_mul(&expanded).scaled(C64::new(-1.0, 0.0))));
                let by_minors = det_expansion(&a, &expanded)?;
                let by_r = eval(&table, &pi_map(&table, &a)?, &z)?;
                Ok(close(by_minors, direct, 1e-11) && close(by_r, direct, 1e-10))
            });
        }
    }
    t.done()
}

fn mu_suite(seed: u64) -> SuiteResult {
    let mut t = Tally::new("mu_sandwich");
    let mut rng = task_rng(seed, 4);
    for blocks in [&[2][..], &[1, 1], &[2, 1]] {
        let Ok(table) = build_table(blocks) else {
            t.check(false);
            continue;
        };
        for _ in 0..20 {
            t.check_with(|| {
                let a = CMatrix::gaussian(&mut rng, table.n());
                let lower = mu_lower_torus(&table, &a, 32)?;
                let norm = crate::clinalg::operator_norm(&a, crate::clinalg::DEFAULT_NORM_TOL);
                Ok(spectral_radius(&a)? <= lower + 1e-8 && lower <= norm * (1.0 + 1e-8))
            });
        }
    }
    t.done()
}

fn membership_suite(seed: u64) -> SuiteResult {
    let mut t = Tally::new("pi_inclusion");
    for (k, blocks) in TABLES.iter().enumerate() {
        match DomainHandle::new(blocks)
            .and_then(|h| Ok((sample_members(&h, seed ^ k as u64, 25, 0.95)?, h)))
        {
            Ok((xs, h)) => {
                for x in xs {
                    t.check_with(|| Ok(member(&h, &x)?.is_inside()));
                }
            }
            Err(_) => t.check(false),
        }
    }
    t.done()
}

fn retract_suite(seed: u64) -> SuiteResult {
    let mut t = Tally::new("retract_pairs");
    for blocks in [&[2, 1][..], &[1, 1, 1], &[3, 1]] {
        t.check_with(|| {
            let h = DomainHandle::new(blocks)?;
            let split = split_table(h.table(), 1)?;
            let prefix = h.prefix_handle(1)?;
            let mut ok = true;
            for xp in sample_members(&prefix, seed, 10, 0.95)? {
                let x = retract_theta(&h, &split, &xp, false)?;
                ok &= retract_iota(&h, &split, &x, false)? == xp;
                ok &= member(&h, &x)?.is_inside();
            }
            Ok(ok)
        });
    }
    let g2 = DomainHandle::symmetrized(2).expect("fixed blocks");
    let e = DomainHandle::tetrablock();
    match sample_members(&g2, seed, 20, 0.95) {
        Ok(xs) => {
            for sp in xs {
                t.check_with(|| {
                    let x = tetrablock_theta(&sp)?;
                    Ok(tetrablock_iota(&x)? == sp && member(&e, &x)?.is_inside())
                });
            }
        }
        Err(_) => t.check(false),
    }
    t.done()
}

fn minkowski_suite(seed: u64) -> SuiteResult {
    let mut t = Tally::new("minkowski_homogeneity");
    let mut rng = task_rng(seed, 5);
    let tol = 1e-8;
    for blocks in [&[2][..], &[1, 1], &[2, 1]] {
        let Ok(h) = DomainHandle::new(blocks) else {
            t.check(false);
            continue;
        };
        for _ in 0..8 {
            t.check_with(|| {
                let x = gaussian_point(&mut rng, h.dim());
                let l = complex_gaussian(&mut rng);
                let hx = minkowski(&h, &x, tol)?.value;
                let hy = minkowski(&h, &quasibalanced_act(h.weights(), l, &x)?, tol)?.value;
                Ok(
                    (hy - l.norm() * hx).abs()
                        <= 2.0 * tol + 4.0 * BOUNDARY_BAND * (1.0 + l.norm()),
                )
            });
        }
    }
    t.done()
}

fn embedding_suite(seed: u64) -> SuiteResult {
    let mut t = Tally::new("embedding");
    for blocks in [&[1, 1][..], &[2, 1]] {
        t.check_with(|| {
            let h = DomainHandle::new(blocks)?;
            let mut ok = true;
            for x in sample_members(&h, seed, 10, 0.95)? {
                let e = embed_symmetrized(&h, &x)?;
                let g = DomainHandle::symmetrized(e.big_m as usize)?;
                ok &= member(&g, &e.x_tilde)?.is_inside();
            }
            Ok(ok)
        });
    }
    t.done()
}

fn pentablock_suite(seed: u64) -> SuiteResult {
    let mut t = Tally::new("pentablock_balanced");
    let mut rng = task_rng(seed, 6);
    let g2 = DomainHandle::symmetrized(2).expect("fixed blocks");
    let Ok(sp) = sample_members(&g2, seed, 20, 0.95) else {
        t.check(false);
        return t.done();
    };
    for k in 1..=3 {
        for x in &sp {
            t.check_with(|| {
                let a = uniform_disc(&mut rng, a_bound(x[0], x[1])? * 0.999);
                let pt = PentaPoint::new(a, x[0], x[1]);
                let l = uniform_disc(&mut rng, 1.0);
                Ok(member_penta(&pt)?.is_inside()
                    && member_penta(&penta_act(&pt, k, l))?.is_inside())
            });
        }
    }
    t.done()
}

fn raster_suite() -> SuiteResult {
    let mut t = Tally::new("raster_topology");
    let res = 120;
    let grid = |f: &dyn Fn(f64, f64) -> bool| -> Vec<bool> {
        (0..res * res)
            .map(|i| {
                let x = -1.0 + (2.0 * (i % res) as f64 + 1.0) / res as f64;
                let y = -1.0 + (2.0 * (i / res) as f64 + 1.0) / res as f64;
                f(x, y)
            })
            .collect()
    };
    let annulus = grid(&|x, y| (0.3..0.8).contains(&x.hypot(y)));
    t.check(raster_topology(&annulus, res, res) == (1, 1));
    let two = grid(&|x, y| (x - 0.5).hypot(y) < 0.3 || (x + 0.5).hypot(y) < 0.3);
    t.check(raster_topology(&two, res, res) == (2, 0));
    let disc = grid(&|x, y| x.hypot(y) < 0.6);
    t.check(raster_topology(&disc, res, res) == (1, 0));
    t.done()
}

/// Runs every suite. Suites run one after another; each draws from its own
/// stream derived from `seed`.
pub fn selftest(seed: u64, options: SelftestOptions) -> SelftestSummary {
    let suites = vec![
        table_suite(seed),
        polynomial_suite(seed),
        split_suite(seed),
        determinant_suite(seed, options),
        mu_suite(seed),
        membership_suite(seed),
        retract_suite(seed),
        minkowski_suite(seed),
        embedding_suite(seed),
        pentablock_suite(seed),
        raster_suite(),
    ];
    SelftestSummary {
        seed,
        canary: options.canary,
        suites,
    }
}
