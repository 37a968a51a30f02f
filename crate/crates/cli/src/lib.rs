//! The `mudom` command line: argument parsing, dispatch and JSON reports.
//!
//! Exit codes: 0 Inside (or success), 1 Outside (or a failed self-test),
//! 2 Boundary or Undetermined, 10 and above for errors, which are reported
//! as JSON on stdout.

pub mod io;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use mudom_core::clinalg::pi_map;
use mudom_core::domains::{
    embed_symmetrized, member_closure, member_with, minkowski, sample_members,
    separating_hyperplane, DomainHandle, MemberStatus, Method, OracleSettings, Separation,
};
use mudom_core::pentablock::{member_penta, member_penta_closure, penta_minkowski, PentaPoint};
use mudom_core::prober::{
    lift_witness, line_section_scan, psh_probe, starlike_witness_search, verify_separator,
    MembershipOracle, PentablockOracle, SectionSummary, SeparatorReport, StarlikeSearch,
    StarlikeWitness, Window,
};
use mudom_core::seed::{gaussian_point, task_rng};
use mudom_core::selftest::{selftest, SelftestOptions, DEFAULT_SELFTEST_SEED};
use mudom_core::ssv::{mu, DEFAULT_MU_GRID};
use mudom_core::{build_table, Error, MultiIndexTable};

/// Version of the report layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_INSIDE: i32 = 0;
pub const EXIT_OUTSIDE: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;
pub const EXIT_USAGE: i32 = 10;
pub const EXIT_IO: i32 = 11;
pub const EXIT_BUDGET: i32 = 12;
pub const EXIT_NUMERIC: i32 = 13;
pub const EXIT_STATE: i32 = 14;

const DEFAULT_GAUGE_TOL: f64 = 1e-8;

/// An error with its exit code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "invalid_argument".into(),
            message: msg.into(),
        }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_IO,
            kind: "io".into(),
            message: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::InvalidSpec(_) => (EXIT_USAGE, "invalid_spec"),
            Error::InvalidArgument(_) => (EXIT_USAGE, "invalid_argument"),
            Error::Io(_) => (EXIT_IO, "io"),
            Error::Budget(_) => (EXIT_BUDGET, "budget"),
            Error::NumericFailure(_) => (EXIT_NUMERIC, "numeric_failure"),
            Error::InvalidState(_) => (EXIT_STATE, "invalid_state"),
            Error::InconsistentState(_) => (EXIT_STATE, "inconsistent_state"),
        };
        Failure {
            code,
            kind: kind.into(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mudom",
    version,
    about = "Membership, mu_E bounds and geometry probes for mu-synthesis domains"
)]
pub struct Cli {
    /// Block sizes, e.g. 2,1.
    #[arg(long, global = true, value_delimiter = ',')]
    pub blocks: Option<Vec<usize>>,
    /// Tolerance of the command's main iteration.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Torus grid per angle.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Certification grid per axis, or raster side for sections.
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Root seed; results do not depend on the thread count
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cap on certification cells.
    #[arg(long, global = true, env = "MUDOM_BUDGET")]
    pub budget: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Roots,
    Psi,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PentaOp {
    Member,
    Closure,
    Mink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeMode {
    Starlike,
    Section,
    Separator,
    Psh,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ordered exponent table.
    Table,
    /// Membership in the open domain.
    Member {
        #[arg(long)]
        point: String,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Membership in the closure.
    Closure {
        #[arg(long)]
        point: String,
    },
    /// Minkowski functional.
    Mink {
        #[arg(long)]
        point: String,
    },
    /// Bounds on mu_E; with --tol also a certified bisection interval.
    Mu {
        #[arg(long)]
        matrix: String,
    },
    /// The map pi_E of principal-minor sums.
    Pi {
        #[arg(long)]
        matrix: String,
    },
    /// Embedding into a symmetrized polydisc.
    Embed {
        #[arg(long)]
        point: String,
    },
    /// Random members pi_E(A).
    Sample {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0.95)]
        norm_cap: f64,
    },
    /// Separating functional at an exterior point.
    Separate {
        #[arg(long)]
        point: String,
    },
    /// Pentablock membership, closure or Minkowski functional.
    Penta {
        #[arg(long)]
        point: String,
        #[arg(long, value_enum, default_value = "member")]
        op: PentaOp,
        /// Weight of the a-coordinate.
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Randomized geometry probes.
    Probe {
        #[arg(long, value_enum)]
        mode: ProbeMode,
        /// Basepoint (section) or exterior point (separator).
        #[arg(long)]
        point: Option<String>,
        /// Line direction for sections.
        #[arg(long)]
        direction: Option<String>,
        /// Half-width of the square lambda window.
        #[arg(long, default_value_t = 2.0)]
        window: f64,
        /// Samples (starlike, separator) or pairs (psh).
        #[arg(long)]
        count: Option<usize>,
        /// Circle radius for psh.
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        /// CSV export of the section raster.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Probe the pentablock with a-weight k instead of --blocks.
        #[arg(long)]
        pentablock: Option<u32>,
    },
    /// Invariant checks of every module.
    Selftest {
        /// Use a deliberately corrupted R_x evaluator.
        #[arg(long)]
        canary: bool,
    },
}

/// The validated inputs, echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub blocks: Option<Vec<usize>>,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub resolution: Option<usize>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub budget: Option<u64>,
    pub out: Option<PathBuf>,
    /// Parsed point or matrix, and subcommand options.
    pub input: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<R> {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub result: R,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub error: Failure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarlikeProbe {
    pub search: StarlikeSearch,
    /// The witness padded with zeros into the domain with one more block of
    /// size 1, when the search ran on a single block.
    pub lifted: Option<StarlikeWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatorProbe {
    pub separation: Separation,
    pub check: Option<SeparatorReport>,
}

struct Outcome {
    code: i32,
    input: serde_json::Value,
    result: serde_json::Value,
}

fn status_code(s: MemberStatus) -> i32 {
    match s {
        MemberStatus::Inside => EXIT_INSIDE,
        MemberStatus::Outside => EXIT_OUTSIDE,
        MemberStatus::Boundary | MemberStatus::Undetermined => EXIT_UNDETERMINED,
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<serde_json::Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::io(e.to_string()))
}

fn validate(cli: &Cli) -> Result<(), Failure> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::invalid("--tol must be positive"));
        }
    }
    for (name, v) in [
        ("--grid", cli.grid),
        ("--resolution", cli.resolution),
        ("--threads", cli.threads),
    ] {
        if v == Some(0) {
            return Err(Failure::invalid(format!("{name} must be positive")));
        }
    }
    if cli.budget == Some(0) {
        return Err(Failure::invalid("the cell budget must be positive"));
    }
    if let Some(b) = &cli.blocks {
        build_table(b)?;
    }
    Ok(())
}

fn table(cli: &Cli) -> Result<MultiIndexTable, Failure> {
    let b = cli
        .blocks
        .as_ref()
        .ok_or_else(|| Failure::invalid("--blocks is required"))?;
    Ok(build_table(b)?)
}

fn settings(cli: &Cli) -> OracleSettings {
    let mut s = OracleSettings::default();
    if let Some(r) = cli.resolution {
        s.resolution = r;
    }
    if let Some(g) = cli.grid {
        s.torus_grid = g;
    }
    if let Some(b) = cli.budget {
        s.cell_budget = s.cell_budget.min(b);
    }
    s
}

fn handle(cli: &Cli) -> Result<DomainHandle, Failure> {
    Ok(DomainHandle::new(table(cli)?.blocks())?.with_settings(settings(cli)))
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    let ok = |input: serde_json::Value, result: serde_json::Value| Outcome {
        code: 0,
        input,
        result,
    };
    match &cli.command {
        Command::Table => Ok(ok(serde_json::Value::Null, to_json(&table(cli)?)?)),
        Command::Member { point, method } => {
            let h = handle(cli)?;
            let x = io::read_point(point)?;
            let m = match method {
                None => h.default_method(),
                Some(MethodArg::Roots) => Method::Roots,
                Some(MethodArg::Psi) => Method::PsiRecursive,
                Some(MethodArg::Grid) => Method::CertifiedGrid,
            };
            let r = member_with(&h, &x, m)?;
            Ok(Outcome {
                code: status_code(r.status),
                input: serde_json::json!({ "point": x, "method": method }),
                result: to_json(&r)?,
            })
        }
        Command::Closure { point } => {
            let x = io::read_point(point)?;
            let r = member_closure(&handle(cli)?, &x)?;
            Ok(Outcome {
                code: status_code(r.status),
                input: serde_json::json!({ "point": x }),
                result: to_json(&r)?,
            })
        }
        Command::Mink { point } => {
            let x = io::read_point(point)?;
            let r = minkowski(&handle(cli)?, &x, cli.tol.unwrap_or(DEFAULT_GAUGE_TOL))?;
            Ok(ok(serde_json::json!({ "point": x }), to_json(&r)?))
        }
        Command::Mu { matrix } => {
            let t = table(cli)?;
            let a = io::read_matrix(matrix)?;
            let r = mu(
                &t,
                &a,
                cli.grid.unwrap_or(DEFAULT_MU_GRID),
                cli.tol,
                &settings(cli).certify(),
            )?;
            Ok(ok(serde_json::json!({ "matrix": a }), to_json(&r)?))
        }
        Command::Pi { matrix } => {
            let t = table(cli)?;
            let a = io::read_matrix(matrix)?;
            Ok(ok(
                serde_json::json!({ "matrix": a }),
                to_json(&pi_map(&t, &a)?)?,
            ))
        }
        Command::Embed { point } => {
            let x = io::read_point(point)?;
            let r = embed_symmetrized(&handle(cli)?, &x)?;
            Ok(ok(serde_json::json!({ "point": x }), to_json(&r)?))
        }
        Command::Sample { count, norm_cap } => {
            if *count == 0 {
                return Err(Failure::invalid("--count must be positive"));
            }
            let xs = sample_members(&handle(cli)?, cli.seed.unwrap_or(0), *count, *norm_cap)?;
            Ok(ok(
                serde_json::json!({ "count": count, "norm_cap": norm_cap }),
                to_json(&xs)?,
            ))
        }
        Command::Separate { point } => {
            let x = io::read_point(point)?;
            let r = separating_hyperplane(&handle(cli)?, &x)?;
            Ok(ok(serde_json::json!({ "point": x }), to_json(&r)?))
        }
        Command::Penta { point, op, k } => {
            let x = io::read_point(point)?;
            let pt = PentaPoint::from_slice(&x)?;
            let input = serde_json::json!({ "point": x, "op": op, "k": k });
            match op {
                PentaOp::Member | PentaOp::Closure => {
                    let r = if *op == PentaOp::Member {
                        member_penta(&pt)?
                    } else {
                        member_penta_closure(&pt)?
                    };
                    Ok(Outcome {
                        code: status_code(r.status),
                        input,
                        result: to_json(&r)?,
                    })
                }
                PentaOp::Mink => Ok(ok(
                    input,
                    to_json(&penta_minkowski(
                        &pt,
                        *k,
                        cli.tol.unwrap_or(DEFAULT_GAUGE_TOL),
                    )?)?,
                )),
            }
        }
        Command::Probe {
            mode,
            point,
            direction,
            window,
            count,
            radius,
            csv,
            pentablock,
        } => probe(
            cli,
            *mode,
            point.as_deref(),
            direction.as_deref(),
            *window,
            *count,
            *radius,
            csv.as_ref(),
            *pentablock,
        ),
        Command::Selftest { canary } => {
            let seed = cli.seed.unwrap_or(DEFAULT_SELFTEST_SEED);
            let s = selftest(seed, SelftestOptions { canary: *canary });
            Ok(Outcome {
                code: if s.all_passed() { 0 } else { 1 },
                input: serde_json::json!({ "canary": canary }),
                result: to_json(&s)?,
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn probe(
    cli: &Cli,
    mode: ProbeMode,
    point: Option<&str>,
    direction: Option<&str>,
    window: f64,
    count: Option<usize>,
    radius: f64,
    csv: Option<&PathBuf>,
    pentablock: Option<u32>,
) -> Result<Outcome, Failure> {
    let seed = cli.seed.unwrap_or(0);
    let input = serde_json::json!({
        "mode": mode, "point": point, "direction": direction, "window": window,
        "count": count, "radius": radius, "pentablock": pentablock,
    });
    let ok = |result| {
        Ok(Outcome {
            code: 0,
            input: input.clone(),
            result,
        })
    };
    if count == Some(0) {
        return Err(Failure::invalid("--count must be positive"));
    }
    let oracle: Box<dyn MembershipOracle> = match pentablock {
        Some(k) => Box::new(PentablockOracle { k }),
        None => Box::new(handle(cli)?),
    };
    match mode {
        ProbeMode::Starlike => {
            let search = starlike_witness_search(oracle.as_ref(), count.unwrap_or(1000), seed)?;
            let mut lifted = None;
            if let (None, Some(w)) = (pentablock, &search.witness) {
                let t = table(cli)?;
                if t.s() == 1 {
                    let target = DomainHandle::new(&[t.n(), 1])?.with_settings(settings(cli));
                    lifted = lift_witness(&target, w)?;
                }
            }
            ok(to_json(&StarlikeProbe { search, lifted })?)
        }
        ProbeMode::Section => {
            if !(window > 0.0 && window.is_finite()) {
                return Err(Failure::invalid("--window must be positive"));
            }
            let mut rng = task_rng(seed, 0);
            let base = match point {
                Some(p) => io::read_point(p)?,
                None => oracle.sample(&mut rng)?,
            };
            let dir = match direction {
                Some(d) => io::read_point(d)?,
                None => gaussian_point(&mut rng, oracle.dim()),
            };
            let map = line_section_scan(
                oracle.as_ref(),
                &base,
                &dir,
                Window::square(window),
                cli.resolution.unwrap_or(128),
            )?;
            if let Some(path) = csv {
                let f = fs::File::create(path)
                    .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
                map.write_csv(std::io::BufWriter::new(f))?;
            }
            let summary: SectionSummary = map.summary();
            ok(to_json(&summary)?)
        }
        ProbeMode::Separator => {
            let h = handle(cli)?;
            let x = io::read_point(point.ok_or_else(|| Failure::invalid("--point is required"))?)?;
            let separation = separating_hyperplane(&h, &x)?;
            let check = match &separation {
                Separation::Hyperplane(f) => {
                    Some(verify_separator(&h, f, count.unwrap_or(10_000), seed)?)
                }
                Separation::Undetermined { .. } => None,
            };
            ok(to_json(&SeparatorProbe { separation, check })?)
        }
        ProbeMode::Psh => {
            let t = table(cli)?;
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Failure::invalid("--radius must be positive"));
            }
            ok(to_json(&psh_probe(
                &t,
                count.unwrap_or(100),
                radius,
                cli.grid.unwrap_or(64),
                seed,
            )?)?)
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Table => "table",
        Command::Member { .. } => "member",
        Command::Closure { .. } => "closure",
        Command::Mink { .. } => "mink",
        Command::Mu { .. } => "mu",
        Command::Pi { .. } => "pi",
        Command::Embed { .. } => "embed",
        Command::Sample { .. } => "sample",
        Command::Separate { .. } => "separate",
        Command::Penta { .. } => "penta",
        Command::Probe { .. } => "probe",
        Command::Selftest { .. } => "selftest",
    }
}

fn execute(cli: &Cli) -> Result<(i32, String), Failure> {
    validate(cli)?;
    let start = Instant::now();
    let outcome = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::invalid(e.to_string()))?
            .install(|| dispatch(cli))?,
        None => dispatch(cli)?,
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool: "mudom".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: RunConfig {
            subcommand: subcommand_name(&cli.command).into(),
            blocks: cli.blocks.clone(),
            tol: cli.tol,
            grid: cli.grid,
            resolution: cli.resolution,
            seed: cli.seed,
            threads: cli.threads,
            budget: cli.budget,
            out: cli.out.clone(),
            input: outcome.input,
        },
        result: outcome.result,
        timings: Timings {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::io(e.to_string()))?;
    Ok((outcome.code, text))
}

fn error_json(f: Failure) -> String {
    serde_json::to_string_pretty(&ErrorReport {
        schema_version: SCHEMA_VERSION,
        tool: "mudom".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        error: f,
    })
    .expect("error reports serialize")
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// Parses `args`, runs the command, prints or writes the report and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            emit(&error_json(Failure::invalid(e.kind().to_string())));
            return EXIT_USAGE;
        }
    };
    let result = execute(&cli).and_then(|(code, text)| match &cli.out {
        Some(path) => fs::write(path, text + "\n")
            .map(|_| code)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display()))),
        None => {
            emit(&text);
            Ok(code)
        }
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let code = f.code;
            eprintln!("mudom: {}", f.message);
            emit(&error_json(f));
            code
        }
    }
}

/// Reads a report back into typed form.
pub fn parse_report<R: for<'de> Deserialize<'de>>(text: &str) -> serde_json::Result<Report<R>> {
    serde_json::from_str(text)
}
