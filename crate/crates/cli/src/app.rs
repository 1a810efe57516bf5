// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use kernineq_core::additive::{LpOutcome, LpStatus};
use kernineq_core::generate::{Generated, GeneratorKind, GeneratorSpec};
use kernineq_core::gruss::{richard_merge, richard_partial, RichardReport, RICHARD_WORKERS};
use kernineq_core::multiplicative::{Functional, ZeroPropVerdict};
use kernineq_core::sincov::{pams_report, Factorization};
use kernineq_core::{
    additive, defect_scan, multiplicative, subadditive, ComplexKernel, DefectKind, Error, Kernel,
    Objective, SynthOptions, DEFAULT_TOLERANCE,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::{self, IoError};

#[derive(Debug, Parser)]
#[command(name = "kernineq", version, about = "Defects, closures and majorants of kernels on finite point sets")]
pub struct Cli {
    /// Absolute tolerance for every check.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Omit the timestamp from reports.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Largest defect of a kernel (or pair) over all ordered triples.
    Defect {
        #[arg(long)]
        kind: DefectKind,
        /// One kernel, or two for `main` and `add`.
        #[arg(long, required = true, num_args = 1..=2)]
        input: Vec<PathBuf>,
    },
    /// Min-plus closure over walks of length at least one.
    Closure {
        #[arg(long)]
        input: PathBuf,
        /// Also write the closed kernel to this file.
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Sup of differences of a potential family, or of the canonical family of a kernel.
    Represent {
        #[arg(long, required_unless_present = "family", conflicts_with = "family")]
        input: Option<PathBuf>,
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Check that the canonical family reproduces a kernel exactly when it is a
    /// triangle kernel with zero diagonal.
    VerifyCt {
        #[arg(long)]
        input: PathBuf,
    },
    /// Scan the additive inequality for (S, G).
    CheckAdd {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Split (S, G) into H1 = G + S and H2 = G - S.
    Decompose {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Build S = H1 - H2, G = H1 + H2 from two triangle kernels.
    Compose {
        #[arg(long)]
        h1: PathBuf,
        #[arg(long)]
        h2: PathBuf,
        /// Use the swapped assignment S = H1 + H2, G = H1 - H2.
        #[arg(long)]
        swapped: bool,
    },
    /// Cheapest G for a given S by linear programming.
    SynthG {
        #[arg(long)]
        s: PathBuf,
        #[arg(long, default_value = "sum")]
        objective: Objective,
        #[arg(long)]
        symmetric: bool,
        #[arg(long)]
        zero_diagonal: bool,
    },
    /// Build (S, G) from two potential families.
    BuildCh {
        #[arg(long)]
        family1: PathBuf,
        #[arg(long)]
        family2: PathBuf,
    },
    /// Scan the multiplicative inequality for (T, F).
    CheckMain {
        #[arg(long)]
        t: PathBuf,
        /// Imaginary part of T.
        #[arg(long)]
        t_im: Option<PathBuf>,
        #[arg(long)]
        f: PathBuf,
    },
    /// Ratio, gamma and derived-bound diagnostics for (T, F).
    Probe {
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        t_im: Option<PathBuf>,
        #[arg(long)]
        f: PathBuf,
    },
    /// Gamma(f,g) = F(f,g)F(g,f) - 1.
    Gamma {
        #[arg(long)]
        f: PathBuf,
    },
    /// Check that a zero of a submultiplicative kernel propagates.
    ZeroProp {
        #[arg(long)]
        f: PathBuf,
    },
    /// Grüss inequality for two sampled functions, or `gruss richard`.
    Gruss(GrussArgs),
    /// Sincov defect of the cosine functional on random vector triples.
    Richard(RichardArgs),
    /// Generate a certified random instance.
    Gen {
        #[arg(long)]
        kind: GeneratorKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Also write each kernel to `<dir>/<name>.json`.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Factor a Sincov solution as Phi(f)/Phi(g).
    Factorize {
        #[arg(long)]
        t: PathBuf,
        /// Base point label (default: the first point).
        #[arg(long)]
        base: Option<String>,
    },
    /// Least constant c with |T(f,h) - T(f,g)T(g,h)| <= c.
    Pams {
        #[arg(long)]
        t: PathBuf,
    },
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct GrussArgs {
    #[command(subcommand)]
    pub sub: Option<GrussSub>,
    #[arg(long)]
    pub f: Option<PathBuf>,
    #[arg(long)]
    pub g: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GrussSub {
    Richard(RichardArgs),
}

#[derive(Debug, Args)]
pub struct RichardArgs {
    #[arg(long, default_value_t = 5)]
    pub dim: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violated,
    Infeasible,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violated => 1,
            Status::Infeasible => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Violated => "violated",
            Status::Infeasible => "infeasible",
        }
    }

    fn from_holds(holds: bool) -> Self {
        if holds {
            Status::Ok
        } else {
            Status::Violated
        }
    }
}

pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] Error),
}

pub struct Outcome {
    pub status: Status,
    pub report: Value,
}

impl Outcome {
    fn new(status: Status, report: Value) -> Self {
        Self { status, report }
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

/// Errors that describe the input rather than a usage problem.
fn structural(e: &Error) -> Option<(Status, Value)> {
    let msg = e.to_string();
    let v = match e {
        Error::NegativeCycle { cycle, weight } => {
            json!({"kind": "negative-cycle", "cycle": cycle, "weight": weight, "message": msg})
        }
        Error::VanishingFactor(label) => {
            json!({"kind": "vanishing-factor", "label": label, "message": msg})
        }
        Error::BaseDiagonal { label, value } => {
            json!({"kind": "base-diagonal", "label": label, "value": value, "message": msg})
        }
        Error::NonPositive { row, col, value } => {
            json!({"kind": "non-positive", "row": row, "col": col, "value": value, "message": msg})
        }
        Error::NotSincov {
            defect,
            witness,
            tolerance,
        } => {
            return Some((
                Status::Violated,
                json!({"kind": "not-sincov", "max_defect": defect, "witness": witness,
                       "tolerance": tolerance, "message": msg}),
            ))
        }
        _ => return None,
    };
    Some((Status::Infeasible, v))
}

fn recover(r: Result<Outcome, CliError>) -> Result<Outcome, CliError> {
    match r {
        Err(CliError::Core(e)) => match structural(&e) {
            Some((status, v)) => Ok(Outcome::new(status, json!({ "error": v }))),
            None => Err(CliError::Core(e)),
        },
        other => other,
    }
}

fn kernel(path: &Path) -> Result<Kernel, CliError> {
    Ok(io::load_kernel(path)?)
}

fn functional_pair(
    t: &Path,
    t_im: Option<&Path>,
    f: &Path,
) -> Result<(Kernel, Option<ComplexKernel>, Kernel), CliError> {
    let t = kernel(t)?;
    let c = match t_im {
        Some(p) => Some(ComplexKernel::new(t.clone(), kernel(p)?)?),
        None => None,
    };
    Ok((t, c, kernel(f)?))
}

fn functional<'a>(t: &'a Kernel, c: &'a Option<ComplexKernel>) -> Functional<'a> {
    match c {
        Some(c) => Functional::Complex(c),
        None => Functional::Real(t),
    }
}

fn lp_value(o: &LpOutcome) -> Value {
    json!({
        "status": o.status,
        "objective": o.objective,
        "value": o.value,
        "g": o.g.as_ref().map(io::kernel_value),
        "max_constraint_violation": o.max_constraint_violation,
        "pivots": o.pivots,
        "symmetric": o.options.symmetric,
        "zero_diagonal": o.options.zero_diagonal,
        "diagnostics": o.diagnostics,
    })
}

fn factorization_value(f: &Factorization) -> Value {
    json!({
        "factor": io::potential_value(&f.factor),
        "base": f.factor.points().label(f.base),
        "sincov": f.sincov,
        "base_diagonal": f.base_diagonal,
        "reconstruction_error": f.reconstruction_error,
        "derived_bound": f.derived_bound,
    })
}

/// The defining check of each generated kind.
pub fn generated_check(g: &Generated, tolerance: f64) -> Result<kernineq_core::DefectReport, Error> {
    let k = |name| g.kernel(name).expect("generator outputs are complete");
    match g.spec.kind {
        GeneratorKind::Sincov => defect_scan(DefectKind::Sincov, &[k("T")], tolerance),
        GeneratorKind::Coboundary => defect_scan(DefectKind::Additive, &[k("S")], tolerance),
        GeneratorKind::Subadditive => defect_scan(DefectKind::Triangle, &[k("H")], tolerance),
        GeneratorKind::Submultiplicative => {
            defect_scan(DefectKind::Submultiplicative, &[k("F")], tolerance)
        }
        GeneratorKind::AddPair => additive::check_add(k("S"), k("G"), tolerance),
        GeneratorKind::MainPair => multiplicative::check_main(k("T"), k("F"), tolerance),
    }
}

/// Richard scan with one thread per worker substream.
pub fn richard_parallel(dim: usize, trials: u64, seed: u64) -> Result<RichardReport, Error> {
    if dim < 2 {
        return Err(Error::InvalidArgument("dim must be at least 2"));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1"));
    }
    let parts = std::thread::scope(|s| {
        let handles: Vec<_> = (0..RICHARD_WORKERS)
            .map(|w| s.spawn(move || richard_partial(dim, trials, seed, w)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("richard worker panicked"))
            .collect::<Vec<_>>()
    });
    Ok(richard_merge(dim, trials, seed, parts))
}

fn richard(args: &RichardArgs, seed: u64) -> Result<Outcome, CliError> {
    let r = richard_parallel(args.dim, args.trials, seed)?;
    Ok(Outcome::new(Status::from_holds(r.holds()), to_value(&r)))
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    recover(dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = cli.tolerance;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::InvalidArgument("tolerance must be finite and nonnegative").into());
    }
    Ok(match &cli.command {
        Command::Defect { kind, input } => {
            let ks = input.iter().map(|p| kernel(p)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Kernel> = ks.iter().collect();
            let r = defect_scan(*kind, &refs, tol)?;
            Outcome::new(Status::from_holds(r.holds()), to_value(&r))
        }
        Command::Closure { input, write } => {
            let h = kernel(input)?;
            let closed = subadditive::triangle_closure(&h)?;
            if let Some(p) = write {
                io::write_kernel(&closed, p)?;
            }
            let triangle = defect_scan(DefectKind::Triangle, &[&h], tol)?;
            Outcome::new(
                Status::Ok,
                json!({
                    "closure": io::kernel_value(&closed),
                    "input_triangle": triangle,
                    "max_change": h.max_abs_diff(&closed)?,
                }),
            )
        }
        Command::Represent { input, family } => {
            if let Some(p) = family {
                let fam = io::load_family(p)?;
                let k = subadditive::sup_representation(&fam)?;
                Outcome::new(Status::Ok, json!({ "kernel": io::kernel_value(&k) }))
            } else {
                let h = kernel(input.as_ref().expect("clap enforces one source"))?;
                let fam = subadditive::canonical_potentials(&h)?;
                let k = subadditive::sup_representation(&fam)?;
                Outcome::new(
                    Status::Ok,
                    json!({
                        "family": io::family_value(&fam),
                        "kernel": io::kernel_value(&k),
                        "representation_error": k.max_abs_diff(&h)?,
                    }),
                )
            }
        }
        Command::VerifyCt { input } => {
            let r = subadditive::verify_corollary_ct(&kernel(input)?, tol)?;
            let ok = r.hypotheses_hold && r.representation_matches;
            Outcome::new(Status::from_holds(ok), to_value(&r))
        }
        Command::CheckAdd { s, g } => {
            let r = additive::check_add(&kernel(s)?, &kernel(g)?, tol)?;
            Outcome::new(Status::from_holds(r.holds()), to_value(&r))
        }
        Command::Decompose { s, g } => {
            let d = additive::decompose_p2(&kernel(s)?, &kernel(g)?, tol)?;
            let ok = d.hypothesis.holds() && d.h1_triangle.holds() && d.h2_triangle.holds();
            let mut v = to_value(&d);
            v["h1"] = io::kernel_value(&d.h1);
            v["h2"] = io::kernel_value(&d.h2);
            Outcome::new(Status::from_holds(ok), v)
        }
        Command::Compose { h1, h2, swapped } => {
            let (h1, h2) = (kernel(h1)?, kernel(h2)?);
            let c = if *swapped {
                additive::compose_p3_swapped(&h1, &h2, tol)?
            } else {
                additive::compose_p3(&h1, &h2, tol)?
            };
            let mut v = to_value(&c);
            v["s"] = io::kernel_value(&c.s);
            v["g"] = io::kernel_value(&c.g);
            v["swapped"] = json!(swapped);
            Outcome::new(Status::from_holds(c.add.holds()), v)
        }
        Command::SynthG {
            s,
            objective,
            symmetric,
            zero_diagonal,
        } => {
            let opts = SynthOptions {
                symmetric: *symmetric,
                zero_diagonal: *zero_diagonal,
            };
            let o = additive::synthesize_min_g(&kernel(s)?, *objective, opts)?;
            let status = match o.status {
                LpStatus::Optimal => Status::Ok,
                LpStatus::InfeasibleGuard => Status::Infeasible,
                LpStatus::NumericalFailure => Status::Violated,
            };
            Outcome::new(status, lp_value(&o))
        }
        Command::BuildCh { family1, family2 } => {
            let o = additive::build_ch(&io::load_family(family1)?, &io::load_family(family2)?, tol)?;
            let mut v = to_value(&o);
            v["s"] = io::kernel_value(&o.s);
            v["g"] = io::kernel_value(&o.g);
            Outcome::new(Status::from_holds(o.holds), v)
        }
        Command::CheckMain { t, t_im, f } => {
            let (t, c, f) = functional_pair(t, t_im.as_deref(), f)?;
            let r = multiplicative::check_main(functional(&t, &c), &f, tol)?;
            Outcome::new(Status::from_holds(r.holds()), to_value(&r))
        }
        Command::Probe { t, t_im, f } => {
            let (t, c, f) = functional_pair(t, t_im.as_deref(), f)?;
            let r = multiplicative::theorem_probe(functional(&t, &c), &f, tol)?;
            Outcome::new(Status::from_holds(r.all_bounds_ok()), to_value(&r))
        }
        Command::Gamma { f } => {
            let g = multiplicative::gamma(&kernel(f)?)?;
            Outcome::new(
                Status::Ok,
                json!({
                    "gamma": io::kernel_value(&g),
                    "min": g.min_entry(),
                    "max": g.max_entry(),
                }),
            )
        }
        Command::ZeroProp { f } => {
            let r = multiplicative::zero_propagation_check(&kernel(f)?, tol)?;
            let ok = r.verdict != ZeroPropVerdict::HypothesisViolated;
            Outcome::new(Status::from_holds(ok), to_value(&r))
        }
        Command::Gruss(args) => match (&args.sub, &args.f, &args.g) {
            (Some(GrussSub::Richard(r)), _, _) => richard(r, cli.seed)?,
            (None, Some(f), Some(g)) => {
                let r = kernineq_core::gruss_check(&io::load_sample(f)?, &io::load_sample(g)?, tol)?;
                Outcome::new(Status::from_holds(r.holds), to_value(&r))
            }
            _ => return Err(Error::InvalidArgument("gruss needs --f and --g, or `richard`").into()),
        },
        Command::Richard(r) => richard(r, cli.seed)?,
        Command::Gen { kind, n, scale, dir } => {
            let spec = GeneratorSpec::new(*kind, *n, cli.seed).with_scale(*scale);
            let g = kernineq_core::generate(&spec)?;
            let check = generated_check(&g, tol)?;
            if let Some(d) = dir {
                for (name, k) in &g.kernels {
                    io::write_kernel(k, &d.join(format!("{name}.json")))?;
                }
            }
            let kernels: serde_json::Map<String, Value> = g
                .kernels
                .iter()
                .map(|(name, k)| (name.to_string(), io::kernel_value(k)))
                .collect();
            Outcome::new(
                Status::from_holds(check.holds()),
                json!({
                    "spec": spec,
                    "kernels": kernels,
                    "delta": g.delta,
                    "warnings": g.warnings,
                    "check": check,
                }),
            )
        }
        Command::Factorize { t, base } => {
            let t = kernel(t)?;
            let b = match base {
                Some(l) => t.points().index_of(l)?,
                None => 0,
            };
            let f = kernineq_core::gronau_factorize(&t, b, tol)?;
            Outcome::new(Status::Ok, factorization_value(&f))
        }
        Command::Pams { t } => {
            let t = kernel(t)?;
            let r = pams_report(&t);
            let c = r.max_defect.max(0.0);
            Outcome::new(
                Status::Ok,
                json!({
                    "constant": c,
                    "defect": r,
                    "constant_f": kernineq_core::constant_f_from_c(c)?,
                }),
            )
        }
    })
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Defect { .. } => "defect",
        Command::Closure { .. } => "closure",
        Command::Represent { .. } => "represent",
        Command::VerifyCt { .. } => "verify-ct",
        Command::CheckAdd { .. } => "check-add",
        Command::Decompose { .. } => "decompose",
        Command::Compose { .. } => "compose",
        Command::SynthG { .. } => "synth-g",
        Command::BuildCh { .. } => "build-ch",
        Command::CheckMain { .. } => "check-main",
        Command::Probe { .. } => "probe",
        Command::Gamma { .. } => "gamma",
        Command::ZeroProp { .. } => "zero-prop",
        Command::Gruss(GrussArgs {
            sub: Some(GrussSub::Richard(_)),
            ..
        }) => "gruss richard",
        Command::Gruss(_) => "gruss",
        Command::Richard(_) => "richard",
        Command::Gen { .. } => "gen",
        Command::Factorize { .. } => "factorize",
        Command::Pams { .. } => "pams",
    }
}

/// Wraps a report with the command, status and exit code.
pub fn envelope(cli: &Cli, outcome: &Outcome) -> Value {
    let mut v = json!({
        "command": command_name(&cli.command),
        "status": outcome.status.name(),
        "exit_code": outcome.status.code(),
        "tolerance": cli.tolerance,
        "seed": cli.seed,
        "report": outcome.report,
    });
    if !cli.no_timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        v["timestamp_unix"] = json!(secs);
    }
    v
}

/// Parses `args`, runs the command and writes the report; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            let text = io::to_canonical_string(&envelope(&cli, &outcome));
            let written = match &cli.out {
                Some(p) => io::write_text(p, &text).map_err(|e| e.to_string()),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_USAGE;
            }
            outcome.status.code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}
