//! Command-line front end: `construct`, `verify`, `export`.
//!
//! Exit codes are a stable contract: 0 success, 1 verification failure,
//! 2 usage error (bad arguments, wrong regime, unreadable input).

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::constructors::{
    assemble_inner_handle, assemble_outer_handle, build_quadratic_handle_with,
    symmetric_min_eigenvalue, Certificate, CertificationReport, ContainmentReport, HandleFile,
    HandleOptions, DEFAULT_GRID,
};
use crate::error::{Error, Result};
use crate::levi::{
    levi_consistency, min_eigenvalue, quadratic_tau_hessian_from_jet, LeviConsistency,
};
use crate::profiles::{theta_of_f, RadialProfile, Side};
use crate::pseudoconvexity::{certification_grid, Condition};
use crate::smoothing::Radius;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Caps rayon's worker count when set.
pub const THREADS_ENV: &str = "HANDLE_FORGE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "handle-forge",
    version,
    about = "Strongly pseudoconvex handle profiles with certified margins"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a handle and write handle.json and certify.json.
    Construct(Construct),
    /// Re-run margin sweeps on a saved handle or profile.
    Verify(Verify),
    /// Write plot data as CSV.
    Export(Export),
}

#[derive(Debug, Args)]
pub struct Construct {
    #[command(subcommand)]
    pub kind: ConstructKind,
    /// Directory receiving handle.json and certify.json.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Certification grid size.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Containment samples.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum ConstructKind {
    /// Handle around `|y|² ≥ λ|x|² + a`, λ > 1.
    Outer {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        /// Enlarge η while certification keeps passing.
        #[arg(long)]
        relax: bool,
    },
    /// Handle around `|y|² ≤ λ|x|² + 1`, λ < 1.
    Inner {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
    },
    /// Cap over `ρ = Q(y, w) − |x|²`.
    Quadratic {
        /// `diag:a,b,…` or a whitespace matrix file.
        #[arg(long = "A")]
        a: String,
        #[arg(long = "B")]
        b: String,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConditionArg {
    #[value(name = "2")]
    Two,
    #[value(name = "6")]
    Six,
    #[value(name = "8")]
    Eight,
    #[value(name = "9")]
    Nine,
    #[value(name = "cap")]
    Cap,
}

impl ConditionArg {
    fn label(self) -> &'static str {
        match self {
            ConditionArg::Two => "2",
            ConditionArg::Six => "6",
            ConditionArg::Eight => "8",
            ConditionArg::Nine => "9",
            ConditionArg::Cap => "cap",
        }
    }
}

#[derive(Debug, Args)]
pub struct Verify {
    /// handle.json from `construct`, or a bare profile JSON.
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, value_enum)]
    pub condition: ConditionArg,
    /// Grid size (defaults to the one stored with each check).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Sweep this named profile instead of the stored checks.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    /// λ₁ for `cap` on a bare profile.
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Cross-check the verdicts against restricted Levi spectra in ℂⁿ.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=4))]
    pub levi_oracle: Option<u32>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write the full report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportWhat {
    /// `t, f, f′, f″` of a profile.
    Profile,
    /// `t, f′` with the formula piece in force.
    Fprime,
    /// Boundary polyline in `(|x|, |y|)`.
    Region,
}

#[derive(Debug, Args)]
pub struct Export {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long, value_enum)]
    pub what: ExportWhat,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    /// Sublevel `τ = c` for the quadratic region.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub level: f64,
}

/// Parses arguments, runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// 1 for failed certification or numerical breakdown, 2 for bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotStronglyPsh(_)
        | Error::WrongRegime(_)
        | Error::EpsilonTooLarge(_)
        | Error::DegenerateConstants(_)
        | Error::InvalidArgument(_)
        | Error::ShapeError(_)
        | Error::RadiusTooLarge(_)
        | Error::Io(_)
        | Error::Format(_)
        | Error::OutOfDomain { .. } => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // a pool built earlier in the process keeps its size
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

/// `Ok(passed)`; errors map through [`exit_code`].
pub fn execute(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Construct(c) => construct(c),
        Command::Verify(v) => verify(v),
        Command::Export(e) => export(e).map(|_| true),
    }
}

/// `diag:a,b,…` or a file of whitespace-separated rows; asymmetry above
/// 1e-12 is rejected.
pub fn parse_matrix(spec: &str) -> Result<DMatrix<f64>> {
    let m = if let Some(list) = spec.strip_prefix("diag:") {
        let d = list
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad diagonal {list:?}: {e}")))?;
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
    } else {
        let text = fs::read_to_string(spec)?;
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(str::parse::<f64>)
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Format(format!("{spec}: {e}")))?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeError(format!("{spec} is not a square matrix")));
        }
        DMatrix::from_fn(n, n, |i, j| rows[i][j])
    };
    if m.nrows() == 0 {
        return Err(Error::ShapeError("empty matrix".into()));
    }
    symmetric_min_eigenvalue(&m)?;
    Ok(m)
}

#[derive(Serialize)]
struct CertifyFile<'a> {
    kind: &'a str,
    passed: bool,
    report: &'a CertificationReport,
    containment: &'a ContainmentReport,
}

fn construct(c: &Construct) -> Result<bool> {
    if c.grid < 2 {
        return Err(Error::InvalidArgument("grid must be at least 2".into()));
    }
    let opts = |relax| HandleOptions {
        relax,
        grid: c.grid,
        radius: Radius::DEFAULT,
        ..Default::default()
    };
    let (kind, file, report, containment) = match &c.kind {
        ConstructKind::Outer {
            lambda,
            a,
            eps,
            relax,
        } => {
            let h = assemble_outer_handle(*lambda, *a, *eps, &opts(*relax))?;
            let cont = h.containment(2, c.samples, 10.0, c.seed)?;
            println!("outer handle: λ = {lambda}, a = {a}, ε = {eps}, η = {:e}, log σ = {}, relax steps {}", h.constants.eta, h.constants.log_sigma, h.relax_steps);
            ("outer", h.to_file()?, h.report, cont)
        }
        ConstructKind::Inner { lambda, eps } => {
            let h = assemble_inner_handle(*lambda, *eps, &opts(false))?;
            let cont = h.containment(2, c.samples, 10.0, c.seed)?;
            println!(
                "inner handle: λ = {lambda}, ε = {eps}, η = {:e}, log σ = {}",
                h.constants.eta, h.constants.log_sigma
            );
            ("inner", h.to_file()?, h.report, cont)
        }
        ConstructKind::Quadratic { a, b, r, eps } => {
            let (ma, mb) = (parse_matrix(a)?, parse_matrix(b)?);
            let h = build_quadratic_handle_with(&ma, &mb, *r, *eps, c.grid, Radius::DEFAULT)?;
            let cont = h.containment(c.samples, 10.0, c.seed)?;
            let k = &h.constants;
            println!(
                "quadratic handle: t₀ = {}, δ = {}, μ = {}, R = {}, h(R) = {}, c₀ = {}",
                k.t0, k.delta, k.mu, k.big_r, k.h_big_r, k.c0
            );
            ("quadratic", h.to_file()?, h.report, cont)
        }
    };
    fs::create_dir_all(&c.out_dir)?;
    file.save(&c.out_dir.join("handle.json"))?;
    let passed = report.passed && containment.passed;
    let certify = CertifyFile {
        kind,
        passed,
        report: &report,
        containment: &containment,
    };
    fs::write(
        c.out_dir.join("certify.json"),
        serde_json::to_string_pretty(&certify)?,
    )?;
    print_report(&report);
    println!(
        "containment: {} samples, {} inside, {} + {} violations",
        containment.samples,
        containment.inside,
        containment.inner_violations,
        containment.outer_violations
    );
    println!("{}", if passed { "certified" } else { "NOT certified" });
    Ok(passed)
}

fn print_report(r: &CertificationReport) {
    for c in &r.certificates {
        print_certificate(c);
    }
    for s in &r.smoothing {
        println!(
            "{} smoothing {}: {} windows, {} skipped, margin {:e} -> {:e}",
            mark(s.accepted),
            s.profile,
            s.windows.len(),
            s.skipped.len(),
            s.margin_before,
            s.margin_after
        );
    }
    for c in &r.claims {
        println!("{} {} (slack {:e})", mark(c.holds), c.name, c.slack);
    }
}

fn print_certificate(c: &Certificate) {
    println!(
        "{} {}: min margin {:e} at {:e} over {} points",
        mark(c.report.passed),
        c.name,
        c.report.min_margin,
        c.report.location,
        c.report.points
    );
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok  "
    } else {
        "FAIL"
    }
}

/// A handle file or a bare profile.
enum Source {
    Handle(HandleFile),
    Bare(RadialProfile),
}

fn load(path: &Path) -> Result<Source> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("kind").is_some() && value.get("profiles").is_some() {
        Ok(Source::Handle(serde_json::from_value(value)?))
    } else {
        Ok(Source::Bare(serde_json::from_value(value)?))
    }
}

fn default_profile(kind: &str) -> &'static str {
    if kind == "quadratic" {
        "h"
    } else {
        "f_smoothed"
    }
}

/// The interval to sweep: explicit bounds, else the domain, else (for an
/// unbounded handle profile) out to `4ε`.
fn interval(
    p: &RadialProfile,
    lo: Option<f64>,
    hi: Option<f64>,
    src: &Source,
) -> Result<(f64, f64)> {
    let d = p.domain();
    let lo = lo.unwrap_or(d.lo);
    let hi = match hi {
        Some(h) => h,
        None if d.hi.is_finite() => d.hi,
        None => match src {
            Source::Handle(f) => {
                let scale = f.constants.get("a").map_or(1.0, |a| a.sqrt());
                let eps = f.constant("eps")?;
                if f.kind == "quadratic" {
                    2.0 * f.constant("big_r")?
                } else {
                    (4.0 * eps * scale).max(d.lo + eps)
                }
            }
            Source::Bare(_) => {
                return Err(Error::InvalidArgument(
                    "profile is unbounded; pass --hi".into(),
                ))
            }
        },
    };
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "empty interval [{lo}, {hi}]"
        )));
    }
    Ok((lo, hi))
}

fn condition_for(arg: ConditionArg, src: &Source, lambda1: Option<f64>) -> Result<Condition> {
    Ok(match arg {
        ConditionArg::Two => Condition::Ineq2,
        ConditionArg::Six => Condition::Ineq6,
        ConditionArg::Eight => Condition::Ineq8,
        ConditionArg::Nine => Condition::Ineq9,
        ConditionArg::Cap => {
            let l = match (lambda1, src) {
                (Some(l), _) => l,
                (None, Source::Handle(f)) => f.constant("lambda1")?,
                (None, Source::Bare(_)) => {
                    return Err(Error::InvalidArgument(
                        "cap on a bare profile needs --lambda1".into(),
                    ))
                }
            };
            Condition::Cap { lambda1: l }
        }
    })
}

/// A sweep of `condition` over `[lo, hi]` of a t-profile; condition 2 runs
/// on `θ(s) = f(√s)²` over `[lo², hi²]`.
fn sweep_certificate(
    name: &str,
    profile: &str,
    p: &RadialProfile,
    cond: Condition,
    lo: f64,
    hi: f64,
    grid: usize,
) -> Result<Certificate> {
    if cond == Condition::Ineq2 {
        let theta = theta_of_f(p)?;
        return Certificate::run(name, profile, &theta, cond, lo * lo, hi * hi, grid);
    }
    Certificate::run(name, profile, p, cond, lo, hi, grid)
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    certificates: Vec<Certificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    levi: Vec<(String, LeviConsistency)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau_min_eigenvalue: Option<f64>,
}

fn verify(v: &Verify) -> Result<bool> {
    let src = load(&v.profile)?;
    let grid = v.grid;
    if grid.is_some_and(|g| g < 2) {
        return Err(Error::InvalidArgument("grid must be at least 2".into()));
    }
    let cond = condition_for(v.condition, &src, v.lambda1)?;
    let custom = v.name.is_some() || v.lo.is_some() || v.hi.is_some();
    let certificates = match &src {
        Source::Handle(f)
            if !custom
                && f.checks
                    .iter()
                    .any(|c| c.condition.label() == v.condition.label()) =>
        {
            f.rerun(Some(v.condition.label()), grid)?
        }
        Source::Handle(f) => {
            let name = v
                .name
                .clone()
                .unwrap_or_else(|| default_profile(&f.kind).into());
            let p = f.profile(&name)?;
            let (lo, hi) = interval(p, v.lo, v.hi, &src)?;
            let label = format!("({}) for {name} on [{lo:e}, {hi:e}]", v.condition.label());
            vec![sweep_certificate(
                &label,
                &name,
                p,
                cond,
                lo,
                hi,
                grid.unwrap_or(DEFAULT_GRID),
            )?]
        }
        Source::Bare(p) => {
            let (lo, hi) = interval(p, v.lo, v.hi, &src)?;
            let label = format!("({}) on [{lo:e}, {hi:e}]", v.condition.label());
            vec![sweep_certificate(
                &label,
                "profile",
                p,
                cond,
                lo,
                hi,
                grid.unwrap_or(DEFAULT_GRID),
            )?]
        }
    };
    let mut passed = true;
    for c in &certificates {
        print_certificate(c);
        passed &= c.report.passed;
    }
    let mut levi = Vec::new();
    let mut tau_min = None;
    if let Some(n) = v.levi_oracle {
        if cond.label() == "cap" {
            let Source::Handle(f) = &src else {
                return Err(Error::InvalidArgument(
                    "the τ oracle needs a quadratic handle file".into(),
                ));
            };
            let m = tau_min_eigenvalue(f, 10_000, v.seed)?;
            println!(
                "{} min eigenvalue of the complex Hessian of τ over 10⁴ points: {m:e}",
                mark(m > 0.0)
            );
            passed &= m > 0.0;
            tau_min = Some(m);
        } else {
            for c in &certificates {
                let p = match &src {
                    Source::Handle(f) => f.profile(&c.profile)?,
                    Source::Bare(p) => p,
                };
                let theta = if cond == Condition::Ineq2 {
                    p.clone()
                } else {
                    theta_of_f(p)?
                };
                let (slo, shi) = if cond == Condition::Ineq2 {
                    (c.lo, c.hi)
                } else {
                    (c.lo * c.lo, c.hi * c.hi)
                };
                let radii: Vec<f64> = (0..50)
                    .map(|i| slo + (shi - slo) * (i as f64 + 0.5) / 50.0)
                    .collect();
                let r = levi_consistency(&theta, &radii, n as usize, 20, v.seed)?;
                println!(
                    "{} Levi oracle n = {n} on {}: {} points, {} of {} radii decided, {} exceptions",
                    mark(r.exceptions == 0),
                    c.name,
                    r.points,
                    r.decided,
                    r.radii,
                    r.exceptions
                );
                passed &= r.exceptions == 0;
                levi.push((c.name.clone(), r));
            }
        }
    }
    if let Some(path) = &v.report {
        let rep = VerifyReport {
            passed,
            certificates,
            levi,
            tau_min_eigenvalue: tau_min,
        };
        fs::write(path, serde_json::to_string_pretty(&rep)?)?;
    }
    Ok(passed)
}

/// Smallest eigenvalue of the complex Hessian of `τ = Q − h(|x|²)` at
/// seeded points with `|x|² ∈ [0, 2R]`.
fn tau_min_eigenvalue(f: &HandleFile, count: usize, seed: u64) -> Result<f64> {
    let (a, b) = f.matrices()?;
    let h = f.profile("h")?;
    let rmax = (2.0 * f.constant("big_r")?).sqrt();
    let k = a.nrows();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..count {
        let dir: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let r = rmax * rng.random::<f64>().sqrt();
        let x: Vec<f64> = dir.iter().map(|v| v / norm * r).collect();
        let s: f64 = x.iter().map(|v| v * v).sum();
        let jet = h.one_sided(s.min(h.domain().hi), Side::Right)?;
        worst = worst.min(min_eigenvalue(&quadratic_tau_hessian_from_jet(
            &a, &b, jet, &x,
        )?));
    }
    Ok(worst)
}

fn export(e: &Export) -> Result<()> {
    if e.n < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    let src = load(&e.profile)?;
    let out = BufWriter::new(File::create(&e.out)?);
    match e.what {
        ExportWhat::Profile | ExportWhat::Fprime => {
            let (name, p) = match &src {
                Source::Handle(f) => {
                    let default = if e.what == ExportWhat::Fprime && f.kind != "quadratic" {
                        "f"
                    } else {
                        default_profile(&f.kind)
                    };
                    let name = e.name.clone().unwrap_or_else(|| default.into());
                    let p = f.profile(&name)?.clone();
                    (name, p)
                }
                Source::Bare(p) => ("profile".to_string(), p.clone()),
            };
            let (lo, hi) = interval(&p, e.lo, e.hi, &src)?;
            let ts = certification_grid(&p, lo, hi, e.n)?;
            if e.what == ExportWhat::Profile {
                p.write_csv(&ts, out)?;
            } else {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["t", "fprime", "piece"])?;
                for t in ts {
                    let j = p.one_sided(t, Side::Right)?;
                    let tag = p.segments()[p.segment_index(t)].kind.tag();
                    w.write_record([format!("{t:e}"), format!("{:e}", j.d1), tag.to_string()])?;
                }
                w.flush()?;
            }
            println!(
                "wrote {} for {name} on [{lo:e}, {hi:e}] to {}",
                what_name(e.what),
                e.out.display()
            );
        }
        ExportWhat::Region => {
            let (header, pts) = match &src {
                Source::Handle(f) => {
                    let header = if f.kind == "quadratic" {
                        ["x_abs", "sqrt_q"]
                    } else {
                        ["x_abs", "y_abs"]
                    };
                    let pts = f.region_boundary(e.n, e.level)?;
                    (header, pts)
                }
                Source::Bare(p) => {
                    let (lo, hi) = interval(p, e.lo, e.hi, &src)?;
                    let pts = (0..e.n)
                        .map(|i| {
                            let t = lo + (hi - lo) * i as f64 / (e.n - 1) as f64;
                            Ok((t, p.value(t)?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    (["x_abs", "y_abs"], pts)
                }
            };
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header)?;
            for (a, b) in &pts {
                w.write_record([format!("{a:e}"), format!("{b:e}")])?;
            }
            w.flush()?;
            println!("wrote {} boundary points to {}", pts.len(), e.out.display());
        }
    }
    Ok(())
}

fn what_name(w: ExportWhat) -> &'static str {
    match w {
        ExportWhat::Profile => "profile",
        ExportWhat::Fprime => "f′",
        ExportWhat::Region => "region",
    }
}
