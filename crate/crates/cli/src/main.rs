//! `heatkernel`: evaluate heat kernels on the plane, the sphere, the
//! hyperbolic plane and their quotients, and run the self-check suites.

mod table;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use heatkernel::kernels::{k0, k1, k2};
use heatkernel::quotient::{k0_quotient, k1_quotient_flat};
use heatkernel::specfun::mehler_fock_forward;
use heatkernel::verify::TestProfile;
use heatkernel::{CoveringGroupSpec, Point, QuotientSurface, SpectralParameter, Suite, SurfaceKind, ToleranceBudget};

use table::{Cell, Format, Table};

const POINT_HELP: &str = "point as c1,c2 in the polar chart: (r, θ) on the plane and the \
                          hyperbolic plane, (φ, θ) on the sphere; radians";
const RANGE_HELP: &str = "a value or start:stop:count (count evenly spaced values, endpoints included)";
const MAX_ROWS: usize = 1_000_000;

#[derive(Parser)]
#[command(
    name = "heatkernel",
    version,
    about = "Heat kernels for 0-, 1- and 2-forms on model surfaces and their quotients",
    long_about = "Heat kernels for 0-, 1- and 2-forms on the plane, the sphere and the hyperbolic \
                  plane, and image sums over covering groups.\n\nAll angles are in radians. \
                  1-form kernels are 2x2 matrices in the unit coframes (dc1, S dc2) at x (rows) and \
                  y (columns).\n\nExit codes: 0 success, 1 failed verification, 2 invalid input, \
                  3 numerical nonconvergence."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kernel values at point pairs.
    Eval(EvalArgs),
    /// Kernel values over a grid of first points and times.
    Grid(GridArgs),
    /// Mehler–Fock transform of a test profile.
    Transform(TransformArgs),
    /// Image-sum kernel of a quotient surface.
    Quotient(QuotientArgs),
    /// Run a self-check suite.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Budget {
    /// Absolute error budget.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SurfaceArg {
    Plane,
    Sphere,
    Hyperbolic,
}

impl SurfaceArg {
    fn kind(self) -> SurfaceKind {
        match self {
            SurfaceArg::Plane => SurfaceKind::Euclidean,
            SurfaceArg::Sphere => SurfaceKind::Sphere,
            SurfaceArg::Hyperbolic => SurfaceKind::Hyperbolic,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SurfaceArg::Plane => "plane",
            SurfaceArg::Sphere => "sphere",
            SurfaceArg::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    surface: SurfaceArg,
    /// Form degree: 0, 1 or 2.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
    degree: u8,
    /// First point; repeat for several pairs.
    #[arg(long, required = true, value_parser = parse_pair, help = POINT_HELP)]
    x: Vec<(f64, f64)>,
    /// Second point; repeat, or give once to pair with every x.
    #[arg(long, required = true, value_parser = parse_pair, help = POINT_HELP)]
    y: Vec<(f64, f64)>,
    #[arg(long)]
    t: f64,
    #[command(flatten)]
    budget: Budget,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, value_enum)]
    surface: SurfaceArg,
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
    degree: u8,
    /// First coordinate of x.
    #[arg(long, value_parser = parse_range, help = RANGE_HELP)]
    x1: Range,
    /// Second coordinate of x.
    #[arg(long, value_parser = parse_range, help = RANGE_HELP)]
    x2: Range,
    #[arg(long, value_parser = parse_pair, help = POINT_HELP)]
    y: (f64, f64),
    #[arg(long, value_parser = parse_range, help = RANGE_HELP)]
    t: Range,
    #[command(flatten)]
    budget: Budget,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Direction {
    Forward,
    Inverse,
    Roundtrip,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    direction: Direction,
    /// Test profile: gaussian (r e^{-r^2}) or heat (radial derivative of the H^2 kernel at t = 1/2).
    #[arg(long, default_value = "gaussian")]
    profile: String,
    /// Spectral parameters for the forward transform.
    #[arg(long, value_parser = parse_range, default_value = "0:10:11", help = RANGE_HELP)]
    rho: Range,
    /// Radii for the inverse transform.
    #[arg(long, value_parser = parse_range, default_value = "0:4:9", help = RANGE_HELP)]
    r: Range,
    #[command(flatten)]
    budget: Budget,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct QuotientArgs {
    /// torus, cylinder, hyperbolic-cylinder, plane, sphere or hyperbolic.
    #[arg(long)]
    model: String,
    /// Generators v1x,v1y,v2x,v2y in Cartesian coordinates (the cylinder uses v1).
    #[arg(long, value_parser = parse_lattice)]
    lattice: Option<[f64; 4]>,
    /// Translation length of the hyperbolic cylinder.
    #[arg(long)]
    ell: Option<f64>,
    /// 0 (scalar) or 1 (flat quotients only).
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    degree: u8,
    #[arg(long, value_parser = parse_pair, help = POINT_HELP)]
    x: (f64, f64),
    #[arg(long, value_parser = parse_pair, help = POINT_HELP)]
    y: (f64, f64),
    #[arg(long)]
    t: f64,
    #[command(flatten)]
    budget: Budget,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    /// Replace every check's tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(heatkernel::Error),
    Io(io::Error),
}

impl From<heatkernel::Error> for CliError {
    fn from(e: heatkernel::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn report(&self) -> (u8, String) {
        use heatkernel::Error as E;
        let (code, tag, msg) = match self {
            CliError::Usage(m) => (2, "usage", m.clone()),
            CliError::Io(e) => (2, "io", e.to_string()),
            CliError::Lib(e @ (E::NonConvergence { .. } | E::TooManyElements { .. })) => {
                (3, "nonconvergence", e.to_string())
            }
            CliError::Lib(e @ E::Unsupported(_)) => (2, "unsupported", e.to_string()),
            CliError::Lib(e) => (2, "usage", e.to_string()),
        };
        (code, format!("error[{tag}]: {}", msg.replace('\n', " ")))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(v)
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok((parse_f64(a)?, parse_f64(b)?)),
        _ => Err(format!("expected c1,c2, got '{s}'")),
    }
}

fn parse_lattice(s: &str) -> std::result::Result<[f64; 4], String> {
    let v: Vec<f64> = s.split(',').map(parse_f64).collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected four comma-separated numbers, got '{s}'"))
}

/// Values of a `start:stop:count` range.
#[derive(Debug, Clone)]
struct Range(Vec<f64>);

fn parse_range(s: &str) -> std::result::Result<Range, String> {
    parse_range_values(s).map(Range)
}

fn parse_range_values(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![parse_f64(v)?]),
        [a, b, n] => {
            let (a, b) = (parse_f64(a)?, parse_f64(b)?);
            let n: usize = n.trim().parse().map_err(|_| format!("count '{n}' is not a nonnegative integer"))?;
            if n > MAX_ROWS {
                return Err(format!("count {n} exceeds the limit of {MAX_ROWS}"));
            }
            Ok(match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            })
        }
        _ => Err(format!("expected a value or start:stop:count, got '{s}'")),
    }
}

fn budget(tol: f64) -> CliResult<ToleranceBudget> {
    ToleranceBudget::with_tol(tol).map_err(|e| CliError::Usage(e.to_string()))
}

fn emit(table: &Table, output: &Output) -> CliResult<()> {
    match &output.out {
        Some(path) => {
            let mut f = File::create(path)?;
            table.write(output.format, &mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(output.format, &mut lock)?;
        }
    }
    Ok(())
}

fn kernel_header(degree: u8) -> Vec<&'static str> {
    let mut h = vec!["surface", "degree", "x1", "x2", "y1", "y2", "t"];
    if degree == 1 {
        h.extend(["m11", "m12", "m21", "m22"]);
    } else {
        h.push("value");
    }
    h.extend(["err_est", "terms", "radius"]);
    h
}

fn kernel_row(
    surface: &str,
    kind: SurfaceKind,
    degree: u8,
    xc: (f64, f64),
    yc: (f64, f64),
    t: f64,
    b: &ToleranceBudget,
) -> CliResult<Vec<Cell>> {
    let x = Point::new(kind, xc.0, xc.1)?;
    let y = Point::new(kind, yc.0, yc.1)?;
    let mut row: Vec<Cell> = vec![
        surface.into(),
        Cell::Int(degree as u64),
        xc.0.into(),
        xc.1.into(),
        yc.0.into(),
        yc.1.into(),
        t.into(),
    ];
    let (err, terms, radius) = match degree {
        1 => {
            let k = k1(kind, &x, &y, t, b)?;
            row.extend(k.matrix.to_array().map(Cell::from));
            (k.err_est, k.terms, k.radius)
        }
        _ => {
            let k = if degree == 0 { k0(kind, &x, &y, t, b)? } else { k2(kind, &x, &y, t, b)? };
            row.push(k.value.into());
            (k.err_est, k.terms, k.radius)
        }
    };
    check_budget("kernel evaluation", err, b)?;
    row.extend([err.into(), terms.into(), radius.into()]);
    Ok(row)
}

/// An estimate above the requested budget is reported as nonconvergence.
fn check_budget(context: &'static str, achieved: f64, b: &ToleranceBudget) -> CliResult<()> {
    if achieved > b.abs_tol || achieved.is_nan() {
        return Err(CliError::Lib(heatkernel::Error::NonConvergence {
            context,
            achieved,
            requested: b.abs_tol,
        }));
    }
    Ok(())
}

fn run_eval(args: EvalArgs) -> CliResult<Table> {
    let b = budget(args.budget.tol)?;
    let pairs: Vec<((f64, f64), (f64, f64))> = match (args.x.len(), args.y.len()) {
        (n, m) if n == m => args.x.iter().copied().zip(args.y.iter().copied()).collect(),
        (_, 1) => args.x.iter().map(|&x| (x, args.y[0])).collect(),
        (1, _) => args.y.iter().map(|&y| (args.x[0], y)).collect(),
        (n, m) => return Err(CliError::Usage(format!("{n} values of --x cannot be paired with {m} values of --y"))),
    };
    let mut table = Table::new(kernel_header(args.degree));
    for (x, y) in pairs {
        table.push(kernel_row(args.surface.name(), args.surface.kind(), args.degree, x, y, args.t, &b)?);
    }
    Ok(table)
}

fn run_grid(args: GridArgs) -> CliResult<Table> {
    let b = budget(args.budget.tol)?;
    let n = args.x1.0.len().saturating_mul(args.x2.0.len()).saturating_mul(args.t.0.len());
    if n > MAX_ROWS {
        return Err(CliError::Usage(format!("grid of {n} rows exceeds the limit of {MAX_ROWS}")));
    }
    let mut cells = Vec::with_capacity(n);
    for &a in &args.x1.0 {
        for &c in &args.x2.0 {
            for &t in &args.t.0 {
                cells.push(((a, c), t));
            }
        }
    }
    let rows: Vec<Vec<Cell>> = cells
        .par_iter()
        .map(|&(x, t)| kernel_row(args.surface.name(), args.surface.kind(), args.degree, x, args.y, t, &b))
        .collect::<CliResult<_>>()?;
    let mut table = Table::new(kernel_header(args.degree));
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

fn run_transform(args: TransformArgs) -> CliResult<Table> {
    let b = budget(args.budget.tol)?;
    let p = TestProfile::named(&args.profile).map_err(|e| CliError::Usage(e.to_string()))?;
    match args.direction {
        Direction::Forward => {
            let mut table = Table::new(vec!["profile", "direction", "rho", "value", "exact", "err_est"]);
            let vals: Vec<_> = args
                .rho
                .0
                .par_iter()
                .map(|&rho| Ok(mehler_fock_forward(&p.profile, SpectralParameter::new(rho)?, &b)?))
                .collect::<CliResult<_>>()?;
            for (&rho, v) in args.rho.0.iter().zip(vals) {
                let exact = p.exact_transform.map_or(f64::NAN, |f| f(rho));
                table.push(vec![p.name.into(), "forward".into(), rho.into(), v.value.into(), exact.into(), v.err_est.into()]);
            }
            Ok(table)
        }
        Direction::Inverse => {
            let mut table = Table::new(vec!["profile", "direction", "r", "value", "exact", "err_est"]);
            let vals = p.reconstruct(&args.r.0, &b)?;
            for (&r, v) in args.r.0.iter().zip(vals) {
                table.push(vec![p.name.into(), "inverse".into(), r.into(), v.value.into(), p.eval(r).into(), v.err_est.into()]);
            }
            Ok(table)
        }
        Direction::Roundtrip => {
            let tolerance = 1e-4;
            let err = p.round_trip_error(&b)?;
            let mut table = Table::new(vec!["profile", "direction", "rel_l2_error", "tolerance", "passed"]);
            table.push(vec![p.name.into(), "roundtrip".into(), err.into(), tolerance.into(), (err <= tolerance).into()]);
            Ok(table)
        }
    }
}

fn run_quotient(args: QuotientArgs) -> CliResult<Table> {
    let b = budget(args.budget.tol)?;
    let spec = CoveringGroupSpec::named(&args.model, args.lattice, args.ell)?;
    let q = QuotientSurface::new(spec)?;
    let kind = q.base();
    let x = q.reduce(&Point::new(kind, args.x.0, args.x.1)?)?;
    let y = q.reduce(&Point::new(kind, args.y.0, args.y.1)?)?;
    let mut row: Vec<Cell> = vec![
        args.model.as_str().into(),
        Cell::Int(args.degree as u64),
        args.x.0.into(),
        args.x.1.into(),
        args.y.0.into(),
        args.y.1.into(),
        args.t.into(),
    ];
    let (err, terms, radius) = if args.degree == 1 {
        let k = k1_quotient_flat(&q, &x, &y, args.t, &b)?;
        row.extend(k.matrix.to_array().map(Cell::from));
        (k.err_est, k.terms, k.radius)
    } else {
        let k = k0_quotient(&q, &x, &y, args.t, &b)?;
        row.push(k.value.into());
        (k.err_est, k.terms, k.radius)
    };
    check_budget("image sum", err, &b)?;
    row.extend([err.into(), terms.into(), radius.into()]);
    let mut table = Table::new(kernel_header(args.degree));
    table.push(row);
    Ok(table)
}

fn run_verify(args: VerifyArgs) -> CliResult<(Table, bool)> {
    let suite: Suite = args.suite.parse().map_err(|e: heatkernel::Error| CliError::Usage(e.to_string()))?;
    let records = heatkernel::run_suite(suite, args.tol)?;
    let mut table = Table::new(vec!["suite", "name", "measured", "tolerance", "passed"]);
    let mut all = true;
    for r in records {
        all &= r.passed;
        table.push(vec![r.suite.into(), r.name.into(), r.measured.into(), r.tolerance.into(), r.passed.into()]);
    }
    Ok((table, all))
}

fn run(cli: Cli) -> CliResult<u8> {
    let (table, output, code) = match cli.command {
        Command::Eval(a) => {
            let o = a.output.clone();
            (run_eval(a)?, o, 0)
        }
        Command::Grid(a) => {
            let o = a.output.clone();
            (run_grid(a)?, o, 0)
        }
        Command::Transform(a) => {
            let o = a.output.clone();
            (run_transform(a)?, o, 0)
        }
        Command::Quotient(a) => {
            let o = a.output.clone();
            (run_quotient(a)?, o, 0)
        }
        Command::Verify(a) => {
            let o = a.output.clone();
            let (t, ok) = run_verify(a)?;
            (t, o, if ok { 0 } else { 1 })
        }
    };
    emit(&table, &output)?;
    if code == 1 {
        eprintln!("error[verify]: one or more checks exceeded their tolerance");
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (code, line) = e.report();
            eprintln!("{line}");
            ExitCode::from(code)
        }
    }
}
