use clap::{Args, Parser, Subcommand, ValueEnum};
use shearwave::cst::{self, FieldDomain, CSV_HEADER};
use shearwave::microlocal::{self, EnvelopeKind};
use shearwave::oracle::{self, ConeQuery, OracleConfig};
use shearwave::signals::{self, parse_signal_spec};
use shearwave::wavefront::{self, DirectionQuery, Membership, ScanConfig};
use shearwave::{report, AnalyticSignal, ExecPolicy, Orientation, Point, ShearletSystem, Variant};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod selftest;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] shearwave::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0} self-test check(s) failed")]
    SelfTest(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_usage() => 2,
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "shearwave", version, about = "Continuous shearlet transform and Sobolev wavefront estimates")]
struct Cli {
    /// Worker threads (SHEARWAVE_THREADS overrides; default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump shearlet coefficients as CSV.
    Transform(TransformArgs),
    /// Estimate Sobolev wavefront orders along directions at points.
    Wavefront(WavefrontArgs),
    /// Pointwise Hölder estimates from coefficient decay.
    Holder(HolderArgs),
    /// Run the invariant suite and print residuals.
    Selftest(SelftestArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    Standard,
    Narrow,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Standard => Variant::Standard,
            VariantArg::Narrow => Variant::NarrowPositive,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OrientationArg {
    H,
    V,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::H => Orientation::Horizontal,
            OrientationArg::V => Orientation::Vertical,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Necessary,
    Sufficient,
}

#[derive(Args, Debug)]
struct TransformArgs {
    /// Signal spec, e.g. delta@0,0 or box@0,0,1,1.
    #[arg(long)]
    signal: String,
    #[arg(long)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    s: f64,
    #[arg(long, value_enum, default_value = "h")]
    orientation: OrientationArg,
    #[arg(long, value_enum, default_value = "standard")]
    variant: VariantArg,
    /// Full field on an NxE grid (N samples per side, period E).
    #[arg(long)]
    grid: Option<String>,
    /// Center of the field grid; defaults to a per-signal choice.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    /// Individual positions "x,y;x,y" evaluated by quadrature.
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, value_enum, default_value = "standard")]
    variant: VariantArg,
    #[arg(long, default_value_t = 8)]
    j_min: u32,
    #[arg(long, default_value_t = 28)]
    j_max: u32,
    #[arg(long, default_value_t = 12)]
    fit_count: usize,
    #[arg(long, default_value_t = 0.1)]
    r0: f64,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
}

impl ScanArgs {
    fn config(&self, policy: ExecPolicy) -> ScanConfig {
        ScanConfig {
            j_min: self.j_min,
            j_max: self.j_max,
            fit_count: self.fit_count,
            r0: self.r0,
            epsilon: self.epsilon,
            variant: self.variant.into(),
            policy,
            ..ScanConfig::default()
        }
    }
}

#[derive(Args, Debug)]
struct WavefrontArgs {
    #[arg(long)]
    signal: String,
    /// "x,y;x,y" or boundary:N.
    #[arg(long, allow_hyphen_values = true)]
    points: String,
    /// Number of evenly spaced directions.
    #[arg(long, default_value_t = 8)]
    dirs: usize,
    /// Cross-check every query against the Fourier-cone oracle.
    #[arg(long)]
    oracle: bool,
    /// Sobolev orders for membership flags; repeatable.
    #[arg(long = "m", allow_negative_numbers = true)]
    m: Vec<f64>,
    /// Directory for per-cone log eta / log sup CSVs.
    #[arg(long)]
    plot_dir: Option<PathBuf>,
    #[command(flatten)]
    scan: ScanArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HolderArgs {
    #[arg(long)]
    signal: String,
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    #[arg(long, default_value_t = 8)]
    dirs: usize,
    /// Also check a 2-microlocal envelope at the fitted exponent.
    #[arg(long)]
    envelope: bool,
    /// tau' of the envelope check; defaults to -tau.
    #[arg(long, allow_negative_numbers = true)]
    tau_prime: Option<f64>,
    #[arg(long, value_enum, default_value = "necessary")]
    kind: KindArg,
    #[command(flatten)]
    scan: ScanArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Halve tolerances and double quadrature orders.
    #[arg(long)]
    strict: bool,
    /// Seed of the random test signals.
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn parse_point(text: &str) -> CliResult<Point> {
    let v: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad point `{text}`; expected x,y")))?;
    match v.as_slice() {
        [x, y] => Ok([*x, *y]),
        _ => Err(CliError::Usage(format!("bad point `{text}`; expected x,y"))),
    }
}

fn parse_points(text: &str, signal: &AnalyticSignal) -> CliResult<Vec<Point>> {
    if let Some(count) = text.strip_prefix("boundary:") {
        let count: usize =
            count.parse().map_err(|_| CliError::Usage(format!("bad point set `{text}`; expected boundary:N")))?;
        return Ok(wavefront::boundary_points(signal, count)?);
    }
    text.split(';').filter(|p| !p.trim().is_empty()).map(parse_point).collect()
}

fn parse_grid(text: &str) -> CliResult<(usize, f64)> {
    let bad = || CliError::Usage(format!("bad grid `{text}`; expected NxE, e.g. 256x4"));
    let (n, e) = text.split_once('x').ok_or_else(bad)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let e: f64 = e.trim().parse().map_err(|_| bad())?;
    if !n.is_power_of_two() || n < 8 {
        return Err(CliError::Usage(format!("grid size must be a power of two >= 8, got {n}")));
    }
    if !(e > 0.0) {
        return Err(CliError::Usage(format!("grid extent must be positive, got {e}")));
    }
    Ok((n, e))
}

fn output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_transform(args: &TransformArgs, policy: ExecPolicy) -> CliResult<()> {
    let signal = parse_signal_spec(&args.signal)?;
    let system = ShearletSystem::new(args.variant.into());
    let orientation: Orientation = args.orientation.into();
    let mut w = output(&args.out)?;
    writeln!(w, "{CSV_HEADER}")?;
    match (&args.grid, &args.points) {
        (Some(grid), None) => {
            let (n, extent) = parse_grid(grid)?;
            let center = match &args.center {
                Some(c) => parse_point(c)?,
                None => FieldDomain::for_signal(&signal).center,
            };
            let fhat = signals::sample_fourier_grid(&signal, n, extent, policy)?;
            let field = cst::sh_field(&system, &fhat, args.a, args.s, orientation, center, policy)?;
            field.write_csv(&mut w)?;
        }
        (None, Some(points)) => {
            for t in parse_points(points, &signal)? {
                let v = cst::sh_point(&system, &signal, args.a, args.s, t, orientation)?;
                writeln!(w, "{},{},{},{},{},{:e},{:e}", args.a, args.s, orientation.short(), t[0], t[1], v.value.re, v.value.im)?;
            }
        }
        _ => return Err(CliError::Usage("transform needs exactly one of --grid or --points".into())),
    }
    w.flush()?;
    Ok(())
}

fn cmd_wavefront(args: &WavefrontArgs, policy: ExecPolicy) -> CliResult<()> {
    let signal = parse_signal_spec(&args.signal)?;
    let config = args.scan.config(policy);
    let system = ShearletSystem::new(config.variant);
    if args.dirs == 0 {
        return Err(CliError::Usage("--dirs must be positive".into()));
    }
    let points = parse_points(&args.points, &signal)?;
    let thetas = wavefront::directions(args.dirs);
    let queries: Vec<DirectionQuery> = points
        .iter()
        .flat_map(|&p| thetas.iter().map(move |&th| DirectionQuery::new(p, th).with_radius(config.r0)))
        .collect();
    let mut reports = if args.oracle {
        let base = ConeQuery::new([0.0, 0.0], 0.0);
        let ocfg = OracleConfig { policy, ..OracleConfig::default() };
        oracle::crosscheck(&system, &signal, &queries, &config, &ocfg, &base)?
    } else {
        wavefront::wf_scan(&system, &signal, &queries, &config)?
    };
    if !args.m.is_empty() {
        for r in &mut reports {
            let flags = args.m.iter().map(|&m| Membership { m, in_wf_m: r.membership(m) }).collect();
            r.membership = Some(flags);
        }
    }
    if let Some(dir) = &args.plot_dir {
        write_plots(dir, &reports)?;
    }
    let mut w = output(&args.out)?;
    serde_json::to_writer_pretty(&mut w, &reports)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_plots(dir: &Path, reports: &[wavefront::WavefrontReport]) -> CliResult<()> {
    std::fs::create_dir_all(dir)?;
    for (i, r) in reports.iter().enumerate() {
        for (c, est) in r.estimates.iter().enumerate() {
            let name = format!("wf_{i:04}_{}.csv", est.orientation.short());
            let mut f = BufWriter::new(File::create(dir.join(name))?);
            report::write_plot_csv(r, c, &mut f)?;
            f.flush()?;
        }
    }
    Ok(())
}

fn cmd_holder(args: &HolderArgs, policy: ExecPolicy) -> CliResult<()> {
    let signal = parse_signal_spec(&args.signal)?;
    let config = args.scan.config(policy);
    let system = ShearletSystem::new(config.variant);
    let x0 = parse_point(&args.x0)?;
    if args.dirs == 0 {
        return Err(CliError::Usage("--dirs must be positive".into()));
    }
    let thetas = wavefront::directions(args.dirs);
    let mut rep = microlocal::holder_report(&system, &signal, x0, &thetas, &config)?;
    if args.envelope {
        if let Some(est) = rep.estimates {
            let tau = est.radial_model;
            let kind = match args.kind {
                KindArg::Necessary => EnvelopeKind::Necessary,
                KindArg::Sufficient => EnvelopeKind::Sufficient,
            };
            let tau_prime = args.tau_prime.unwrap_or(-tau.max(0.0));
            // check only the directions where decay is polynomial
            let singular: Vec<f64> =
                rep.directions.iter().filter(|d| d.estimates.is_some()).map(|d| d.theta0).collect();
            rep.envelope = Some(microlocal::envelope_at(&system, &signal, x0, &singular, tau, tau_prime, kind, &config)?);
        }
    }
    let mut w = output(&args.out)?;
    serde_json::to_writer_pretty(&mut w, &rep)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    match std::env::var("SHEARWAVE_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("SHEARWAVE_THREADS must be a positive integer, got `{v}`")))?;
            Ok(Some(n))
        }
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let policy = match thread_count(cli.threads)? {
        Some(0) => return Err(CliError::Usage("thread count must be positive".into())),
        Some(1) => ExecPolicy::Sequential,
        Some(n) => {
            shearwave::par::init_threads(n);
            ExecPolicy::Parallel
        }
        None => ExecPolicy::Parallel,
    };
    match &cli.command {
        Command::Transform(a) => cmd_transform(a, policy),
        Command::Wavefront(a) => cmd_wavefront(a, policy),
        Command::Holder(a) => cmd_holder(a, policy),
        Command::Selftest(a) => {
            let failed = selftest::run(a.strict, a.seed, policy, &mut io::stdout().lock())?;
            if failed > 0 {
                Err(CliError::SelfTest(failed))
            } else {
                Ok(())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
