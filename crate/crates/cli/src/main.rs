//! `zerofree`: curves, pole tables, Monte Carlo reports, lattice abscissae and zero
//! densities from the command line.
//!
//! Exit codes: 0 success, 1 numeric failure (JSON diagnostic on stderr), 2 usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use zerofree::lattice_zeta::{enumerate_shells, minimum_length, normalize_covolume, sigma_tilde, LatticeBasis};
use zerofree::limit_distribution::{
    constant_k1, constant_k2, quadrature_curve, QuadratureSpec,
};
use zerofree::poisson_oracle::{monte_carlo_report, sample_poisson, LayeredConfig};
use zerofree::residue_engine::{
    density_from_table, pole_sweep, write_table_csv, PoleCache, DEFAULT_N_MAX,
};
use zerofree::zero_density::{
    count_zeros_rectangle, h_frequency, nu_for_lattice, nu_k_estimate, nu_support, ExponentSequence,
    ExponentSource,
};
use zerofree::Error;

#[derive(Parser)]
#[command(name = "zerofree", version, about = "Distribution of the zero-free abscissa of random Epstein zeta functions")]
struct Cli {
    /// Pole cache directory [env: ZEROFREE_CACHE_DIR; default: .zerofree-cache/]
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Write the result here instead of stdout
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// CDF of σ by quadrature: CSV c,cdf,abs_err_est
    Cdf(CurveArgs),
    /// Density of σ: CSV c,f_c,method,abs_err_est (plus discrepancy for --method both)
    Density(DensityArgs),
    /// Poles of Ψ_a in the pole-cache CSV format
    Poles(PolesArgs),
    /// Monte Carlo CDF of σ against the quadrature CDF, as a JSON report
    Montecarlo(MonteCarloArgs),
    /// σ̃ of a lattice given as JSON {"dimension": n, "basis": [[...], ...]}
    SigmaLattice(LatticeArgs),
    /// Jessen zero density ν^(K): CSV sigma,nu,err_estimate
    Nu(NuArgs),
    /// The constants K1 and K2 as JSON
    Constants,
}

#[derive(Args)]
struct Grid {
    /// Explicit abscissae (overrides the range)
    #[arg(long = "c", value_delimiter = ',', num_args = 1..)]
    values: Vec<f64>,
    /// First grid point
    #[arg(long, default_value_t = 0.505)]
    c_min: f64,
    /// Last grid point
    #[arg(long, default_value_t = 2.5)]
    c_max: f64,
    /// Grid spacing
    #[arg(long, default_value_t = 0.005)]
    step: f64,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    grid: Grid,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum DensityMethod {
    Residue,
    Quadrature,
    Both,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    grid: Grid,
    /// Evaluation route
    #[arg(long, value_enum, default_value_t = DensityMethod::Both)]
    method: DensityMethod,
    /// Residue series truncation |n| ≤ n_max
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    n_max: u32,
}

#[derive(Args)]
struct PolesArgs {
    /// Shape parameter a = 2c (> 1)
    #[arg(long, required_unless_present = "sweep")]
    a: Option<f64>,
    /// Highest pole index
    #[arg(long, default_value_t = 5)]
    n_max: u32,
    /// Continuation sweep over a: A_MIN A_MAX STEP
    #[arg(long, num_args = 3, value_names = ["A_MIN", "A_MAX", "STEP"], conflicts_with = "a")]
    sweep: Option<Vec<f64>>,
}

#[derive(Args)]
struct MonteCarloArgs {
    /// Number of realizations
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    /// Base seed; sample i uses substreams derived from (seed, i)
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Poisson intensity (σ does not depend on it)
    #[arg(long, default_value_t = 1.0)]
    intensity: f64,
    #[command(flatten)]
    grid: Grid,
}

#[derive(Args)]
struct LatticeArgs {
    /// JSON lattice file
    file: PathBuf,
    /// Tolerance on σ̃ between successive cutoff rounds
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Use the basis as given; it must already have covolume 1
    #[arg(long)]
    no_normalize: bool,
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Explicit strictly increasing exponents
    #[arg(long, value_delimiter = ',', num_args = 1.., group = "source")]
    exponents: Option<Vec<f64>>,
    /// λ_j = 2 log j for j = 1..K
    #[arg(long, value_name = "K", group = "source")]
    log_integers: Option<usize>,
    /// λ_j = 2 log p_j over the first K primes
    #[arg(long, value_name = "K", group = "source")]
    log_primes: Option<usize>,
    /// λ_j = 2 log T_j over the first K points of a unit-intensity Poisson process (uses --seed)
    #[arg(long, value_name = "K", group = "source")]
    poisson: Option<usize>,
    /// λ_j = 2 log |v_j| over the first --k shells of a JSON lattice (normalized to covolume 1)
    #[arg(long, value_name = "FILE", group = "source")]
    lattice: Option<PathBuf>,
}

#[derive(Args)]
struct NuArgs {
    #[command(flatten)]
    source: Source,
    /// Shells used with --lattice
    #[arg(long, default_value_t = 8)]
    k: usize,
    /// With --lattice: output σ ↦ n²ν(nσ)
    #[arg(long, value_name = "N")]
    rescale: Option<usize>,
    /// Seed for --poisson
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// First σ [default: left end of the support − 0.25]
    #[arg(long)]
    sigma_min: Option<f64>,
    /// Last σ [default: right end of the support + 0.25]
    #[arg(long)]
    sigma_max: Option<f64>,
    /// σ spacing
    #[arg(long, default_value_t = 0.01)]
    sigma_step: f64,
    /// Print max |ν(σ) − ν_shifted(σ)| over the grid for exponents shifted by ALPHA
    #[arg(long, value_name = "ALPHA", allow_hyphen_values = true)]
    check_shift: Option<f64>,
    /// Print the zero count of the series on (0, H) against the integrated density
    #[arg(long, value_name = "H")]
    oracle_height: Option<f64>,
}

enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

/// 17 significant digits.
fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "DomainError",
        Error::Convergence(_) => "ConvergenceError",
        Error::Overflow(_) => "OverflowError",
        Error::StrayRoot { .. } => "StrayRootError",
        Error::PoleTable(_) => "PoleTableError",
        Error::NoRoot(_) => "NoRootError",
        Error::Horizon(_) => "HorizonError",
        Error::GridMismatch(_) => "GridMismatchError",
        Error::SingularBasis => "SingularBasisError",
        Error::Explosion(_) => "ExplosionError",
        Error::MultipleMinima { .. } => "MultipleMinima",
        Error::Tail(_) => "TailError",
        Error::DegenerateSpectrum(_) => "DegenerateSpectrum",
        Error::BoundaryZero(_) => "BoundaryZeroError",
    }
}

fn range(lo: f64, hi: f64, step: f64, what: &str) -> Outcome<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return usage(format!("{what} step must be positive"));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return usage(format!("{what} range needs min < max"));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if n > 10_000_000 {
        return usage(format!("{what} grid has {n} points"));
    }
    Ok((0..n).map(|k| lo + k as f64 * step).collect())
}

impl Grid {
    fn points(&self) -> Outcome<Vec<f64>> {
        let pts = if self.values.is_empty() {
            range(self.c_min, self.c_max, self.step, "c")?
        } else {
            self.values.clone()
        };
        if pts.iter().any(|c| !(*c > 0.5)) {
            return usage("every c must exceed 1/2");
        }
        if pts.windows(2).any(|w| !(w[0] < w[1])) {
            return usage("c values must be strictly increasing");
        }
        Ok(pts)
    }
}

fn cmd_cdf(args: &CurveArgs) -> Outcome<String> {
    let grid = args.grid.points()?;
    let t = quadrature_curve(&grid, false, &QuadratureSpec::default())?;
    let mut out = String::from("c,cdf,abs_err_est\n");
    for i in 0..grid.len() {
        let _ = writeln!(out, "{},{},{}", g17(grid[i]), g17(t.values[i]), g17(t.err_estimates[i]));
    }
    Ok(out)
}

fn cmd_density(args: &DensityArgs, cache: &PoleCache) -> Outcome<String> {
    let grid = args.grid.points()?;
    let residue = if args.method == DensityMethod::Quadrature {
        None
    } else {
        let mut est = Vec::with_capacity(grid.len());
        for &c in &grid {
            est.push(density_from_table(&cache.get_or_compute(2.0 * c, args.n_max)?)?);
        }
        Some(est)
    };
    let quad = if args.method == DensityMethod::Residue {
        None
    } else {
        Some(quadrature_curve(&grid, true, &QuadratureSpec::default())?)
    };
    let mut out = String::from("c,f_c,method,abs_err_est");
    out.push_str(if args.method == DensityMethod::Both { ",discrepancy\n" } else { "\n" });
    for (i, &c) in grid.iter().enumerate() {
        let line = match (&residue, &quad) {
            (Some(r), None) => format!("{},{},residue,{}", g17(c), g17(r[i].value), g17(r[i].err)),
            (None, Some(q)) => {
                format!("{},{},quadrature,{}", g17(c), g17(q.values[i]), g17(q.err_estimates[i]))
            }
            (Some(r), Some(q)) => format!(
                "{},{},both,{},{}",
                g17(c),
                g17(r[i].value),
                g17(r[i].err.max(q.err_estimates[i])),
                g17(r[i].value - q.values[i])
            ),
            (None, None) => unreachable!(),
        };
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn cmd_poles(args: &PolesArgs, cache: &PoleCache) -> Outcome<String> {
    let tables = match (&args.sweep, args.a) {
        (Some(s), _) => pole_sweep(&range(s[0], s[1], s[2], "a")?, args.n_max)?,
        (None, Some(a)) => {
            if !(a > 1.0) {
                return usage("a must exceed 1");
            }
            vec![cache.get_or_compute(a, args.n_max)?]
        }
        (None, None) => return usage("give --a or --sweep"),
    };
    let mut buf = Vec::new();
    write_table_csv(&mut buf, &tables).expect("writing to memory");
    Ok(String::from_utf8(buf).expect("ASCII output"))
}

fn cmd_montecarlo(args: &MonteCarloArgs) -> Outcome<String> {
    let grid = if args.grid.values.is_empty() && (args.grid.c_min, args.grid.c_max, args.grid.step) == (0.505, 2.5, 0.005) {
        // the default σ grid reaches further than the density grid
        range(0.51, 4.0, 0.01, "c")?
    } else {
        args.grid.points()?
    };
    if args.samples == 0 {
        return usage("need at least one sample");
    }
    if !(args.intensity > 0.0) {
        return usage("intensity must be positive");
    }
    let analytic = quadrature_curve(&grid, false, &QuadratureSpec::default())?;
    let report = monte_carlo_report(args.samples, args.intensity, args.seed, &analytic, &LayeredConfig::default())?;
    Ok(serde_json::to_string_pretty(&report).expect("serializable") + "\n")
}

#[derive(Deserialize)]
struct LatticeFile {
    dimension: usize,
    basis: Vec<Vec<f64>>,
}

fn read_lattice(path: &Path, normalize: bool) -> Outcome<LatticeBasis> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return usage(format!("cannot read {}: {e}", path.display())),
    };
    let file: LatticeFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => return usage(format!("bad lattice file {}: {e}", path.display())),
    };
    if file.basis.len() != file.dimension {
        return usage(format!("dimension {} but {} basis rows", file.dimension, file.basis.len()));
    }
    let basis = match LatticeBasis::new(file.basis) {
        Ok(b) => b,
        Err(e) => return usage(format!("bad basis: {e}")),
    };
    if normalize {
        Ok(normalize_covolume(&basis)?)
    } else if basis.normalized {
        Ok(basis)
    } else {
        usage(format!("basis has |det| = {}, not 1; drop --no-normalize", basis.determinant().abs()))
    }
}

fn cmd_sigma_lattice(args: &LatticeArgs) -> Outcome<String> {
    if !(args.tol > 0.0) {
        return usage("tolerance must be positive");
    }
    let basis = read_lattice(&args.file, !args.no_normalize)?;
    let v = match sigma_tilde(&basis, args.tol) {
        Ok(s) => json!({
            "sigma_tilde": s.sigma_tilde,
            "m_L": s.m_l,
            "shells_used": s.shells_used,
            "radius": s.radius,
            "radius_rounds": s.radius_rounds,
        }),
        // σ̃ = +∞ is the answer here, not a failure
        Err(Error::MultipleMinima { pairs }) => json!({
            "sigma_tilde": "inf",
            "m_L": minimum_length(&basis)?,
            "status": "MultipleMinima",
            "first_shell_pairs": pairs,
        }),
        Err(e) => return Err(e.into()),
    };
    Ok(serde_json::to_string_pretty(&v).expect("serializable") + "\n")
}

fn first_primes(k: usize) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::with_capacity(k);
    let mut n = 2u64;
    while out.len() < k {
        if out.iter().take_while(|p| *p * *p <= n).all(|p| n % p != 0) {
            out.push(n);
        }
        n += 1;
    }
    out
}

/// Shell spectrum with at least k shells.
fn lattice_spectrum(basis: &LatticeBasis, k: usize) -> Outcome<zerofree::lattice_zeta::ShellSpectrum> {
    let mut r = 2.0 * minimum_length(basis)?;
    loop {
        let s = enumerate_shells(basis, r)?;
        if s.shells.len() >= k {
            return Ok(s);
        }
        r *= 1.5;
    }
}

fn cmd_nu(args: &NuArgs) -> Outcome<(String, Vec<Value>)> {
    if args.k < 1 {
        return usage("--k must be positive");
    }
    let src = &args.source;
    let mut lattice = None;
    let seq = if let Some(e) = &src.exponents {
        ExponentSequence::new(e.clone(), ExponentSource::Synthetic).or_else(|e| usage(e.to_string()))?
    } else if let Some(k) = src.log_integers {
        ExponentSequence::log_pairs(&(1..=k as u64).collect::<Vec<_>>())?
    } else if let Some(k) = src.log_primes {
        ExponentSequence::log_pairs(&first_primes(k))?
    } else if let Some(k) = src.poisson {
        // enough horizon for k points of a unit-intensity process with overwhelming probability
        let real = sample_poisson(1.0, 2.0 * k as f64 + 50.0, args.seed, 0)?;
        if real.points.len() < k {
            return Err(Error::Horizon(format!("only {} points drawn", real.points.len())).into());
        }
        let lam = real.points[..k].iter().map(|t| 2.0 * t.ln()).collect();
        ExponentSequence::new(lam, ExponentSource::Poisson)?
    } else if let Some(path) = &src.lattice {
        let basis = read_lattice(path, true)?;
        let spectrum = lattice_spectrum(&basis, args.k)?;
        let lam = spectrum.shells[..args.k].iter().map(|s| 2.0 * s.length.ln()).collect();
        lattice = Some(spectrum);
        ExponentSequence::new(lam, ExponentSource::Lattice)
            .map_err(|_| Error::DegenerateSpectrum("repeated shell lengths".into()))?
    } else {
        return usage("choose an exponent source");
    };
    if args.rescale.is_some() && lattice.is_none() {
        return usage("--rescale applies to --lattice only");
    }
    if seq.len() < 2 {
        return usage("need at least two exponents");
    }
    let spec = QuadratureSpec::default();
    let (l, r) = nu_support(&seq)?;
    // the rescaled curve lives on the support divided by n
    let n = args.rescale.unwrap_or(1) as f64;
    if n < 1.0 {
        return usage("--rescale must be positive");
    }
    let grid = range(
        args.sigma_min.unwrap_or((l - 0.25) / n),
        args.sigma_max.unwrap_or((r + 0.25) / n),
        args.sigma_step,
        "sigma",
    )?;
    let curve = match &lattice {
        Some(spectrum) => nu_for_lattice(spectrum, args.k, &grid, args.rescale, &spec)?,
        None => {
            let mut values = Vec::new();
            let mut errs = Vec::new();
            for &s in &grid {
                let e = nu_k_estimate(&seq, s, &spec)?;
                values.push(e.value);
                errs.push(e.err);
            }
            zerofree::limit_distribution::CurveTable::new(
                grid.clone(),
                values,
                zerofree::limit_distribution::Method::Quadrature,
                errs,
                None,
            )?
        }
    };
    let mut out = String::from("sigma,nu,err_estimate\n");
    for i in 0..grid.len() {
        let _ = writeln!(out, "{},{},{}", g17(grid[i]), g17(curve.values[i]), g17(curve.err_estimates[i]));
    }
    let mut notes = Vec::new();
    if let Some(alpha) = args.check_shift {
        let moved = seq.shifted(alpha);
        let mut worst = 0.0f64;
        for &s in &grid {
            let a = nu_k_estimate(&seq, s, &spec)?.value;
            let b = nu_k_estimate(&moved, s, &spec)?.value;
            worst = worst.max((a - b).abs());
        }
        notes.push(json!({ "check_shift": alpha, "max_shift_residual": worst }));
    }
    if let Some(h) = args.oracle_height {
        if !(h > 0.0) {
            return usage("oracle height must be positive");
        }
        let (a, b) = (l - 0.3, r + 0.3);
        let count = count_zeros_rectangle(&seq, a, b, 0.0, h)?;
        let integrated = h_frequency(&seq, a, b, &spec)?;
        let freq = count.count as f64 / h;
        notes.push(json!({
            "oracle_height": h,
            "sigma_interval": [a, b],
            "zeros": count.count,
            "winding_residual": count.winding_residual,
            "zero_frequency": freq,
            "integrated_density": integrated,
            "relative_difference": freq / integrated - 1.0,
        }));
    }
    Ok((out, notes))
}

fn cmd_constants() -> Outcome<String> {
    let spec = QuadratureSpec::default();
    let k1 = constant_k1(&spec)?;
    let k2 = constant_k2(&spec)?;
    let v = json!({
        "K1": k1.value,
        "K2": k2.value,
        "err_estimates": { "K1": k1.err, "K2": k2.err },
    });
    Ok(serde_json::to_string_pretty(&v).expect("serializable") + "\n")
}

fn run(cli: &Cli) -> Outcome<(String, Vec<Value>)> {
    let cache_dir = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("ZEROFREE_CACHE_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(".zerofree-cache"));
    let cache = PoleCache::new(cache_dir);
    let text = match &cli.command {
        Command::Cdf(a) => cmd_cdf(a)?,
        Command::Density(a) => cmd_density(a, &cache)?,
        Command::Poles(a) => cmd_poles(a, &cache)?,
        Command::Montecarlo(a) => cmd_montecarlo(a)?,
        Command::SigmaLattice(a) => cmd_sigma_lattice(a)?,
        Command::Nu(a) => return cmd_nu(a),
        Command::Constants => cmd_constants()?,
    };
    Ok((text, Vec::new()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, notes)) => {
            for n in notes {
                eprintln!("{n}");
            }
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            let mut diag = json!({ "error": error_kind(&e), "message": e.to_string() });
            if let Error::StrayRoot { n, .. } = e {
                diag["n"] = json!(n);
            }
            eprintln!("{diag}");
            ExitCode::from(1)
        }
    }
}
