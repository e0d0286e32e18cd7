//! Command-line parsing into a validated [`RunConfig`].

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use hyperell_core::resonator::default_euler_length;
use hyperell_core::{Fq, Poly};
use serde_json::Value as Json;

use crate::report::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// List H_n with its size
    Enumerate,
    /// Completed L-functions, L(1) and class numbers
    Lfun,
    /// Tail distribution phi_n(tau) against the random model
    Dist,
    /// Empirical moments of the short Euler product against the model
    Moments,
    /// Square-average and nonsquare-cancellation checks
    Orthogonality,
    /// Truncation experiment for the short Euler product
    Truncation,
    /// Resonator sums S_1, S_2 and their ratio
    Resonate,
    /// Explicit constants: C_2(q), tau_{beta,n}, c*, E(N)
    Constants,
    /// Full invariant battery; exit status 2 on any failure
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Enumerate => "enumerate",
            Command::Lfun => "lfun",
            Command::Dist => "dist",
            Command::Moments => "moments",
            Command::Orthogonality => "orthogonality",
            Command::Truncation => "truncation",
            Command::Resonate => "resonate",
            Command::Constants => "constants",
            Command::Verify => "verify",
        }
    }

    /// Whether the command scans all of H_n.
    pub fn scans_ensemble(self) -> bool {
        !matches!(self, Command::Constants)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

fn parse_q(s: &str) -> Result<u64, String> {
    let q: u64 = s.parse().map_err(|_| format!("`{s}` is not an integer; q must be an odd prime"))?;
    Fq::new(q).map_err(|_| format!("{q} rejected: q must be an odd prime"))?;
    Ok(q)
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("`{s}` must be an integer >= 1")),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hyperell",
    version,
    about = "Exact L(1, chi_D) experiments over the hyperelliptic ensemble in F_q[t]",
    arg_required_else_help = true,
    subcommand_required = true,
    after_help = "Polynomials are comma-separated residues, constant term first: `1,0,1` is t^2+1.\n\
                  Lists of polynomials use repeated flags: --f 0,1 --f 1,1."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Field order, an odd prime
    #[arg(long, global = true, default_value = "5", value_parser = parse_q)]
    q: u64,
    /// Degree of D
    #[arg(long, global = true, default_value = "4", value_parser = parse_positive)]
    n: usize,
    /// Tail thresholds (comma-separated)
    #[arg(long, global = true, value_delimiter = ',')]
    tau: Vec<f64>,
    /// Moment orders (comma-separated)
    #[arg(long, global = true, value_delimiter = ',')]
    k: Vec<f64>,
    /// Euler product lengths (comma-separated); default round(3 log_q n)
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_positive)]
    y: Vec<usize>,
    /// Resonator constant; default 0.9 c*(q)
    #[arg(long, global = true)]
    c: Option<f64>,
    /// Several resonator constants (comma-separated)
    #[arg(long, global = true, value_delimiter = ',')]
    c_sweep: Vec<f64>,
    /// Offset beta for tau_{beta,n} and the refined resonator constant
    #[arg(long, global = true, default_value = "0.5")]
    beta: f64,
    /// Add the 1/sqrt(log n) refinement to the resonator constant
    #[arg(long, global = true)]
    refine: bool,
    /// Monte Carlo seed
    #[arg(long, global = true, default_value = "0")]
    seed: u64,
    /// Monte Carlo sample count (0 disables sampling)
    #[arg(long, global = true, default_value = "10000")]
    mc_samples: usize,
    /// Worker threads; 0 uses every core
    #[arg(long, global = true, default_value = "0")]
    threads: usize,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: FormatArg,
    /// Cache directory for prime tables and L-data
    #[arg(long, global = true, env = "HYPERELL_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Allow scans above the desk-scale cap
    #[arg(long, global = true)]
    force: bool,
    /// A single modulus D for lfun
    #[arg(long, global = true)]
    d: Option<String>,
    /// Square-average test polynomials (repeatable)
    #[arg(long, global = true)]
    f: Vec<String>,
    /// Nonsquare cancellation polynomials (repeatable)
    #[arg(long, global = true)]
    ell: Vec<String>,
    /// Truncation parameter f in 1/(f log_q n)
    #[arg(long, global = true, default_value = "1.0")]
    f_param: f64,
    /// Truncation lengths / resonator N (comma-separated)
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_positive)]
    n_trunc: Vec<usize>,
    /// Resonator Euler product length M
    #[arg(long, global = true, value_parser = parse_positive)]
    m: Option<usize>,
    /// RH tolerance
    #[arg(long, global = true, default_value = "1e-8")]
    tol: f64,
}

/// Largest |H_n| scanned without --force.
pub const SCAN_CAP: u64 = 312_500;

/// Validated run configuration with defaults filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub q: u64,
    pub n: usize,
    pub tau_grid: Vec<f64>,
    pub k_list: Vec<f64>,
    pub y: Vec<usize>,
    pub c: Option<f64>,
    pub c_sweep: Vec<f64>,
    pub beta: f64,
    pub refine: bool,
    pub seed: u64,
    pub mc_samples: usize,
    pub threads: usize,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub force: bool,
    pub d: Option<Poly>,
    pub f_list: Vec<Poly>,
    pub ell_list: Vec<Poly>,
    pub f_param: f64,
    pub n_trunc: Vec<usize>,
    pub m: Option<usize>,
    pub tol: f64,
}

/// Parse failure: clap's rendered message, and whether it is help/version
/// output rather than an error.
#[derive(Debug)]
pub struct ParseError {
    pub message: String,
    pub informational: bool,
}

pub const DEFAULT_TAU: [f64; 8] = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0];

impl RunConfig {
    pub fn fq(&self) -> Fq {
        Fq::new(self.q).expect("validated")
    }

    /// Parses `argv` without the program name.
    pub fn parse<I, S>(argv: I) -> Result<Self, ParseError>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        let args = std::iter::once(std::ffi::OsString::from("hyperell")).chain(argv.into_iter().map(Into::into));
        let cli = Cli::try_parse_from(args).map_err(|e| ParseError {
            message: e.render().to_string(),
            informational: matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ),
        })?;
        let usage = |m: String| ParseError {
            message: format!("error: {m}\n"),
            informational: false,
        };
        let fq = Fq::new(cli.q).expect("validated by parser");
        let poly = |s: &String| fq.parse_poly(s).map_err(|e| usage(e.to_string()));
        let d = cli.d.as_ref().map(poly).transpose()?;
        if let Some(d) = &d {
            if !d.is_monic() || d.deg() == 0 {
                return Err(usage(format!("--d {d}: D must be monic of degree >= 1")));
            }
        }
        let f_list = if cli.f.is_empty() {
            vec![fq.parse_poly("0,1").unwrap(), fq.parse_poly("1,1").unwrap(), fq.parse_poly("0,1,1").unwrap()]
        } else {
            cli.f.iter().map(poly).collect::<Result<_, _>>()?
        };
        let ell_list = if cli.ell.is_empty() {
            vec![fq.parse_poly("0,1").unwrap(), fq.parse_poly("1,1").unwrap()]
        } else {
            cli.ell.iter().map(poly).collect::<Result<_, _>>()?
        };
        for x in cli.tau.iter().chain(&cli.k).chain(&cli.c_sweep).chain(cli.c.iter()) {
            if !x.is_finite() || *x < 0.0 {
                return Err(usage(format!("{x} is not a finite nonnegative number")));
            }
        }
        if cli.c.is_some_and(|c| c <= 0.0) || cli.c_sweep.iter().any(|&c| c <= 0.0) {
            return Err(usage("resonator constants must be > 0".into()));
        }
        if !(cli.f_param > 0.0) || !(cli.tol > 0.0) || !cli.beta.is_finite() {
            return Err(usage("--f-param and --tol must be > 0, --beta finite".into()));
        }
        let y = if cli.y.is_empty() {
            vec![default_euler_length(fq.q(), cli.n)]
        } else {
            cli.y
        };
        Ok(Self {
            command: cli.command,
            q: cli.q,
            n: cli.n,
            tau_grid: if cli.tau.is_empty() { DEFAULT_TAU.to_vec() } else { cli.tau },
            k_list: if cli.k.is_empty() { vec![1.0, 2.0, 3.0] } else { cli.k },
            y,
            c: cli.c,
            c_sweep: cli.c_sweep,
            beta: cli.beta,
            refine: cli.refine,
            seed: cli.seed,
            mc_samples: cli.mc_samples,
            threads: cli.threads,
            format: match cli.format {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            },
            cache_dir: cli.cache_dir,
            force: cli.force,
            d,
            f_list,
            ell_list,
            f_param: cli.f_param,
            n_trunc: cli.n_trunc,
            m: cli.m,
            tol: cli.tol,
        })
    }

    /// Default Euler product length `round(3 log_q n)`.
    pub fn default_y(&self) -> usize {
        default_euler_length(self.q as u32, self.n)
    }

    /// Configuration echo for the meta record. Worker count and cache
    /// location are left out: they do not change results.
    pub fn echo(&self) -> Vec<(String, Json)> {
        let polys = |v: &[Poly]| Json::from(v.iter().map(|p| p.to_string()).collect::<Vec<_>>());
        let floats = |v: &[f64]| Json::from(v.to_vec());
        vec![
            ("tau".into(), floats(&self.tau_grid)),
            ("k".into(), floats(&self.k_list)),
            ("y".into(), Json::from(self.y.clone())),
            ("c".into(), self.c.map_or(Json::Null, Json::from)),
            ("c_sweep".into(), floats(&self.c_sweep)),
            ("beta".into(), self.beta.into()),
            ("refine".into(), self.refine.into()),
            ("seed".into(), self.seed.into()),
            ("mc_samples".into(), self.mc_samples.into()),
            ("force".into(), self.force.into()),
            ("d".into(), self.d.as_ref().map_or(Json::Null, |d| d.to_string().into())),
            ("f".into(), polys(&self.f_list)),
            ("ell".into(), polys(&self.ell_list)),
            ("f_param".into(), self.f_param.into()),
            ("n_trunc".into(), Json::from(self.n_trunc.clone())),
            ("m".into(), self.m.map_or(Json::Null, Json::from)),
            ("tol".into(), self.tol.into()),
        ]
    }

    /// Rough cost of the scan in prime-character evaluations.
    pub fn cost_estimate(&self, size: u64) -> f64 {
        let deg = self.n.max(self.y.iter().copied().max().unwrap_or(1));
        let primes: f64 = (1..=deg).map(|d| (self.q as f64).powi(d as i32) / d as f64).sum();
        size as f64 * primes.max(1.0)
    }
}
