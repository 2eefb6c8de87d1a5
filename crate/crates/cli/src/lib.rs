//! `ffprog`: norms, counts, exact suites, decay scans and configuration
//! search from the command line.
//!
//! Exit status: 0 on success, 1 on a usage or validation error, 2 when the
//! exact suite reports a violation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ffprog_core::experiments::{
    find_configuration, scan_decay, verify_exact_suite, DecayTarget, ScanRequest,
};
use ffprog_core::fourier::{box_norm_v, directional_spectrum, inverse_bound, u_norm, DEFAULT_ENUMERATION_CAP};
use ffprog_core::grid::derive_seed;
use ffprog_core::operators::{counting_lambda, l2_discrepancy, main_term, CountingMode};
use ffprog_core::report::{to_csv, to_json_string};
use ffprog_core::{GridFunction, PrimeContext};
use serde_json::{json, Value};

pub mod config;

pub use config::{CliConfig, Format, FunctionSpec, PrimeList};

/// Environment override for the enumeration cap.
pub const CAP_ENV: &str = "FFPROG_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ffprog_core::Error),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Parser)]
#[command(name = "ffprog", version, about = "Weighted polynomial progressions over F_p^D")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// u^s norm of a weight; box norm, inverse bound and spectrum of a grid.
    Norms {
        #[command(flatten)]
        common: Common,
        /// Direction of the box norm, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Option<Vec<i64>>,
        /// Emit the directional spectrum rows instead of the summary.
        #[arg(long)]
        spectrum: bool,
    },
    /// Counting operator, main term and discrepancies at one prime.
    Count {
        #[command(flatten)]
        common: Common,
    },
    /// Exact identities and inequalities on seeded random inputs.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Discrepancy decay over a prime ladder.
    Scan {
        #[command(flatten)]
        common: Common,
        /// thm1_2, thm1_3, thm3_1 or prop1_4.
        #[arg(long)]
        target: Option<String>,
    },
    /// First nontrivial rational progression inside a set.
    Find {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    /// Comma-separated primes or an inclusive range "lo..hi".
    #[arg(long)]
    primes: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    density: Option<f64>,
    /// Order of the u^s norm.
    #[arg(long)]
    s: Option<u32>,
    /// Enumeration cap; FFPROG_CAP overrides the config value.
    #[arg(long)]
    cap: Option<u64>,
    /// Worker threads; 1 gives bit-identical reruns.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    dump_config: bool,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Norms { common, .. }
            | Command::Count { common }
            | Command::Verify { common }
            | Command::Scan { common, .. }
            | Command::Find { common } => common,
        }
    }
}

/// Merge the config file, the environment and the flags, in increasing priority.
fn effective_config(command: &Command) -> Result<(CliConfig, PathBuf), CliError> {
    let common = command.common();
    let (mut cfg, base) = match &common.config {
        Some(path) => (
            CliConfig::load(path)?,
            path.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => (CliConfig::default(), PathBuf::new()),
    };
    if let Ok(raw) = std::env::var(CAP_ENV) {
        let cap = raw
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::Config(format!("{CAP_ENV}={raw:?} is not a nonnegative integer")))?;
        cfg.cap = Some(cap);
    }
    macro_rules! take {
        ($($field:ident),*) => {$(if let Some(v) = common.$field.clone() { cfg.$field = Some(v); })*};
    }
    take!(p, seed, trials, density, s, cap, format, out);
    if let Some(primes) = &common.primes {
        cfg.primes = Some(PrimeList::parse(primes)?);
    }
    match command {
        Command::Norms { direction: Some(d), .. } => cfg.direction = Some(d.clone()),
        Command::Scan { target: Some(t), .. } => cfg.target = Some(t.clone()),
        _ => {}
    }
    Ok((cfg, base))
}

/// Rendered report plus the exit status it implies.
struct Output {
    json: Value,
    csv: String,
    status: i32,
}

impl Output {
    fn ok(json: Value, csv: String) -> Self {
        Output { json, csv, status: EXIT_OK }
    }
}

fn require_p(cfg: &CliConfig) -> Result<PrimeContext, CliError> {
    let p = cfg
        .p
        .ok_or_else(|| CliError::Config("this command needs --p".into()))?;
    Ok(PrimeContext::new(p)?)
}

fn cap(cfg: &CliConfig) -> u128 {
    cfg.cap.map_or(DEFAULT_ENUMERATION_CAP, u128::from)
}

fn complex_fields(name: &str, z: num_complex::Complex64) -> [(String, Value); 2] {
    [(name.to_string(), json!(z.re)), (format!("{name}_im"), json!(z.im))]
}

fn norms(cfg: &CliConfig, base: &Path, spectrum: bool) -> Result<Output, CliError> {
    let ctx = require_p(cfg)?;
    let p = ctx.p();
    let s = cfg.s.unwrap_or(2);
    let seed = cfg.seed.unwrap_or(0);
    let grid_dim = cfg
        .direction
        .as_ref()
        .map(Vec::len)
        .or(cfg.dimension)
        .unwrap_or(2);
    let direction = cfg.direction.clone().unwrap_or_else(|| {
        let mut v = vec![0; grid_dim];
        v[0] = 1;
        v
    });
    let grid = cfg
        .grid
        .as_ref()
        .map(|g| g.realize(p, grid_dim, base, seed, 0))
        .transpose()?;

    if spectrum {
        let grid = grid.ok_or_else(|| CliError::Config("--spectrum needs a \"grid\" in the config".into()))?;
        let spec = directional_spectrum(&grid, &direction, &ctx)?;
        let rows: Vec<(usize, u64, f64, f64)> = spec.rows().collect();
        let json_rows: Vec<Value> = rows
            .iter()
            .map(|&(c, xi, re, im)| json!({"coset_index": c, "xi": xi, "re": re, "im": im}))
            .collect();
        let csv_rows: Vec<Vec<Value>> = rows
            .iter()
            .map(|&(c, xi, re, im)| vec![json!(c), json!(xi), json!(re), json!(im)])
            .collect();
        return Ok(Output::ok(
            json!({"p": p, "direction": direction, "rows": json_rows}),
            to_csv(&["coset_index", "xi", "re", "im"], &csv_rows),
        ));
    }

    let theta = cfg.weight_at(&ctx, base)?;
    let mut report = serde_json::Map::new();
    report.insert("p".into(), json!(p));
    report.insert("s".into(), json!(s));
    report.insert("u_norm".into(), json!(u_norm(&theta, s, &ctx, cap(cfg))?));
    report.insert("u_norm_centered".into(), json!(u_norm(&theta.centered(), s, &ctx, cap(cfg))?));
    if let Some(grid) = &grid {
        report.insert("direction".into(), json!(direction));
        report.insert("box_norm".into(), json!(box_norm_v(grid, &direction, &ctx)?));
        report.insert("inverse_bound".into(), json!(inverse_bound(grid, &direction, &ctx)?));
    }
    let keys: Vec<&str> = ["p", "s", "u_norm", "u_norm_centered", "box_norm", "inverse_bound"]
        .into_iter()
        .filter(|k| report.contains_key(*k))
        .collect();
    let row: Vec<Value> = keys.iter().map(|k| report[*k].clone()).collect();
    let csv = to_csv(&keys, &[row]);
    Ok(Output::ok(Value::Object(report), csv))
}

fn count(cfg: &CliConfig, base: &Path) -> Result<Output, CliError> {
    let ctx = require_p(cfg)?;
    let p = ctx.p();
    let system = cfg.system_or_default(false)?;
    system.require_admissible(&ctx)?;
    let seed = cfg.seed.unwrap_or(0);
    let k = system.len();
    let dim = system.dimension();
    let fs: Vec<GridFunction> = match &cfg.functions {
        Some(specs) => {
            if specs.len() != k + 1 {
                return Err(CliError::Config(format!(
                    "\"functions\" needs {} entries (f_0..f_{k}), got {}",
                    k + 1,
                    specs.len()
                )));
            }
            specs
                .iter()
                .enumerate()
                .map(|(i, f)| f.realize(p, dim, base, seed, i as u64))
                .collect::<Result<_, _>>()?
        }
        None => {
            let density = cfg.density.unwrap_or(0.5);
            (0..=k as u64)
                .map(|i| {
                    FunctionSpec::Bernoulli { density, seed: Some(derive_seed(seed, &[p, i])) }
                        .realize(p, dim, base, seed, i)
                })
                .collect::<Result<_, _>>()?
        }
    };
    let theta = cfg.weight_at(&ctx, base)?;
    let mode = if system.phi().is_some() {
        CountingMode::ExcludePoles
    } else {
        CountingMode::Polynomial
    };
    let lambda = counting_lambda(&theta, &fs, &system, &ctx, mode)?;
    let main = main_term(&theta, &fs, &system, &ctx, mode)?;
    let l2 = l2_discrepancy(&theta, &fs[1..], &system, &ctx)?;

    let mut report = serde_json::Map::new();
    report.insert("p".into(), json!(p));
    report.insert("mode".into(), json!(if mode == CountingMode::ExcludePoles { "exclude_poles" } else { "polynomial" }));
    report.extend(complex_fields("lambda", lambda));
    report.extend(complex_fields("main_term", main));
    report.insert("discrepancy".into(), json!((lambda - main).norm()));
    report.insert("l2_discrepancy".into(), json!(l2));
    let header = ["p", "mode", "lambda", "lambda_im", "main_term", "main_term_im", "discrepancy", "l2_discrepancy"];
    let row: Vec<Value> = header.iter().map(|k| report[*k].clone()).collect();
    let csv = to_csv(&header, &[row]);
    Ok(Output::ok(Value::Object(report), csv))
}

fn verify(cfg: &CliConfig) -> Result<Output, CliError> {
    let primes = cfg.primes()?.unwrap_or_else(|| vec![5, 7, 11]);
    let report = verify_exact_suite(cfg.seed.unwrap_or(0), &primes, cfg.trials.unwrap_or(20))?;
    Ok(Output {
        json: report.to_json(),
        csv: report.to_csv(),
        status: if report.passed { EXIT_OK } else { EXIT_VERIFY_FAILED },
    })
}

fn scan(cfg: &CliConfig) -> Result<Output, CliError> {
    let target: DecayTarget = cfg.target.as_deref().unwrap_or("thm3_1").parse()?;
    let system = cfg.system_or_default(target == DecayTarget::Prop1_4)?;
    let primes = match cfg.primes()? {
        Some(primes) => primes,
        None if system.dimension() == 1 => ffprog_core::field::primes_between(11, 199),
        None => ffprog_core::field::primes_between(11, 61),
    };
    let weight = cfg.weight_spec();
    let report = scan_decay(&ScanRequest {
        target,
        system: &system,
        weight: &weight,
        primes: &primes,
        trials: cfg.trials.unwrap_or(20),
        density: cfg.density.unwrap_or(0.5),
        seed: cfg.seed.unwrap_or(0),
    })?;
    Ok(Output::ok(report.to_json(), report.to_csv()))
}

fn find(cfg: &CliConfig, base: &Path) -> Result<Output, CliError> {
    let ctx = require_p(cfg)?;
    let p = ctx.p();
    let system = cfg.system_or_default(true)?;
    let seed = cfg.seed.unwrap_or(0);
    let set = match &cfg.set {
        Some(spec) => spec.clone(),
        None => FunctionSpec::Bernoulli { density: cfg.density.unwrap_or(0.9), seed: Some(seed) },
    };
    let a = set.realize(p, system.dimension(), base, seed, 0)?;
    let found = find_configuration(&a, &system, &ctx)?;
    let json = match &found {
        Some(c) => json!({
            "p": p,
            "found": true,
            "base": c.base,
            "parameter": c.parameter,
            "points": c.points,
            "nontrivial": c.nontrivial,
            "all_distinct": c.all_distinct,
        }),
        None => json!({"p": p, "found": false}),
    };
    let mut header = vec!["point".to_string(), "parameter".to_string()];
    header.extend((0..system.dimension()).map(|j| format!("x{j}")));
    let rows: Vec<Vec<Value>> = found
        .iter()
        .flat_map(|c| {
            c.points.iter().enumerate().map(move |(i, pt)| {
                let mut row = vec![json!(i), json!(c.parameter)];
                row.extend(pt.iter().map(|&x| json!(x)));
                row
            })
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(Output::ok(json, to_csv(&header, &rows)))
}

fn execute(command: &Command, cfg: &CliConfig, base: &Path) -> Result<Output, CliError> {
    match command {
        Command::Norms { spectrum, .. } => norms(cfg, base, *spectrum),
        Command::Count { .. } => count(cfg, base),
        Command::Verify { .. } => verify(cfg),
        Command::Scan { .. } => scan(cfg),
        Command::Find { .. } => find(cfg, base),
    }
}

fn emit(text: &str, cfg: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn run_parsed(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let (cfg, base) = effective_config(&cli.command)?;
    let common = cli.command.common();
    if common.dump_config {
        emit(&cfg.to_json(), &cfg, out)?;
        return Ok(EXIT_OK);
    }
    let output = match common.threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(|| execute(&cli.command, &cfg, &base))?,
        None => execute(&cli.command, &cfg, &base)?,
    };
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => to_json_string(&output.json),
        Format::Csv => output.csv,
    };
    emit(&text, &cfg, out)?;
    Ok(output.status)
}

/// Run one invocation; `argv[0]` is the program name. Reports go to `out`,
/// diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_INVALID
                }
            };
        }
    };
    match run_parsed(&cli, out) {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}
