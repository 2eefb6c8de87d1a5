//! The JSON run configuration and the loaders for grids and weights.

use std::fs;
use std::path::{Path, PathBuf};

use ffprog_core::field::{primes_between, RationalDescriptor, SystemDescriptor};
use ffprog_core::grid::{derive_seed, rng_from_seed};
use ffprog_core::weights::{realize_weight, WeightSpec};
use ffprog_core::{ConfigurationSystem, GridFunction, PrimeContext, RationalFunction, WeightFunction};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Explicit primes, or an inclusive `"lo..hi"` range of primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PrimeList {
    List(Vec<u64>),
    Range(String),
}

impl PrimeList {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s.contains("..") {
            let list = PrimeList::Range(s.trim().to_string());
            list.resolve()?;
            return Ok(list);
        }
        s.split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| CliError::Config(format!("bad prime {t:?}"))))
            .collect::<Result<Vec<_>, _>>()
            .map(PrimeList::List)
    }

    pub fn resolve(&self) -> Result<Vec<u64>, CliError> {
        match self {
            PrimeList::List(v) => Ok(v.clone()),
            PrimeList::Range(s) => {
                let bad = || CliError::Config(format!("bad prime range {s:?}, expected \"lo..hi\""));
                let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
                let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: u64 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
                Ok(primes_between(lo, hi))
            }
        }
    }
}

/// A grid on `F_p^D`, materialised once `p` is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Indicator of row-major grid indices.
    Indices { indices: Vec<usize> },
    /// Indicator of points, coordinates reduced mod p.
    Points { points: Vec<Vec<i64>> },
    /// `index,re,im` rows; unlisted indices are 0. Relative paths resolve
    /// against the config file.
    Csv { path: PathBuf },
    Constant {
        #[serde(default = "one")]
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// Seeded Bernoulli indicator; the seed defaults to one derived from the run seed.
    Bernoulli {
        density: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    RandomPhase {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

fn one() -> f64 {
    1.0
}

impl FunctionSpec {
    /// `slot` separates the default seeds of functions sharing a run seed.
    pub fn realize(&self, p: u64, dim: usize, base: &Path, run_seed: u64, slot: u64) -> Result<GridFunction, CliError> {
        let seeded = |seed: Option<u64>| rng_from_seed(seed.unwrap_or_else(|| derive_seed(run_seed, &[p, slot])));
        let grid = match self {
            FunctionSpec::Indices { indices } => GridFunction::indicator_of_indices(p, dim, indices)?,
            FunctionSpec::Points { points } => GridFunction::indicator_of_points(p, dim, points)?,
            FunctionSpec::Csv { path } => {
                let values = read_values_csv(&base.join(path), grid_len(p, dim)?)?;
                GridFunction::new(p, dim, values)?
            }
            FunctionSpec::Constant { re, im } => GridFunction::constant(p, dim, Complex64::new(*re, *im))?,
            FunctionSpec::Bernoulli { density, seed } => {
                GridFunction::bernoulli(p, dim, *density, &mut seeded(*seed))?
            }
            FunctionSpec::RandomPhase { seed } => GridFunction::random_phase(p, dim, &mut seeded(*seed))?,
        };
        Ok(grid)
    }
}

fn grid_len(p: u64, dim: usize) -> Result<usize, CliError> {
    Ok(ffprog_core::grid::grid_len(p, dim)?)
}

/// Read `index,re,im` rows into a dense vector of length `len`. A header row
/// is allowed; `im` may be omitted.
pub fn read_values_csv(path: &Path, len: usize) -> Result<Vec<Complex64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut values = vec![Complex64::new(0.0, 0.0); len];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let bad = |what: &str| CliError::Config(format!("{}: row {}: bad {what}", path.display(), line + 1));
        let Some(first) = record.get(0) else { continue };
        let Ok(index) = first.parse::<usize>() else {
            if line == 0 {
                continue; // header
            }
            return Err(bad("index"));
        };
        if index >= len {
            return Err(bad("index (out of range)"));
        }
        let re: f64 = record.get(1).ok_or_else(|| bad("re"))?.parse().map_err(|_| bad("re"))?;
        let im: f64 = match record.get(2) {
            Some(s) if !s.is_empty() => s.parse().map_err(|_| bad("im"))?,
            _ => 0.0,
        };
        if !(re.is_finite() && im.is_finite()) {
            return Err(bad("value (not finite)"));
        }
        values[index] = Complex64::new(re, im);
    }
    Ok(values)
}

/// Everything a run needs, read from `--config` and then overridden by flags.
/// System fields sit at the top level, as in a bare system document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polys: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<RationalDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    /// `index,re,im` file for the weight; exclusive with `weight`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_csv: Option<PathBuf>,
    /// `f_0, .., f_k` for `count`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<FunctionSpec>>,
    /// Grid for `norms`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<FunctionSpec>,
    /// Direction of the box norm and spectrum in `norms`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<i64>>,
    /// Set searched by `find`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<PrimeList>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The configured system; `None` when no system field is present.
    pub fn system(&self) -> Result<Option<ConfigurationSystem>, CliError> {
        match (&self.vectors, &self.polys) {
            (None, None) if self.phi.is_none() => Ok(None),
            (Some(vectors), Some(polys)) => {
                let descriptor = SystemDescriptor {
                    dimension: self.dimension.unwrap_or_else(|| vectors.first().map_or(0, Vec::len)),
                    vectors: vectors.clone(),
                    polys: polys.clone(),
                    phi: self.phi.clone(),
                };
                Ok(Some(descriptor.build()?))
            }
            _ => Err(CliError::Config("a system needs both \"vectors\" and \"polys\"".into())),
        }
    }

    /// The configured system, or `P = {y, y^2}` along the axes of `F_p^2`
    /// (with `phi = 1/y` when `want_phi`).
    pub fn system_or_default(&self, want_phi: bool) -> Result<ConfigurationSystem, CliError> {
        Ok(match self.system()? {
            Some(system) => system,
            None => {
                let base = ffprog_core::experiments::reference_system(self.dimension.unwrap_or(2));
                if want_phi {
                    base.with_phi(Some(RationalFunction::reciprocal()))
                } else {
                    base
                }
            }
        })
    }

    pub fn weight_spec(&self) -> WeightSpec {
        self.weight.clone().unwrap_or_default()
    }

    pub fn weight_at(&self, ctx: &PrimeContext, base: &Path) -> Result<WeightFunction, CliError> {
        match (&self.weight, &self.weight_csv) {
            (Some(_), Some(_)) => Err(CliError::Config("give either \"weight\" or \"weight_csv\", not both".into())),
            (_, Some(path)) => {
                let values = read_values_csv(&base.join(path), ctx.p() as usize)?;
                Ok(WeightFunction::new(ctx.p(), values)?)
            }
            _ => Ok(realize_weight(&self.weight_spec(), ctx)?),
        }
    }

    pub fn primes(&self) -> Result<Option<Vec<u64>>, CliError> {
        self.primes.as_ref().map(PrimeList::resolve).transpose()
    }

    /// Pretty JSON with full-precision floats.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("config serialises");
        ffprog_core::report::to_json_string(&value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_lists() {
        assert_eq!(PrimeList::parse("5, 7,11").unwrap().resolve().unwrap(), vec![5, 7, 11]);
        assert_eq!(PrimeList::parse("11..20").unwrap().resolve().unwrap(), vec![11, 13, 17, 19]);
        assert!(PrimeList::parse("5,x").is_err());
        assert!(PrimeList::parse("a..9").is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(CliConfig::from_json(r#"{"primez": [5]}"#).is_err());
    }

    #[test]
    fn system_fields_at_top_level() {
        let cfg = CliConfig::from_json(r#"{"D": 1, "vectors": [[1]], "polys": [[0, 0, 1]]}"#).unwrap();
        let sys = cfg.system().unwrap().unwrap();
        assert_eq!(sys.dimension(), 1);
        assert_eq!(sys.max_degree(), 2);
        let half = CliConfig::from_json(r#"{"vectors": [[1]]}"#).unwrap();
        assert!(half.system().is_err());
    }

    #[test]
    fn function_specs_parse() {
        let cfg = CliConfig::from_json(
            r#"{"functions": [{"kind": "indices", "indices": [0, 1]}, {"kind": "bernoulli", "density": 0.5},
                {"kind": "constant"}, {"kind": "points", "points": [[-1]]}]}"#,
        )
        .unwrap();
        let fs = cfg.functions.unwrap();
        let grids: Vec<GridFunction> = fs
            .iter()
            .enumerate()
            .map(|(i, f)| f.realize(5, 1, Path::new("."), 0, i as u64).unwrap())
            .collect();
        assert_eq!(grids[0].at(1), Complex64::new(1.0, 0.0));
        assert_eq!(grids[2].at(3), Complex64::new(1.0, 0.0));
        assert_eq!(grids[3].at(4), Complex64::new(1.0, 0.0));
    }
}
