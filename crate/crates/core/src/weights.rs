//! Weight families on `F_p` and empirical profiling of strong uniformity.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Coefficient, IntPolynomial, PrimeContext, RationalDescriptor};
use crate::fit::{fit_log_log, LogLogFit, ZERO_FLOOR};
use crate::fourier::u_norm;
use crate::grid::{derive_seed, rng_from_seed, BOUND_SLACK, WeightFunction};

fn default_one() -> f64 {
    1.0
}

/// A weight family, realised afresh at each prime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `y -> value`
    Constant {
        #[serde(default = "default_one")]
        value: f64,
    },
    /// `y -> e_p(P(y))`, coefficients ascending.
    PolyPhase { poly: Vec<i64> },
    /// `y -> e_p(phi(y))`, and 0 at poles of `phi`.
    RationalPhase {
        num: Vec<Coefficient>,
        den: Vec<Coefficient>,
    },
    /// `y -> 1_S(y) - |S| / p`
    BalancedIndicator { set: Vec<i64> },
    /// Unit-modulus values with uniform phases, seeded by `(seed, p)`.
    Random { seed: u64 },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Constant { value: 1.0 }
    }
}

impl WeightSpec {
    pub fn is_constant(&self) -> bool {
        matches!(self, WeightSpec::Constant { .. })
    }
}

pub fn realize_weight(spec: &WeightSpec, ctx: &PrimeContext) -> Result<WeightFunction> {
    let p = ctx.p();
    let values: Vec<Complex64> = match spec {
        WeightSpec::Constant { value } => {
            if !value.is_finite() || value.abs() > 1.0 + BOUND_SLACK {
                return Err(Error::InvalidArgument(format!(
                    "constant weight {value} is not 1-bounded"
                )));
            }
            vec![Complex64::new(*value, 0.0); p as usize]
        }
        WeightSpec::PolyPhase { poly } => {
            let poly = IntPolynomial::new(poly.clone());
            (0..p).map(|y| ctx.e(poly.eval_mod(y, ctx))).collect()
        }
        WeightSpec::RationalPhase { num, den } => {
            let phi = RationalDescriptor {
                num: num.clone(),
                den: den.clone(),
            }
            .build()?;
            phi.value_table(ctx)?
                .into_iter()
                .map(|v| v.map_or(Complex64::new(0.0, 0.0), |a| ctx.e(a)))
                .collect()
        }
        WeightSpec::BalancedIndicator { set } => {
            let mut members = vec![false; p as usize];
            for &s in set {
                members[ctx.reduce(s) as usize] = true;
            }
            let density = members.iter().filter(|&&m| m).count() as f64 / p as f64;
            members
                .into_iter()
                .map(|m| Complex64::new(f64::from(u8::from(m)) - density, 0.0))
                .collect()
        }
        WeightSpec::Random { seed } => {
            let mut rng = rng_from_seed(derive_seed(*seed, &[p]));
            (0..p)
                .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
                .collect()
        }
    };
    WeightFunction::new(p, values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub p: u64,
    /// `||theta - E theta||_{u^s}`
    pub value: f64,
    /// Below the fitting floor; excluded from the slope.
    pub exact_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityProfile {
    pub s: u32,
    pub rows: Vec<ProfileRow>,
    /// `None` when fewer than three rows are nonzero.
    pub fit: Option<LogLogFit>,
}

impl UniformityProfile {
    pub fn fitted_slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }
}

/// Realise the weight at each prime, remove its mean, take the `u^s` norm,
/// and fit the log-log slope across the ladder.
pub fn uniformity_profile(spec: &WeightSpec, s: u32, primes: &[u64], cap: u128) -> Result<UniformityProfile> {
    let mut ladder = primes.to_vec();
    ladder.sort_unstable();
    ladder.dedup();
    if ladder.len() < 3 {
        return Err(Error::InsufficientLadder(ladder.len()));
    }
    let rows = ladder
        .iter()
        .map(|&p| {
            let ctx = PrimeContext::new(p)?;
            let theta = realize_weight(spec, &ctx)?.centered();
            let value = u_norm(&theta, s, &ctx, cap)?;
            Ok(ProfileRow {
                p,
                value,
                exact_zero: value <= ZERO_FLOOR,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_log_log(&rows.iter().map(|r| (r.p, r.value)).collect::<Vec<_>>());
    Ok(UniformityProfile { s, rows, fit })
}
