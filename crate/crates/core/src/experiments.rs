//! Prime-ladder campaigns: the exact-inequality suite, discrepancy decay
//! scans, and the search for a nontrivial rational progression in a set.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{ConfigurationSystem, IntPolynomial, PrimeContext, RationalFunction};
use crate::fit::{fit_log_log, LogLogFit};
use crate::fourier::{
    box_norm, box_norm_v, directional_fourier, directional_spectrum, inverse_bound, max_fourier_coefficient,
    u_norm, Subspace, DEFAULT_ENUMERATION_CAP,
};
use crate::grid::{derive_seed, rng_from_seed, GridFunction, WeightFunction};
use crate::operators::{
    avg_g, counting_lambda, dual_f, l2_discrepancy, l2_norm_sq, main_term, oracle_lambda, CountingMode,
    FrequencyVector, DEFAULT_DUAL_CAP,
};
use crate::report::to_csv;
use crate::weights::{realize_weight, WeightSpec};

/// Largest violation tolerated by every exact check.
pub const EXACT_TOLERANCE: f64 = 1e-9;

// ---------------------------------------------------------------------------
// exact suite
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub max_violation: f64,
    pub evaluations: u64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub primes: Vec<u64>,
    pub trials: usize,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn max_violation(&self) -> f64 {
        self.checks.iter().map(|c| c.max_violation).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "primes": self.primes,
            "trials": self.trials,
            "tolerance": EXACT_TOLERANCE,
            "passed": self.passed,
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "max_violation": c.max_violation,
                "evaluations": c.evaluations,
                "passed": c.passed,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<Value>> = self
            .checks
            .iter()
            .map(|c| vec![json!(c.name), json!(c.max_violation), json!(c.evaluations), json!(c.passed)])
            .collect();
        to_csv(&["name", "max_violation", "evaluations", "passed"], &rows)
    }
}

/// `P = {y, y^2}` along the coordinate axes of `F_p^2`, or along `1` twice in `F_p`.
pub fn reference_system(dim: usize) -> ConfigurationSystem {
    let vectors = if dim == 1 {
        vec![vec![1], vec![1]]
    } else {
        (0..2)
            .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
            .collect()
    };
    ConfigurationSystem::new(
        dim,
        vectors,
        vec![IntPolynomial::new(vec![0, 1]), IntPolynomial::new(vec![0, 0, 1])],
        None,
    )
    .expect("reference system is valid")
}

/// Directions exercised in dimension `dim`; in the plane this includes a
/// self-orthogonal `(1, a)` with `1 + a^2 = 0` whenever one exists mod p.
pub fn test_directions(dim: usize, p: u64) -> Vec<Vec<i64>> {
    match dim {
        1 => vec![vec![1], vec![2]],
        _ => {
            let mut dirs = vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]];
            if let Some(a) = (1..p).find(|a| (1 + a * a) % p == 0) {
                if a != 2 {
                    dirs.push(vec![1, a as i64]);
                }
            }
            dirs
        }
    }
}

struct Accumulator {
    name: &'static str,
    max: f64,
    count: u64,
}

impl Accumulator {
    fn new(name: &'static str) -> Self {
        Self { name, max: 0.0, count: 0 }
    }

    fn push(&mut self, violation: f64) {
        self.count += 1;
        // NaN counts as an infinite violation
        self.max = if violation.is_nan() { f64::INFINITY } else { self.max.max(violation) };
    }

    fn merge(mut self, other: Self) -> Self {
        self.count += other.count;
        self.max = self.max.max(other.max);
        self
    }

    fn finish(self) -> CheckReport {
        CheckReport {
            name: self.name,
            max_violation: self.max,
            evaluations: self.count,
            passed: self.max <= EXACT_TOLERANCE,
        }
    }
}

const CHECK_NAMES: [&str; 15] = [
    "parseval",
    "fourier_inversion",
    "coset_invariance",
    "u2_equals_max_fourier",
    "u_norm_monotone",
    "box_norm_routes_agree",
    "box_inverse_inequality",
    "base_case_inequality",
    "cauchy_schwarz_step",
    "oracle_polynomial",
    "oracle_rational",
    "multilinearity",
    "translation_invariance",
    "boundedness",
    "pole_free_substitution",
];

fn violation_of(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::INFINITY)
}

fn random_frequencies(len: usize, p: u64, rng: &mut ChaCha8Rng) -> FrequencyVector {
    FrequencyVector((0..len).map(|_| rng.gen_range(0..p)).collect())
}

fn random_unit_scalar(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.gen::<f64>(), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// All checks for one `(p, trial)`; returns one violation list per check.
fn run_trial(ctx: &PrimeContext, seed: u64, trial: usize) -> Result<Vec<Vec<f64>>> {
    let p = ctx.p();
    let mut out: Vec<Vec<f64>> = vec![Vec::new(); CHECK_NAMES.len()];
    let mut rng = rng_from_seed(derive_seed(seed, &[p, trial as u64]));

    // Fourier identities, D = 1 and 2
    for dim in [1usize, 2] {
        let f = GridFunction::random_bounded(p, dim, &mut rng)?;
        for v in test_directions(dim, p) {
            let spectrum = directional_spectrum(&f, &v, ctx)?;
            let vr = ctx.reduce_vec(&v);
            for coset in 0..spectrum.num_cosets() {
                let rep = spectrum.coset_rep(coset).to_vec();
                let line: Vec<Complex64> = (0..p)
                    .map(|n| {
                        let shift: Vec<u64> = vr.iter().map(|&c| ctx.mul(n, c)).collect();
                        f.at(f.index_of_sum(&rep, &shift))
                    })
                    .collect();
                let lhs: f64 = spectrum.row(coset).iter().map(|z| z.norm_sqr()).sum();
                let rhs: f64 = line.iter().map(|z| z.norm_sqr()).sum::<f64>() / p as f64;
                out[0].push((lhs - rhs).abs());
                let worst = (0..p)
                    .map(|n| (spectrum.reconstruct(coset, n, ctx) - line[n as usize]).norm())
                    .fold(0.0, f64::max);
                out[1].push(worst);
            }
            // moduli of coefficients computed at every point agree with the
            // coefficient of that point's coset representative
            let pivot = vr.iter().position(|&c| c != 0).expect("nonzero direction");
            let mut worst = 0.0f64;
            for idx in 0..f.len() {
                let x = f.point(idx);
                let (rep, _) = crate::field::span_decompose(&v, &x, ctx)?;
                debug_assert_eq!(rep[pivot], 0);
                let coset = spectrum_index(&spectrum, &rep);
                for xi in 0..p {
                    let here = directional_fourier(&f, &x, &v, xi, ctx)?.norm();
                    worst = worst.max((here - spectrum.coefficient(coset, xi).norm()).abs());
                }
            }
            out[2].push(worst);
        }
    }

    // u^s norms
    let theta = WeightFunction::random_phase(p, &mut rng)?;
    let u2 = u_norm(&theta, 2, ctx, DEFAULT_ENUMERATION_CAP)?;
    out[3].push((u2 - max_fourier_coefficient(&theta)).abs());
    let u1 = u_norm(&theta, 1, ctx, DEFAULT_ENUMERATION_CAP)?;
    let u3 = u_norm(&theta, 3, ctx, DEFAULT_ENUMERATION_CAP)?;
    out[4].push((u1 - u2).max(0.0));
    out[4].push((u2 - u3).max(0.0));

    // box norms in the plane
    let f = GridFunction::random_bounded(p, 2, &mut rng)?;
    let full = Subspace::full(2, ctx)?;
    for (i, v) in test_directions(2, p).iter().enumerate() {
        let fast = box_norm_v(&f, v, ctx)?;
        if i == 0 || i + 1 == test_directions(2, p).len() {
            let direct = violation_of(box_norm(&f, &[full.clone(), Subspace::line(v, ctx)?], ctx));
            out[5].push((direct.powi(4) - fast.powi(4)).abs());
        }
        out[6].push((fast.powi(4) - inverse_bound(&f, v, ctx)?).max(0.0));
    }

    // operator inequalities on the reference plane system
    let sys = reference_system(2);
    let k = sys.len();
    let d = sys.max_degree() as u32;
    let theta = WeightFunction::random_phase(p, &mut rng)?;
    let f1 = GridFunction::random_bounded(p, 2, &mut rng)?;
    let f2 = GridFunction::random_bounded(p, 2, &mut rng)?;
    let xis = random_frequencies(k - 1, p, &mut rng);
    let g1 = avg_g(&theta, std::slice::from_ref(&f1), &xis, &sys, ctx)?;
    let ud = u_norm(&theta, d + 1, ctx, DEFAULT_ENUMERATION_CAP)?;
    out[7].push((l2_norm_sq(&g1).sqrt() - ud).max(0.0));

    for fs in [vec![f1.clone()], vec![f1.clone(), f2.clone()]] {
        let xis = random_frequencies(k - fs.len(), p, &mut rng);
        let g = avg_g(&theta, &fs, &xis, &sys, ctx)?;
        let dual = dual_f(&theta, &fs, &xis, &sys, ctx, DEFAULT_DUAL_CAP)?;
        out[8].push((l2_norm_sq(&g).powi(2) - l2_norm_sq(&dual)).max(0.0));
        out[13].push((g.sup_norm() - 1.0).max(0.0));
        out[13].push((dual.sup_norm() - 1.0).max(0.0));
    }

    // counting operator against the naive oracle, multilinearity, translation
    for dim in [1usize, 2] {
        let sys = reference_system(dim);
        let theta = WeightFunction::random_phase(p, &mut rng)?;
        let fs: Vec<GridFunction> = (0..=k).map(|_| GridFunction::random_bounded(p, dim, &mut rng)).collect::<Result<_>>()?;
        let lam = counting_lambda(&theta, &fs, &sys, ctx, CountingMode::Polynomial)?;
        let orc = oracle_lambda(&theta, &fs, &sys, ctx, CountingMode::Polynomial)?;
        out[9].push((lam - orc).norm());
        out[13].push((lam.norm() - 1.0).max(0.0));

        let rsys = sys.clone().with_phi(Some(RationalFunction::reciprocal()));
        let lam_r = counting_lambda(&theta, &fs, &rsys, ctx, CountingMode::ExcludePoles)?;
        let orc_r = oracle_lambda(&theta, &fs, &rsys, ctx, CountingMode::ExcludePoles)?;
        out[10].push((lam_r - orc_r).norm());

        let slot = rng.gen_range(0..=k);
        let h = GridFunction::random_bounded(p, dim, &mut rng)?;
        let (alpha, beta) = (random_unit_scalar(&mut rng), random_unit_scalar(&mut rng));
        let mut mixed = fs.clone();
        mixed[slot] = fs[slot].combine(alpha, &h, beta)?;
        let mut with_h = fs.clone();
        with_h[slot] = h;
        let lhs = counting_lambda(&theta, &mixed, &sys, ctx, CountingMode::Polynomial)?;
        let rhs = alpha * lam + beta * counting_lambda(&theta, &with_h, &sys, ctx, CountingMode::Polynomial)?;
        out[11].push((lhs - rhs).norm());

        let a: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..p)).collect();
        let moved: Vec<GridFunction> = fs.iter().map(|f| f.translate(&a)).collect();
        let lam_t = counting_lambda(&theta, &moved, &sys, ctx, CountingMode::Polynomial)?;
        out[12].push((lam_t - lam).norm());
    }

    // phi(y) = 2y, which has no poles, against P_i(2y) expanded
    if p > 2 {
        let two_y = RationalFunction::new(IntPolynomial::new(vec![0, 2]), IntPolynomial::new(vec![1]))?;
        let rsys = reference_system(2).with_phi(Some(two_y));
        let expanded = ConfigurationSystem::new(
            2,
            rsys.vectors().to_vec(),
            vec![IntPolynomial::new(vec![0, 2]), IntPolynomial::new(vec![0, 0, 4])],
            None,
        )?;
        let theta = WeightFunction::random_phase(p, &mut rng)?;
        let fs: Vec<GridFunction> = (0..=k).map(|_| GridFunction::random_bounded(p, 2, &mut rng)).collect::<Result<_>>()?;
        let a = counting_lambda(&theta, &fs, &rsys, ctx, CountingMode::ExcludePoles)?;
        let b = counting_lambda(&theta, &fs, &expanded, ctx, CountingMode::Polynomial)?;
        out[14].push((a - b).norm());
    }

    Ok(out)
}

fn spectrum_index(spectrum: &crate::fourier::DirectionalSpectrum, rep: &[u64]) -> usize {
    (0..spectrum.num_cosets())
        .find(|&c| spectrum.coset_rep(c) == rep)
        .expect("representative is listed")
}

/// Run every exact identity and constant-free inequality on seeded random
/// inputs at each prime. Failures are report content, not errors.
pub fn verify_exact_suite(seed: u64, primes: &[u64], trials: usize) -> Result<SuiteReport> {
    if trials == 0 || primes.is_empty() {
        return Err(Error::EmptySuite);
    }
    let contexts = primes.iter().map(|&p| PrimeContext::new(p)).collect::<Result<Vec<_>>>()?;
    for ctx in &contexts {
        reference_system(2).require_admissible(ctx)?;
    }
    let jobs: Vec<(usize, usize)> = (0..contexts.len())
        .flat_map(|c| (0..trials).map(move |t| (c, t)))
        .collect();
    let results: Vec<Vec<Vec<f64>>> = jobs
        .par_iter()
        .map(|&(c, t)| run_trial(&contexts[c], seed, t))
        .collect::<Result<_>>()?;

    let checks: Vec<CheckReport> = CHECK_NAMES
        .iter()
        .enumerate()
        .map(|(i, &name)| {
            results
                .iter()
                .map(|r| {
                    let mut acc = Accumulator::new(name);
                    r[i].iter().for_each(|&v| acc.push(v));
                    acc
                })
                .fold(Accumulator::new(name), Accumulator::merge)
                .finish()
        })
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport {
        seed,
        primes: primes.to_vec(),
        trials,
        checks,
        passed,
    })
}

// ---------------------------------------------------------------------------
// decay scans
// ---------------------------------------------------------------------------

/// Which asymptotic statement a scan measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecayTarget {
    /// L^2 distance between the weighted average and its structured term.
    Thm1_2,
    /// Weighted count against its main term.
    Thm1_3,
    /// Unweighted count against its main term.
    Thm3_1,
    /// Unweighted rational-progression count, poles excluded.
    Prop1_4,
}

impl DecayTarget {
    pub const ALL: [DecayTarget; 4] = [Self::Thm1_2, Self::Thm1_3, Self::Thm3_1, Self::Prop1_4];

    pub fn name(self) -> &'static str {
        match self {
            Self::Thm1_2 => "thm1_2",
            Self::Thm1_3 => "thm1_3",
            Self::Thm3_1 => "thm3_1",
            Self::Prop1_4 => "prop1_4",
        }
    }

    /// The weight is fixed to 1 for the unweighted targets.
    pub fn is_weighted(self) -> bool {
        matches!(self, Self::Thm1_2 | Self::Thm1_3)
    }
}

impl fmt::Display for DecayTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecayTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace(['.', '-'], "_");
        Self::ALL
            .into_iter()
            .find(|t| t.name() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown target {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub p: u64,
    pub trials: usize,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub target: DecayTarget,
    pub seed: u64,
    pub density: f64,
    pub rows: Vec<DecayRow>,
    /// Fit of the per-prime maxima; `None` if fewer than three are nonzero.
    pub fit: Option<LogLogFit>,
}

impl DecayReport {
    pub fn fitted_slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target.name(),
            "seed": self.seed,
            "density": self.density,
            "rows": self.rows.iter().map(|r| json!({
                "p": r.p,
                "trials": r.trials,
                "max": r.max,
                "mean": r.mean,
            })).collect::<Vec<_>>(),
            "slope": self.fitted_slope(),
            "intercept": self.fit.map(|f| f.intercept),
        })
    }

    pub fn to_csv(&self) -> String {
        let slope = json!(self.fitted_slope());
        let rows: Vec<Vec<Value>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    json!(self.target.name()),
                    json!(r.p),
                    json!(r.trials),
                    json!(r.max),
                    json!(r.mean),
                    slope.clone(),
                    json!(self.seed),
                ]
            })
            .collect();
        to_csv(&["target", "p", "trials", "max", "mean", "slope", "seed"], &rows)
    }
}

/// Inputs of [`scan_decay`].
#[derive(Debug, Clone)]
pub struct ScanRequest<'a> {
    pub target: DecayTarget,
    pub system: &'a ConfigurationSystem,
    pub weight: &'a WeightSpec,
    pub primes: &'a [u64],
    pub trials: usize,
    pub density: f64,
    pub seed: u64,
}

/// Discrepancy for one `(p, trial)`; inputs drawn from the trial's own sub-seed.
fn scan_trial(req: &ScanRequest<'_>, ctx: &PrimeContext, theta: &WeightFunction, trial: usize) -> Result<f64> {
    let p = ctx.p();
    let sys = req.system;
    let dim = sys.dimension();
    let k = sys.len();
    let mut rng = rng_from_seed(derive_seed(req.seed, &[p, trial as u64]));
    match req.target {
        DecayTarget::Thm1_2 => {
            let fs: Vec<GridFunction> = (0..k).map(|_| GridFunction::random_phase(p, dim, &mut rng)).collect::<Result<_>>()?;
            l2_discrepancy(theta, &fs, sys, ctx)
        }
        target => {
            let fs: Vec<GridFunction> = (0..=k)
                .map(|_| GridFunction::bernoulli(p, dim, req.density, &mut rng))
                .collect::<Result<_>>()?;
            let mode = if target == DecayTarget::Prop1_4 {
                CountingMode::ExcludePoles
            } else {
                CountingMode::Polynomial
            };
            let lam = counting_lambda(theta, &fs, sys, ctx, mode)?;
            let main = main_term(theta, &fs, sys, ctx, mode)?;
            Ok((lam - main).norm())
        }
    }
}

/// Measure the discrepancy of `target` over a prime ladder and fit its decay.
pub fn scan_decay(req: &ScanRequest<'_>) -> Result<DecayReport> {
    let mut ladder = req.primes.to_vec();
    ladder.sort_unstable();
    ladder.dedup();
    if ladder.len() < 3 {
        return Err(Error::InsufficientLadder(ladder.len()));
    }
    if req.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if !(req.density > 0.0 && req.density < 1.0) {
        return Err(Error::InvalidArgument(format!("density {} not in (0, 1)", req.density)));
    }
    if req.target == DecayTarget::Prop1_4 && req.system.phi().is_none() {
        return Err(Error::MissingPhi);
    }
    let contexts = ladder.iter().map(|&p| PrimeContext::new(p)).collect::<Result<Vec<_>>>()?;
    let weights = contexts
        .iter()
        .map(|ctx| {
            req.system.require_admissible(ctx)?;
            if req.target.is_weighted() {
                realize_weight(req.weight, ctx)
            } else {
                WeightFunction::constant(ctx.p(), Complex64::new(1.0, 0.0))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..contexts.len())
        .flat_map(|c| (0..req.trials).map(move |t| (c, t)))
        .collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(c, t)| scan_trial(req, &contexts[c], &weights[c], t))
        .collect::<Result<_>>()?;

    let rows: Vec<DecayRow> = values
        .chunks(req.trials)
        .zip(&ladder)
        .map(|(vals, &p)| DecayRow {
            p,
            trials: req.trials,
            max: vals.iter().copied().fold(0.0, f64::max),
            mean: vals.iter().sum::<f64>() / vals.len() as f64,
        })
        .collect();
    let fit = fit_log_log(&rows.iter().map(|r| (r.p, r.max)).collect::<Vec<_>>());
    Ok(DecayReport {
        target: req.target,
        seed: req.seed,
        density: req.density,
        rows,
        fit,
    })
}

// ---------------------------------------------------------------------------
// configuration search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoundConfiguration {
    pub base: Vec<u64>,
    pub parameter: u64,
    /// `x, x + P_1(phi(y)) v_1, .., x + P_k(phi(y)) v_k`
    pub points: Vec<Vec<u64>>,
    /// Some shift `P_i(phi(y)) v_i` is nonzero.
    pub nontrivial: bool,
    /// All `k + 1` points are pairwise distinct.
    pub all_distinct: bool,
}

fn is_member(a: &GridFunction, idx: usize) -> bool {
    a.at(idx).norm() > 0.5
}

/// First `(x, y)` in lexicographic order, `y` skipping poles, whose
/// progression is nontrivial and lies entirely in `a`.
pub fn find_configuration(
    a: &GridFunction,
    system: &ConfigurationSystem,
    ctx: &PrimeContext,
) -> Result<Option<FoundConfiguration>> {
    let phi = system.phi().ok_or(Error::MissingPhi)?;
    system.require_admissible(ctx)?;
    a.check_shape(ctx.p(), system.dimension())?;
    let p = ctx.p();

    // (y, shifts) for non-pole y with at least one nonzero shift
    let candidates: Vec<(u64, Vec<Vec<u64>>)> = phi
        .value_table(ctx)?
        .into_iter()
        .enumerate()
        .filter_map(|(y, val)| {
            let t = val?;
            let shifts: Vec<Vec<u64>> = system
                .polys()
                .iter()
                .zip(system.vectors())
                .map(|(poly, v)| {
                    let c = poly.eval_mod(t, ctx);
                    v.iter().map(|&vj| ctx.mul(c, ctx.reduce(vj))).collect()
                })
                .collect();
            shifts
                .iter()
                .any(|s| s.iter().any(|&c| c != 0))
                .then_some((y as u64, shifts))
        })
        .collect();

    for idx in 0..a.len() {
        if !is_member(a, idx) {
            continue;
        }
        let x = a.point(idx);
        for (y, shifts) in &candidates {
            if shifts.iter().all(|s| is_member(a, a.index_of_sum(&x, s))) {
                let mut points = vec![x.clone()];
                points.extend(shifts.iter().map(|s| x.iter().zip(s).map(|(&xi, &si)| (xi + si) % p).collect()));
                let mut sorted = points.clone();
                sorted.sort();
                sorted.dedup();
                return Ok(Some(FoundConfiguration {
                    base: x,
                    parameter: *y,
                    all_distinct: sorted.len() == points.len(),
                    points,
                    nontrivial: true,
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{primes_between, RationalValue};

    fn plane_with_reciprocal() -> ConfigurationSystem {
        reference_system(2).with_phi(Some(RationalFunction::reciprocal()))
    }

    #[test]
    fn suite_passes_small() {
        let r = verify_exact_suite(1, &[5, 7], 2).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
        assert_eq!(r.checks.len(), CHECK_NAMES.len());
        assert!(r.checks.iter().all(|c| c.evaluations > 0));
    }

    #[test]
    fn suite_errors() {
        assert_eq!(verify_exact_suite(1, &[5], 0).unwrap_err(), Error::EmptySuite);
        assert_eq!(verify_exact_suite(1, &[], 3).unwrap_err(), Error::EmptySuite);
        assert_eq!(verify_exact_suite(1, &[5, 9], 1).unwrap_err(), Error::NotPrime(9));
        assert!(matches!(verify_exact_suite(1, &[2], 1).unwrap_err(), Error::Inadmissible { .. }));
    }

    #[test]
    fn scan_rejects_bad_requests() {
        let sys = reference_system(1);
        let w = WeightSpec::default();
        let mut req = ScanRequest {
            target: DecayTarget::Thm3_1,
            system: &sys,
            weight: &w,
            primes: &[7],
            trials: 2,
            density: 0.5,
            seed: 0,
        };
        assert_eq!(scan_decay(&req).unwrap_err(), Error::InsufficientLadder(1));
        req.primes = &[11, 13, 17];
        req.target = DecayTarget::Prop1_4;
        assert_eq!(scan_decay(&req).unwrap_err(), Error::MissingPhi);
        req.target = DecayTarget::Thm3_1;
        req.density = 1.0;
        assert!(scan_decay(&req).is_err());
        req.density = 0.5;
        req.primes = &[2, 3, 5];
        assert!(matches!(scan_decay(&req).unwrap_err(), Error::Inadmissible { p: 2, .. }));
    }

    #[test]
    fn zero_weight_scan_is_identically_zero() {
        let sys = reference_system(1);
        let w = WeightSpec::Constant { value: 0.0 };
        for target in [DecayTarget::Thm1_2, DecayTarget::Thm1_3] {
            let r = scan_decay(&ScanRequest {
                target,
                system: &sys,
                weight: &w,
                primes: &[11, 13, 17],
                trials: 3,
                density: 0.5,
                seed: 4,
            })
            .unwrap();
            assert!(r.rows.iter().all(|row| row.max == 0.0 && row.mean == 0.0));
            assert!(r.fitted_slope().is_none());
        }
    }

    #[test]
    fn scan_rows_are_bounded_and_sorted() {
        let sys = reference_system(1).with_phi(Some(RationalFunction::reciprocal()));
        let w = WeightSpec::Random { seed: 3 };
        for target in DecayTarget::ALL {
            let r = scan_decay(&ScanRequest {
                target,
                system: &sys,
                weight: &w,
                primes: &[19, 11, 13, 17],
                trials: 4,
                density: 0.4,
                seed: 12,
            })
            .unwrap();
            assert_eq!(r.rows.iter().map(|r| r.p).collect::<Vec<_>>(), vec![11, 13, 17, 19]);
            for row in &r.rows {
                assert!(row.max >= 0.0 && row.max <= 2.0);
                assert!(row.mean <= row.max);
            }
        }
    }

    #[test]
    fn target_names_parse() {
        for t in DecayTarget::ALL {
            assert_eq!(t.name().parse::<DecayTarget>().unwrap(), t);
        }
        assert_eq!("Thm3.1".parse::<DecayTarget>().unwrap(), DecayTarget::Thm3_1);
        assert!("thm9".parse::<DecayTarget>().is_err());
    }

    #[test]
    fn find_in_full_space() {
        let ctx = PrimeContext::new(7).unwrap();
        let sys = plane_with_reciprocal();
        let a = GridFunction::constant(7, 2, Complex64::new(1.0, 0.0)).unwrap();
        let found = find_configuration(&a, &sys, &ctx).unwrap().unwrap();
        assert_eq!(found.base, vec![0, 0]);
        // y = 0 is the pole, y = 1 gives phi = 1 and shifts (1,0), (0,1)
        assert_eq!(found.parameter, 1);
        assert_eq!(found.points, vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert!(found.nontrivial && found.all_distinct);
    }

    #[test]
    fn find_in_empty_set() {
        let ctx = PrimeContext::new(7).unwrap();
        let a = GridFunction::zeros(7, 2).unwrap();
        assert!(find_configuration(&a, &plane_with_reciprocal(), &ctx).unwrap().is_none());
        assert_eq!(
            find_configuration(&a, &reference_system(2), &ctx).unwrap_err(),
            Error::MissingPhi
        );
    }

    #[test]
    fn found_points_lie_in_set() {
        let sys = plane_with_reciprocal();
        for p in primes_between(5, 31) {
            let ctx = PrimeContext::new(p).unwrap();
            let mut rng = rng_from_seed(p);
            let a = GridFunction::bernoulli(p, 2, 0.6, &mut rng).unwrap();
            if let Some(found) = find_configuration(&a, &sys, &ctx).unwrap() {
                let RationalValue::Value(t) = sys.phi().unwrap().eval_mod(found.parameter, &ctx).unwrap() else {
                    panic!("parameter is a pole");
                };
                for (i, pt) in found.points.iter().enumerate() {
                    assert!(a.get(pt).norm() > 0.5);
                    if i > 0 {
                        let c = sys.polys()[i - 1].eval_mod(t, &ctx);
                        let v = ctx.reduce_vec(&sys.vectors()[i - 1]);
                        for j in 0..2 {
                            assert_eq!(pt[j], (found.base[j] + c * v[j]) % p);
                        }
                    }
                }
            }
        }
    }
}
