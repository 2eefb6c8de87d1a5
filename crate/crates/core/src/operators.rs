//! Weighted polynomial averaging operators, their dual functions, the
//! counting operator and its structured main term.
//!
//! Indexing follows the progression: `fs[0]` in [`counting_lambda`] is `f_0`,
//! while in [`avg_g`] and [`dual_f`] `fs[i]` is `f_{i+1}`.

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{pivot_index, ConfigurationSystem, PrimeContext};
use crate::grid::{decode_index, pairwise_mean, pairwise_mean_real, pairwise_sum, GridFunction, WeightFunction};

/// Default work cap for [`dual_f`], measured in `p^(D+2)`; equals `61^4`.
pub const DEFAULT_DUAL_CAP: u128 = 61u128.pow(4);

/// How the progression parameter enters the polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountingMode {
    /// `P_i(y)` for every `y` in `F_p`.
    #[default]
    Polynomial,
    /// `P_i(phi(y))`, averaging only over `y` that are not poles of `phi`.
    ExcludePoles,
}

/// Frequencies `xi_{l+1}, .., xi_k` attached to the polynomials that are not
/// paired with a function.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrequencyVector(pub Vec<u64>);

impl FrequencyVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Parameter values `a(y)` together with the `y` they came from.
fn parameters(system: &ConfigurationSystem, ctx: &PrimeContext, mode: CountingMode) -> Result<Vec<(u64, u64)>> {
    match mode {
        CountingMode::Polynomial => Ok((0..ctx.p()).map(|y| (y, y)).collect()),
        CountingMode::ExcludePoles => {
            let phi = system.phi().ok_or(Error::MissingPhi)?;
            let params: Vec<(u64, u64)> = phi
                .value_table(ctx)?
                .into_iter()
                .enumerate()
                .filter_map(|(y, v)| v.map(|a| (y as u64, a)))
                .collect();
            if params.is_empty() {
                return Err(Error::AllPoles);
            }
            Ok(params)
        }
    }
}

/// `shifts[j][i] = P_i(a_j) v_i mod p` for the first `count` polynomials.
fn shift_table(system: &ConfigurationSystem, ctx: &PrimeContext, params: &[(u64, u64)], count: usize) -> Vec<Vec<Vec<u64>>> {
    params
        .iter()
        .map(|&(_, a)| {
            (0..count)
                .map(|i| {
                    let c = system.polys()[i].eval_mod(a, ctx);
                    system.vectors()[i].iter().map(|&vj| ctx.mul(c, ctx.reduce(vj))).collect()
                })
                .collect()
        })
        .collect()
}

fn validate(
    theta: &WeightFunction,
    fs: &[GridFunction],
    expected_fs: usize,
    system: &ConfigurationSystem,
    ctx: &PrimeContext,
) -> Result<()> {
    theta.check_modulus(ctx.p())?;
    if fs.len() != expected_fs {
        return Err(Error::ArityMismatch {
            what: "functions",
            expected: expected_fs,
            got: fs.len(),
        });
    }
    for f in fs {
        f.check_shape(ctx.p(), system.dimension())?;
    }
    system.require_admissible(ctx)
}

fn validate_split(
    theta: &WeightFunction,
    fs: &[GridFunction],
    xis: &FrequencyVector,
    system: &ConfigurationSystem,
    ctx: &PrimeContext,
) -> Result<usize> {
    let k = system.len();
    let l = fs.len();
    if l == 0 || l > k {
        return Err(Error::ArityMismatch {
            what: "functions (1 <= l <= k)",
            expected: k,
            got: l,
        });
    }
    if xis.len() != k - l {
        return Err(Error::ArityMismatch {
            what: "frequencies",
            expected: k - l,
            got: xis.len(),
        });
    }
    validate(theta, fs, l, system, ctx)?;
    Ok(l)
}

/// `prod_{i > l} e_p(P_i(y) xi_i)` for each `y`.
fn frequency_phases(system: &ConfigurationSystem, ctx: &PrimeContext, l: usize, xis: &FrequencyVector) -> Vec<Complex64> {
    (0..ctx.p())
        .map(|y| {
            let phase = xis.0.iter().enumerate().fold(0, |acc, (j, &xi)| {
                ctx.add(acc, ctx.mul(system.polys()[l + j].eval_mod(y, ctx), xi % ctx.p()))
            });
            ctx.e(phase)
        })
        .collect()
}

fn map_grid(p: u64, dim: usize, f: impl Fn(&[u64]) -> Complex64 + Sync) -> Result<GridFunction> {
    let len = crate::grid::grid_len(p, dim)?;
    let values: Vec<Complex64> = (0..len)
        .into_par_iter()
        .map_init(
            || vec![0u64; dim],
            |coords, idx| {
                decode_index(p, idx, coords);
                f(coords)
            },
        )
        .collect();
    GridFunction::new(p, dim, values)
}

/// `G_{l,k}(x) = E_y theta(y) prod_{i<=l} f_i(x + P_i(y) v_i) prod_{i>l} e_p(P_i(y) xi_i)`
pub fn avg_g(
    theta: &WeightFunction,
    fs: &[GridFunction],
    xis: &FrequencyVector,
    system: &ConfigurationSystem,
    ctx: &PrimeContext,
) -> Result<GridFunction> {
    let l = validate_split(theta, fs, xis, system, ctx)?;
    let params = parameters(system, ctx, CountingMode::Polynomial)?;
    let shifts = shift_table(system, ctx, &params, l);
    let phases = frequency_phases(system, ctx, l, xis);
    let weights: Vec<Complex64> = (0..ctx.p()).map(|y| theta.at(y) * phases[y as usize]).collect();
    let f0 = &fs[0];
    map_grid(ctx.p(), system.dimension(), |x| {
        let terms: Vec<Complex64> = weights
            .iter()
            .zip(&shifts)
            .map(|(&w, s)| fs.iter().zip(s).fold(w, |acc, (f, si)| acc * f.at(f0.index_of_sum(x, si))))
            .collect();
        pairwise_mean(&terms)
    })
}

/// The dual function `F_{l,k}` by direct summation over `(y, y')`:
///
/// `E_{y,y'} theta(y) conj(theta(y')) prod_{i<l} f_i(x + P_i(y)v_i - P_l(y')v_l) conj(f_i(x + P_i(y')v_i - P_l(y')v_l))
///   * f_l(x + P_l(y)v_l - P_l(y')v_l) prod_{i>l} e_p((P_i(y) - P_i(y')) xi_i)`
///
/// Costs `O(l p^(D+2))`; refused when `p^(D+2)` exceeds `cap`.
pub fn dual_f(
    theta: &WeightFunction,
    fs: &[GridFunction],
    xis: &FrequencyVector,
    system: &ConfigurationSystem,
    ctx: &PrimeContext,
    cap: u128,
) -> Result<GridFunction> {
    let l = validate_split(theta, fs, xis, system, ctx)?;
    let p = ctx.p();
    let needed = (p as u128).pow(system.dimension() as u32 + 2);
    if needed > cap {
        return Err(Error::BudgetExceeded { needed, cap });
    }
    let params = parameters(system, ctx, CountingMode::Polynomial)?;
    let shifts = shift_table(system, ctx, &params, l);
    let phases = frequency_phases(system, ctx, l, xis);
    let last = l - 1;
    let f0 = &fs[0];
    let dim = system.dimension();
    map_grid(p, dim, |x| {
        let mut terms = Vec::with_capacity((p * p) as usize);
        let mut base = vec![0u64; dim];
        for yp in 0..p as usize {
            for (b, (&xj, &sj)) in base.iter_mut().zip(x.iter().zip(&shifts[yp][last])) {
                *b = ctx.sub(xj, sj);
            }
            let mut outer = theta.at(yp as u64).conj() * phases[yp].conj();
            for (f, s) in fs[..last].iter().zip(&shifts[yp]) {
                outer *= f.at(f0.index_of_sum(&base, s)).conj();
            }
            for y in 0..p as usize {
                let mut term = outer * theta.at(y as u64) * phases[y];
                for (f, s) in fs.iter().zip(&shifts[y]) {
                    term *= f.at(f0.index_of_sum(&base, s));
                }
                terms.push(term);
            }
        }
        pairwise_mean(&terms)
    })
}

/// `E_x E_y theta(y) f_0(x) prod_i f_i(x + P_i(a(y)) v_i)`, where `a(y) = y`
/// or `a(y) = phi(y)` with the `y`-average taken over non-poles only.
pub fn counting_lambda(
    theta: &WeightFunction,
    fs: &[GridFunction],
    system: &ConfigurationSystem,
    ctx: &PrimeContext,
    mode: CountingMode,
) -> Result<Complex64> {
    if mode == CountingMode::ExcludePoles && system.phi().is_none() {
        return Err(Error::MissingPhi);
    }
    let k = system.len();
    validate(theta, fs, k + 1, system, ctx)?;
    let params = parameters(system, ctx, mode)?;
    let shifts = shift_table(system, ctx, &params, k);
    let weights: Vec<Complex64> = params.iter().map(|&(y, _)| theta.at(y)).collect();
    let (f0, rest) = fs.split_first().expect("k + 1 >= 2 functions");
    let p = ctx.p();
    let dim = system.dimension();
    let per_x: Vec<Complex64> = (0..f0.len())
        .into_par_iter()
        .map_init(
            || vec![0u64; dim],
            |coords, idx| {
                let base = f0.at(idx);
                if base.is_zero() {
                    return Complex64::zero();
                }
                decode_index(p, idx, coords);
                let terms: Vec<Complex64> = weights
                    .iter()
                    .zip(&shifts)
                    .map(|(&w, s)| rest.iter().zip(s).fold(w, |acc, (f, si)| acc * f.at(f0.index_of_sum(coords, si))))
                    .collect();
                base * pairwise_mean(&terms)
            },
        )
        .collect();
    Ok(pairwise_mean(&per_x))
}

/// `x -> E_n f(x + n v)`, computed once per coset of `<v>`.
pub fn line_average(f: &GridFunction, v: &[i64], ctx: &PrimeContext) -> Result<GridFunction> {
    f.check_shape(ctx.p(), v.len())?;
    let p = ctx.p();
    let v = ctx.reduce_vec(v);
    let pivot = pivot_index(&v).ok_or(Error::ZeroDirection)?;
    let inv = ctx.inv(v[pivot]).expect("nonzero pivot");
    let mut coords = vec![0u64; f.dim()];
    let mut rep = vec![0u64; f.dim()];
    let mut coset_of = Vec::with_capacity(f.len());
    let mut sums = vec![Complex64::zero(); f.len()];
    for idx in 0..f.len() {
        decode_index(p, idx, &mut coords);
        let t = ctx.mul(coords[pivot], inv);
        for ((r, &x), &vj) in rep.iter_mut().zip(&coords).zip(&v) {
            *r = ctx.sub(x, ctx.mul(t, vj));
        }
        let r = f.index(&rep);
        sums[r] += f.at(idx);
        coset_of.push(r);
    }
    let values = coset_of.into_iter().map(|r| sums[r] / p as f64).collect();
    GridFunction::new(p, f.dim(), values)
}

/// `prod_i E_{n_i} f_i(x + n_i v_i)` pointwise, for `fs = [f_1, .., f_k]`.
fn structured_product(fs: &[GridFunction], system: &ConfigurationSystem, ctx: &PrimeContext) -> Result<Vec<Complex64>> {
    let len = fs[0].len();
    let mut acc = vec![Complex64::one(); len];
    for (f, v) in fs.iter().zip(system.vectors()) {
        let avg = line_average(f, v, ctx)?;
        for (a, &z) in acc.iter_mut().zip(avg.values()) {
            *a *= z;
        }
    }
    Ok(acc)
}

/// Average of `theta` over the parameter set of `mode`.
pub fn weight_mean(theta: &WeightFunction, system: &ConfigurationSystem, ctx: &PrimeContext, mode: CountingMode) -> Result<Complex64> {
    theta.check_modulus(ctx.p())?;
    let params = parameters(system, ctx, mode)?;
    let vals: Vec<Complex64> = params.iter().map(|&(y, _)| theta.at(y)).collect();
    Ok(pairwise_mean(&vals))
}

/// `E_y theta(y) * E_x f_0(x) prod_i E_{n_i} f_i(x + n_i v_i)`.
///
/// With [`CountingMode::ExcludePoles`] the weight is averaged over non-poles,
/// matching the normalisation of [`counting_lambda`] in that mode.
pub fn main_term(
    theta: &WeightFunction,
    fs: &[GridFunction],
    system: &ConfigurationSystem,
    ctx: &PrimeContext,
    mode: CountingMode,
) -> Result<Complex64> {
    if mode == CountingMode::ExcludePoles && system.phi().is_none() {
        return Err(Error::MissingPhi);
    }
    validate(theta, fs, system.len() + 1, system, ctx)?;
    let mean = weight_mean(theta, system, ctx, mode)?;
    let (f0, rest) = fs.split_first().expect("k + 1 >= 2 functions");
    let product = structured_product(rest, system, ctx)?;
    let terms: Vec<Complex64> = f0.values().iter().zip(&product).map(|(&a, &b)| a * b).collect();
    Ok(mean * pairwise_mean(&terms))
}

/// `E_x |G_k(x) - E_y theta(y) prod_i E_{n_i} f_i(x + n_i v_i)|^2` for `fs = [f_1, .., f_k]`.
pub fn l2_discrepancy(
    theta: &WeightFunction,
    fs: &[GridFunction],
    system: &ConfigurationSystem,
    ctx: &PrimeContext,
) -> Result<f64> {
    let g = avg_g(theta, fs, &FrequencyVector::default(), system, ctx)?;
    let mean = theta.mean();
    let product = structured_product(fs, system, ctx)?;
    let sq: Vec<f64> = g
        .values()
        .iter()
        .zip(&product)
        .map(|(&a, &b)| (a - mean * b).norm_sqr())
        .collect();
    Ok(pairwise_mean_real(&sq))
}

/// `<f, g> = E_x f(x) conj(g(x))`
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    f.check_same_shape(g)?;
    let terms: Vec<Complex64> = f.values().iter().zip(g.values()).map(|(&a, &b)| a * b.conj()).collect();
    Ok(pairwise_mean(&terms))
}

/// Reference value of [`counting_lambda`] by plain nested loops: powers are
/// expanded term by term, inverses found by search, and sums accumulated
/// left to right. Shares no helpers with the fast path.
pub fn oracle_lambda(
    theta: &WeightFunction,
    fs: &[GridFunction],
    system: &ConfigurationSystem,
    ctx: &PrimeContext,
    mode: CountingMode,
) -> Result<Complex64> {
    if mode == CountingMode::ExcludePoles && system.phi().is_none() {
        return Err(Error::MissingPhi);
    }
    let k = system.len();
    validate(theta, fs, k + 1, system, ctx)?;
    let p = ctx.p() as i128;
    let dim = system.dimension();

    fn naive_eval(coeffs: &[i64], y: i128, p: i128) -> i128 {
        let mut total = 0i128;
        for (n, &c) in coeffs.iter().enumerate() {
            let mut power = 1i128;
            for _ in 0..n {
                power = power * y % p;
            }
            total = (total + (c as i128).rem_euclid(p) * power) % p;
        }
        total
    }

    let mut total = Complex64::zero();
    let mut valid = 0u64;
    let mut x = vec![0i128; dim];
    let points = (p as usize).pow(dim as u32);
    for _ in 0..points {
        for y in 0..p {
            let a = match mode {
                CountingMode::Polynomial => y,
                CountingMode::ExcludePoles => {
                    let phi = system.phi().expect("checked above");
                    let num = naive_eval(phi.numerator().coeffs(), y, p);
                    let den = naive_eval(phi.denominator().coeffs(), y, p);
                    match (1..p).find(|z| den * z % p == 1) {
                        Some(inv) => num * inv % p,
                        None => continue,
                    }
                }
            };
            valid += 1;
            let mut term = theta.values()[y as usize] * fs[0].values()[flat(&x, p)];
            for i in 0..k {
                let c = naive_eval(system.polys()[i].coeffs(), a, p);
                let moved: Vec<i128> = x
                    .iter()
                    .zip(&system.vectors()[i])
                    .map(|(&xj, &vj)| (xj + c * vj as i128).rem_euclid(p))
                    .collect();
                term *= fs[i + 1].values()[flat(&moved, p)];
            }
            total += term;
        }
        // odometer increment, last coordinate fastest
        for j in (0..dim).rev() {
            x[j] += 1;
            if x[j] < p {
                break;
            }
            x[j] = 0;
        }
    }
    if valid == 0 {
        return Err(Error::AllPoles);
    }
    Ok(total / valid as f64)
}

fn flat(x: &[i128], p: i128) -> usize {
    let mut idx = 0i128;
    for &c in x {
        idx = idx * p + c;
    }
    idx as usize
}

/// `sum` of the squared moduli divided by the count, i.e. `||f||_{L^2}^2`.
pub fn l2_norm_sq(f: &GridFunction) -> f64 {
    let sq: Vec<f64> = f.values().iter().map(|z| z.norm_sqr()).collect();
    pairwise_sum(&sq) / sq.len() as f64
}
