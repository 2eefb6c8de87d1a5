//! Directional Fourier analysis on `F_p^D`, the `u^s` phase-correlation norm
//! on `F_p`, and Gowers box norms along subspaces.
//!
//! Everything here is computed by direct summation in a fixed index order.
//! Where two routes to the same number exist (`box_norm` against
//! `box_norm_v`, `u_norm(.., 2)` against [`max_fourier_coefficient`]) they
//! share no code beyond the character table.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{pivot_index, PrimeContext};
use crate::grid::{decode_index, pairwise_mean, pairwise_mean_real, pairwise_sum, GridFunction, WeightFunction};

/// Default bound on the number of phases enumerated by [`u_norm`].
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Largest `s` accepted by [`u_norm`].
pub const MAX_UNIFORMITY_ORDER: u32 = 5;

/// Tolerance on the sign and imaginary part of box-norm inner averages.
pub const BOX_TOLERANCE: f64 = 1e-9;

fn reduced_direction(f: &GridFunction, v: &[i64], ctx: &PrimeContext) -> Result<(Vec<u64>, usize)> {
    if v.len() != f.dim() {
        return Err(Error::InvalidArgument(format!(
            "direction has length {}, grid has dimension {}",
            v.len(),
            f.dim()
        )));
    }
    let v = ctx.reduce_vec(v);
    let pivot = pivot_index(&v).ok_or(Error::ZeroDirection)?;
    Ok((v, pivot))
}

fn check_ctx(f: &GridFunction, ctx: &PrimeContext) -> Result<()> {
    f.check_shape(ctx.p(), f.dim())
}

/// Grid indices of the points `x + n v` for `n = 0..p`.
fn line_indices(f: &GridFunction, x: &[u64], v: &[u64], ctx: &PrimeContext) -> Vec<usize> {
    let mut shift = vec![0u64; v.len()];
    (0..ctx.p())
        .map(|n| {
            for (s, &c) in shift.iter_mut().zip(v) {
                *s = ctx.mul(n, c);
            }
            f.index_of_sum(x, &shift)
        })
        .collect()
}

/// `E_n f(x + n v) e_p(-n xi)`
pub fn directional_fourier(
    f: &GridFunction,
    x: &[u64],
    v: &[i64],
    xi: u64,
    ctx: &PrimeContext,
) -> Result<Complex64> {
    check_ctx(f, ctx)?;
    let (v, _) = reduced_direction(f, v, ctx)?;
    let x: Vec<u64> = x.iter().map(|&c| c % ctx.p()).collect();
    let terms: Vec<Complex64> = line_indices(f, &x, &v, ctx)
        .into_iter()
        .enumerate()
        .map(|(n, idx)| f.at(idx) * ctx.e(ctx.neg(ctx.mul(n as u64, xi))))
        .collect();
    Ok(pairwise_mean(&terms))
}

/// Fourier coefficients of `f` along every coset of `<v>`, one row per coset.
///
/// Cosets are represented by the points whose pivot coordinate (the first
/// coordinate where `v` is nonzero mod p) is zero.
#[derive(Debug, Clone)]
pub struct DirectionalSpectrum {
    p: u64,
    direction: Vec<u64>,
    coset_reps: Vec<Vec<u64>>,
    table: Vec<Complex64>,
}

impl DirectionalSpectrum {
    pub fn direction(&self) -> &[u64] {
        &self.direction
    }

    pub fn num_cosets(&self) -> usize {
        self.coset_reps.len()
    }

    pub fn coset_rep(&self, coset: usize) -> &[u64] {
        &self.coset_reps[coset]
    }

    pub fn coefficient(&self, coset: usize, xi: u64) -> Complex64 {
        self.table[coset * self.p as usize + xi as usize]
    }

    pub fn row(&self, coset: usize) -> &[Complex64] {
        let p = self.p as usize;
        &self.table[coset * p..(coset + 1) * p]
    }

    /// `sum_xi fhat(rep; v; xi) e_p(n xi)`, which should equal `f(rep + n v)`.
    pub fn reconstruct(&self, coset: usize, n: u64, ctx: &PrimeContext) -> Complex64 {
        let terms: Vec<Complex64> = self
            .row(coset)
            .iter()
            .enumerate()
            .map(|(xi, &c)| c * ctx.e(ctx.mul(n, xi as u64)))
            .collect();
        pairwise_sum(&terms)
    }

    /// `E_x |fhat(x; v; xi)|^2` for each `xi`; moduli are constant on cosets,
    /// so the average over representatives is the average over the space.
    pub fn energy_by_frequency(&self) -> Vec<f64> {
        let p = self.p as usize;
        (0..p)
            .map(|xi| {
                let col: Vec<f64> = (0..self.num_cosets())
                    .map(|c| self.table[c * p + xi].norm_sqr())
                    .collect();
                pairwise_mean_real(&col)
            })
            .collect()
    }

    /// Rows `(coset_index, xi, re, im)`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, u64, f64, f64)> + '_ {
        let p = self.p as usize;
        self.table
            .iter()
            .enumerate()
            .map(move |(i, z)| (i / p, (i % p) as u64, z.re, z.im))
    }
}

pub fn directional_spectrum(f: &GridFunction, v: &[i64], ctx: &PrimeContext) -> Result<DirectionalSpectrum> {
    check_ctx(f, ctx)?;
    let (v, pivot) = reduced_direction(f, v, ctx)?;
    let p = ctx.p();
    let mut coords = vec![0u64; f.dim()];
    let coset_reps: Vec<Vec<u64>> = (0..f.len())
        .filter_map(|idx| {
            decode_index(p, idx, &mut coords);
            (coords[pivot] == 0).then(|| coords.clone())
        })
        .collect();
    let table: Vec<Complex64> = coset_reps
        .par_iter()
        .flat_map_iter(|rep| {
            let line: Vec<Complex64> = line_indices(f, rep, &v, ctx).into_iter().map(|i| f.at(i)).collect();
            (0..p)
                .map(|xi| {
                    let terms: Vec<Complex64> = line
                        .iter()
                        .enumerate()
                        .map(|(n, &z)| z * ctx.e(ctx.neg(ctx.mul(n as u64, xi))))
                        .collect();
                    pairwise_mean(&terms)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(DirectionalSpectrum {
        p,
        direction: v,
        coset_reps,
        table,
    })
}

/// `sup_xi E_x |fhat(x; v; xi)|^2`, the right-hand side of the box-norm
/// inverse inequality along `<v>`.
pub fn inverse_bound(f: &GridFunction, v: &[i64], ctx: &PrimeContext) -> Result<f64> {
    let spectrum = directional_spectrum(f, v, ctx)?;
    Ok(spectrum.energy_by_frequency().into_iter().fold(0.0, f64::max))
}

/// `sup_P |E_y theta(y) e_p(-P(y))|` over polynomial phases of degree at most
/// `s - 1`, enumerated exactly. The constant coefficient only rotates the
/// sum, so `p^(s-1)` phases are visited.
pub fn u_norm(theta: &WeightFunction, s: u32, ctx: &PrimeContext, cap: u128) -> Result<f64> {
    theta.check_modulus(ctx.p())?;
    if s == 0 || s > MAX_UNIFORMITY_ORDER {
        return Err(Error::InvalidArgument(format!(
            "order s = {s} outside 1..={MAX_UNIFORMITY_ORDER}"
        )));
    }
    let p = ctx.p();
    if s == 1 {
        return Ok(theta.mean().norm());
    }
    let free = s - 1;
    let needed = (p as u128).pow(free);
    if needed > cap {
        return Err(Error::BudgetExceeded { needed, cap });
    }
    // powers[j][y] = y^(j+1) mod p
    let powers: Vec<Vec<u64>> = (1..=free as u64)
        .map(|j| (0..p).map(|y| ctx.pow(y, j)).collect())
        .collect();
    let best = (0..needed as u64)
        .into_par_iter()
        .map(|mut code| {
            let mut coeffs = Vec::with_capacity(free as usize);
            for _ in 0..free {
                coeffs.push(code % p);
                code /= p;
            }
            let terms: Vec<Complex64> = (0..p)
                .map(|y| {
                    let phase = coeffs
                        .iter()
                        .zip(&powers)
                        .fold(0, |acc, (&a, pw)| ctx.add(acc, ctx.mul(a, pw[y as usize])));
                    theta.at(y) * ctx.e(ctx.neg(phase))
                })
                .collect();
            pairwise_mean(&terms).norm()
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// `max_xi |E_y theta(y) e_p(-xi y)|` by one direct transform, evaluating each
/// character with `sin_cos` rather than the context table.
pub fn max_fourier_coefficient(theta: &WeightFunction) -> f64 {
    let p = theta.p();
    (0..p)
        .map(|xi| {
            let terms: Vec<Complex64> = (0..p)
                .map(|y| {
                    let angle = -TAU * ((xi * y) % p) as f64 / p as f64;
                    theta.at(y) * Complex64::from_polar(1.0, angle)
                })
                .collect();
            pairwise_mean(&terms).norm()
        })
        .fold(0.0, f64::max)
}

/// `x -> f(x) conj(f(x + h))`
pub fn mult_derivative(f: &GridFunction, h: &[u64]) -> Result<GridFunction> {
    if h.len() != f.dim() {
        return Err(Error::InvalidArgument(format!(
            "shift has length {}, grid has dimension {}",
            h.len(),
            f.dim()
        )));
    }
    let p = f.p();
    let h: Vec<u64> = h.iter().map(|&c| c % p).collect();
    let mut coords = vec![0u64; f.dim()];
    let values = (0..f.len())
        .map(|idx| {
            decode_index(p, idx, &mut coords);
            f.at(idx) * f.at(f.index_of_sum(&coords, &h)).conj()
        })
        .collect();
    GridFunction::new(p, f.dim(), values)
}

/// A subspace of `F_p^D` held as a row-reduced basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    dim: usize,
    basis: Vec<Vec<u64>>,
}

impl Subspace {
    /// Row-reduce the generators mod p; fails if they only span `{0}`.
    pub fn from_generators(dim: usize, generators: &[Vec<i64>], ctx: &PrimeContext) -> Result<Self> {
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "generator {g:?} does not have {dim} coordinates"
                )));
            }
            rows.push(ctx.reduce_vec(g));
        }
        let mut rank = 0;
        for col in 0..dim {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let inv = ctx.inv(rows[rank][col]).expect("nonzero pivot");
            for c in 0..dim {
                rows[rank][c] = ctx.mul(rows[rank][c], inv);
            }
            for r in 0..rows.len() {
                if r != rank && rows[r][col] != 0 {
                    let factor = rows[r][col];
                    for c in 0..dim {
                        let delta = ctx.mul(factor, rows[rank][c]);
                        rows[r][c] = ctx.sub(rows[r][c], delta);
                    }
                }
            }
            rank += 1;
        }
        rows.truncate(rank);
        if rows.is_empty() {
            return Err(Error::ZeroDirection);
        }
        Ok(Self { dim, basis: rows })
    }

    pub fn full(dim: usize, ctx: &PrimeContext) -> Result<Self> {
        let gens: Vec<Vec<i64>> = (0..dim)
            .map(|i| (0..dim).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::from_generators(dim, &gens, ctx)
    }

    pub fn line(v: &[i64], ctx: &PrimeContext) -> Result<Self> {
        Self::from_generators(v.len(), &[v.to_vec()], ctx)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    /// Every element, enumerated over the coefficient cube of the basis.
    pub fn elements(&self, ctx: &PrimeContext) -> Vec<Vec<u64>> {
        let p = ctx.p();
        let count = (p as usize).pow(self.rank() as u32);
        let mut coeffs = vec![0u64; self.rank()];
        (0..count)
            .map(|code| {
                decode_index(p, code, &mut coeffs);
                let mut h = vec![0u64; self.dim];
                for (c, b) in coeffs.iter().zip(&self.basis) {
                    for (hj, &bj) in h.iter_mut().zip(b) {
                        *hj = ctx.add(*hj, ctx.mul(*c, bj));
                    }
                }
                h
            })
            .collect()
    }
}

/// Box norm along `subspaces` by direct summation over `x` and every tuple
/// `(h_1, .., h_s)`.
pub fn box_norm(f: &GridFunction, subspaces: &[Subspace], ctx: &PrimeContext) -> Result<f64> {
    check_ctx(f, ctx)?;
    if subspaces.is_empty() {
        return Err(Error::InvalidArgument("need at least one subspace".into()));
    }
    if let Some(bad) = subspaces.iter().find(|s| s.dim != f.dim()) {
        return Err(Error::InvalidArgument(format!(
            "subspace lives in dimension {}, grid in {}",
            bad.dim,
            f.dim()
        )));
    }
    let element_lists: Vec<Vec<Vec<u64>>> = subspaces.iter().map(|s| s.elements(ctx)).collect();
    let total: usize = element_lists.iter().map(Vec::len).product();
    let per_tuple: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut g = f.clone();
            for list in &element_lists {
                let h = &list[code % list.len()];
                code /= list.len();
                g = mult_derivative(&g, h).expect("shift has grid dimension");
            }
            g.mean()
        })
        .collect();
    let inner = pairwise_mean(&per_tuple);
    let order = 1u32 << subspaces.len();
    root_of_average(inner, f.sup_norm().powi(order as i32), order)
}

/// `||f||_{F_p^D, <v>}` using `||f||^4 = E_n |E_x f(x) conj(f(x + n v))|^2`.
pub fn box_norm_v(f: &GridFunction, v: &[i64], ctx: &PrimeContext) -> Result<f64> {
    check_ctx(f, ctx)?;
    let (v, _) = reduced_direction(f, v, ctx)?;
    let p = ctx.p();
    let mut shift = vec![0u64; f.dim()];
    let autocorrelations: Vec<f64> = (0..p)
        .map(|n| {
            for (s, &c) in shift.iter_mut().zip(&v) {
                *s = ctx.mul(n, c);
            }
            let dn = mult_derivative(f, &shift).expect("shift has grid dimension");
            dn.mean().norm_sqr()
        })
        .collect();
    let inner = Complex64::new(pairwise_mean_real(&autocorrelations), 0.0);
    root_of_average(inner, f.sup_norm().powi(4), 4)
}

fn root_of_average(inner: Complex64, scale: f64, order: u32) -> Result<f64> {
    let tol = BOX_TOLERANCE * scale.max(1.0);
    if inner.im.abs() > tol {
        return Err(Error::Numerical(format!(
            "box-norm average has imaginary part {:e}",
            inner.im
        )));
    }
    if inner.re < -tol {
        return Err(Error::Numerical(format!("box-norm average is negative: {:e}", inner.re)));
    }
    Ok(inner.re.max(0.0).powf(1.0 / order as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::rng_from_seed;
    use num_traits::Zero;
    use approx::assert_abs_diff_eq;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn fourier_of_constant() {
        let c = ctx(7);
        let f = GridFunction::constant(7, 2, Complex64::new(0.3, -0.2)).unwrap();
        let z0 = directional_fourier(&f, &[2, 3], &[1, 2], 0, &c).unwrap();
        let z1 = directional_fourier(&f, &[2, 3], &[1, 2], 1, &c).unwrap();
        assert!((z0 - Complex64::new(0.3, -0.2)).norm() < 1e-12);
        assert!(z1.norm() < 1e-12);
    }

    #[test]
    fn fourier_of_character() {
        let c = ctx(11);
        let w = 4;
        let f = GridFunction::from_fn(11, 1, |x| c.e(c.mul(w, x[0]))).unwrap();
        for x in 0..11 {
            for xi in 0..11 {
                let z = directional_fourier(&f, &[x], &[1], xi, &c).unwrap();
                let expected = if xi == w { c.e(c.mul(w, x)) } else { Complex64::zero() };
                assert!((z - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fourier_of_two_point_indicator() {
        // oracle: (1 + e_5(-1)) / 5
        let c = ctx(5);
        let f = GridFunction::indicator_of_points(5, 1, &[vec![0], vec![1]]).unwrap();
        let z = directional_fourier(&f, &[0], &[1], 1, &c).unwrap();
        let angle = -TAU / 5.0;
        let oracle = (1.0 + Complex64::new(angle.cos(), angle.sin())) / 5.0;
        assert!((z - oracle).norm() < 1e-15);
        assert_abs_diff_eq!(z.re, 0.261803, epsilon = 1e-6);
        assert_abs_diff_eq!(z.im, -0.190211, epsilon = 1e-6);
        assert_abs_diff_eq!(z.norm(), 0.323607, epsilon = 1e-6);
    }

    #[test]
    fn zero_direction_is_rejected() {
        let c = ctx(5);
        let f = GridFunction::zeros(5, 2).unwrap();
        assert_eq!(directional_fourier(&f, &[0, 0], &[5, 10], 0, &c).unwrap_err(), Error::ZeroDirection);
        assert_eq!(directional_spectrum(&f, &[0, 5], &c).unwrap_err(), Error::ZeroDirection);
        assert_eq!(box_norm_v(&f, &[5, 0], &c).unwrap_err(), Error::ZeroDirection);
        assert_eq!(Subspace::line(&[0, 0], &c).unwrap_err(), Error::ZeroDirection);
    }

    #[test]
    fn spectrum_of_constants() {
        let c = ctx(5);
        let s = directional_spectrum(&GridFunction::constant(5, 2, one()).unwrap(), &[1, 2], &c).unwrap();
        assert_eq!(s.num_cosets(), 5);
        for coset in 0..5 {
            assert!((s.coefficient(coset, 0) - one()).norm() < 1e-12);
            for xi in 1..5 {
                assert!(s.coefficient(coset, xi).norm() < 1e-12);
            }
        }
        let z = directional_spectrum(&GridFunction::zeros(5, 2).unwrap(), &[0, 1], &c).unwrap();
        assert!(z.rows().all(|(_, _, re, im)| re == 0.0 && im == 0.0));
    }

    #[test]
    fn spectrum_parseval_and_inversion() {
        let c = ctx(7);
        let mut rng = rng_from_seed(11);
        let f = GridFunction::random_bounded(7, 2, &mut rng).unwrap();
        let s = directional_spectrum(&f, &[1, 1], &c).unwrap();
        for coset in 0..s.num_cosets() {
            let rep = s.coset_rep(coset).to_vec();
            let lhs: f64 = s.row(coset).iter().map(|z| z.norm_sqr()).sum();
            let line: Vec<Complex64> = (0..7).map(|n| f.get(&[(rep[0] + n) % 7, (rep[1] + n) % 7])).collect();
            let rhs = line.iter().map(|z| z.norm_sqr()).sum::<f64>() / 7.0;
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9);
            for n in 0..7 {
                assert!((s.reconstruct(coset, n, &c) - line[n as usize]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn u_norm_examples() {
        let c = ctx(5);
        let k = Complex64::new(0.6, 0.0);
        let theta = WeightFunction::constant(5, k).unwrap();
        for s in 1..=4 {
            assert_abs_diff_eq!(u_norm(&theta, s, &c, DEFAULT_ENUMERATION_CAP).unwrap(), 0.6, epsilon = 1e-12);
        }
        let c7 = ctx(7);
        let quad = WeightFunction::new(7, (0..7).map(|y| c7.e(c7.mul(y, y))).collect()).unwrap();
        assert_abs_diff_eq!(u_norm(&quad, 3, &c7, DEFAULT_ENUMERATION_CAP).unwrap(), 1.0, epsilon = 1e-12);

        let mut vals = vec![Complex64::new(-0.2, 0.0); 5];
        vals[0] = Complex64::new(0.8, 0.0);
        let delta = WeightFunction::new(5, vals).unwrap();
        assert_abs_diff_eq!(u_norm(&delta, 2, &c, DEFAULT_ENUMERATION_CAP).unwrap(), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn u_norm_budget_and_order() {
        let c = ctx(101);
        let theta = WeightFunction::constant(101, one()).unwrap();
        assert!(matches!(u_norm(&theta, 4, &c, 1_000_000), Err(Error::BudgetExceeded { .. })));
        assert!(u_norm(&theta, 0, &c, 10).is_err());
        assert!(u_norm(&theta, 6, &c, u128::MAX).is_err());
    }

    #[test]
    fn u2_matches_single_transform() {
        let c = ctx(13);
        let mut rng = rng_from_seed(5);
        for _ in 0..10 {
            let theta = WeightFunction::random_phase(13, &mut rng).unwrap();
            let a = u_norm(&theta, 2, &c, DEFAULT_ENUMERATION_CAP).unwrap();
            assert_abs_diff_eq!(a, max_fourier_coefficient(&theta), epsilon = 1e-9);
            let b = u_norm(&theta, 3, &c, DEFAULT_ENUMERATION_CAP).unwrap();
            assert!(a <= b + 1e-12);
        }
    }

    #[test]
    fn mult_derivative_examples() {
        let c = ctx(7);
        let mut rng = rng_from_seed(2);
        let f = GridFunction::random_bounded(7, 1, &mut rng).unwrap();
        let d0 = mult_derivative(&f, &[0]).unwrap();
        for i in 0..7 {
            assert_abs_diff_eq!(d0.at(i).re, f.at(i).norm_sqr(), epsilon = 1e-15);
        }
        let ones = GridFunction::constant(7, 1, one()).unwrap();
        assert!(mult_derivative(&ones, &[3]).unwrap().values().iter().all(|&z| z == one()));
        let chi = GridFunction::from_fn(7, 1, |x| c.e(x[0])).unwrap();
        let d = mult_derivative(&chi, &[3]).unwrap();
        assert!(d.values().iter().all(|&z| (z - c.e(c.neg(3))).norm() < 1e-12));
    }

    #[test]
    fn box_norm_examples() {
        let c = ctx(3);
        let full = Subspace::full(1, &c).unwrap();
        let ones = GridFunction::constant(3, 1, one()).unwrap();
        assert_abs_diff_eq!(box_norm(&ones, &[full.clone(), full.clone()], &c).unwrap(), 1.0, epsilon = 1e-12);
        let zeros = GridFunction::zeros(3, 1).unwrap();
        assert_eq!(box_norm(&zeros, &[full.clone(), full.clone()], &c).unwrap(), 0.0);
        let delta = GridFunction::indicator_of_points(3, 1, &[vec![0]]).unwrap();
        let b = box_norm(&delta, &[full.clone(), full], &c).unwrap();
        // oracle: only x = h1 = h2 = 0 contributes, so the average is 1/27
        assert_abs_diff_eq!(b, (1.0f64 / 27.0).powf(0.25), epsilon = 1e-12);
        assert_abs_diff_eq!(b, 0.438691, epsilon = 1e-6);
    }

    #[test]
    fn box_norm_v_examples() {
        let c = ctx(7);
        let ones = GridFunction::constant(7, 2, one()).unwrap();
        assert_abs_diff_eq!(box_norm_v(&ones, &[1, 2], &c).unwrap(), 1.0, epsilon = 1e-12);
        // Every double difference of a linear phase is 1, so the norm is 1 even
        // though w . v = 3 + 8 = 4 mod 7; the inverse bound is attained at xi = 4.
        let chi = GridFunction::from_fn(7, 2, |x| c.e(c.add(c.mul(3, x[0]), c.mul(4, x[1])))).unwrap();
        assert_abs_diff_eq!(box_norm_v(&chi, &[1, 2], &c).unwrap(), 1.0, epsilon = 1e-12);
        let energy = directional_spectrum(&chi, &[1, 2], &c).unwrap().energy_by_frequency();
        assert_abs_diff_eq!(energy[4], 1.0, epsilon = 1e-12);
        assert!(energy.iter().enumerate().all(|(xi, &e)| xi == 4 || e < 1e-24));
        assert!(box_norm_v(&GridFunction::zeros(7, 2).unwrap(), &[1, 2], &c).unwrap() == 0.0);
    }

    #[test]
    fn box_norm_routes_agree() {
        let c = ctx(5);
        let mut rng = rng_from_seed(17);
        for v in [[1i64, 0], [1, 2], [3, 1]] {
            let f = GridFunction::random_bounded(5, 2, &mut rng).unwrap();
            let direct = box_norm(
                &f,
                &[Subspace::full(2, &c).unwrap(), Subspace::line(&v, &c).unwrap()],
                &c,
            )
            .unwrap();
            let fast = box_norm_v(&f, &v, &c).unwrap();
            assert_abs_diff_eq!(direct.powi(4), fast.powi(4), epsilon = 1e-12);
            assert!(fast.powi(4) <= inverse_bound(&f, &v, &c).unwrap() + 1e-9);
        }
    }

    #[test]
    fn subspace_reduction() {
        let c = ctx(5);
        let s = Subspace::from_generators(3, &[vec![1, 2, 0], vec![2, 4, 0], vec![0, 0, 3]], &c).unwrap();
        assert_eq!(s.rank(), 2);
        assert_eq!(s.elements(&c).len(), 25);
        let mut e = s.elements(&c);
        e.sort();
        e.dedup();
        assert_eq!(e.len(), 25);
    }
}
