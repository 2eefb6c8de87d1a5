//! Library results against brute-force evaluations written straight from the definitions.

use std::f64::consts::TAU;

use approx::assert_abs_diff_eq;
use ffprog_core::experiments::reference_system;
use ffprog_core::fourier::{box_norm, box_norm_v, directional_fourier, u_norm, Subspace, DEFAULT_ENUMERATION_CAP};
use ffprog_core::grid::rng_from_seed;
use ffprog_core::operators::{avg_g, counting_lambda, dual_f, inner_product, l2_norm_sq, main_term, CountingMode, FrequencyVector, DEFAULT_DUAL_CAP};
use ffprog_core::{ConfigurationSystem, GridFunction, IntPolynomial, PrimeContext, RationalFunction, WeightFunction};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn e(p: u64, t: i64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t.rem_euclid(p as i64) as f64 / p as f64)
}

fn at(f: &GridFunction, x: &[i64]) -> Complex64 {
    let p = f.p() as i64;
    let pt: Vec<u64> = x.iter().map(|&c| c.rem_euclid(p) as u64).collect();
    f.get(&pt)
}

fn all_points(p: u64, dim: usize) -> Vec<Vec<i64>> {
    (0..(p as usize).pow(dim as u32))
        .map(|mut i| {
            (0..dim)
                .map(|_| {
                    let c = (i % p as usize) as i64;
                    i /= p as usize;
                    c
                })
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect()
        })
        .collect()
}

#[test]
fn directional_coefficient_matches_definition() {
    let p = 7;
    let ctx = PrimeContext::new(p).unwrap();
    let f = GridFunction::random_bounded(p, 2, &mut rng_from_seed(11)).unwrap();
    let v = [3i64, 5];
    for x in all_points(p, 2) {
        for xi in 0..p {
            let naive: Complex64 = (0..p as i64)
                .map(|n| at(&f, &[x[0] + n * v[0], x[1] + n * v[1]]) * e(p, -n * xi as i64))
                .sum::<Complex64>()
                / p as f64;
            let xu: Vec<u64> = x.iter().map(|&c| c as u64).collect();
            let got = directional_fourier(&f, &xu, &v, xi, &ctx).unwrap();
            assert_abs_diff_eq!(got.re, naive.re, epsilon = 1e-12);
            assert_abs_diff_eq!(got.im, naive.im, epsilon = 1e-12);
        }
    }
}

#[test]
fn u3_matches_explicit_quadratic_phases() {
    for p in [5u64, 7, 11] {
        let ctx = PrimeContext::new(p).unwrap();
        let theta = WeightFunction::random_phase(p, &mut rng_from_seed(p)).unwrap();
        let mut best = 0.0f64;
        for a in 0..p as i64 {
            for b in 0..p as i64 {
                let s: Complex64 = (0..p as i64).map(|y| theta.at(y as u64) * e(p, -(a * y + b * y * y))).sum();
                best = best.max(s.norm() / p as f64);
            }
        }
        assert_abs_diff_eq!(u_norm(&theta, 3, &ctx, DEFAULT_ENUMERATION_CAP).unwrap(), best, epsilon = 1e-12);
    }
}

#[test]
fn box_norm_matches_eightfold_sum() {
    // ||f||^4 = E_{x, h in F_p^2, n} f(x) conj f(x+h) conj f(x+nv) f(x+h+nv)
    let p = 5;
    let ctx = PrimeContext::new(p).unwrap();
    let f = GridFunction::random_bounded(p, 2, &mut rng_from_seed(3)).unwrap();
    let v = [1i64, 2];
    let pts = all_points(p, 2);
    let mut total = Complex64::new(0.0, 0.0);
    for x in &pts {
        for h in &pts {
            for n in 0..p as i64 {
                let xh = [x[0] + h[0], x[1] + h[1]];
                let xn = [x[0] + n * v[0], x[1] + n * v[1]];
                let xhn = [xh[0] + n * v[0], xh[1] + n * v[1]];
                total += at(&f, x) * at(&f, &xh).conj() * at(&f, &xn).conj() * at(&f, &xhn);
            }
        }
    }
    let fourth = total.re / (p as f64).powi(5);
    assert_abs_diff_eq!(total.im / (p as f64).powi(5), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(box_norm_v(&f, &v, &ctx).unwrap().powi(4), fourth, epsilon = 1e-12);
    let general = box_norm(&f, &[Subspace::full(2, &ctx).unwrap(), Subspace::line(&v, &ctx).unwrap()], &ctx).unwrap();
    assert_abs_diff_eq!(general.powi(4), fourth, epsilon = 1e-12);
}

#[test]
fn dual_function_pairs_with_last_function_to_g_energy() {
    let sys = reference_system(2);
    for p in [5u64, 7] {
        let ctx = PrimeContext::new(p).unwrap();
        let mut rng = rng_from_seed(p + 100);
        let theta = WeightFunction::random_phase(p, &mut rng).unwrap();
        for l in 1..=2 {
            let fs: Vec<GridFunction> = (0..l).map(|_| GridFunction::random_bounded(p, 2, &mut rng).unwrap()).collect();
            let xis = FrequencyVector((l..2).map(|_| rng.gen_range(0..p)).collect());
            let g = avg_g(&theta, &fs, &xis, &sys, &ctx).unwrap();
            let f = dual_f(&theta, &fs, &xis, &sys, &ctx, DEFAULT_DUAL_CAP).unwrap();
            let pairing = inner_product(&f, &fs[l - 1]).unwrap();
            assert_abs_diff_eq!(pairing.re, l2_norm_sq(&g), epsilon = 1e-12);
            assert_abs_diff_eq!(pairing.im, 0.0, epsilon = 1e-12);
        }
    }
}

fn naive_lambda(theta: &WeightFunction, fs: &[GridFunction], sys: &ConfigurationSystem, params: &[(u64, i64)]) -> Complex64 {
    let p = theta.p();
    let dim = sys.dimension();
    let mut total = Complex64::new(0.0, 0.0);
    for x in all_points(p, dim) {
        for &(y, a) in params {
            let mut term = theta.at(y) * at(&fs[0], &x);
            for (i, (poly, v)) in sys.polys().iter().zip(sys.vectors()).enumerate() {
                let c: i64 = poly.coeffs().iter().rev().fold(0i64, |acc, &k| (acc * a + k).rem_euclid(p as i64));
                let pt: Vec<i64> = x.iter().zip(v).map(|(&xj, &vj)| xj + c * vj).collect();
                term *= at(&fs[i + 1], &pt);
            }
            total += term;
        }
    }
    total / ((p as usize).pow(dim as u32) * params.len()) as f64
}

#[test]
fn counting_on_skew_system_matches_naive_sum() {
    let sys = ConfigurationSystem::new(
        2,
        vec![vec![1, 1], vec![2, -1], vec![0, 3]],
        vec![IntPolynomial::new(vec![0, 1]), IntPolynomial::new(vec![0, 0, 1]), IntPolynomial::new(vec![0, 2, 0, 1])],
        None,
    )
    .unwrap();
    let p = 7;
    let ctx = PrimeContext::new(p).unwrap();
    let mut rng = rng_from_seed(5);
    let theta = WeightFunction::random_phase(p, &mut rng).unwrap();
    let fs: Vec<GridFunction> = (0..4).map(|_| GridFunction::random_bounded(p, 2, &mut rng).unwrap()).collect();
    let params: Vec<(u64, i64)> = (0..p).map(|y| (y, y as i64)).collect();
    let want = naive_lambda(&theta, &fs, &sys, &params);
    let got = counting_lambda(&theta, &fs, &sys, &ctx, CountingMode::Polynomial).unwrap();
    assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-12);

    // phi(y) = (y + 1) / (y - 2): poles at y = 2
    let phi = RationalFunction::new(IntPolynomial::new(vec![1, 1]), IntPolynomial::new(vec![-2, 1])).unwrap();
    let rsys = sys.with_phi(Some(phi));
    let params: Vec<(u64, i64)> = (0..p)
        .filter(|&y| y != 2)
        .map(|y| {
            let inv = (1..p).find(|&t| t * ((y + p - 2) % p) % p == 1).unwrap();
            (y, ((y + 1) * inv % p) as i64)
        })
        .collect();
    let want = naive_lambda(&theta, &fs, &rsys, &params);
    let got = counting_lambda(&theta, &fs, &rsys, &ctx, CountingMode::ExcludePoles).unwrap();
    assert_abs_diff_eq!((got - want).norm(), 0.0, epsilon = 1e-12);
}

#[test]
fn main_term_matches_density_product_for_sets() {
    let p = 11;
    let ctx = PrimeContext::new(p).unwrap();
    let sys = reference_system(2);
    let theta = WeightFunction::constant(p, Complex64::new(1.0, 0.0)).unwrap();
    // f_1 depends on the first coordinate only; averaging along (1, 0) flattens it
    let f0 = GridFunction::constant(p, 2, Complex64::new(0.5, 0.0)).unwrap();
    let f1 = GridFunction::from_fn(p, 2, |x| Complex64::new(f64::from(x[0] < 4), 0.0)).unwrap();
    let f2 = GridFunction::from_fn(p, 2, |x| Complex64::new(f64::from(x[1] % 2 == 0), 0.0)).unwrap();
    let m = main_term(&theta, &[f0, f1, f2], &sys, &ctx, CountingMode::Polynomial).unwrap();
    assert_abs_diff_eq!(m.re, 0.5 * (4.0 / 11.0) * (6.0 / 11.0), epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lambda_is_bounded_and_conjugation_symmetric(seed in any::<u64>(), pi in 0usize..4) {
        let p = [5u64, 7, 11, 13][pi];
        let ctx = PrimeContext::new(p).unwrap();
        let sys = reference_system(1);
        let mut rng = rng_from_seed(seed);
        let theta = WeightFunction::random_phase(p, &mut rng).unwrap();
        let fs: Vec<GridFunction> = (0..3).map(|_| GridFunction::random_bounded(p, 1, &mut rng).unwrap()).collect();
        let lam = counting_lambda(&theta, &fs, &sys, &ctx, CountingMode::Polynomial).unwrap();
        prop_assert!(lam.norm() <= 1.0 + 1e-12);
        let conj_theta = WeightFunction::new(p, theta.values().iter().map(|z| z.conj()).collect()).unwrap();
        let conj_fs: Vec<GridFunction> = fs.iter().map(GridFunction::conj).collect();
        let lam_c = counting_lambda(&conj_theta, &conj_fs, &sys, &ctx, CountingMode::Polynomial).unwrap();
        prop_assert!((lam_c - lam.conj()).norm() < 1e-12);
    }

    #[test]
    fn u_norms_of_characters_are_one(a in 0u64..50, pi in 0usize..3) {
        let p = [11u64, 13, 17][pi];
        let ctx = PrimeContext::new(p).unwrap();
        let theta = WeightFunction::new(p, (0..p).map(|y| e(p, (a * y) as i64)).collect()).unwrap();
        for s in 2..=3 {
            prop_assert!((u_norm(&theta, s, &ctx, DEFAULT_ENUMERATION_CAP).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
