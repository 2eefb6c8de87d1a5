//! Dense complex-valued functions on `F_p^D` and on `F_p`, stored row-major,
//! plus the deterministic reduction and seeding helpers shared by every kernel.

use std::ops::Add;

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Slack allowed on the sup norm of a "1-bounded" array.
pub const BOUND_SLACK: f64 = 1e-12;

const PAIRWISE_THRESHOLD: usize = 1024;

/// Fixed-order sum: sequential below 1024 elements, balanced binary tree above.
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Zero + Add<Output = T>,
{
    if values.len() < PAIRWISE_THRESHOLD {
        values.iter().fold(T::zero(), |acc, &v| acc + v)
    } else {
        let (lo, hi) = values.split_at(values.len() / 2);
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

pub fn pairwise_mean(values: &[Complex64]) -> Complex64 {
    pairwise_sum(values) / values.len() as f64
}

pub fn pairwise_mean_real(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// splitmix64 finaliser; used to derive independent sub-seeds from a tuple.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed for `(seed, parts...)`; independent of scheduling order.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix64(seed), |acc, &x| mix64(acc ^ mix64(x)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_phase(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

fn sup_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A function `F_p^D -> C` stored densely; the point `(x_0, .., x_{D-1})`
/// lives at index `sum_j x_j p^(D-1-j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    p: u64,
    dim: usize,
    values: Vec<Complex64>,
    bounded: bool,
}

impl GridFunction {
    pub fn new(p: u64, dim: usize, values: Vec<Complex64>) -> Result<Self> {
        let len = grid_len(p, dim)?;
        if values.len() != len {
            return Err(Error::InvalidArgument(format!(
                "grid over F_{p}^{dim} needs {len} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("grid values must be finite".into()));
        }
        let bounded = sup_norm(&values) <= 1.0 + BOUND_SLACK;
        Ok(Self {
            p,
            dim,
            values,
            bounded,
        })
    }

    pub fn from_fn(p: u64, dim: usize, mut f: impl FnMut(&[u64]) -> Complex64) -> Result<Self> {
        let len = grid_len(p, dim)?;
        let mut coords = vec![0u64; dim];
        let values = (0..len)
            .map(|idx| {
                decode_index(p, idx, &mut coords);
                f(&coords)
            })
            .collect();
        Self::new(p, dim, values)
    }

    pub fn constant(p: u64, dim: usize, c: Complex64) -> Result<Self> {
        Self::new(p, dim, vec![c; grid_len(p, dim)?])
    }

    pub fn zeros(p: u64, dim: usize) -> Result<Self> {
        Self::constant(p, dim, Complex64::zero())
    }

    /// Indicator of a set of grid indices.
    pub fn indicator_of_indices(p: u64, dim: usize, indices: &[usize]) -> Result<Self> {
        let len = grid_len(p, dim)?;
        let mut values = vec![Complex64::zero(); len];
        for &i in indices {
            if i >= len {
                return Err(Error::InvalidArgument(format!(
                    "index {i} out of range for a grid of {len} points"
                )));
            }
            values[i] = Complex64::new(1.0, 0.0);
        }
        Self::new(p, dim, values)
    }

    /// Indicator of a set of points given by (possibly unreduced) coordinates.
    pub fn indicator_of_points(p: u64, dim: usize, points: &[Vec<i64>]) -> Result<Self> {
        let indices = points
            .iter()
            .map(|pt| {
                if pt.len() != dim {
                    return Err(Error::InvalidArgument(format!(
                        "point {pt:?} does not have {dim} coordinates"
                    )));
                }
                let reduced: Vec<u64> = pt.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
                Ok(encode_index(p, &reduced))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::indicator_of_indices(p, dim, &indices)
    }

    /// Unit-modulus values with independent uniform phases.
    pub fn random_phase(p: u64, dim: usize, rng: &mut impl Rng) -> Result<Self> {
        let len = grid_len(p, dim)?;
        Self::new(p, dim, (0..len).map(|_| unit_phase(rng)).collect())
    }

    /// Values uniform in the closed unit disc, so not every entry has modulus one.
    pub fn random_bounded(p: u64, dim: usize, rng: &mut impl Rng) -> Result<Self> {
        let len = grid_len(p, dim)?;
        let values = (0..len)
            .map(|_| {
                let r = rng.gen::<f64>().sqrt();
                Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        Self::new(p, dim, values)
    }

    /// Indicator of a random set containing each point independently with probability `density`.
    pub fn bernoulli(p: u64, dim: usize, density: f64, rng: &mut impl Rng) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::InvalidArgument(format!("density {density} not in [0, 1]")));
        }
        let len = grid_len(p, dim)?;
        let values = (0..len)
            .map(|_| {
                if rng.gen_bool(density) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::zero()
                }
            })
            .collect();
        Self::new(p, dim, values)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }

    pub fn mean(&self) -> Complex64 {
        pairwise_mean(&self.values)
    }

    /// `(E_x |f(x)|^2)^(1/2)`
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        pairwise_mean_real(&sq).sqrt()
    }

    pub fn index(&self, point: &[u64]) -> usize {
        encode_index(self.p, point)
    }

    pub fn point(&self, index: usize) -> Vec<u64> {
        let mut coords = vec![0; self.dim];
        decode_index(self.p, index, &mut coords);
        coords
    }

    pub fn get(&self, point: &[u64]) -> Complex64 {
        self.values[self.index(point)]
    }

    pub fn at(&self, index: usize) -> Complex64 {
        self.values[index]
    }

    /// Index of `x + s` given the coordinates of both (each already reduced).
    #[inline]
    pub fn index_of_sum(&self, x: &[u64], s: &[u64]) -> usize {
        let p = self.p;
        x.iter()
            .zip(s)
            .fold(0usize, |acc, (&a, &b)| acc * p as usize + ((a + b) % p) as usize)
    }

    /// `x -> f(x + a)`
    pub fn translate(&self, a: &[u64]) -> Self {
        let mut coords = vec![0; self.dim];
        let values = (0..self.len())
            .map(|idx| {
                decode_index(self.p, idx, &mut coords);
                self.values[self.index_of_sum(&coords, a)]
            })
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(Complex64::conj).collect(),
            ..self.clone()
        }
    }

    /// `alpha * self + beta * other`
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        self.check_same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| alpha * a + beta * b)
            .collect();
        Self::new(self.p, self.dim, values)
    }

    pub fn check_shape(&self, p: u64, dim: usize) -> Result<()> {
        if self.p != p || self.dim != dim {
            return Err(Error::ShapeMismatch {
                p,
                dim,
                got_p: self.p,
                got_dim: self.dim,
            });
        }
        Ok(())
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        other.check_shape(self.p, self.dim)
    }
}

pub fn grid_len(p: u64, dim: usize) -> Result<usize> {
    u32::try_from(dim)
        .ok()
        .and_then(|d| (p as usize).checked_pow(d))
        .filter(|&n| n <= 1 << 28)
        .ok_or_else(|| Error::InvalidArgument(format!("grid F_{p}^{dim} is too large")))
}

pub fn encode_index(p: u64, point: &[u64]) -> usize {
    point
        .iter()
        .fold(0usize, |acc, &c| acc * p as usize + (c % p) as usize)
}

pub fn decode_index(p: u64, mut index: usize, out: &mut [u64]) {
    for slot in out.iter_mut().rev() {
        *slot = (index % p as usize) as u64;
        index /= p as usize;
    }
}

/// A function `F_p -> C`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    p: u64,
    values: Vec<Complex64>,
    bounded: bool,
}

impl WeightFunction {
    pub fn new(p: u64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() as u64 != p {
            return Err(Error::InvalidArgument(format!(
                "weight over F_{p} needs {p} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("weight values must be finite".into()));
        }
        let bounded = sup_norm(&values) <= 1.0 + BOUND_SLACK;
        Ok(Self { p, values, bounded })
    }

    pub fn constant(p: u64, c: Complex64) -> Result<Self> {
        Self::new(p, vec![c; p as usize])
    }

    pub fn random_phase(p: u64, rng: &mut impl Rng) -> Result<Self> {
        Self::new(p, (0..p).map(|_| unit_phase(rng)).collect())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, y: u64) -> Complex64 {
        self.values[y as usize]
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }

    pub fn mean(&self) -> Complex64 {
        pairwise_mean(&self.values)
    }

    /// `theta - E theta`
    pub fn centered(&self) -> Self {
        let m = self.mean();
        let values: Vec<Complex64> = self.values.iter().map(|&z| z - m).collect();
        let bounded = sup_norm(&values) <= 1.0 + BOUND_SLACK;
        Self {
            p: self.p,
            values,
            bounded,
        }
    }

    pub fn check_modulus(&self, p: u64) -> Result<()> {
        if self.p != p {
            return Err(Error::ShapeMismatch {
                p,
                dim: 1,
                got_p: self.p,
                got_dim: 1,
            });
        }
        Ok(())
    }
}
