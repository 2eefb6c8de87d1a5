//! Prime-field arithmetic, integer polynomials and rational functions reduced
//! mod p, configuration systems and their admissibility at a given prime.

use std::f64::consts::TAU;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted; keeps every product of two residues inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes in `lo..=hi`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// A prime modulus together with its table of additive characters
/// `x -> exp(2 pi i x / p)`.
#[derive(Debug, Clone)]
pub struct PrimeContext {
    p: u64,
    chars: Vec<Complex64>,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if p >= MAX_MODULUS {
            return Err(Error::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let chars = (0..p)
            .map(|x| {
                if x == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    let (s, c) = (TAU * x as f64 / p as f64).sin_cos();
                    Complex64::new(c, s)
                }
            })
            .collect();
        Ok(Self { p, chars })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// `e_p(x)` for a reduced residue.
    #[inline]
    pub fn e(&self, x: u64) -> Complex64 {
        self.chars[(x % self.p) as usize]
    }

    pub fn char_table(&self) -> &[Complex64] {
        &self.chars
    }

    #[inline]
    pub fn reduce(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        (a != 0).then(|| self.pow(a, self.p - 2))
    }

    /// Reduce an integer vector coordinate-wise.
    pub fn reduce_vec(&self, v: &[i64]) -> Vec<u64> {
        v.iter().map(|&c| self.reduce(c)).collect()
    }
}

/// Integer polynomial with ascending-degree coefficients, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `c * y^n`
    pub fn monomial(c: i64, n: usize) -> Self {
        let mut coeffs = vec![0; n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn constant_term(&self) -> i64 {
        self.coeffs.first().copied().unwrap_or(0)
    }

    pub fn leading_coeff(&self) -> i64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_zero_mod(&self, p: u64) -> bool {
        self.coeffs.iter().all(|&c| c.rem_euclid(p as i64) == 0)
    }

    /// Horner evaluation at a field element.
    pub fn eval_mod(&self, y: u64, ctx: &PrimeContext) -> u64 {
        let y = y % ctx.p();
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| ctx.add(ctx.mul(acc, y), ctx.reduce(c)))
    }

    /// Values at every field element, indexed by `y`.
    pub fn value_table(&self, ctx: &PrimeContext) -> Vec<u64> {
        (0..ctx.p()).map(|y| self.eval_mod(y, ctx)).collect()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            } else if c < 0 {
                write!(f, "-")?;
            }
            let a = c.unsigned_abs();
            match (n, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "y")?,
                (1, _) => write!(f, "{a}y")?,
                (_, 1) => write!(f, "y^{n}")?,
                _ => write!(f, "{a}y^{n}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Value of a rational function at a point: either a residue or a pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RationalValue {
    Value(u64),
    Pole,
}

impl RationalValue {
    pub fn value(self) -> Option<u64> {
        match self {
            RationalValue::Value(v) => Some(v),
            RationalValue::Pole => None,
        }
    }
}

/// A quotient of integer polynomials with nonzero denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    numerator: IntPolynomial,
    denominator: IntPolynomial,
}

impl RationalFunction {
    pub fn new(numerator: IntPolynomial, denominator: IntPolynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    /// Build from rational coefficients `(num, den)` by clearing all
    /// denominators with their least common multiple.
    pub fn from_ratios(numerator: &[(i64, i64)], denominator: &[(i64, i64)]) -> Result<Self> {
        let mut lcm: i64 = 1;
        for &(_, d) in numerator.iter().chain(denominator) {
            if d == 0 {
                return Err(Error::InvalidArgument("zero coefficient denominator".into()));
            }
            lcm = lcm_i64(lcm, d.abs())?;
        }
        let clear = |cs: &[(i64, i64)]| -> Result<Vec<i64>> {
            cs.iter()
                .map(|&(n, d)| {
                    n.checked_mul(lcm / d)
                        .ok_or_else(|| Error::InvalidArgument("coefficient overflow".into()))
                })
                .collect()
        };
        Self::new(
            IntPolynomial::new(clear(numerator)?),
            IntPolynomial::new(clear(denominator)?),
        )
    }

    /// `1 / y`
    pub fn reciprocal() -> Self {
        Self {
            numerator: IntPolynomial::new(vec![1]),
            denominator: IntPolynomial::new(vec![0, 1]),
        }
    }

    pub fn numerator(&self) -> &IntPolynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &IntPolynomial {
        &self.denominator
    }

    pub fn eval_mod(&self, y: u64, ctx: &PrimeContext) -> Result<RationalValue> {
        if self.denominator.is_zero_mod(ctx.p()) {
            return Err(Error::DegenerateDenominator(ctx.p()));
        }
        let den = self.denominator.eval_mod(y, ctx);
        Ok(match ctx.inv(den) {
            Some(inv) => RationalValue::Value(ctx.mul(self.numerator.eval_mod(y, ctx), inv)),
            None => RationalValue::Pole,
        })
    }

    /// Values at every field element; `None` marks a pole.
    pub fn value_table(&self, ctx: &PrimeContext) -> Result<Vec<Option<u64>>> {
        (0..ctx.p())
            .map(|y| self.eval_mod(y, ctx).map(RationalValue::value))
            .collect()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}

fn lcm_i64(a: i64, b: i64) -> Result<i64> {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (a / gcd(a, b))
        .checked_mul(b)
        .ok_or_else(|| Error::InvalidArgument("coefficient denominators overflow".into()))
}

/// Exact rank test over the rationals: true iff the coefficient matrix of
/// `polys` has full row rank.
pub fn linear_independence(polys: &[IntPolynomial]) -> bool {
    let width = polys.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    let mut rows: Vec<Vec<BigRational>> = polys
        .iter()
        .map(|p| {
            (0..width)
                .map(|j| {
                    BigRational::from_integer(BigInt::from(p.coeffs().get(j).copied().unwrap_or(0)))
                })
                .collect()
        })
        .collect();

    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let lead = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &lead;
            for c in col..width {
                let delta = &factor * &rows[rank][c];
                rows[r][c] -= delta;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank == polys.len()
}

/// A polynomial coefficient as it appears in a config file: an integer or a
/// `"num/den"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Ratio(String),
}

impl Coefficient {
    fn as_ratio(&self) -> Result<(i64, i64)> {
        match self {
            Coefficient::Int(n) => Ok((*n, 1)),
            Coefficient::Ratio(s) => {
                let bad = || Error::InvalidArgument(format!("bad coefficient {s:?}"));
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (s.trim(), "1"),
                };
                let n: i64 = n.parse().map_err(|_| bad())?;
                let d: i64 = d.parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok((n, d))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalDescriptor {
    pub num: Vec<Coefficient>,
    pub den: Vec<Coefficient>,
}

impl RationalDescriptor {
    pub fn build(&self) -> Result<RationalFunction> {
        let num = self.num.iter().map(Coefficient::as_ratio).collect::<Result<Vec<_>>>()?;
        let den = self.den.iter().map(Coefficient::as_ratio).collect::<Result<Vec<_>>>()?;
        RationalFunction::from_ratios(&num, &den)
    }
}

/// On-disk form of a configuration system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDescriptor {
    #[serde(rename = "D")]
    pub dimension: usize,
    pub vectors: Vec<Vec<i64>>,
    pub polys: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<RationalDescriptor>,
}

impl SystemDescriptor {
    pub fn build(&self) -> Result<ConfigurationSystem> {
        let phi = self.phi.as_ref().map(RationalDescriptor::build).transpose()?;
        ConfigurationSystem::new(
            self.dimension,
            self.vectors.clone(),
            self.polys.iter().cloned().map(IntPolynomial::new).collect(),
            phi,
        )
    }
}

/// The data of a progression: directions `v_i`, polynomials `P_i`, and an
/// optional rational reparametrisation `phi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigurationSystem {
    dimension: usize,
    vectors: Vec<Vec<i64>>,
    polys: Vec<IntPolynomial>,
    phi: Option<RationalFunction>,
    max_degree: usize,
}

impl ConfigurationSystem {
    pub fn new(
        dimension: usize,
        vectors: Vec<Vec<i64>>,
        polys: Vec<IntPolynomial>,
        phi: Option<RationalFunction>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidSystem("dimension must be positive".into()));
        }
        if polys.is_empty() {
            return Err(Error::InvalidSystem("need at least one polynomial".into()));
        }
        if vectors.len() != polys.len() {
            return Err(Error::ArityMismatch {
                what: "vectors",
                expected: polys.len(),
                got: vectors.len(),
            });
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dimension {
                return Err(Error::InvalidSystem(format!(
                    "vector {index} has length {}, expected {dimension}",
                    v.len()
                )));
            }
            if v.iter().all(|&c| c == 0) {
                return Err(Error::ZeroVector { index });
            }
        }
        for (index, p) in polys.iter().enumerate() {
            if p.constant_term() != 0 {
                return Err(Error::NonzeroConstantTerm { index });
            }
        }
        if !linear_independence(&polys) {
            return Err(Error::NonIndependentPolys);
        }
        let max_degree = polys.iter().filter_map(IntPolynomial::degree).max().unwrap_or(0);
        if max_degree == 0 {
            return Err(Error::InvalidSystem("maximum degree must be at least 1".into()));
        }
        Ok(Self {
            dimension,
            vectors,
            polys,
            phi,
            max_degree,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of polynomials `k`.
    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    pub fn polys(&self) -> &[IntPolynomial] {
        &self.polys
    }

    pub fn phi(&self) -> Option<&RationalFunction> {
        self.phi.as_ref()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn with_phi(mut self, phi: Option<RationalFunction>) -> Self {
        self.phi = phi;
        self
    }

    pub fn descriptor(&self) -> SystemDescriptor {
        let ints = |p: &IntPolynomial| p.coeffs().iter().map(|&c| Coefficient::Int(c)).collect();
        SystemDescriptor {
            dimension: self.dimension,
            vectors: self.vectors.clone(),
            polys: self.polys.iter().map(|p| p.coeffs().to_vec()).collect(),
            phi: self.phi.as_ref().map(|phi| RationalDescriptor {
                num: ints(phi.numerator()),
                den: ints(phi.denominator()),
            }),
        }
    }

    pub fn check_admissible(&self, ctx: &PrimeContext) -> AdmissibilityReport {
        let p = ctx.p();
        let mut reasons = Vec::new();
        for (index, v) in self.vectors.iter().enumerate() {
            if v.iter().all(|&c| c.rem_euclid(p as i64) == 0) {
                reasons.push(AdmissibilityFailure::VectorVanishes { index });
            }
        }
        if p as usize <= self.max_degree {
            reasons.push(AdmissibilityFailure::PrimeTooSmall {
                p,
                degree: self.max_degree,
            });
        }
        for (index, poly) in self.polys.iter().enumerate() {
            if poly.leading_coeff().rem_euclid(p as i64) == 0 {
                reasons.push(AdmissibilityFailure::LeadingCoefficientDivisible {
                    part: LeadingPart::Poly(index),
                });
            }
        }
        if let Some(phi) = &self.phi {
            if phi.denominator().is_zero_mod(p) {
                reasons.push(AdmissibilityFailure::DenominatorVanishes);
            }
            if phi.numerator().is_zero_mod(p) {
                reasons.push(AdmissibilityFailure::NumeratorVanishes);
            }
            if !phi.numerator().is_zero() && phi.numerator().leading_coeff().rem_euclid(p as i64) == 0
            {
                reasons.push(AdmissibilityFailure::LeadingCoefficientDivisible {
                    part: LeadingPart::Numerator,
                });
            }
            if phi.denominator().leading_coeff().rem_euclid(p as i64) == 0 {
                reasons.push(AdmissibilityFailure::LeadingCoefficientDivisible {
                    part: LeadingPart::Denominator,
                });
            }
        }
        AdmissibilityReport {
            admissible: reasons.is_empty(),
            reasons,
        }
    }

    pub fn require_admissible(&self, ctx: &PrimeContext) -> Result<()> {
        let report = self.check_admissible(ctx);
        if report.admissible {
            Ok(())
        } else {
            Err(Error::Inadmissible { p: ctx.p(), report })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LeadingPart {
    Poly(usize),
    Numerator,
    Denominator,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum AdmissibilityFailure {
    VectorVanishes { index: usize },
    DenominatorVanishes,
    NumeratorVanishes,
    LeadingCoefficientDivisible { part: LeadingPart },
    PrimeTooSmall { p: u64, degree: usize },
}

impl fmt::Display for AdmissibilityFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::VectorVanishes { index } => write!(f, "vector {index} vanishes mod p"),
            Self::DenominatorVanishes => write!(f, "denominator identically zero mod p"),
            Self::NumeratorVanishes => write!(f, "numerator identically zero mod p"),
            Self::LeadingCoefficientDivisible { part } => match part {
                LeadingPart::Poly(i) => write!(f, "p divides leading coefficient of polynomial {i}"),
                LeadingPart::Numerator => write!(f, "p divides leading coefficient of numerator"),
                LeadingPart::Denominator => {
                    write!(f, "p divides leading coefficient of denominator")
                }
            },
            Self::PrimeTooSmall { p, degree } => {
                write!(f, "p = {p} does not exceed the degree bound {degree}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub reasons: Vec<AdmissibilityFailure>,
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.admissible {
            return write!(f, "admissible");
        }
        let reasons: Vec<String> = self.reasons.iter().map(ToString::to_string).collect();
        write!(f, "{}", reasons.join("; "))
    }
}

/// Index of the first coordinate of `v` that is nonzero mod p.
pub fn pivot_index(v: &[u64]) -> Option<usize> {
    v.iter().position(|&c| c != 0)
}

/// Split `x` as `rep + t * v` with `rep` zero in the pivot coordinate of `v`.
///
/// The pivot-coordinate hyperplane is used as the complement of `<v>`; an
/// orthogonal complement fails whenever `v . v = 0 mod p`.
pub fn span_decompose(v: &[i64], x: &[u64], ctx: &PrimeContext) -> Result<(Vec<u64>, u64)> {
    if v.len() != x.len() {
        return Err(Error::InvalidArgument(format!(
            "vector has length {}, point has length {}",
            v.len(),
            x.len()
        )));
    }
    let v = ctx.reduce_vec(v);
    let pivot = pivot_index(&v).ok_or(Error::ZeroDirection)?;
    let inv = ctx.inv(v[pivot]).expect("pivot is nonzero");
    let t = ctx.mul(x[pivot] % ctx.p(), inv);
    let rep = x
        .iter()
        .zip(&v)
        .map(|(&xi, &vi)| ctx.sub(xi % ctx.p(), ctx.mul(t, vi)))
        .collect();
    Ok((rep, t))
}
