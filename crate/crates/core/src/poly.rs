//! Centered monic polynomials and general dense complex polynomials.
//!
//! A [`CentPoly`] of degree `n` is `z^n + c_{n-2} z^{n-2} + ... + c_1 z + c_0`.
//! Only the `n - 1` free coefficients are stored, so the leading coefficient
//! and the vanishing `z^{n-1}` term cannot be broken.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_DEGREE_CAP: usize = 20_000;

static DEGREE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DEGREE_CAP);

/// Current cap on the degree of expanded iterates `p^{∘m}(z) - z`.
pub fn degree_cap() -> usize {
    DEGREE_CAP.load(Ordering::Relaxed)
}

/// Override the process-wide degree cap (the CLI wires `MULTMAP_DEGREE_CAP` here).
pub fn set_degree_cap(cap: usize) {
    DEGREE_CAP.store(cap, Ordering::Relaxed);
}

/// `n^m`, or `DegreeCapExceeded` when it is above `cap`.
pub fn check_iterate_degree(n: usize, m: usize, cap: usize) -> Result<usize> {
    let degree = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if degree > cap as u128 {
        return Err(Error::DegreeCapExceeded { degree, cap });
    }
    Ok(degree as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentPoly {
    coeffs: Vec<Complex64>,
}

impl CentPoly {
    /// Build from the free coefficients `c_0, ..., c_{n-2}`; the degree is `coeffs.len() + 1`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "a centered polynomial needs degree >= 2 (at least one free coefficient)".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        Ok(Self { coeffs })
    }

    /// Degree-`n` polynomial with each free coefficient drawn uniformly from the
    /// disk of the given radius.
    pub fn random_in_disk<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("degree {n} < 2")));
        }
        let coeffs = (0..n - 1).map(|_| random_in_disk(radius, rng)).collect();
        Ok(Self { coeffs })
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("degree {n} < 2")));
        }
        Ok(Self { coeffs: vec![Complex64::new(0.0, 0.0); n - 1] })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Copy with `c_k` shifted by `delta`.
    pub fn shifted(&self, k: usize, delta: Complex64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[k] += delta;
        Self { coeffs }
    }

    /// Copy with every coefficient shifted by the matching entry of `delta`.
    pub fn offset(&self, delta: &[Complex64]) -> Self {
        let coeffs = self.coeffs.iter().zip(delta).map(|(c, d)| c + d).collect();
        Self { coeffs }
    }

    /// Max-norm distance between coefficient vectors of equal degree.
    pub fn coeff_distance(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        // leading 1, then the absent z^{n-1} term
        let mut acc = z;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// `(p(z), p'(z), p''(z))` in one Horner pass.
    pub fn eval_derivs(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        let mut p = z;
        let mut dp = one;
        let mut ddp = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            ddp = ddp * z + 2.0 * dp;
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp, ddp)
    }

    pub fn eval_deriv(&self, z: Complex64) -> Complex64 {
        let (_, dp, _) = self.eval_derivs(z);
        dp
    }

    pub fn to_dense(&self) -> DensePoly {
        let mut coeffs = self.coeffs.clone();
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.push(Complex64::new(1.0, 0.0));
        DensePoly::new(coeffs)
    }

    pub fn derivative(&self) -> DensePoly {
        self.to_dense().derivative()
    }

    /// `[z, p(z), ..., p^{∘m}(z)]`, or the escape step if an iterate overflows.
    pub fn iterate(&self, z: Complex64, m: usize) -> Itinerary {
        let mut points = Vec::with_capacity(m + 1);
        points.push(z);
        let mut w = z;
        for step in 1..=m {
            w = self.eval(w);
            if !w.re.is_finite() || !w.im.is_finite() {
                return Itinerary::Escaped { step, prefix: points };
            }
            points.push(w);
        }
        Itinerary::Orbit(points)
    }

    /// `p^{∘m}(z)` and its derivative in `z`, or `Escaped`.
    pub fn iterate_with_derivative(&self, z: Complex64, m: usize) -> Result<(Complex64, Complex64)> {
        let mut w = z;
        let mut d = Complex64::new(1.0, 0.0);
        for step in 1..=m {
            let (pw, dpw, _) = self.eval_derivs(w);
            d *= dpw;
            w = pw;
            if !w.is_finite() || !d.is_finite() {
                return Err(Error::Escaped { step });
            }
        }
        Ok((w, d))
    }

    /// Expanded `p^{∘m}(z) - z` under the process-wide degree cap.
    pub fn compose_self_minus_id(&self, m: usize) -> Result<DensePoly> {
        self.compose_self_minus_id_capped(m, degree_cap())
    }

    pub fn compose_self_minus_id_capped(&self, m: usize, cap: usize) -> Result<DensePoly> {
        if m == 0 {
            return Err(Error::InvalidInput("period must be >= 1".into()));
        }
        check_iterate_degree(self.degree(), m, cap)?;
        let base = self.to_dense();
        let mut iterate = base.clone();
        for _ in 1..m {
            iterate = base.compose(&iterate);
        }
        Ok(iterate.sub(&DensePoly::identity()))
    }
}

/// Uniform sample from the disk `|z| < radius`.
pub fn random_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    Complex64::from_polar(r, theta)
}

/// Result of [`CentPoly::iterate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Itinerary {
    Orbit(Vec<Complex64>),
    Escaped { step: usize, prefix: Vec<Complex64> },
}

impl Itinerary {
    pub fn points(&self) -> Option<&[Complex64]> {
        match self {
            Itinerary::Orbit(points) => Some(points),
            Itinerary::Escaped { .. } => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CentPolyRepr {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl Serialize for CentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CentPolyRepr { degree: self.degree(), coeffs: self.coeffs.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CentPolyRepr::deserialize(deserializer)?;
        if repr.degree < 2 || repr.coeffs.len() + 1 != repr.degree {
            return Err(serde::de::Error::custom(format!(
                "degree {} needs exactly {} coefficients, got {}",
                repr.degree,
                repr.degree.saturating_sub(1),
                repr.coeffs.len()
            )));
        }
        CentPoly::new(repr.coeffs).map_err(serde::de::Error::custom)
    }
}

/// Dense polynomial, coefficients in ascending degree. Trailing zeros are
/// trimmed so the leading coefficient is nonzero unless the polynomial is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DensePoly {
    coeffs: Vec<Complex64>,
}

impl DensePoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `(q(z), q'(z))`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut q = Complex64::new(0.0, 0.0);
        let mut dq = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dq = dq * z + q;
            q = q * z + c;
        }
        (q, dq)
    }

    /// `sum |a_k| |z|^k`, the scale for relative residuals.
    pub fn eval_abs(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> DensePoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        DensePoly::new(coeffs)
    }

    pub fn add(&self, other: &DensePoly) -> DensePoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or_default()
                    + other.coeffs.get(k).copied().unwrap_or_default()
            })
            .collect();
        DensePoly::new(coeffs)
    }

    pub fn sub(&self, other: &DensePoly) -> DensePoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or_default()
                    - other.coeffs.get(k).copied().unwrap_or_default()
            })
            .collect();
        DensePoly::new(coeffs)
    }

    pub fn mul(&self, other: &DensePoly) -> DensePoly {
        if self.is_zero() || other.is_zero() {
            return DensePoly::zero();
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        DensePoly::new(coeffs)
    }

    /// `self(inner(z))` by Horner's rule over polynomials.
    pub fn compose(&self, inner: &DensePoly) -> DensePoly {
        let mut acc = DensePoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&DensePoly::constant(*c));
        }
        acc
    }
}
