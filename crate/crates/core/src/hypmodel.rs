//! Degree-2 Blaschke model maps of the unit disk and the attracting-cycle audit.
//!
//! `μ_a(z) = (1 - ā)/(1 - a) · (z² - a z)/(1 - ā z)` fixes 0 with multiplier
//! `(|a|² - a)/(1 - a)`, whose modulus is `|a|`; the map `a ↦ μ_a'(0)` is a
//! bijection of the disk onto itself.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbits::orbits_of_exact_period;
use crate::poly::CentPoly;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct BlaschkeParam(Complex64);

impl BlaschkeParam {
    pub fn new(a: Complex64) -> Result<Self> {
        if !(a.norm() < 1.0) {
            return Err(Error::OutsideDisk { value: a });
        }
        Ok(Self(a))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl TryFrom<Complex64> for BlaschkeParam {
    type Error = Error;

    fn try_from(a: Complex64) -> Result<Self> {
        Self::new(a)
    }
}

impl From<BlaschkeParam> for Complex64 {
    fn from(a: BlaschkeParam) -> Self {
        a.0
    }
}

pub fn mu_eval(a: BlaschkeParam, z: Complex64) -> Result<Complex64> {
    let a = a.0;
    let one = Complex64::new(1.0, 0.0);
    let denom = one - a.conj() * z;
    if denom.norm() < 1e-14 {
        return Err(Error::PoleProximity { z });
    }
    Ok((one - a.conj()) / (one - a) * (z * z - a * z) / denom)
}

/// `μ_a'(0) = (|a|² - a)/(1 - a)`.
pub fn mu_multiplier(a: BlaschkeParam) -> Complex64 {
    let a = a.0;
    (a.norm_sqr() - a) / (1.0 - a)
}

/// Inverse of [`mu_multiplier`]: `a = (|λ|² - λ)/(1 - λ)`.
pub fn mu_param_from_multiplier(lambda: Complex64) -> Result<BlaschkeParam> {
    if !(lambda.norm() < 1.0) {
        return Err(Error::OutsideDisk { value: lambda });
    }
    BlaschkeParam::new((lambda.norm_sqr() - lambda) / (1.0 - lambda))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractingOrbit {
    pub period: usize,
    pub multiplier: Complex64,
    #[serde(skip)]
    pub points: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub attracting: Vec<AttractingOrbit>,
    pub bound_ok: bool,
}

impl AuditReport {
    /// Periods of the attracting orbits, sorted.
    pub fn periods(&self) -> Vec<usize> {
        let mut periods: Vec<usize> = self.attracting.iter().map(|o| o.period).collect();
        periods.sort_unstable();
        periods
    }
}

/// Every attracting orbit of exact period at most `max_period`, found by full
/// enumeration, and whether their number respects the bound `n - 1`.
pub fn attracting_audit(p: &CentPoly, max_period: usize) -> Result<AuditReport> {
    if max_period == 0 {
        return Err(Error::InvalidInput("max_period must be >= 1".into()));
    }
    let mut attracting = Vec::new();
    for m in 1..=max_period {
        for orbit in orbits_of_exact_period(p, m)? {
            if orbit.multiplier.norm() < 1.0 {
                attracting.push(AttractingOrbit {
                    period: m,
                    multiplier: orbit.multiplier,
                    points: orbit.points,
                });
            }
        }
    }
    let bound_ok = attracting.len() < p.degree();
    Ok(AuditReport { attracting, bound_ok })
}
