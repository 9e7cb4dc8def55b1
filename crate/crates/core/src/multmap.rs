//! The multiplier map on configurations and its Jacobian in the free coefficients.
//!
//! For a marked point `z_j` of period `m_j` the multiplier is
//! `λ_j = prod_i p'(w_i)` along the orbit `w_0 = z_j, w_{i+1} = p(w_i)`.
//! Differentiating in a coefficient `c_k` goes through the implicit dependence
//! of `z_j` on the coefficients, which is why the Jacobian is undefined on
//! parabolic orbits (`λ_j = 1`).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbits::{periodic_points, refine_periodic_point, sample_config, Config};
use crate::poly::CentPoly;

/// `|λ_j - 1|` below which implicit differentiation is refused.
pub const PARABOLIC_TOL: f64 = 1e-9;
/// Relative threshold `σ_min > RANK_TOL σ_max` for full rank.
pub const RANK_TOL: f64 = 1e-8;
/// Coefficient radius for random polynomials in certificate trials.
pub const SAMPLE_RADIUS: f64 = 1.0;

/// `(λ_1, ..., λ_{n-1})` with each multiplier a product of `p'` along the orbit.
pub fn lambda_map(cfg: &Config) -> Vec<Complex64> {
    cfg.reps
        .iter()
        .zip(&cfg.periods)
        .map(|(&z, &m)| {
            let mut w = z;
            let mut lambda = Complex64::new(1.0, 0.0);
            for _ in 0..m {
                let (pw, dpw, _) = cfg.poly.eval_derivs(w);
                lambda *= dpw;
                w = pw;
            }
            lambda
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianMethod {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone)]
pub struct MultJacobian {
    /// `matrix[(j, k)] = ∂λ_j / ∂c_k`.
    pub matrix: DMatrix<Complex64>,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub method: JacobianMethod,
}

impl MultJacobian {
    fn from_matrix(matrix: DMatrix<Complex64>, method: JacobianMethod) -> Self {
        let mut singular_values: Vec<f64> = matrix.clone().singular_values().iter().copied().collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        Self { matrix, singular_values, method }
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `RANK_TOL σ_max`.
    pub fn rank(&self) -> usize {
        let cut = RANK_TOL * self.sigma_max();
        self.singular_values.iter().filter(|&&s| s > cut).count()
    }

    pub fn condition(&self) -> f64 {
        self.sigma_max() / self.sigma_min()
    }

    pub fn is_full_rank(&self) -> bool {
        self.sigma_max() > 0.0 && self.sigma_min() > RANK_TOL * self.sigma_max()
    }

    /// `max |U Σ V* - J|` from a full decomposition.
    pub fn reconstruction_residual(&self) -> f64 {
        let svd = self.matrix.clone().svd(true, true);
        let rebuilt = svd.recompose().expect("u and v_t were requested");
        (rebuilt - &self.matrix).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix.clone().determinant()
    }
}

/// `∂λ/∂c` and `∂z/∂c` for every marked orbit.
#[derive(Debug, Clone)]
pub(crate) struct Sensitivity {
    pub dlambda: DMatrix<Complex64>,
    pub dpoint: DMatrix<Complex64>,
}

pub(crate) fn sensitivity(cfg: &Config) -> Result<Sensitivity> {
    let n = cfg.degree();
    let dim = n - 1;
    let rows = cfg.reps.len();
    let mut dlambda = DMatrix::zeros(rows, dim);
    let mut dpoint = DMatrix::zeros(rows, dim);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    for (j, (&z, &m)) in cfg.reps.iter().zip(&cfg.periods).enumerate() {
        let mut w = Vec::with_capacity(m);
        let mut d1 = Vec::with_capacity(m);
        let mut d2 = Vec::with_capacity(m);
        let mut x = z;
        for _ in 0..m {
            let (px, dpx, ddpx) = cfg.poly.eval_derivs(x);
            w.push(x);
            d1.push(dpx);
            d2.push(ddpx);
            x = px;
        }
        let lambda: Complex64 = d1.iter().product();
        if (lambda - one).norm() < PARABOLIC_TOL {
            return Err(Error::ParabolicObstruction { orbit: j, multiplier: lambda });
        }

        // prod_{l != i} p'(w_l) without division, so zero derivatives are fine
        let mut prefix = vec![one; m + 1];
        for i in 0..m {
            prefix[i + 1] = prefix[i] * d1[i];
        }
        let mut suffix = vec![one; m + 1];
        for i in (0..m).rev() {
            suffix[i] = suffix[i + 1] * d1[i];
        }

        for k in 0..dim {
            let pow_k = |x: Complex64| x.powu(k as u32);
            let mut u = zero;
            for i in 0..m {
                u = d1[i] * u + pow_k(w[i]);
            }
            let dz = -u / (lambda - one);

            let mut v = dz;
            let mut acc = zero;
            for i in 0..m {
                let explicit = if k == 0 { zero } else { w[i].powu(k as u32 - 1) * k as f64 };
                acc += (d2[i] * v + explicit) * prefix[i] * suffix[i + 1];
                v = d1[i] * v + pow_k(w[i]);
            }
            dlambda[(j, k)] = acc;
            dpoint[(j, k)] = dz;
        }
    }
    Ok(Sensitivity { dlambda, dpoint })
}

/// Analytic Jacobian of the multiplier map by orbit recursion.
pub fn lambda_jacobian(cfg: &Config) -> Result<MultJacobian> {
    let s = sensitivity(cfg)?;
    Ok(MultJacobian::from_matrix(s.dlambda, JacobianMethod::Analytic))
}

/// Central differences of step `h` in each coefficient, re-solving every
/// marked periodic point by Newton at the shifted coefficients.
pub fn lambda_jacobian_fd(cfg: &Config, h: f64) -> Result<MultJacobian> {
    let dim = cfg.degree() - 1;
    let rows = cfg.reps.len();
    let mut matrix = DMatrix::zeros(rows, dim);
    for k in 0..dim {
        let shifted = |delta: f64| -> Result<Vec<Complex64>> {
            let poly = cfg.poly.shifted(k, Complex64::new(delta, 0.0));
            let reps = cfg
                .reps
                .iter()
                .zip(&cfg.periods)
                .map(|(&z, &m)| refine_periodic_point(&poly, z, m))
                .collect::<Result<Vec<_>>>()?;
            Ok(lambda_map(&Config::new_unchecked(poly, reps, cfg.periods.clone())))
        };
        let plus = shifted(h)?;
        let minus = shifted(-h)?;
        for j in 0..rows {
            matrix[(j, k)] = (plus[j] - minus[j]) / (2.0 * h);
        }
    }
    Ok(MultJacobian::from_matrix(matrix, JacobianMethod::FiniteDifference))
}

/// `sum_i 1/(1 - λ_i)` over all `n` fixed points; zero for every polynomial
/// whose fixed points are simple.
pub fn fixed_point_residual(p: &CentPoly) -> Result<Complex64> {
    let fixed = periodic_points(p, 1)?;
    let one = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (index, root) in fixed.roots.iter().enumerate() {
        let lambda = p.eval_deriv(root.value);
        if root.multiplicity > 1 || (lambda - one).norm() < 1e-12 {
            return Err(Error::UnitMultiplier { index, multiplier: lambda });
        }
        sum += (one - lambda).inv();
    }
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed_index: usize,
    pub sigma_min: Option<f64>,
    pub sigma_max: Option<f64>,
    pub rank: Option<usize>,
    /// `ok`, `rank_deficient`, or the error kind that ended the trial.
    pub status: String,
}

impl TrialRecord {
    pub fn succeeded(&self) -> bool {
        self.rank.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub n: usize,
    pub periods: Vec<usize>,
    pub trials: Vec<TrialRecord>,
    pub worst_condition: Option<f64>,
    pub pass: bool,
}

impl CertificateReport {
    pub fn successes(&self) -> usize {
        self.trials.iter().filter(|t| t.succeeded()).count()
    }

    /// Failure counts by status, successful trials excluded.
    pub fn failure_taxonomy(&self) -> BTreeMap<String, usize> {
        let mut taxonomy = BTreeMap::new();
        for t in self.trials.iter().filter(|t| !t.succeeded()) {
            *taxonomy.entry(t.status.clone()).or_insert(0) += 1;
        }
        taxonomy
    }
}

/// Generator for trial `index` of a run seeded with `seed`: ChaCha8 seeded from
/// `seed`, on stream `index`. Trials are therefore replayable one by one.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn run_trial(n: usize, periods: &[usize], seed: u64, index: usize) -> TrialRecord {
    let mut rng = trial_rng(seed, index);
    let outcome = CentPoly::random_in_disk(n, SAMPLE_RADIUS, &mut rng)
        .and_then(|p| sample_config(&p, periods))
        .and_then(|cfg| lambda_jacobian(&cfg));
    match outcome {
        Ok(jac) => TrialRecord {
            seed_index: index,
            sigma_min: Some(jac.sigma_min()),
            sigma_max: Some(jac.sigma_max()),
            rank: Some(jac.rank()),
            status: if jac.is_full_rank() { "ok" } else { "rank_deficient" }.to_string(),
        },
        Err(e) => TrialRecord {
            seed_index: index,
            sigma_min: None,
            sigma_max: None,
            rank: None,
            status: e.kind().to_string(),
        },
    }
}

/// Sample random polynomials, mark orbits of the requested periods and check
/// that the Jacobian of the multiplier map has full rank at each sample.
///
/// Passes when every trial that produced a Jacobian is full rank and at least
/// half of the trials produced one. Trials run in parallel; the report is in
/// trial order.
pub fn independence_certificate(
    n: usize,
    periods: &[usize],
    trials: usize,
    seed: u64,
) -> Result<CertificateReport> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("certificate needs n >= 3, got {n}")));
    }
    if periods.len() != n - 1 {
        return Err(Error::InvalidInput(format!(
            "n = {n} needs {} periods, got {}",
            n - 1,
            periods.len()
        )));
    }
    if periods.contains(&0) || trials == 0 {
        return Err(Error::InvalidInput("periods and trial count must be positive".into()));
    }
    let max_period = *periods.iter().max().unwrap();
    crate::poly::check_iterate_degree(n, max_period, crate::poly::degree_cap())?;

    let records: Vec<TrialRecord> =
        (0..trials).into_par_iter().map(|i| run_trial(n, periods, seed, i)).collect();

    let report = {
        let successes: Vec<&TrialRecord> = records.iter().filter(|t| t.succeeded()).collect();
        let worst_condition = successes
            .iter()
            .map(|t| t.sigma_max.unwrap() / t.sigma_min.unwrap())
            .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.max(c))));
        let all_full = successes.iter().all(|t| t.status == "ok");
        let pass = all_full && 2 * successes.len() >= trials;
        CertificateReport { n, periods: periods.to_vec(), trials: records, worst_condition, pass }
    };
    if report.successes() == 0 {
        return Err(Error::AllTrialsFailed { taxonomy: report.failure_taxonomy() });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z3_fixed() -> Config {
        let p = CentPoly::monomial(3).unwrap();
        Config::new(p, vec![c(1.0, 0.0), c(-1.0, 0.0)], vec![1, 1]).unwrap()
    }

    #[test]
    fn lambda_map_examples() {
        let l = lambda_map(&z3_fixed());
        assert!((l[0] - c(3.0, 0.0)).norm() < 1e-14);
        assert!((l[1] - c(3.0, 0.0)).norm() < 1e-14);

        let p = CentPoly::monomial(3).unwrap();
        let cfg = sample_config(&p, &[2, 2]).unwrap();
        for l in lambda_map(&cfg) {
            assert!((l - c(9.0, 0.0)).norm() < 1e-10);
        }
        let zeta = Complex64::from_polar(1.0, std::f64::consts::PI / 4.0);
        let cfg = Config::new(p, vec![c(0.0, 0.0), zeta], vec![1, 2]).unwrap();
        let l = lambda_map(&cfg);
        assert!(l[0].norm() < 1e-15);
        assert!((l[1] - c(9.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn z3_closed_form_jacobian() {
        // oracle: p'' = 6z at ±1, ∂z/∂c = -1/(λ - 1) * z^k; worked by hand
        let jac = lambda_jacobian(&z3_fixed()).unwrap();
        let want = [[-3.0, -2.0], [3.0, -2.0]];
        for j in 0..2 {
            for k in 0..2 {
                assert!((jac.matrix[(j, k)] - c(want[j][k], 0.0)).norm() < 1e-12);
            }
        }
        assert!((jac.determinant() - c(12.0, 0.0)).norm() < 1e-12);
        assert!((jac.singular_values[0] - 18f64.sqrt()).abs() < 1e-12);
        assert!((jac.singular_values[1] - 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(jac.rank(), 2);
        assert!(jac.reconstruction_residual() < 1e-10 * jac.sigma_max());
    }

    #[test]
    fn superattracting_orbit_handled_without_division() {
        let p = CentPoly::monomial(3).unwrap();
        let zeta = Complex64::from_polar(1.0, std::f64::consts::PI / 4.0);
        let cfg = Config::new(p, vec![c(0.0, 0.0), zeta], vec![1, 2]).unwrap();
        let jac = lambda_jacobian(&cfg).unwrap();
        assert!(jac.matrix.iter().all(|x| x.is_finite()));
        // p'' vanishes at 0 and w^{k-1} k is 1 only for k = 1
        assert!((jac.matrix[(0, 0)]).norm() < 1e-15);
        assert!((jac.matrix[(0, 1)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn parabolic_orbit_obstructs() {
        let p = CentPoly::new(vec![c(0.25, 0.0)]).unwrap();
        let cfg = Config::new_unchecked(p, vec![c(0.5, 0.0)], vec![1]);
        assert!(matches!(lambda_jacobian(&cfg), Err(Error::ParabolicObstruction { orbit: 0, .. })));
    }

    #[test]
    fn finite_difference_agrees_on_z3() {
        let fd = lambda_jacobian_fd(&z3_fixed(), 1e-6).unwrap();
        assert_eq!(fd.method, JacobianMethod::FiniteDifference);
        let an = lambda_jacobian(&z3_fixed()).unwrap();
        for (a, b) in an.matrix.iter().zip(fd.matrix.iter()) {
            assert!((a - b).norm() <= 1e-6 * a.norm());
        }
    }

    #[test]
    fn fixed_point_relation_examples() {
        let r = fixed_point_residual(&CentPoly::monomial(3).unwrap()).unwrap();
        assert!(r.norm() < 1e-14);
        let r = fixed_point_residual(&CentPoly::new(vec![c(-1.0, 0.0)]).unwrap()).unwrap();
        assert!(r.norm() < 1e-13);
        let parabolic = CentPoly::new(vec![c(0.25, 0.0)]).unwrap();
        assert!(matches!(fixed_point_residual(&parabolic), Err(Error::UnitMultiplier { .. })));
    }

    #[test]
    fn certificate_small_run() {
        let report = independence_certificate(3, &[1, 2], 8, 11).unwrap();
        assert!(report.pass);
        assert_eq!(report.trials.len(), 8);
        assert!(report.trials.iter().enumerate().all(|(i, t)| t.seed_index == i));
        let again = independence_certificate(3, &[1, 2], 8, 11).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn certificate_input_checks() {
        assert!(matches!(independence_certificate(3, &[1], 5, 0), Err(Error::InvalidInput(_))));
        assert!(matches!(independence_certificate(2, &[1], 5, 0), Err(Error::InvalidInput(_))));
        assert!(matches!(
            independence_certificate(5, &[1, 1, 1, 9], 5, 0),
            Err(Error::DegreeCapExceeded { .. })
        ));
    }
}
