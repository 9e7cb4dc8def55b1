//! Inverting the multiplier map by damped Newton and continuation, and building
//! polynomials with `n - 1` attracting cycles of prescribed exact periods.
//!
//! [`construct_attracting`] starts from `n - 1` attracting fixed points. For each
//! slot that needs period `m > 1` it drives that fixed point's multiplier to
//! just inside `exp(2πi/m)` while the other multipliers stay pinned, finds the
//! period-`m` satellite cycle sitting next to it, perturbs the coefficients
//! until the satellite becomes attracting, marks the satellite instead of the
//! fixed point and steers every multiplier back to `0.5`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multmap::{lambda_jacobian, lambda_map, sensitivity, PARABOLIC_TOL};
use crate::orbits::{
    exact_period, lex_cmp, orbits_of_exact_period, refine_periodic_point, Config, PeriodicOrbit,
};
use crate::poly::{check_iterate_degree, degree_cap, CentPoly};

/// Every multiplier is steered here once its orbit has the requested period.
pub const TARGET_MULTIPLIER: f64 = 0.5;
/// How far inside the root of unity a period upgrade stops.
pub const UPGRADE_GAP: f64 = 1e-3;
/// Radius of the exclusion disk around 1 (and caller-flagged roots of unity).
pub const PARABOLIC_GUARD: f64 = 1e-6;
/// Jacobians with `σ_min <= SINGULAR_TOL σ_max` are refused by Newton.
pub const SINGULAR_TOL: f64 = 1e-10;
pub const SEED_SAMPLE_BUDGET: usize = 10_000;
const SEED_BATCH: usize = 64;
const SEED_RADIUS: f64 = 1.0;
const SATELLITE_EXPANSIONS: usize = 5;
const SEARCH_DIRECTIONS: usize = 64;
const SEARCH_START_RADIUS: f64 = 1e-4;
const SEARCH_LEVELS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteerOptions {
    pub newton_tol: f64,
    pub max_newton_iter: usize,
    /// Largest coefficient move per continuation step (max-norm).
    pub initial_step: f64,
    pub min_step: f64,
    /// Initial Newton step fraction; halved while the residual does not drop.
    pub damping: f64,
}

impl Default for SteerOptions {
    fn default() -> Self {
        Self { newton_tol: 1e-12, max_newton_iter: 50, initial_step: 0.1, min_step: 1e-6, damping: 1.0 }
    }
}

impl SteerOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = self.newton_tol > 0.0
            && self.max_newton_iter > 0
            && self.initial_step > 0.0
            && self.min_step > 0.0;
        if !positive || self.min_step > self.initial_step || !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidInput(format!("invalid steering options {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    Converged,
    Stalled,
    ParabolicHit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteerStep {
    pub cfg: Config,
    pub multipliers: Vec<Complex64>,
    /// Step bound in coefficient space; the polynomial moved by at most twice this.
    pub step_size: f64,
}

#[derive(Serialize)]
struct StepRepr<'a> {
    poly: &'a CentPoly,
    multipliers: &'a [Complex64],
    step_size: f64,
}

impl Serialize for SteerStep {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StepRepr { poly: &self.cfg.poly, multipliers: &self.multipliers, step_size: self.step_size }
            .serialize(serializer)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteerPath {
    pub status: PathStatus,
    pub steps: Vec<SteerStep>,
}

impl SteerPath {
    pub fn last_config(&self) -> &Config {
        &self.steps.last().expect("a path always holds its starting point").cfg
    }

    pub fn is_converged(&self) -> bool {
        self.status == PathStatus::Converged
    }

    /// Same path with only its first and last steps.
    pub fn endpoints_only(&self) -> SteerPath {
        let mut steps = vec![self.steps[0].clone()];
        if self.steps.len() > 1 {
            steps.push(self.steps.last().unwrap().clone());
        }
        SteerPath { status: self.status, steps }
    }

    /// Converged paths pass through; others become the matching error.
    pub fn into_converged(self, reached: f64) -> Result<SteerPath> {
        match self.status {
            PathStatus::Converged => Ok(self),
            PathStatus::Stalled => Err(Error::Stalled { reached }),
            PathStatus::ParabolicHit => Err(Error::ParabolicHit { reached }),
        }
    }
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn residual(lambda: &[Complex64], target: &[Complex64]) -> f64 {
    lambda.iter().zip(target).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

fn solve(matrix: &DMatrix<Complex64>, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let sv = matrix.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if !(smin > SINGULAR_TOL * smax) {
        return Err(Error::SingularJacobian { sigma_min: smin, sigma_max: smax });
    }
    let b = DVector::from_column_slice(rhs);
    matrix
        .clone()
        .lu()
        .solve(&b)
        .map(|x| x.iter().copied().collect())
        .ok_or(Error::SingularJacobian { sigma_min: smin, sigma_max: smax })
}

/// Move the coefficients by `delta` and re-solve every marked point by Newton
/// from its first-order prediction.
fn shifted_config(cur: &Config, dpoint: &DMatrix<Complex64>, delta: &[Complex64]) -> Result<Config> {
    let poly = cur.poly.offset(delta);
    let gap = cur.inter_orbit_gap();
    let mut reps = Vec::with_capacity(cur.reps.len());
    for (j, (&z, &m)) in cur.reps.iter().zip(&cur.periods).enumerate() {
        let predicted = z + (0..delta.len()).map(|k| dpoint[(j, k)] * delta[k]).sum::<Complex64>();
        let moved = refine_periodic_point(&poly, predicted, m).map_err(|_| Error::OrbitLost { orbit: j })?;
        if (moved - z).norm() > 0.5 * gap || exact_period(&poly, moved, m) != Some(m) {
            return Err(Error::OrbitLost { orbit: j });
        }
        reps.push(moved);
    }
    let next = Config::new_unchecked(poly, reps, cur.periods.clone());
    next.validate().map_err(|_| Error::OrbitLost { orbit: 0 })?;
    Ok(next)
}

struct NewtonOutcome {
    cfg: Config,
    iterations: usize,
}

fn newton_solve(cfg: &Config, target: &[Complex64], opts: &SteerOptions) -> Result<NewtonOutcome> {
    if target.len() != cfg.reps.len() {
        return Err(Error::InvalidInput(format!(
            "target has {} entries, configuration marks {} orbits",
            target.len(),
            cfg.reps.len()
        )));
    }
    if let Some((orbit, &t)) = target.iter().enumerate().find(|(_, t)| (*t - 1.0).norm() < PARABOLIC_TOL) {
        return Err(Error::ParabolicObstruction { orbit, multiplier: t });
    }
    let mut cur = cfg.clone();
    let mut lambda = lambda_map(&cur);
    let mut res = residual(&lambda, target);
    for iteration in 0..opts.max_newton_iter {
        if res < opts.newton_tol {
            return Ok(NewtonOutcome { cfg: cur, iterations: iteration });
        }
        let sens = sensitivity(&cur)?;
        let rhs: Vec<Complex64> = target.iter().zip(&lambda).map(|(t, l)| t - l).collect();
        let delta = solve(&sens.dlambda, &rhs)?;

        let mut fraction = opts.damping;
        let mut last_err = None;
        let accepted = loop {
            let scaled: Vec<Complex64> = delta.iter().map(|d| d * fraction).collect();
            match shifted_config(&cur, &sens.dpoint, &scaled) {
                Ok(next) => {
                    let next_lambda = lambda_map(&next);
                    let next_res = residual(&next_lambda, target);
                    if next_res < res {
                        break Some((next, next_lambda, next_res));
                    }
                }
                Err(e) => last_err = Some(e),
            }
            fraction *= 0.5;
            if fraction < 1e-6 {
                break None;
            }
        };
        match accepted {
            Some((next, next_lambda, next_res)) => {
                cur = next;
                lambda = next_lambda;
                res = next_res;
            }
            None => {
                // no damped step improves: either at rounding level or lost
                if res < 1e3 * opts.newton_tol.max(f64::EPSILON * (1.0 + inf_norm(target))) {
                    return Err(Error::MaxIterExceeded { residual: res });
                }
                return Err(last_err.unwrap_or(Error::MaxIterExceeded { residual: res }));
            }
        }
    }
    if res < opts.newton_tol {
        return Ok(NewtonOutcome { cfg: cur, iterations: opts.max_newton_iter });
    }
    Err(Error::MaxIterExceeded { residual: res })
}

/// Damped Newton on the coefficients for `Λ(cfg) = target`, re-solving the
/// marked periodic points at every iterate.
pub fn newton_invert(cfg: &Config, target: &[Complex64], opts: &SteerOptions) -> Result<Config> {
    opts.validate()?;
    newton_solve(cfg, target, opts).map(|o| o.cfg)
}

/// Like [`newton_invert`], also reporting the number of Newton iterations used.
pub fn newton_invert_counted(
    cfg: &Config,
    target: &[Complex64],
    opts: &SteerOptions,
) -> Result<(Config, usize)> {
    opts.validate()?;
    newton_solve(cfg, target, opts).map(|o| (o.cfg, o.iterations))
}

/// First path parameter in `[0, 1]` at which `start + s (end - start)` enters
/// the closed disk of `radius` around `center`.
fn segment_entry(start: Complex64, end: Complex64, center: Complex64, radius: f64) -> Option<f64> {
    let a = start - center;
    let b = end - start;
    if a.norm() <= radius {
        return Some(0.0);
    }
    let qa = b.norm_sqr();
    if qa == 0.0 {
        return None;
    }
    let qb = 2.0 * (a.re * b.re + a.im * b.im);
    let qc = a.norm_sqr() - radius * radius;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    let s = (-qb - disc.sqrt()) / (2.0 * qa);
    (0.0..=1.0).contains(&s).then_some(s)
}

/// Follow the straight segment in multiplier space from `Λ(cfg)` to `target`.
pub fn continue_path(cfg: &Config, target: &[Complex64], opts: &SteerOptions) -> Result<SteerPath> {
    continue_path_guarded(cfg, target, opts, &[])
}

/// [`continue_path`] with extra per-orbit exclusion points: `guards[j] = Some(ω)`
/// stops the path before multiplier `j` comes within `PARABOLIC_GUARD` of `ω`.
/// The disk around 1 is always excluded.
pub fn continue_path_guarded(
    cfg: &Config,
    target: &[Complex64],
    opts: &SteerOptions,
    guards: &[Option<Complex64>],
) -> Result<SteerPath> {
    opts.validate()?;
    if target.len() != cfg.reps.len() {
        return Err(Error::InvalidInput(format!(
            "target has {} entries, configuration marks {} orbits",
            target.len(),
            cfg.reps.len()
        )));
    }
    let start = lambda_map(cfg);
    let dir: Vec<Complex64> = target.iter().zip(&start).map(|(t, s)| t - s).collect();
    let mut steps = vec![SteerStep { cfg: cfg.clone(), multipliers: start.clone(), step_size: 0.0 }];
    if residual(&start, target) < opts.newton_tol {
        return Ok(SteerPath { status: PathStatus::Converged, steps });
    }

    let one = Complex64::new(1.0, 0.0);
    let mut hit: Option<f64> = None;
    for j in 0..start.len() {
        let extra = guards.get(j).copied().flatten();
        for center in [Some(one), extra].into_iter().flatten() {
            if let Some(s) = segment_entry(start[j], target[j], center, PARABOLIC_GUARD) {
                hit = Some(hit.map_or(s, |h: f64| h.min(s)));
            }
        }
    }

    // the starting Jacobian must be usable
    let sens = sensitivity(cfg)?;
    solve(&sens.dlambda, &dir)?;

    let mut cur = cfg.clone();
    let mut s = 0.0;
    let mut h = opts.initial_step;
    let mut streak = 0;
    loop {
        let speed = match sensitivity(&cur).and_then(|sens| solve(&sens.dlambda, &dir)) {
            Ok(dcds) => inf_norm(&dcds),
            Err(_) => f64::INFINITY,
        };
        let ds = if speed > 0.0 { h / speed } else { 1.0 - s };
        let mut s_next = (s + ds).min(1.0);
        if 1.0 - s_next < 1e-12 {
            s_next = 1.0;
        }
        if let Some(s_hit) = hit {
            if s_next >= s_hit {
                return Ok(SteerPath { status: PathStatus::ParabolicHit, steps });
            }
        }
        let waypoint: Vec<Complex64> = if s_next == 1.0 {
            target.to_vec()
        } else {
            start.iter().zip(&dir).map(|(a, d)| a + d * s_next).collect()
        };

        let solved = newton_solve(&cur, &waypoint, opts)
            .ok()
            .filter(|out| out.cfg.poly.coeff_distance(&cur.poly) <= 2.0 * h);
        match solved {
            Some(out) => {
                cur = out.cfg;
                s = s_next;
                steps.push(SteerStep { cfg: cur.clone(), multipliers: lambda_map(&cur), step_size: h });
                if s == 1.0 {
                    return Ok(SteerPath { status: PathStatus::Converged, steps });
                }
                streak += 1;
                if streak >= 3 {
                    h = (h * 1.5).min(opts.initial_step);
                    streak = 0;
                }
            }
            None => {
                h *= 0.5;
                streak = 0;
                if h < opts.min_step {
                    return Ok(SteerPath { status: PathStatus::Stalled, steps });
                }
            }
        }
    }
}

/// Fixed-point configuration from the `n - 1` fixed points of smallest
/// multiplier modulus, and the largest of those moduli.
fn fixed_point_candidate(p: &CentPoly) -> Option<(f64, Config)> {
    let n = p.degree();
    let mut fixed: Vec<PeriodicOrbit> =
        orbits_of_exact_period(p, 1).ok()?.into_iter().filter(|o| !o.multiple_flag).collect();
    if fixed.len() < n - 1 {
        return None;
    }
    fixed.sort_by(|a, b| {
        a.multiplier.norm().total_cmp(&b.multiplier.norm()).then(lex_cmp(&a.points[0], &b.points[0]))
    });
    fixed.truncate(n - 1);
    let score = fixed.iter().map(|o| o.multiplier.norm()).fold(0.0, f64::max);
    let reps = fixed.iter().map(|o| o.points[0]).collect();
    Config::new(p.clone(), reps, vec![1; n - 1]).ok().map(|cfg| (score, cfg))
}

/// Random multistart for `n - 1` fixed points with the given attracting
/// multipliers. Samples are drawn from ChaCha8 seeded with `seed`, in batches;
/// the best-scored sample of each batch is continued to the targets first.
pub fn seed_fixed_attracting(n: usize, targets: &[Complex64], seed: u64) -> Result<Config> {
    seed_fixed_attracting_traced(n, targets, seed, &SteerOptions::default())
        .map(|path| path.last_config().clone())
}

pub fn seed_fixed_attracting_traced(
    n: usize,
    targets: &[Complex64],
    seed: u64,
    opts: &SteerOptions,
) -> Result<SteerPath> {
    if n < 2 || targets.len() != n - 1 {
        return Err(Error::InvalidInput(format!("degree {n} needs {} targets", n.saturating_sub(1))));
    }
    if let Some(t) = targets.iter().find(|t| !(t.norm() < 1.0)) {
        return Err(Error::OutsideDisk { value: *t });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn = 0;
    while drawn < SEED_SAMPLE_BUDGET {
        let batch = SEED_BATCH.min(SEED_SAMPLE_BUDGET - drawn);
        let mut candidates = Vec::with_capacity(batch);
        for index in 0..batch {
            let p = CentPoly::random_in_disk(n, SEED_RADIUS, &mut rng)?;
            if let Some((score, cfg)) = fixed_point_candidate(&p) {
                candidates.push((score, index, cfg));
            }
        }
        drawn += batch;
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, _, cfg) in candidates.into_iter().take(4) {
            if let Ok(path) = continue_path(&cfg, targets, opts) {
                if path.is_converged() {
                    return Ok(path);
                }
            }
        }
    }
    Err(Error::SeedSearchFailed { samples: drawn })
}

/// Output of [`construct_attracting_traced`]: the final configuration and the
/// concatenated record of every continuation leg and perturbation jump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Construction {
    pub config: Config,
    pub path: SteerPath,
}

/// Polynomial with `n - 1` attracting cycles of exact periods `periods`, each
/// with multiplier `0.5`, marked by a configuration.
pub fn construct_attracting(n: usize, periods: &[usize], seed: u64) -> Result<Config> {
    construct_attracting_traced(n, periods, seed, &SteerOptions::default()).map(|c| c.config)
}

pub fn construct_attracting_traced(
    n: usize,
    periods: &[usize],
    seed: u64,
    opts: &SteerOptions,
) -> Result<Construction> {
    if n < 2 || periods.len() != n - 1 || periods.contains(&0) {
        return Err(Error::InvalidInput(format!(
            "degree {n} needs {} positive periods, got {periods:?}",
            n.saturating_sub(1)
        )));
    }
    let max_period = *periods.iter().max().unwrap();
    check_iterate_degree(n, max_period, degree_cap())?;

    let half = Complex64::new(TARGET_MULTIPLIER, 0.0);
    let all_half = vec![half; n - 1];
    let seed_path = seed_fixed_attracting_traced(n, &all_half, seed, opts)?;
    let mut steps = seed_path.steps;
    let mut cfg = steps.last().unwrap().cfg.clone();

    for (k, &m) in periods.iter().enumerate() {
        if m == 1 {
            continue;
        }
        let omega = Complex64::from_polar(1.0, 2.0 * PI / m as f64);

        // drive the fixed point toward the root of unity, others pinned
        let mut target = lambda_map(&cfg);
        target[k] = omega * (1.0 - UPGRADE_GAP);
        let mut guards = vec![None; n - 1];
        guards[k] = Some(omega);
        let leg = continue_path_guarded(&cfg, &target, opts, &guards)?.into_converged(0.0)?;
        steps.extend(leg.steps.into_iter().skip(1));
        cfg = steps.last().unwrap().cfg.clone();

        let (upgraded, jump) = attract_satellite(&cfg, k, m, omega)?;
        steps.push(SteerStep { cfg: upgraded.clone(), multipliers: lambda_map(&upgraded), step_size: jump });
        cfg = upgraded;

        let leg = continue_path(&cfg, &all_half, opts)?.into_converged(0.0)?;
        steps.extend(leg.steps.into_iter().skip(1));
        cfg = steps.last().unwrap().cfg.clone();
    }

    // settle every multiplier on the target to Newton accuracy
    if residual(&lambda_map(&cfg), &all_half) >= opts.newton_tol {
        let leg = continue_path(&cfg, &all_half, opts)?.into_converged(1.0)?;
        steps.extend(leg.steps.into_iter().skip(1));
        cfg = steps.last().unwrap().cfg.clone();
    }
    Ok(Construction { config: cfg.clone(), path: SteerPath { status: PathStatus::Converged, steps } })
}

/// The exact-period-`m` orbit whose points all lie closest around `z0`, searched
/// within `radius` and then within doubled radii.
pub fn find_satellite(orbits: &[PeriodicOrbit], z0: Complex64, radius: f64) -> Option<&PeriodicOrbit> {
    let mut r = radius;
    for _ in 0..=SATELLITE_EXPANSIONS {
        let found = orbits
            .iter()
            .filter(|o| !o.multiple_flag && o.spread_around(z0) <= r)
            .min_by(|a, b| a.spread_around(z0).total_cmp(&b.spread_around(z0)));
        if found.is_some() {
            return found;
        }
        r *= 2.0;
    }
    None
}

fn satellite_radius(lambda: Complex64, omega: Complex64, m: usize) -> f64 {
    10.0 * (lambda - omega).norm().max(f64::EPSILON).powf(1.0 / m as f64)
}

/// The other marked orbits re-solved at `poly`, if all stay attracting with
/// their exact periods.
fn persisting_reps(cfg: &Config, poly: &CentPoly, skip: usize) -> Option<Vec<Complex64>> {
    let gap = cfg.inter_orbit_gap();
    let mut reps = cfg.reps.clone();
    for (j, (&z, &m)) in cfg.reps.iter().zip(&cfg.periods).enumerate() {
        if j == skip {
            continue;
        }
        let moved = refine_periodic_point(poly, z, m).ok()?;
        if (moved - z).norm() > 0.5 * gap || exact_period(poly, moved, m) != Some(m) {
            return None;
        }
        let points = crate::orbits::orbit_points(poly, moved, m);
        if crate::orbits::orbit_multiplier(poly, &points).norm() >= 1.0 {
            return None;
        }
        reps[j] = moved;
    }
    Some(reps)
}

/// Perturb one coefficient until the satellite of marked fixed point `k` is
/// attracting, and return the configuration marking the satellite instead,
/// together with the size of the coefficient jump.
fn attract_satellite(cfg: &Config, k: usize, m: usize, omega: Complex64) -> Result<(Config, f64)> {
    let z0 = cfg.reps[k];
    let lambda_k = lambda_map(cfg)[k];
    let orbits = orbits_of_exact_period(&cfg.poly, m)?;
    let satellite = find_satellite(&orbits, z0, satellite_radius(lambda_k, omega, m))
        .ok_or(Error::SatelliteNotFound { orbit: k, period: m })?;

    let mut periods = cfg.periods.clone();
    periods[k] = m;
    if satellite.multiplier.norm() < 1.0 {
        let mut reps = cfg.reps.clone();
        reps[k] = satellite.points[0];
        return Ok((Config::new(cfg.poly.clone(), reps, periods)?, 0.0));
    }

    // one complex coefficient: the one the fixed-point multiplier is most sensitive to
    let jac = lambda_jacobian(cfg)?;
    let column = (0..jac.matrix.ncols())
        .max_by(|&a, &b| jac.matrix[(k, a)].norm().total_cmp(&jac.matrix[(k, b)].norm()))
        .unwrap();

    let mut persistence_failed = false;
    let mut radius = SEARCH_START_RADIUS;
    for _ in 0..SEARCH_LEVELS {
        let mut best: Option<(f64, Config)> = None;
        for t in 0..SEARCH_DIRECTIONS {
            let delta = Complex64::from_polar(radius, 2.0 * PI * t as f64 / SEARCH_DIRECTIONS as f64);
            let poly = cfg.poly.shifted(column, delta);
            let Ok(fixed) = refine_periodic_point(&poly, z0, 1) else { continue };
            let fixed_lambda = poly.eval_deriv(fixed);
            // with every other critical point captured, an attracting satellite
            // needs the fixed point to have stopped attracting
            if fixed_lambda.norm() < 1.0 {
                continue;
            }
            let Ok(found) = orbits_of_exact_period(&poly, m) else { continue };
            let Some(sat) = find_satellite(&found, fixed, satellite_radius(fixed_lambda, omega, m)) else {
                continue;
            };
            if sat.multiplier.norm() >= 1.0 {
                continue;
            }
            let Some(mut reps) = persisting_reps(cfg, &poly, k) else {
                persistence_failed = true;
                continue;
            };
            reps[k] = sat.points[0];
            let Ok(next) = Config::new(poly, reps, periods.clone()) else { continue };
            let score = sat.multiplier.norm();
            if best.as_ref().is_none_or(|(s, _)| score < *s) {
                best = Some((score, next));
            }
        }
        if let Some((_, next)) = best {
            return Ok((next, radius));
        }
        radius *= 2.0;
    }
    if persistence_failed {
        let lost = (0..cfg.reps.len()).find(|&j| j != k).unwrap_or(k);
        return Err(Error::PersistenceLost { orbit: lost });
    }
    Err(Error::SatelliteNotFound { orbit: k, period: m })
}
