//! Periodic points, exact-period orbits, multipliers and marked configurations.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::CentPoly;
use crate::roots::{aberth_with, all_roots, cluster, RootOptions, RootSet};

/// Return distance for the divisor test, relative to `1 + |z|`.
pub const RETURN_TOL: f64 = 1e-8;
/// Distance from a root of unity below which an orbit is flagged multiple.
pub const UNITY_TOL: f64 = 1e-6;
const DYNAMIC_SWEEPS: usize = 200;

/// Positive divisors of `m`, ascending.
pub fn divisors(m: usize) -> Vec<usize> {
    (1..=m).filter(|&d| m.is_multiple_of(d)).collect()
}

/// Lexicographic order on (re, im), used for every deterministic sort here.
pub fn lex_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn iterate_n(p: &CentPoly, z: Complex64, d: usize) -> Option<Complex64> {
    let mut w = z;
    for _ in 0..d {
        w = p.eval(w);
        if !w.is_finite() {
            return None;
        }
    }
    Some(w)
}

/// Smallest `d | m` with `|p^{∘d}(z) - z| < RETURN_TOL (1 + |z|)`.
pub fn exact_period(p: &CentPoly, z: Complex64, m: usize) -> Option<usize> {
    let tol = RETURN_TOL * (1.0 + z.norm());
    divisors(m)
        .into_iter()
        .find(|&d| iterate_n(p, z, d).is_some_and(|w| (w - z).norm() < tol))
}

/// Multiplier `prod p'(points[i])` of a cycle.
pub fn orbit_multiplier(p: &CentPoly, points: &[Complex64]) -> Complex64 {
    points.iter().map(|&w| p.eval_deriv(w)).product()
}

/// The cycle `[z, p(z), ..., p^{∘(m-1)}(z)]`.
pub fn orbit_points(p: &CentPoly, z: Complex64, m: usize) -> Vec<Complex64> {
    let mut points = Vec::with_capacity(m);
    let mut w = z;
    for _ in 0..m {
        points.push(w);
        w = p.eval(w);
    }
    points
}

/// Whether an orbit of exact period `d`, viewed inside `p^{∘m}(z) = z`, has a
/// multiplier close enough to a root of unity of order dividing `m / d` to be
/// a multiple solution.
pub fn near_unity(multiplier: Complex64, d: usize, m: usize) -> bool {
    (multiplier.powu((m / d) as u32) - 1.0).norm() < UNITY_TOL
}

/// Newton on `p^{∘m}(z) - z` from `z0`, run to rounding level.
pub fn refine_periodic_point(p: &CentPoly, z0: Complex64, m: usize) -> Result<Complex64> {
    let mut z = z0;
    for _ in 0..60 {
        let (w, dw) = p.iterate_with_derivative(z, m)?;
        let g = w - z;
        let dg = dw - 1.0;
        if dg.norm() == 0.0 {
            return Err(Error::DerivativeVanished { at: z });
        }
        let step = g / dg;
        if !step.is_finite() {
            return Err(Error::DerivativeVanished { at: z });
        }
        z -= step;
        if step.norm() <= 8.0 * f64::EPSILON * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    let (w, _) = p.iterate_with_derivative(z, m)?;
    if (w - z).norm() <= 1e-12 * (1.0 + z.norm()) {
        Ok(z)
    } else {
        Err(Error::NoConvergence { worst_residual: (w - z).norm() })
    }
}

/// All roots of `p^{∘m}(z) - z` with multiplicity, i.e. every point whose
/// period divides `m`. Roots of the expanded polynomial only seed the search:
/// they are refined by simultaneous iteration on the map itself, which stays
/// accurate where the expanded coefficients do not. Residuals are
/// `|p^{∘m}(z) - z|`.
pub fn periodic_points(p: &CentPoly, m: usize) -> Result<RootSet> {
    let q = p.compose_self_minus_id(m)?;
    let seed = all_roots(&q, &RootOptions::default())?;
    let mut z = Vec::with_capacity(seed.total_multiplicity());
    for root in &seed.roots {
        let k = root.multiplicity;
        for j in 0..k {
            let spread = if k == 1 { 0.0 } else { seed.cluster_radius };
            z.push(root.value + Complex64::from_polar(spread, TAU * j as f64 / k as f64 + 0.3));
        }
    }
    let eval = |w: Complex64| {
        p.iterate_with_derivative(w, m).ok().map(|(v, dv)| (v - w, dv - 1.0))
    };
    aberth_with(eval, &mut z, DYNAMIC_SWEEPS, 4.0 * f64::EPSILON);

    let max_abs = z.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let cluster_radius = RootOptions::default().cluster_scale * (1.0 + max_abs);
    let roots = cluster(&z, cluster_radius);
    let residuals = roots
        .iter()
        .map(|r| iterate_n(p, r.value, m).map_or(f64::INFINITY, |w| (w - r.value).norm()))
        .collect();
    Ok(RootSet { roots, residuals, cluster_radius })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    /// `p(points[i]) = points[(i + 1) % m]`; `points[0]` is the lexicographically smallest.
    pub points: Vec<Complex64>,
    pub exact_period: usize,
    pub multiplier: Complex64,
    #[serde(rename = "multiple")]
    pub multiple_flag: bool,
}

impl PeriodicOrbit {
    fn sort_key(&self) -> Complex64 {
        self.points[0]
    }

    /// Min distance from `z` to any point of this orbit.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.points.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Max distance from `z` to the points of this orbit.
    pub fn spread_around(&self, z: Complex64) -> f64 {
        self.points.iter().map(|w| (w - z).norm()).fold(0.0, f64::max)
    }
}

/// Cycles of exact period `m`, sorted by their lexicographically smallest point.
pub fn orbits_of_exact_period(p: &CentPoly, m: usize) -> Result<Vec<PeriodicOrbit>> {
    if m == 0 {
        return Err(Error::InvalidInput("period must be >= 1".into()));
    }
    let rs = periodic_points(p, m)?;
    let half_sep = 0.5 * rs.min_separation();

    let mut pool: Vec<(Complex64, usize)> = rs
        .roots
        .iter()
        .filter(|r| exact_period(p, r.value, m) == Some(m))
        .map(|r| (r.value, r.multiplicity))
        .collect();
    pool.sort_by(|a, b| lex_cmp(&a.0, &b.0));

    let mut used = vec![false; pool.len()];
    let mut orbits = Vec::new();
    for start in 0..pool.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut members = vec![start];
        for _ in 1..m {
            let image = p.eval(pool[*members.last().unwrap()].0);
            let (next, distance) = nearest_unused(&pool, &used, image).ok_or(
                Error::AmbiguousGrouping { distance: f64::INFINITY, half_separation: half_sep },
            )?;
            if distance > half_sep {
                return Err(Error::AmbiguousGrouping { distance, half_separation: half_sep });
            }
            used[next] = true;
            members.push(next);
        }
        let closing = (p.eval(pool[*members.last().unwrap()].0) - pool[start].0).norm();
        if closing > half_sep {
            return Err(Error::AmbiguousGrouping { distance: closing, half_separation: half_sep });
        }

        let points: Vec<Complex64> = members.iter().map(|&i| pool[i].0).collect();
        let multiplier = orbit_multiplier(p, &points);
        let clustered = members.iter().any(|&i| pool[i].1 > 1);
        orbits.push(PeriodicOrbit {
            points,
            exact_period: m,
            multiplier,
            multiple_flag: clustered || near_unity(multiplier, m, m),
        });
    }
    // members were visited from the smallest unused point, so points[0] is already minimal
    orbits.sort_by(|a, b| lex_cmp(&a.sort_key(), &b.sort_key()));
    Ok(orbits)
}

fn nearest_unused(pool: &[(Complex64, usize)], used: &[bool], z: Complex64) -> Option<(usize, f64)> {
    pool.iter()
        .enumerate()
        .filter(|(i, _)| !used[*i])
        .map(|(i, (w, _))| (i, (w - z).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// A polynomial with `n - 1` marked periodic points on distinct orbits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigRepr")]
pub struct Config {
    pub poly: CentPoly,
    pub reps: Vec<Complex64>,
    pub periods: Vec<usize>,
}

#[derive(Deserialize)]
struct ConfigRepr {
    poly: CentPoly,
    reps: Vec<Complex64>,
    periods: Vec<usize>,
}

impl TryFrom<ConfigRepr> for Config {
    type Error = Error;

    fn try_from(repr: ConfigRepr) -> Result<Self> {
        Config::new(repr.poly, repr.reps, repr.periods)
    }
}

impl Config {
    /// Validated constructor.
    pub fn new(poly: CentPoly, reps: Vec<Complex64>, periods: Vec<usize>) -> Result<Self> {
        let cfg = Self { poly, reps, periods };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Skips validation; for probing degenerate points such as parabolic orbits.
    pub fn new_unchecked(poly: CentPoly, reps: Vec<Complex64>, periods: Vec<usize>) -> Self {
        Self { poly, reps, periods }
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn orbit(&self, j: usize) -> Vec<Complex64> {
        orbit_points(&self.poly, self.reps[j], self.periods[j])
    }

    pub fn orbits(&self) -> Vec<Vec<Complex64>> {
        (0..self.reps.len()).map(|j| self.orbit(j)).collect()
    }

    /// Smallest distance between points of two different marked orbits.
    pub fn inter_orbit_gap(&self) -> f64 {
        let orbits = self.orbits();
        let mut gap = f64::INFINITY;
        for (j, a) in orbits.iter().enumerate() {
            for b in &orbits[j + 1..] {
                for x in a {
                    for y in b {
                        gap = gap.min((x - y).norm());
                    }
                }
            }
        }
        gap
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.degree();
        if self.reps.len() != n - 1 || self.periods.len() != n - 1 {
            return Err(Error::InvalidConfig(format!(
                "degree {n} needs {} reps and periods, got {} and {}",
                n - 1,
                self.reps.len(),
                self.periods.len()
            )));
        }
        for (j, (&z, &m)) in self.reps.iter().zip(&self.periods).enumerate() {
            if m == 0 {
                return Err(Error::InvalidConfig(format!("orbit {j}: period 0")));
            }
            match exact_period(&self.poly, z, m) {
                Some(d) if d == m => {}
                Some(d) => {
                    return Err(Error::InvalidConfig(format!(
                        "orbit {j}: exact period {d}, expected {m}"
                    )))
                }
                None => {
                    return Err(Error::InvalidConfig(format!(
                        "orbit {j}: {z} does not satisfy p^{m}(z) = z"
                    )))
                }
            }
            let multiplier = orbit_multiplier(&self.poly, &self.orbit(j));
            if near_unity(multiplier, m, m) {
                return Err(Error::InvalidConfig(format!(
                    "orbit {j}: multiplier {multiplier} makes it a multiple orbit"
                )));
            }
        }
        let orbits = self.orbits();
        for j in 0..orbits.len() {
            for k in j + 1..orbits.len() {
                for x in &orbits[j] {
                    for y in &orbits[k] {
                        if (x - y).norm() <= UNITY_TOL * (1.0 + x.norm()) {
                            return Err(Error::InvalidConfig(format!(
                                "orbits {j} and {k} share the point {x}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// One representative per orbit for the period vector, chosen deterministically:
/// orbits of each period in lexicographic order of their smallest point, skipping
/// multiple orbits, taken in the order the periods appear.
pub fn sample_config(p: &CentPoly, periods: &[usize]) -> Result<Config> {
    let n = p.degree();
    if periods.len() != n - 1 {
        return Err(Error::InvalidInput(format!(
            "degree {n} needs {} periods, got {}",
            n - 1,
            periods.len()
        )));
    }
    let mut distinct: Vec<usize> = periods.to_vec();
    distinct.sort_unstable();
    distinct.dedup();

    let mut available: Vec<(usize, Vec<PeriodicOrbit>)> = Vec::new();
    for &m in &distinct {
        let needed = periods.iter().filter(|&&x| x == m).count();
        let all = orbits_of_exact_period(p, m)?;
        let simple: Vec<PeriodicOrbit> = all.iter().filter(|o| !o.multiple_flag).cloned().collect();
        if simple.len() < needed {
            if simple.is_empty() && !all.is_empty() {
                return Err(Error::MultipleOrbitOnly { period: m });
            }
            return Err(Error::InsufficientOrbits { period: m, needed, found: simple.len() });
        }
        available.push((m, simple));
    }

    let mut cursor = vec![0usize; available.len()];
    let mut reps = Vec::with_capacity(periods.len());
    for &m in periods {
        let slot = available.iter().position(|(x, _)| *x == m).unwrap();
        reps.push(available[slot].1[cursor[slot]].points[0]);
        cursor[slot] += 1;
    }
    Config::new(p.clone(), reps, periods.to_vec())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn z3_fixed_points() {
        let p = CentPoly::monomial(3).unwrap();
        let rs = periodic_points(&p, 1).unwrap();
        assert_eq!(rs.total_multiplicity(), 3);
        let orbits = orbits_of_exact_period(&p, 1).unwrap();
        assert_eq!(orbits.len(), 3);
        let want = [(c(-1.0, 0.0), 3.0), (c(0.0, 0.0), 0.0), (c(1.0, 0.0), 3.0)];
        for (o, (z, lambda)) in orbits.iter().zip(want) {
            assert!((o.points[0] - z).norm() < 1e-12);
            assert!((o.multiplier - c(lambda, 0.0)).norm() < 1e-10);
            assert!(!o.multiple_flag);
        }
    }

    #[test]
    fn z3_period_two() {
        let p = CentPoly::monomial(3).unwrap();
        let rs = periodic_points(&p, 2).unwrap();
        assert_eq!(rs.total_multiplicity(), 9);
        // z^9 - z = z (z^8 - 1)
        for r in rs.values() {
            assert!(r.norm() < 1e-12 || (r.powu(8) - 1.0).norm() < 1e-12);
        }
        let orbits = orbits_of_exact_period(&p, 2).unwrap();
        assert_eq!(orbits.len(), 3);
        for o in &orbits {
            assert_eq!(o.points.len(), 2);
            assert!((o.multiplier - c(9.0, 0.0)).norm() < 1e-10);
            assert!((o.points[0].powu(3) - o.points[1]).norm() < 1e-12);
        }
    }

    #[test]
    fn z2_period_two() {
        let p = CentPoly::monomial(2).unwrap();
        let rs = periodic_points(&p, 2).unwrap();
        let mut want = vec![
            c(0.0, 0.0),
            c(1.0, 0.0),
            Complex64::from_polar(1.0, 2.0 * PI / 3.0),
            Complex64::from_polar(1.0, 4.0 * PI / 3.0),
        ];
        want.sort_by(lex_cmp);
        let mut got = rs.values();
        got.sort_by(lex_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12);
        }
        let orbits = orbits_of_exact_period(&p, 2).unwrap();
        assert_eq!(orbits.len(), 1);
        assert!((orbits[0].multiplier - c(4.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn z3_period_four_count() {
        let p = CentPoly::monomial(3).unwrap();
        let orbits = orbits_of_exact_period(&p, 4).unwrap();
        assert_eq!(orbits.len(), (81 - 9) / 4);
        let cfg = sample_config(&p, &[1, 4]).unwrap();
        assert_eq!(cfg.periods, vec![1, 4]);
    }

    #[test]
    fn parabolic_fixed_point_is_multiple() {
        // z^2 + 1/4 has a double fixed point at 1/2 with multiplier 1
        let p = CentPoly::new(vec![c(0.25, 0.0)]).unwrap();
        let orbits = orbits_of_exact_period(&p, 1).unwrap();
        assert_eq!(orbits.len(), 1);
        assert!(orbits[0].multiple_flag);
        assert!(matches!(sample_config(&p, &[1]), Err(Error::MultipleOrbitOnly { period: 1 })));
    }

    #[test]
    fn sample_config_rules() {
        let p = CentPoly::monomial(3).unwrap();
        let cfg = sample_config(&p, &[1, 1]).unwrap();
        assert!((cfg.reps[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(cfg.reps[1].norm() < 1e-12);

        let cfg = sample_config(&p, &[2, 2]).unwrap();
        let o0 = cfg.orbit(0);
        let o1 = cfg.orbit(1);
        assert!(o0.iter().all(|x| o1.iter().all(|y| (x - y).norm() > 0.1)));

        let z2 = CentPoly::monomial(2).unwrap();
        let z2_cfg = sample_config(&z2, &[2]).unwrap();
        assert_eq!(z2_cfg.periods, vec![2]);
        assert!(matches!(sample_config(&p, &[1]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn insufficient_orbits_reported() {
        // p(z) - z = (z - 1/2)^2 (z + 1): one simple fixed point and one double
        let p = CentPoly::new(vec![c(0.25, 0.0), c(0.25, 0.0)]).unwrap();
        let orbits = orbits_of_exact_period(&p, 1).unwrap();
        assert_eq!(orbits.iter().filter(|o| o.multiple_flag).count(), 1);
        assert!(matches!(
            sample_config(&p, &[1, 1]),
            Err(Error::InsufficientOrbits { period: 1, needed: 2, found: 1 })
        ));
        // z^4 has (16 - 4) / 2 = 6 two-cycles
        assert!(sample_config(&CentPoly::monomial(4).unwrap(), &[2, 2, 2]).is_ok());
    }

    #[test]
    fn config_rejects_shared_orbit() {
        let p = CentPoly::monomial(3).unwrap();
        let z = Complex64::from_polar(1.0, PI / 4.0);
        let err = Config::new(p.clone(), vec![z, z.powu(3)], vec![2, 2]).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
        let err = Config::new(p.clone(), vec![c(0.5, 0.0), c(1.0, 0.0)], vec![1, 1]).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
        // a fixed point passed with period 2 has the wrong exact period
        let err = Config::new(p, vec![c(1.0, 0.0), c(0.0, 0.0)], vec![2, 1]).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn config_json_round_trip() {
        let p = CentPoly::monomial(3).unwrap();
        let cfg = sample_config(&p, &[1, 2]).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.starts_with(r#"{"poly":{"degree":3"#));
        let back: Config = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert!(serde_json::from_str::<Config>(
            r#"{"poly":{"degree":3,"coeffs":[[0,0],[0,0]]},"reps":[[0.5,0]],"periods":[1]}"#
        )
        .is_err());
    }

    #[test]
    fn divisor_list() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
    }
}
