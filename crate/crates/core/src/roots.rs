//! All-roots solver for dense complex polynomials.
//!
//! Simultaneous Aberth–Ehrlich iteration from a circular start, a guarded
//! Newton polish, and grouping of near-coincident roots into multiplicities.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::DensePoly;

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub max_iter: usize,
    /// Relative step size below which a root stops moving.
    pub tol: f64,
    /// Bound on the relative backward error `|q(z)| / sum |a_k||z|^k` at completion.
    pub residual_bound: f64,
    /// Roots closer than `cluster_scale * (1 + max|root|)` are merged.
    pub cluster_scale: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { max_iter: 1000, tol: 1e-15, residual_bound: 1e-9, cluster_scale: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// `|q(root)|` for each entry of `roots`.
    pub residuals: Vec<f64>,
    pub cluster_radius: f64,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Roots repeated according to multiplicity.
    pub fn with_multiplicity(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
            .collect()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    /// Smallest distance between two distinct entries (infinite for fewer than two).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.roots.iter().enumerate() {
            for b in &self.roots[i + 1..] {
                best = best.min((a.value - b.value).norm());
            }
        }
        best
    }
}

/// Radius enclosing every root: `2 max_k |a_{d-k}/a_d|^{1/k}`.
pub fn root_radius(q: &DensePoly) -> f64 {
    let a = q.coeffs();
    let d = q.degree();
    let lead = q.leading().norm();
    (1..=d)
        .map(|k| {
            let ratio = a[d - k].norm() / lead;
            let ratio = if k == d { ratio / 2.0 } else { ratio };
            ratio.powf(1.0 / k as f64)
        })
        .fold(0.0, f64::max)
        * 2.0
}

/// Newton correction `q(z)/q'(z)`, evaluated through the reversed polynomial
/// when `|z| > 1` so large degrees do not overflow.
fn newton_ratio(q: &DensePoly, z: Complex64) -> (Complex64, Complex64) {
    if z.norm() <= 1.0 {
        let (f, df) = q.eval_with_derivative(z);
        return (f, df);
    }
    let d = q.degree() as f64;
    let y = z.inv();
    let mut r = Complex64::new(0.0, 0.0);
    let mut dr = Complex64::new(0.0, 0.0);
    for c in q.coeffs() {
        dr = dr * y + r;
        r = r * y + c;
    }
    // q(z) = z^d r(y), q'(z)/q(z) = y (d - y r'(y)/r(y))
    let log_deriv = y * (d - y * dr / r);
    (r, r * log_deriv)
}

pub fn all_roots(q: &DensePoly, opts: &RootOptions) -> Result<RootSet> {
    let d = q.degree();
    if q.is_zero() || d == 0 {
        return Err(Error::InvalidInput("root finding needs degree >= 1".into()));
    }
    if d == 1 {
        let c = q.coeffs();
        let z = -c[0] / c[1];
        return Ok(RootSet {
            roots: vec![Root { value: z, multiplicity: 1 }],
            residuals: vec![q.eval(z).norm()],
            cluster_radius: opts.cluster_scale * (1.0 + z.norm()),
        });
    }

    let mut z = initial_guesses(q);
    aberth_sweeps(q, &mut z, opts);
    for zi in z.iter_mut() {
        *zi = polish(q, *zi);
    }

    let worst = z.iter().map(|&zi| backward_error(q, zi)).fold(0.0, f64::max);
    if !(worst <= opts.residual_bound) {
        return Err(Error::NoConvergence { worst_residual: worst });
    }

    let max_abs = z.iter().map(|zi| zi.norm()).fold(0.0, f64::max);
    let cluster_radius = opts.cluster_scale * (1.0 + max_abs);
    let roots = cluster(&z, cluster_radius);
    let residuals = roots.iter().map(|r| q.eval(r.value).norm()).collect();
    Ok(RootSet { roots, residuals, cluster_radius })
}

fn initial_guesses(q: &DensePoly) -> Vec<Complex64> {
    let d = q.degree();
    let radius = root_radius(q).max(f64::MIN_POSITIVE.sqrt());
    // offset angle keeps the start off the real axis and off symmetric root sets
    let offset = 0.4;
    (0..d)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / d as f64 + offset))
        .collect()
}

fn aberth_sweeps(q: &DensePoly, z: &mut [Complex64], opts: &RootOptions) {
    aberth_with(|w| Some(newton_ratio(q, w)), z, opts.max_iter, opts.tol);
}

/// Simultaneous Aberth iteration for `f` given as `w ↦ (f(w), f'(w))`, assuming
/// `z` holds one approximation per root. Points where `eval` returns `None`
/// are left in place for that sweep.
pub(crate) fn aberth_with<F>(eval: F, z: &mut [Complex64], max_iter: usize, tol: f64)
where
    F: Fn(Complex64) -> Option<(Complex64, Complex64)>,
{
    let d = z.len();
    let mut done = vec![false; d];
    let mut next = z.to_vec();
    for _ in 0..max_iter {
        for i in 0..d {
            next[i] = z[i];
            if done[i] {
                continue;
            }
            let Some((f, df)) = eval(z[i]) else { continue };
            if f == Complex64::new(0.0, 0.0) {
                done[i] = true;
                continue;
            }
            let ratio = f / df;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            next[i] = z[i] - step;
            if step.norm() <= tol * (1.0 + z[i].norm()) {
                done[i] = true;
            }
        }
        z.copy_from_slice(&next);
        if done.iter().all(|&x| x) {
            break;
        }
    }
}

fn backward_error(q: &DensePoly, z: Complex64) -> f64 {
    let scale = q.eval_abs(z);
    if scale == 0.0 {
        return 0.0;
    }
    q.eval(z).norm() / scale
}

/// A few Newton steps, each kept only if the residual drops.
fn polish(q: &DensePoly, mut z: Complex64) -> Complex64 {
    let mut res = q.eval(z).norm();
    for _ in 0..3 {
        let (f, df) = q.eval_with_derivative(z);
        if df == Complex64::new(0.0, 0.0) {
            break;
        }
        let candidate = z - f / df;
        let cres = q.eval(candidate).norm();
        if !(cres < res) {
            break;
        }
        z = candidate;
        res = cres;
    }
    z
}

/// Single-linkage grouping within `radius`; each group becomes its mean.
pub(crate) fn cluster(z: &[Complex64], radius: f64) -> Vec<Root> {
    let n = z.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut k = i;
        while parent[k] != r {
            let up = parent[k];
            parent[k] = r;
            k = up;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += z[i];
                g.2 += 1;
            }
            None => groups.push((r, z[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, count)| Root { value: sum / count as f64, multiplicity: count })
        .collect()
}

/// Newton iteration from `z0` until `|q(z)| < tol` or the step reaches rounding level.
pub fn refine_root(q: &DensePoly, z0: Complex64, tol: f64) -> Result<Complex64> {
    let mut z = z0;
    let mut prev_step: Option<f64> = None;
    let mut slow = 0;
    for _ in 0..100 {
        let (f, df) = q.eval_with_derivative(z);
        if f.norm() < tol {
            return Ok(z);
        }
        if df.norm() == 0.0 || !df.is_finite() {
            return Err(Error::DerivativeVanished { at: z });
        }
        let step = f / df;
        if !step.is_finite() {
            return Err(Error::DerivativeVanished { at: z });
        }
        z -= step;
        let size = step.norm();
        if size <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
            return Ok(z);
        }
        // Near a simple root the step ratio collapses quadratically; a ratio
        // stuck near 1 - 1/k marks a root of multiplicity k.
        if let Some(prev) = prev_step {
            if size < 1e-4 * (1.0 + z.norm()) && size / prev > 0.25 {
                slow += 1;
                if slow >= 3 {
                    return Err(Error::ConvergenceStall { at: z });
                }
            } else {
                slow = 0;
            }
        }
        prev_step = Some(size);
    }
    Err(Error::ConvergenceStall { at: z })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn simple_quadratic_and_cubic() {
        let rs = all_roots(&DensePoly::from_real(&[-1.0, 0.0, 1.0]), &RootOptions::default()).unwrap();
        let v = sorted(rs.values());
        assert_eq!(rs.roots.iter().map(|r| r.multiplicity).collect::<Vec<_>>(), vec![1, 1]);
        assert!((v[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((v[1] - c(1.0, 0.0)).norm() < 1e-14);

        let rs = all_roots(&DensePoly::from_real(&[0.0, -1.0, 0.0, 1.0]), &RootOptions::default()).unwrap();
        let v = sorted(rs.values());
        for (got, want) in v.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn double_root_is_clustered() {
        let rs = all_roots(&DensePoly::from_real(&[4.0, -4.0, 1.0]), &RootOptions::default()).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0].multiplicity, 2);
        assert!((rs.roots[0].value - c(2.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn linear_polynomial() {
        let rs = all_roots(&DensePoly::from_real(&[3.0, 2.0]), &RootOptions::default()).unwrap();
        assert_eq!(rs.roots[0].value, c(-1.5, 0.0));
    }

    #[test]
    fn constant_rejected() {
        assert!(all_roots(&DensePoly::from_real(&[3.0]), &RootOptions::default()).is_err());
    }

    #[test]
    fn no_convergence_reported() {
        let opts = RootOptions { max_iter: 1, ..RootOptions::default() };
        let q = DensePoly::from_real(&[1.0, -3.0, 0.5, 2.0, 0.0, 0.0, 1.0, -1.0, 1.0]);
        match all_roots(&q, &opts) {
            Err(Error::NoConvergence { worst_residual }) => assert!(worst_residual > 1e-9),
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn radius_encloses_roots() {
        let q = DensePoly::from_real(&[-6.0, 11.0, -6.0, 1.0]);
        assert!(root_radius(&q) >= 3.0);
    }

    #[test]
    fn refine_sqrt_two() {
        let q = DensePoly::from_real(&[-2.0, 0.0, 1.0]);
        let z = refine_root(&q, c(1.4, 0.0), 1e-15).unwrap();
        assert!((z - c(2f64.sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn refine_to_eighth_root_of_unity() {
        let mut coeffs = vec![0.0; 10];
        coeffs[1] = -1.0;
        coeffs[9] = 1.0;
        let q = DensePoly::from_real(&coeffs);
        let z = refine_root(&q, c(0.9, 0.1), 1e-14).unwrap();
        let nearest = (0..8)
            .map(|k| Complex64::from_polar(1.0, PI * k as f64 / 4.0))
            .map(|w| (w - z).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-13, "distance {nearest}");
    }

    #[test]
    fn refine_flags_double_root() {
        let q = DensePoly::from_real(&[0.0, 0.0, 1.0]);
        match refine_root(&q, c(0.1, 0.0), 1e-30) {
            Err(Error::DerivativeVanished { .. }) | Err(Error::ConvergenceStall { .. }) => {}
            other => panic!("expected a flagged stall, got {other:?}"),
        }
    }
}
