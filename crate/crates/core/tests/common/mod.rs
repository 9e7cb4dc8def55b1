//! Reference computations that share no numerical code with the library.

#![allow(dead_code)]

use multmap::orbits::Config;
use multmap::Complex64;

/// `(p(z), p'(z))` for `p = z^n + sum c_k z^k`, by direct power sums.
pub fn eval(coeffs: &[Complex64], n: usize, z: Complex64) -> (Complex64, Complex64) {
    let mut value = z.powu(n as u32);
    let mut deriv = z.powu(n as u32 - 1) * n as f64;
    for (k, c) in coeffs.iter().enumerate() {
        value += c * z.powu(k as u32);
        if k > 0 {
            deriv += c * z.powu(k as u32 - 1) * k as f64;
        }
    }
    (value, deriv)
}

/// Multiplier of the period-`m` point `z`.
pub fn multiplier(coeffs: &[Complex64], n: usize, z: Complex64, m: usize) -> Complex64 {
    let mut w = z;
    let mut lambda = Complex64::new(1.0, 0.0);
    for _ in 0..m {
        let (v, d) = eval(coeffs, n, w);
        lambda *= d;
        w = v;
    }
    lambda
}

/// Plain Newton on `p^m(z) - z`.
pub fn periodic_newton(coeffs: &[Complex64], n: usize, mut z: Complex64, m: usize) -> Complex64 {
    for _ in 0..100 {
        let mut w = z;
        let mut dw = Complex64::new(1.0, 0.0);
        for _ in 0..m {
            let (v, d) = eval(coeffs, n, w);
            dw *= d;
            w = v;
        }
        let step = (w - z) / (dw - 1.0);
        z -= step;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Central finite-difference Jacobian `d lambda_j / d c_k` with real step `h`.
pub fn fd_jacobian(cfg: &Config, h: f64) -> Vec<Vec<Complex64>> {
    let n = cfg.degree();
    let base = cfg.poly.coeffs().to_vec();
    let lambdas = |coeffs: &[Complex64]| -> Vec<Complex64> {
        cfg.reps
            .iter()
            .zip(&cfg.periods)
            .map(|(&z, &m)| multiplier(coeffs, n, periodic_newton(coeffs, n, z, m), m))
            .collect()
    };
    let mut cols = Vec::new();
    for k in 0..base.len() {
        let mut plus = base.clone();
        plus[k] += h;
        let mut minus = base.clone();
        minus[k] -= h;
        let (lp, lm) = (lambdas(&plus), lambdas(&minus));
        cols.push(lp.iter().zip(&lm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    // transpose to rows j
    (0..cfg.reps.len()).map(|j| cols.iter().map(|col| col[j]).collect()).collect()
}
