//! Gauss–Legendre rules and adaptive Simpson quadrature.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let (m, s) = (0.5 * (a + b), 0.5 * (b - a));
    (
        x.iter().map(|t| m + s * t).collect(),
        w.iter().map(|v| v * s).collect(),
    )
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Product rule on S³ in Hopf-type angles, returning unit vectors and weights
/// summing to the volume 2π².
///
/// Coordinates: `(cos χ, sin χ cos θ, sin χ sin θ cos φ, sin χ sin θ sin φ)`
/// with measure `sin²χ sin θ dχ dθ dφ`.
pub fn sphere3_rule(n_chi: usize, n_theta: usize, n_phi: usize) -> Vec<([f64; 4], f64)> {
    let (xc, wc) = gauss_legendre_on(n_chi, 0.0, PI);
    let (xt, wt) = gauss_legendre_on(n_theta, 0.0, PI);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut out = Vec::with_capacity(n_chi * n_theta * n_phi);
    for (c, wcc) in xc.iter().zip(&wc) {
        for (t, wtt) in xt.iter().zip(&wt) {
            for k in 0..n_phi {
                let p = (k as f64 + 0.5) * dphi;
                let v = [
                    c.cos(),
                    c.sin() * t.cos(),
                    c.sin() * t.sin() * p.cos(),
                    c.sin() * t.sin() * p.sin(),
                ];
                out.push((v, wcc * c.sin().powi(2) * wtt * t.sin() * dphi));
            }
        }
    }
    out
}
