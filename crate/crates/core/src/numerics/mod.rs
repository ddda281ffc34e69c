//! Numerical utilities shared across modules: quadrature, fits, Krylov
//! solvers, splines, exact linear algebra and finite-difference stencils.

pub mod exact;
pub mod fit;
pub mod quad;
pub mod spline;

use rand::Rng;

/// Fourth-order central difference `f'(x)` from samples at `x ± h`, `x ± 2h`.
#[inline]
pub fn d1_central4(fm2: f64, fm1: f64, fp1: f64, fp2: f64, h: f64) -> f64 {
    (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
}

/// Uniformly distributed point on the unit sphere S^{n-1}.
pub fn random_unit<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> [f64; N] {
    loop {
        let mut v = [0.0; N];
        for c in v.iter_mut() {
            *c = standard_normal(rng);
        }
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-8 {
            for c in v.iter_mut() {
                *c /= n;
            }
            return v;
        }
    }
}

/// Standard normal deviate by the Box–Muller transform.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `n` points log-spaced in `[a, b]`, endpoints included.
pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && n >= 2);
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `n` points evenly spaced in `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
