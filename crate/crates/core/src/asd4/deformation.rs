use super::energy::RadialRule;
use super::instanton::{Gauge, OneInstanton};
use super::{fd_jacobian, pair4, Connection4, OneForm4, Point4, PAIRS4};
use crate::error::{Error, Result};
use crate::exterior8::standard_omegas;
use crate::numerics::spline::QuinticHermite;
use crate::quat::Quat;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TangentLabel {
    Translation(usize),
    Dilation,
    Framing(usize),
}

impl std::fmt::Display for TangentLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TangentLabel::Translation(k) => write!(f, "translation{k}"),
            TangentLabel::Dilation => write!(f, "dilation"),
            TangentLabel::Framing(k) => write!(f, "framing{}", k + 1),
        }
    }
}

type FieldFn = Arc<dyn Fn(Point4) -> OneForm4 + Send + Sync>;

/// An su(2)-valued 1-form on ℝ⁴ given by a sampler, optionally tied to a
/// finite-difference grid spacing.
#[derive(Clone)]
pub struct InfinitesimalDeformation {
    pub label: Option<TangentLabel>,
    pub grid_h: Option<f64>,
    eval: FieldFn,
}

impl std::fmt::Debug for InfinitesimalDeformation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InfinitesimalDeformation").field("label", &self.label).field("grid_h", &self.grid_h).finish()
    }
}

impl InfinitesimalDeformation {
    pub fn new<F: Fn(Point4) -> OneForm4 + Send + Sync + 'static>(label: Option<TangentLabel>, f: F) -> Self {
        InfinitesimalDeformation { label, grid_h: None, eval: Arc::new(f) }
    }

    pub fn zero() -> Self {
        Self::new(None, |_| [Quat::ZERO; 4])
    }

    pub fn with_grid(mut self, h: f64) -> Self {
        self.grid_h = Some(h);
        self
    }

    pub fn eval(&self, x: Point4) -> OneForm4 {
        (self.eval)(x)
    }

    /// Pointwise su(2) norm `|a|`.
    pub fn norm_at(&self, x: Point4) -> f64 {
        one_form_norm_sqr(&self.eval(x)).sqrt()
    }

    /// Components scaled by √2, so their Euclidean norm is `|a|`.
    pub fn components(&self, x: Point4) -> Vec<f64> {
        self.eval(x).iter().flat_map(|q| q.to_array()).map(|v| v * std::f64::consts::SQRT_2).collect()
    }
}

/// `Σ_μ 2|a_μ|²`.
pub fn one_form_norm_sqr(a: &OneForm4) -> f64 {
    a.iter().map(|q| q.su2_norm_sqr()).sum()
}

/// Radial profile φ of the framing modes `a = d_I(φ(r) x̂̄ξx̂)`, obtained by
/// solving the Coulomb condition `d_I^* d_I u = 0` on a logarithmic grid.
///
/// In `s = ln r` the condition reads `−(e^{2s}φ_s)_s + e^{2s} W φ = 0` with
/// `W = 8λ⁴/(r² + λ²)²`; φ ~ r² at the centre and `rφ' = 2(1 − φ)` at the
/// outer radius. Beyond `r = λ` the profile is carried as `1 − φ` so that the
/// decaying tail keeps its relative precision.
#[derive(Clone, Debug)]
pub struct FramingProfile {
    inner: QuinticHermite,
    outer: QuinticHermite,
    s_min: f64,
    s_max: f64,
    s_mid: f64,
}

impl FramingProfile {
    /// Solve on `n` nodes and on the once-refined grid, then combine by
    /// Richardson extrapolation (the discretization is second order).
    pub fn solve(scale: f64, n: usize) -> Result<Self> {
        if n < 5 {
            return Err(Error::TooFewValues { needed: 5, got: n });
        }
        if !(scale > 0.0) {
            return Err(Error::NonPositiveScale(scale));
        }
        let (s_min, s_max) = ((1e-3 * scale).ln(), (1e3 * scale).ln());
        let (phi_c, psi_c) = Self::solve_grid(scale, s_min, s_max, n);
        let (phi_f, psi_f) = Self::solve_grid(scale, s_min, s_max, 2 * n - 1);
        let ds = (s_max - s_min) / (n - 1) as f64;
        let l4 = scale.powi(4);
        let w: Vec<f64> = (0..n)
            .map(|i| {
                let r2 = (2.0 * (s_min + ds * i as f64)).exp();
                8.0 * l4 / (r2 + scale * scale).powi(2)
            })
            .collect();
        let extrapolate = |c: &[f64], f: &[f64]| -> Vec<f64> { (0..n).map(|i| (4.0 * f[2 * i] - c[i]) / 3.0).collect() };
        let phi = extrapolate(&phi_c, &phi_f);
        let psi = extrapolate(&psi_c, &psi_f);
        let d1 = QuinticHermite::derivative4(&phi, ds);
        // φ_ss = Wφ − 2φ_s from the equation itself
        let d2 = (0..n).map(|i| w[i] * phi[i] - 2.0 * d1[i]).collect();
        let inner = QuinticHermite::uniform(s_min, ds, phi, d1, d2);
        let d1 = QuinticHermite::derivative4(&psi, ds);
        let d2 = (0..n).map(|i| w[i] * (psi[i] - 1.0) - 2.0 * d1[i]).collect();
        let outer = QuinticHermite::uniform(s_min, ds, psi, d1, d2);
        Ok(FramingProfile { inner, outer, s_min, s_max, s_mid: scale.ln() })
    }

    /// Finite-volume solve for φ and for `1 − φ` (same matrix, two right-hand sides).
    fn solve_grid(scale: f64, s_min: f64, s_max: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let ds = (s_max - s_min) / (n - 1) as f64;
        let s: Vec<f64> = (0..n).map(|i| s_min + ds * i as f64).collect();
        let l4 = scale.powi(4);
        let p = |s: f64| (2.0 * s).exp();
        let q = |s: f64| {
            let r2 = (2.0 * s).exp();
            r2 * 8.0 * l4 / (r2 + scale * scale).powi(2)
        };
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n - 1];
        let mut rhs_psi = vec![0.0; n];
        for i in 0..n - 1 {
            let pm = p(0.5 * (s[i] + s[i + 1])) / ds;
            diag[i] += pm;
            diag[i + 1] += pm;
            off[i] = -pm;
        }
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 * ds } else { ds };
            diag[i] += w * q(s[i]);
            rhs_psi[i] = w * q(s[i]);
        }
        diag[0] += 2.0 * p(s[0]);
        diag[n - 1] += 2.0 * p(s[n - 1]);
        rhs_psi[0] += 2.0 * p(s[0]);
        let mut rhs_phi = vec![0.0; n];
        rhs_phi[n - 1] = 2.0 * p(s[n - 1]);
        (
            solve_symmetric_tridiagonal(&diag, &off, &rhs_phi),
            solve_symmetric_tridiagonal(&diag, &off, &rhs_psi),
        )
    }

    /// `(φ(r), φ'(r))`, extended by the leading asymptotics outside the grid.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let s = r.ln();
        if s < self.s_min {
            let r0 = self.s_min.exp();
            let v0 = self.inner.eval(self.s_min);
            (v0 * (r / r0).powi(2), 2.0 * v0 * r / (r0 * r0))
        } else if s > self.s_max {
            let r1 = self.s_max.exp();
            let d = self.outer.eval(self.s_max);
            (1.0 - d * (r1 / r).powi(2), 2.0 * d * r1 * r1 / r.powi(3))
        } else if s <= self.s_mid {
            let (v, vs) = self.inner.eval_d(s);
            (v, vs / r)
        } else {
            let (v, vs) = self.outer.eval_d(s);
            (1.0 - v, -vs / r)
        }
    }
}

/// Thomas algorithm for a symmetric tridiagonal system with diagonal `d` and
/// off-diagonal `e`.
fn solve_symmetric_tridiagonal(d: &[f64], e: &[f64], b: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut c = vec![0.0; n];
    let mut x = b.to_vec();
    let mut m = d[0];
    x[0] /= m;
    for i in 1..n {
        c[i - 1] = e[i - 1] / m;
        m = d[i] - e[i - 1] * c[i - 1];
        x[i] = (x[i] - e[i - 1] * x[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// The 8 framed-moduli tangent fields of a regular-gauge one-instanton:
/// translations `ι_{∂ν}F`, the dilation `∂_λA` and three framing modes.
pub fn moduli_tangent_basis(inst: &OneInstanton) -> Result<Vec<InfinitesimalDeformation>> {
    if inst.gauge != Gauge::Regular {
        return Err(Error::InvalidArgument("tangent basis is built in the regular gauge".into()));
    }
    let mut out = Vec::with_capacity(8);
    for nu in 0..4 {
        let i = *inst;
        out.push(InfinitesimalDeformation::new(Some(TangentLabel::Translation(nu)), move |x| {
            let f = i.curvature(x);
            std::array::from_fn(|mu| match nu.cmp(&mu) {
                std::cmp::Ordering::Less => f[pair4(nu, mu)],
                std::cmp::Ordering::Greater => -f[pair4(mu, nu)],
                std::cmp::Ordering::Equal => Quat::ZERO,
            })
        }));
    }
    let i = *inst;
    out.push(InfinitesimalDeformation::new(Some(TangentLabel::Dilation), move |x| {
        let y = i.local(x);
        let d = y.norm_sqr() + i.scale * i.scale;
        let c = -2.0 * i.scale / (d * d);
        std::array::from_fn(|mu| i.framing.adjoint((y.conj() * Quat::basis(mu)).im().scale(c)))
    }));
    let profile = Arc::new(FramingProfile::solve(inst.scale, 6001)?);
    let unframed = OneInstanton { framing: Quat::ONE, ..*inst };
    for k in 0..3 {
        let prof = profile.clone();
        let xi = Quat::basis(k + 1);
        let i = *inst;
        out.push(InfinitesimalDeformation::new(Some(TangentLabel::Framing(k)), move |x| {
            let y = i.local(x);
            let r2 = y.norm_sqr();
            if r2 < 1e-300 {
                return [Quat::ZERO; 4];
            }
            let r = r2.sqrt();
            let (phi, dphi) = prof.eval(r);
            let psi = phi / r2;
            let dpsi = dphi / r2 - 2.0 * phi / (r2 * r);
            let w = y.conj() * xi * y;
            let u = w.scale(psi);
            let a = unframed.potential(x);
            let yv = y.to_array();
            std::array::from_fn(|mu| {
                let e = Quat::basis(mu);
                let dw = e.conj() * xi * y + y.conj() * xi * e;
                let du = w.scale(dpsi * yv[mu] / r) + dw.scale(psi);
                i.framing.adjoint(du + a[mu].bracket(u))
            })
        }));
    }
    Ok(out)
}

/// `(d*_A a, √2·d⁺_A a)` evaluated by finite differences of `a`. The factor
/// √2 makes `δ*δ` equal the rough Laplacian on 1-forms.
#[derive(Clone)]
pub struct DeltaI<C: Connection4 + Clone> {
    connection: C,
    a: InfinitesimalDeformation,
    h: f64,
}

impl<C: Connection4 + Clone> DeltaI<C> {
    /// Returns `(d*a, [s₁, s₂, s₃])` with `s₁ = (d_Aa)₀₁ + (d_Aa)₂₃` etc., so
    /// `|√2 d⁺a|² = Σ 2|s_i|²`.
    pub fn eval(&self, x: Point4) -> (Quat, [Quat; 3]) {
        let av = self.a.eval(x);
        let da = fd_jacobian(|p| self.a.eval(p), x, self.h);
        let pot = self.connection.potential(x);
        let mut div = Quat::ZERO;
        for mu in 0..4 {
            div -= da[mu][mu] + pot[mu].bracket(av[mu]);
        }
        let f: [Quat; 6] = PAIRS4.map(|(m, n)| da[m][n] - da[n][m] + pot[m].bracket(av[n]) + av[m].bracket(pot[n]));
        (div, [f[0] + f[5], f[1] - f[4], f[2] + f[3]])
    }

    /// Components `√2·(d*a, s₁, s₂, s₃)`, whose Euclidean norm is `|δ_I a|`.
    pub fn components(&self, x: Point4) -> Vec<f64> {
        let (d, s) = self.eval(x);
        std::iter::once(d).chain(s).flat_map(|q| q.to_array()).map(|v| v * std::f64::consts::SQRT_2).collect()
    }

    /// `|δ_I a|` in the su(2) norm.
    pub fn norm_at(&self, x: Point4) -> f64 {
        let (d, s) = self.eval(x);
        (d.su2_norm_sqr() + s.iter().map(|q| q.su2_norm_sqr()).sum::<f64>()).sqrt()
    }
}

/// Deformation operator `δ_I a = (d*_I a, √2·d⁺_I a)` via central differences
/// with spacing `h`.
pub fn delta_i_apply<C: Connection4 + Clone>(i: &C, a: &InfinitesimalDeformation, h: f64) -> Result<DeltaI<C>> {
    if let Some(ha) = a.grid_h {
        if (ha - h).abs() > 1e-15 * h.max(ha) {
            return Err(Error::IncompatibleGrids(format!("field spacing {ha} vs operator spacing {h}")));
        }
    }
    Ok(DeltaI { connection: i.clone(), a: a.clone(), h })
}

/// `J_ω a := a ∘ J_ω` for the standard self-dual ω_k, i.e.
/// `(Ja)_μ = Σ_ν ω_k(e_μ, e_ν) a_ν`.
pub fn quaternionic_action(k: usize, a: &InfinitesimalDeformation) -> InfinitesimalDeformation {
    let om = &standard_omegas::<f64>()[k];
    let w: [[f64; 4]; 4] = std::array::from_fn(|m| std::array::from_fn(|n| if m == n { 0.0 } else { om.coeff(&[m, n]) }));
    let a = a.clone();
    InfinitesimalDeformation::new(None, move |x| {
        let v = a.eval(x);
        std::array::from_fn(|m| (0..4).fold(Quat::ZERO, |acc, n| acc + v[n].scale(w[m][n])))
    })
}

/// Gram matrix of L² inner products.
pub fn gram_matrix(basis: &[InfinitesimalDeformation], rule: &RadialRule) -> Vec<Vec<f64>> {
    let n = basis.len();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = super::energy::l2_inner(|x| basis[i].eval(x), |x| basis[j].eval(x), rule);
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}
