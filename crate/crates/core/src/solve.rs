//! The flat model operator `𝐋a = (d*_A a, 2π₇ d_A a)` on separable fields
//! over ℝ⁴ × ℝ⁴, its adjoint and Weitzenböck identity, the quadratic term,
//! and a fixed-point solve of the reduced gluing equation.
//!
//! A separable field is `cos(k t) f(y) + sin(k t) g(y)` with `t = x⁰` and
//! `y` the fiber coordinate, so `∂_t` acts by the symbol `(f, g) ↦ (k g, −k f)`.
//! Fiber derivatives use central differences of spacing `h`.

use crate::asd4::{curvature_from, pair4, Connection4, OneInstanton, Point4};
use crate::error::{Error, Result};
use crate::exterior8::{Proj7F64, PAIRS};
use crate::glue::{chi, chi_d, GluingConfig, GraftedConnection};
use crate::numerics::geomspace;
use crate::numerics::spline::CubicSpline;
use crate::quat::Quat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Finite-difference order used for fiber derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stencil {
    Second,
    Fourth,
}

type Sampler = Arc<dyn Fn(Point4) -> Vec<Quat> + Send + Sync>;

/// Number of quaternion components of a 1-form on ℝ⁸.
pub const ONE_FORM_DIM: usize = 8;
/// `Ω⁰ ⊕ Λ²`: one scalar slot followed by the 28 `e^{ij}` slots.
pub const TARGET_DIM: usize = 29;

#[derive(Clone)]
pub struct SeparableField {
    pub k: u32,
    pub dim: usize,
    pub h: f64,
    pub stencil: Stencil,
    data: Sampler,
}

impl std::fmt::Debug for SeparableField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SeparableField").field("k", &self.k).field("dim", &self.dim).field("h", &self.h).finish()
    }
}

impl SeparableField {
    pub const DEFAULT_H: f64 = 0.02;

    /// `f` returns `2·dim` values: the cos coefficients followed by the sin
    /// coefficients.
    pub fn new<F: Fn(Point4) -> Vec<Quat> + Send + Sync + 'static>(k: u32, dim: usize, f: F) -> Self {
        SeparableField { k, dim, h: Self::DEFAULT_H, stencil: Stencil::Second, data: Arc::new(f) }
    }

    pub fn from_parts<F, G>(k: u32, dim: usize, cos: F, sin: G) -> Self
    where
        F: Fn(Point4) -> Vec<Quat> + Send + Sync + 'static,
        G: Fn(Point4) -> Vec<Quat> + Send + Sync + 'static,
    {
        Self::new(k, dim, move |y| {
            let mut v = cos(y);
            v.extend(sin(y));
            v
        })
    }

    /// Pullback of a fiber 1-form, placed in the cos slot.
    pub fn from_fiber_one_form<F: Fn(Point4) -> [Quat; 4] + Send + Sync + 'static>(k: u32, a: F) -> Self {
        Self::new(k, ONE_FORM_DIM, move |y| {
            let a = a(y);
            let mut v = vec![Quat::ZERO; 2 * ONE_FORM_DIM];
            v[4..8].copy_from_slice(&a);
            v
        })
    }

    pub fn zero(k: u32, dim: usize) -> Self {
        Self::new(k, dim, move |_| vec![Quat::ZERO; 2 * dim])
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_stencil(mut self, s: Stencil) -> Self {
        self.stencil = s;
        self
    }

    pub fn with_mode(mut self, k: u32) -> Self {
        self.k = k;
        self
    }

    pub fn eval(&self, y: Point4) -> Vec<Quat> {
        (self.data)(y)
    }

    /// Value at base coordinate `t`.
    pub fn at(&self, t: f64, y: Point4) -> Vec<Quat> {
        let v = self.eval(y);
        let (c, s) = ((self.k as f64 * t).cos(), (self.k as f64 * t).sin());
        (0..self.dim).map(|i| v[i].scale(c) + v[self.dim + i].scale(s)).collect()
    }

    /// `(|f|² + |g|²)^{1/2}` in the su(2) norm.
    pub fn norm_at(&self, y: Point4) -> f64 {
        self.eval(y).iter().map(|q| q.su2_norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self, points: &[Point4]) -> f64 {
        points.par_iter().map(|&y| self.norm_at(y)).reduce(|| 0.0, f64::max)
    }

    fn compatible(&self, o: &SeparableField) -> Result<()> {
        if self.k != o.k || self.dim != o.dim || self.h != o.h {
            return Err(Error::IncompatibleGrids(format!(
                "(k={}, dim={}, h={}) vs (k={}, dim={}, h={})",
                self.k, self.dim, self.h, o.k, o.dim, o.h
            )));
        }
        Ok(())
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: f64, other: &SeparableField, beta: f64) -> Result<SeparableField> {
        self.compatible(other)?;
        let (a, b) = (self.data.clone(), other.data.clone());
        Ok(SeparableField { data: Arc::new(move |y| a(y).iter().zip(b(y)).map(|(p, q)| p.scale(alpha) + q.scale(beta)).collect()), ..self.clone() })
    }

    fn derived(&self, dim: usize, f: impl Fn(Point4) -> Vec<Quat> + Send + Sync + 'static) -> SeparableField {
        SeparableField { dim, data: Arc::new(f), ..self.clone() }
    }
}

fn shifted(y: Point4, axis: usize, t: f64) -> Point4 {
    let mut p = y;
    p[axis] += t;
    p
}

fn lin(terms: &[(f64, &Vec<Quat>)]) -> Vec<Quat> {
    let n = terms[0].1.len();
    (0..n).map(|i| terms.iter().fold(Quat::ZERO, |acc, (c, v)| acc + v[i].scale(*c))).collect()
}

/// `∂_m` of the raw data (both slots), `m` indexing ℝ⁸.
fn partial(data: &Sampler, k: u32, dim: usize, h: f64, st: Stencil, y: Point4, m: usize) -> Vec<Quat> {
    match m {
        0 => {
            let v = data(y);
            let k = k as f64;
            (0..2 * dim).map(|i| if i < dim { v[dim + i].scale(k) } else { v[i - dim].scale(-k) }).collect()
        }
        1..=3 => vec![Quat::ZERO; 2 * dim],
        _ => {
            let ax = m - 4;
            let f = |t: f64| data(shifted(y, ax, t));
            match st {
                Stencil::Second => lin(&[(0.5 / h, &f(h)), (-0.5 / h, &f(-h))]),
                Stencil::Fourth => {
                    let c = 1.0 / (12.0 * h);
                    lin(&[(c, &f(-2.0 * h)), (-8.0 * c, &f(-h)), (8.0 * c, &f(h)), (-c, &f(2.0 * h))])
                }
            }
        }
    }
}

/// `∂_m²` of the raw data by direct second differences.
fn second_partial(data: &Sampler, k: u32, dim: usize, h: f64, st: Stencil, y: Point4, m: usize) -> Vec<Quat> {
    match m {
        0 => data(y).iter().map(|q| q.scale(-((k * k) as f64))).collect(),
        1..=3 => vec![Quat::ZERO; 2 * dim],
        _ => {
            let ax = m - 4;
            let f = |t: f64| data(shifted(y, ax, t));
            let h2 = h * h;
            match st {
                Stencil::Second => lin(&[(1.0 / h2, &f(h)), (-2.0 / h2, &f(0.0)), (1.0 / h2, &f(-h))]),
                Stencil::Fourth => {
                    let c = 1.0 / (12.0 * h2);
                    lin(&[(-c, &f(-2.0 * h)), (16.0 * c, &f(-h)), (-30.0 * c, &f(0.0)), (16.0 * c, &f(h)), (-c, &f(2.0 * h))])
                }
            }
        }
    }
}

/// 𝐋, 𝐋* and the Weitzenböck right-hand side for a connection pulled back
/// from the fiber.
#[derive(Clone)]
pub struct ModelOperator {
    conn: Arc<dyn Connection4>,
    /// Smallest length scale of the connection; fields must resolve it.
    pub scale: f64,
    proj: Arc<Proj7F64>,
}

impl ModelOperator {
    /// Grid spacing must not exceed `scale / RESOLUTION`.
    pub const RESOLUTION: f64 = 8.0;

    pub fn new<C: Connection4 + 'static>(conn: C, scale: f64) -> Self {
        ModelOperator { conn: Arc::new(conn), scale, proj: Arc::new(Proj7F64::standard()) }
    }

    pub fn instanton(i: &OneInstanton) -> Self {
        Self::new(*i, i.scale)
    }

    pub fn grafted(g: &GraftedConnection) -> Self {
        Self::new(*g, g.config.lambda)
    }

    pub fn flat() -> Self {
        Self::new(crate::asd4::GaugeField4::flat(), 1.0)
    }

    fn check(&self, f: &SeparableField, dim: usize) -> Result<()> {
        if f.dim != dim {
            return Err(Error::InvalidArgument(format!("expected {dim} components, got {}", f.dim)));
        }
        let bound = self.scale / Self::RESOLUTION;
        if f.h > bound {
            return Err(Error::GridTooCoarse { h: f.h, bound });
        }
        Ok(())
    }

    fn potential8(&self, y: Point4) -> [Quat; 8] {
        let a = self.conn.potential(y);
        std::array::from_fn(|m| if m < 4 { Quat::ZERO } else { a[m - 4] })
    }

    /// `∇_m v = ∂_m v + [A_m, v]` for every `m`, both slots.
    fn covariant(&self, f: &SeparableField, y: Point4) -> Vec<Vec<Quat>> {
        let a = self.potential8(y);
        let v = f.eval(y);
        (0..8)
            .map(|m| {
                let mut d = partial(&f.data, f.k, f.dim, f.h, f.stencil, y, m);
                if m >= 4 {
                    for (di, vi) in d.iter_mut().zip(&v) {
                        *di += a[m].bracket(*vi);
                    }
                }
                d
            })
            .collect()
    }

    /// `𝐋a = (d*_A a, 2π₇ d_A a)`.
    pub fn apply(&self, f: &SeparableField) -> Result<SeparableField> {
        self.check(f, ONE_FORM_DIM)?;
        let (op, g) = (self.clone(), f.clone());
        Ok(f.derived(TARGET_DIM, move |y| {
            let cov = op.covariant(&g, y);
            let mut out = vec![Quat::ZERO; 2 * TARGET_DIM];
            for s in 0..2 {
                let off = s * ONE_FORM_DIM;
                out[s * TARGET_DIM] = -(0..8).fold(Quat::ZERO, |acc, m| acc + cov[m][off + m]);
                let mut w = [Quat::ZERO; 28];
                for (p, &(m, n)) in PAIRS.iter().enumerate() {
                    w[p] = cov[m][off + n] - cov[n][off + m];
                }
                let w = op.proj.apply_quat(&w);
                for p in 0..28 {
                    out[s * TARGET_DIM + 1 + p] = w[p].scale(2.0);
                }
            }
            out
        }))
    }

    /// `𝐋*(f, ω)_n = ∇_n f − 2 Σ_m ∇_m (π₇ω)_{mn}`.
    pub fn adjoint(&self, g: &SeparableField) -> Result<SeparableField> {
        self.check(g, TARGET_DIM)?;
        let proj = self.proj.clone();
        let projected = g.derived(TARGET_DIM, {
            let g = g.clone();
            move |y| {
                let mut v = g.eval(y);
                for s in 0..2 {
                    let base = s * TARGET_DIM + 1;
                    let w: [Quat; 28] = std::array::from_fn(|p| v[base + p]);
                    v[base..base + 28].copy_from_slice(&proj.apply_quat(&w));
                }
                v
            }
        });
        let op = self.clone();
        Ok(g.derived(ONE_FORM_DIM, move |y| {
            let cov = op.covariant(&projected, y);
            let mut out = vec![Quat::ZERO; 2 * ONE_FORM_DIM];
            for s in 0..2 {
                let off = s * TARGET_DIM;
                for n in 0..8 {
                    let mut acc = cov[n][off];
                    for m in 0..8 {
                        if m == n {
                            continue;
                        }
                        let (p, sign) = if m < n { (crate::exterior8::pair_index(m, n), 1.0) } else { (crate::exterior8::pair_index(n, m), -1.0) };
                        acc -= cov[m][off + 1 + p].scale(2.0 * sign);
                    }
                    out[s * ONE_FORM_DIM + n] = acc;
                }
            }
            out
        }))
    }

    /// `k² a + diag(δδ*, δ*δ) a`. On the base block `δδ* = ∇*∇` because
    /// `F⁺ = 0`; on the fiber block `δ*δ a_m = ∇*∇ a_m − 2 Σ_n [F_mn, a_n]`.
    /// Second derivatives come from direct second differences and the
    /// connection and curvature terms from the analytic jacobian.
    pub fn weitzenboeck_rhs(&self, f: &SeparableField) -> Result<SeparableField> {
        self.check(f, ONE_FORM_DIM)?;
        let (op, g) = (self.clone(), f.clone());
        Ok(f.derived(ONE_FORM_DIM, move |y| {
            let a = op.potential8(y);
            let da = op.conn.jacobian(y);
            let curv = curvature_from(&op.conn.potential(y), &da);
            let v = g.eval(y);
            let mut out: Vec<Quat> = second_partial(&g.data, g.k, g.dim, g.h, g.stencil, y, 0).iter().map(|q| -*q).collect();
            for s in 0..2 {
                let base = s * ONE_FORM_DIM + 4;
                for m in 0..4 {
                    for n in (0..4).filter(|&n| n != m) {
                        let fmn = if m < n { curv[pair4(m, n)] } else { -curv[pair4(n, m)] };
                        out[base + m] -= fmn.bracket(v[base + n]).scale(2.0);
                    }
                }
            }
            for m in 4..8 {
                let d1 = partial(&g.data, g.k, g.dim, g.h, g.stencil, y, m);
                let d2 = second_partial(&g.data, g.k, g.dim, g.h, g.stencil, y, m);
                let dam = da[m - 4][m - 4];
                for i in 0..out.len() {
                    let lap = d2[i] + a[m].bracket(d1[i]).scale(2.0) + dam.bracket(v[i]) + a[m].bracket(a[m].bracket(v[i]));
                    out[i] -= lap;
                }
            }
            out
        }))
    }

    /// `sup|𝐋*𝐋f − (k² + diag(δδ*, δ*δ))f|` over `points`, relative to the
    /// sup of the right-hand side.
    pub fn weitzenboeck_check(&self, f: &SeparableField, points: &[Point4]) -> Result<WeitzenboeckReport> {
        let lhs = self.adjoint(&self.apply(f)?)?;
        let rhs = self.weitzenboeck_rhs(f)?;
        let diff = lhs.combine(1.0, &rhs, -1.0)?;
        let f_norm = f.sup_norm(points);
        let residual_abs = diff.sup_norm(points);
        let rhs_norm = rhs.sup_norm(points);
        Ok(WeitzenboeckReport {
            residual: residual_abs / rhs_norm,
            residual_abs,
            lhs_norm: lhs.sup_norm(points),
            rhs_norm,
            f_norm,
            h: f.h,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeitzenboeckReport {
    pub residual: f64,
    pub residual_abs: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub f_norm: f64,
    pub h: f64,
}

/// `𝐋_I f` for the pulled-back instanton.
pub fn l_model_apply(i: &OneInstanton, f: &SeparableField) -> Result<SeparableField> {
    ModelOperator::instanton(i).apply(f)
}

pub fn weitzenboeck_check(i: &OneInstanton, f: &SeparableField, points: &[Point4]) -> Result<WeitzenboeckReport> {
    ModelOperator::instanton(i).weitzenboeck_check(f, points)
}

/// `Q(a₁, a₂) = ½ π₇([a₁ ∧ a₂])` in the 2-form slots; k = 0 fields only,
/// since products of nonzero modes leave the separable class.
pub fn quadratic_apply(a1: &SeparableField, a2: &SeparableField) -> Result<SeparableField> {
    a1.compatible(a2)?;
    if a1.dim != ONE_FORM_DIM {
        return Err(Error::InvalidArgument(format!("expected 1-forms, got {} components", a1.dim)));
    }
    if a1.k != 0 {
        return Err(Error::InvalidArgument("quadratic term is defined on the k = 0 sector".into()));
    }
    let proj = Proj7F64::standard();
    let (f, g) = (a1.clone(), a2.clone());
    Ok(a1.derived(TARGET_DIM, move |y| {
        let (u, v) = (f.eval(y), g.eval(y));
        let w: [Quat; 28] = std::array::from_fn(|p| {
            let (m, n) = PAIRS[p];
            (u[m].bracket(v[n]) - u[n].bracket(v[m])).scale(0.5)
        });
        let w = proj.apply_quat(&w);
        let mut out = vec![Quat::ZERO; 2 * TARGET_DIM];
        out[1..29].copy_from_slice(&w);
        out
    }))
}

fn smoothstep_at(t: f64) -> (f64, f64) {
    (chi(t + 1.0), chi_d(t + 1.0))
}

/// The k = 0 gluing equation restricted to `a = h(r) Im(y dȳ)`:
/// `−r h' − 4h + 4r²G h + 2r²h² + e = 0`, with `G = χ⁺ g` the grafted
/// profile and `e` the grafted error, discretised at cell midpoints of a
/// geometric radial grid.
#[derive(Clone, Debug)]
pub struct RadialModel {
    pub config: GluingConfig,
    pub r: Vec<f64>,
    pub rm: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    /// Unit dilation mode in the weighted domain inner product.
    kernel: Vec<f64>,
    weights: Vec<f64>,
    error: Vec<f64>,
    grafted: Vec<f64>,
}

impl RadialModel {
    pub const DEFAULT_NODES: usize = 2000;
    pub const R_MAX: f64 = 16.0;
    /// Kernel fraction above which the right inverse refuses its input.
    pub const KERNEL_THRESHOLD: f64 = 0.5;
    /// `|a| = √6 r|h|` for `a = h Im(y dȳ)`; targets are measured as `√6|ψ|`.
    pub const PATTERN_NORM: f64 = 2.449_489_742_783_178;

    pub fn new(config: &GluingConfig, n: usize) -> Result<Self> {
        let config = config.validated()?;
        if n < 16 {
            return Err(Error::TooFewValues { needed: 16, got: n });
        }
        let lam = config.lambda;
        let r = geomspace(1e-3 * lam, Self::R_MAX, n);
        let rm: Vec<f64> = r.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let (mut diag, mut upper, mut error, mut grafted) = (vec![], vec![], vec![], vec![]);
        for (j, &x) in rm.iter().enumerate() {
            let dr = r[j + 1] - r[j];
            let (s, ds) = smoothstep_at(2.0 * x / config.sigma - 1.0);
            let (c, dc) = (1.0 - s, -2.0 * ds / config.sigma);
            let g = lam * lam / (x * x * (x * x + lam * lam));
            let gg = c * g;
            let mid = 0.5 * (-4.0 + 4.0 * x * x * gg);
            let (a, b) = (x / dr + mid, -x / dr + mid);
            diag.push(a);
            upper.push(b);
            error.push(c * 2.0 * x * x * g * g * (c - 1.0) - x * dc * g);
            grafted.push(gg);
        }
        let weights: Vec<f64> = (0..n)
            .map(|i| {
                let d = if i == 0 { r[1] - r[0] } else if i == n - 1 { r[n - 1] - r[n - 2] } else { 0.5 * (r[i + 1] - r[i - 1]) };
                6.0 * d * r[i].powi(5)
            })
            .collect();
        // The discrete dilation mode: the homogeneous solution of the
        // recurrence, a second-order approximation of 2λ/(r² + λ²)².
        let mut kappa = vec![2.0 / lam.powi(3); n];
        for j in 0..n - 1 {
            kappa[j + 1] = -diag[j] * kappa[j] / upper[j];
        }
        let kn = (kappa.iter().zip(&weights).map(|(k, w)| w * k * k).sum::<f64>()).sqrt();
        let kernel = kappa.iter().map(|k| k / kn).collect();
        Ok(RadialModel { config, r, rm, diag, upper, kernel, weights, error, grafted })
    }

    pub fn nodes(&self) -> usize {
        self.r.len()
    }

    /// Grafted error `e(r)` at the midpoints.
    pub fn error_profile(&self) -> &[f64] {
        &self.error
    }

    pub fn grafted_profile(&self) -> &[f64] {
        &self.grafted
    }

    pub fn kernel_mode(&self) -> &[f64] {
        &self.kernel
    }

    /// `L h = −r h' − 4h + 4r²G h` at the midpoints.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rm.len()).map(|j| self.diag[j] * x[j] + self.upper[j] * x[j + 1]).collect()
    }

    /// `Q(h) = 2r²h²` at the midpoints.
    pub fn quadratic(&self, x: &[f64]) -> Vec<f64> {
        self.rm.iter().enumerate().map(|(j, &m)| 2.0 * m * m * (0.5 * (x[j] + x[j + 1])).powi(2)).collect()
    }

    /// `Q(h₁, h₂) = 2r² h₁h₂`.
    pub fn quadratic_pair(&self, x: &[f64], z: &[f64]) -> Vec<f64> {
        self.rm.iter().enumerate().map(|(j, &m)| 2.0 * m * m * 0.5 * (x[j] + x[j + 1]) * 0.5 * (z[j] + z[j + 1])).collect()
    }

    /// `x − ⟨x, κ⟩ κ` in the weighted domain inner product.
    pub fn project_kernel(&self, x: &[f64]) -> Vec<f64> {
        let c: f64 = x.iter().zip(&self.weights).zip(&self.kernel).map(|((a, w), k)| a * w * k).sum();
        x.iter().zip(&self.kernel).map(|(a, k)| a - c * k).collect()
    }

    fn domain_weight(&self, r: f64) -> f64 {
        let lam = self.config.lambda;
        if r <= lam.sqrt() {
            lam + r
        } else {
            r
        }
    }

    /// `max w_{−1}(r)|a|` with `|a| = √6 r|h|`.
    pub fn domain_norm(&self, x: &[f64]) -> f64 {
        self.r.iter().zip(x).map(|(&r, v)| self.domain_weight(r) * r * v.abs() * Self::PATTERN_NORM).fold(0.0, f64::max)
    }

    /// `max w_{−2}(r)·√6|ψ|` at the midpoints.
    pub fn target_norm(&self, y: &[f64]) -> f64 {
        self.rm.iter().zip(y).map(|(&r, v)| self.domain_weight(r).powi(2) * v.abs() * Self::PATTERN_NORM).fold(0.0, f64::max)
    }

    fn target_products(&self, y: &[f64]) -> (f64, f64, f64) {
        let (mut yk, mut yy, mut kk) = (0.0, 0.0, 0.0);
        for j in 0..self.rm.len() {
            let w = 0.5 * (self.weights[j] + self.weights[j + 1]);
            let k = 0.5 * (self.kernel[j] + self.kernel[j + 1]);
            let t = y[j] / self.rm[j];
            yk += w * t * k;
            yy += w * t * t;
            kk += w * k * k;
        }
        (yk, yy, kk)
    }

    /// Cosine of the angle between `y/r` and the dilation mode, in the
    /// weighted inner product.
    pub fn kernel_fraction(&self, y: &[f64]) -> f64 {
        let (yk, yy, kk) = self.target_products(y);
        if yy == 0.0 {
            0.0
        } else {
            yk.abs() / (yy * kk).sqrt()
        }
    }

    /// Remove the dilation direction from a target, so that
    /// `kernel_fraction` of the result vanishes.
    pub fn project_target(&self, y: &[f64]) -> Vec<f64> {
        let (yk, _, kk) = self.target_products(y);
        let c = yk / kk;
        (0..self.rm.len()).map(|j| y[j] - c * self.rm[j] * 0.5 * (self.kernel[j] + self.kernel[j + 1])).collect()
    }

    /// Right inverse `R y`: the solution of `L x = y` orthogonal to the
    /// dilation mode. The homogeneous solution of the recurrence is the
    /// dilation mode itself, which decays outward, so marching from the
    /// origin is stable.
    pub fn right_inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        let fraction = self.kernel_fraction(y);
        if fraction > Self::KERNEL_THRESHOLD {
            return Err(Error::KernelComponent { fraction, threshold: Self::KERNEL_THRESHOLD });
        }
        let mut x = vec![0.0; self.nodes()];
        for j in 0..self.rm.len() {
            x[j + 1] = (y[j] - self.diag[j] * x[j]) / self.upper[j];
        }
        Ok(self.project_kernel(&x))
    }

    /// Lift a profile to the 8-dimensional separable field `h(r) Im(y dȳ)`,
    /// interpolated by a natural cubic spline.
    pub fn lift(&self, x: &[f64]) -> SeparableField {
        let spline = CubicSpline::natural(self.r.clone(), x.to_vec());
        SeparableField::from_fiber_one_form(0, move |y| {
            let q = Quat::from_array(y);
            let h = spline.eval(q.norm());
            std::array::from_fn(|m| (q * Quat::basis(m).conj()).im().scale(h))
        })
    }

    /// The grafted connection corrected by `h(r) Im(y dȳ)`.
    pub fn corrected_connection(&self, x: &[f64]) -> CorrectedConnection {
        CorrectedConnection { base: crate::glue::graft(&self.config, &OneInstanton::unit()).expect("validated config"), profile: Arc::new(CubicSpline::natural(self.r.clone(), x.to_vec())) }
    }
}

/// `A_λ + h(r) Im(y dȳ)` on the fiber.
#[derive(Clone)]
pub struct CorrectedConnection {
    pub base: GraftedConnection,
    profile: Arc<CubicSpline>,
}

impl Connection4 for CorrectedConnection {
    fn potential(&self, y: Point4) -> [Quat; 4] {
        let a = self.base.potential(y);
        let q = Quat::from_array(y);
        let h = self.profile.eval(q.norm());
        std::array::from_fn(|m| a[m] + (q * Quat::basis(m).conj()).im().scale(h))
    }

    fn jacobian(&self, y: Point4) -> [[Quat; 4]; 4] {
        let da = self.base.jacobian(y);
        let q = Quat::from_array(y);
        let r = q.norm();
        let (h, dh) = self.profile.eval_d(r);
        std::array::from_fn(|nu| {
            std::array::from_fn(|mu| {
                let e = Quat::basis(mu).conj();
                let radial = if r > 0.0 { dh * y[nu] / r } else { 0.0 };
                da[nu][mu] + (q * e).im().scale(radial) + (Quat::basis(nu) * e).im().scale(h)
            })
        })
    }
}

/// Empirical constants of the reduced problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConstants {
    /// `max ‖Q(x) − Q(x')‖ / ((‖x‖ + ‖x'‖)‖x − x'‖)` over random pairs.
    pub quadratic: f64,
    /// `max ‖R y‖ / ‖y‖` over random data.
    pub right_inverse: f64,
    /// Lipschitz constant of `x ↦ R Q(x)`: product of the two.
    pub c_hat: f64,
    pub trials: usize,
}

fn random_profile(rng: &mut ChaCha8Rng, centres: &[f64], len: usize, at: impl Fn(usize) -> f64) -> Vec<f64> {
    let terms: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| (rng.random_range(-1.0..1.0), centres[rng.random_range(0..centres.len())], rng.random_range(0.3..1.5)))
        .collect();
    (0..len)
        .map(|j| {
            let r = at(j);
            terms.iter().map(|(a, c, w)| a * (-((r.ln() - c.ln()) / w).powi(2)).exp()).sum()
        })
        .collect()
}

impl RadialModel {
    /// Random smooth profiles at the nodes (domain) or midpoints (target,
    /// with the dilation direction removed).
    pub fn random_domain(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let lam = self.config.lambda;
        random_profile(rng, &[lam, 10.0 * lam, 1.0, 3.0], self.nodes(), |j| self.r[j])
    }

    pub fn random_target(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let lam = self.config.lambda;
        self.project_target(&random_profile(rng, &[lam, 10.0 * lam, 1.0, 3.0], self.rm.len(), |j| self.rm[j]))
    }

    /// Measure the quadratic and right-inverse constants on seeded samples.
    pub fn measure_constants(&self, trials: usize, seed: u64) -> Result<SolverConstants> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut quadratic = 0.0f64;
        let mut right_inverse = 0.0f64;
        for _ in 0..trials {
            let (x, z) = (self.random_domain(&mut rng), self.random_domain(&mut rng));
            let dq: Vec<f64> = self.quadratic(&x).iter().zip(self.quadratic(&z)).map(|(a, b)| a - b).collect();
            let diff: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a - b).collect();
            let ratio = self.target_norm(&dq) / ((self.domain_norm(&x) + self.domain_norm(&z)) * self.domain_norm(&diff));
            quadratic = quadratic.max(ratio);
            let y = self.random_target(&mut rng);
            match self.right_inverse(&y) {
                Ok(x) => right_inverse = right_inverse.max(self.domain_norm(&x) / self.target_norm(&y)),
                Err(Error::KernelComponent { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        let e = &self.error;
        if self.target_norm(e) > 0.0 {
            let re = self.right_inverse(e)?;
            right_inverse = right_inverse.max(self.domain_norm(&re) / self.target_norm(e));
        }
        Ok(SolverConstants { quadratic, right_inverse, c_hat: quadratic * right_inverse, trials })
    }
}

/// Outcome of the fixed-point iteration `x_{n+1} = −R(Q(x_n) + e)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointState {
    pub lambda: f64,
    pub radii: Vec<f64>,
    /// Final iterate `h(r)` at the nodes (k = 0 sector).
    pub iterate: Vec<f64>,
    /// `‖L x_n + Q(x_n) + e‖` for n = 0, 1, …
    pub residual_history: Vec<f64>,
    /// Successive residual ratios.
    pub contraction_estimates: Vec<f64>,
    pub iterate_norms: Vec<f64>,
    pub re_norm: f64,
    pub gate: f64,
    pub constants: SolverConstants,
    pub converged: bool,
}

impl FixedPointState {
    pub fn min_contraction(&self) -> f64 {
        self.contraction_estimates.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `‖x_n‖ ≤ 2‖Re‖` at every step.
    pub fn bounded(&self) -> bool {
        self.iterate_norms.iter().all(|&n| n <= 2.0 * self.re_norm)
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&f64::INFINITY)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions { tol: 1e-10, max_iter: 50, trials: 20, seed: 7 }
    }
}

/// Solve `L x + Q(x) + e = 0` by `x_{n+1} = −R(Q(x_n) + e)` after checking
/// the smallness gate `‖Re‖ ≤ 1/(10ĉ)`. `e` defaults to the model's grafted
/// error.
pub fn picard_solve(model: &RadialModel, e: Option<&[f64]>, opts: PicardOptions) -> Result<FixedPointState> {
    let e: Vec<f64> = e.map(|v| v.to_vec()).unwrap_or_else(|| model.error.clone());
    let constants = model.measure_constants(opts.trials, opts.seed)?;
    let residual = |x: &[f64]| -> f64 {
        let lx = model.apply(x);
        let q = model.quadratic(x);
        let v: Vec<f64> = (0..lx.len()).map(|j| lx[j] + q[j] + e[j]).collect();
        model.target_norm(&v)
    };
    let re = model.right_inverse(&e)?;
    let re_norm = model.domain_norm(&re);
    let gate = 1.0 / (10.0 * constants.c_hat);
    if re_norm > gate {
        return Err(Error::SmallnessGate { re_norm, gate });
    }
    let mut x = vec![0.0; model.nodes()];
    let mut history = vec![residual(&x)];
    let mut norms = vec![0.0];
    let mut ratios = vec![];
    let mut converged = history[0] <= opts.tol;
    for it in 0..opts.max_iter {
        if converged {
            break;
        }
        let q = model.quadratic(&x);
        let rhs: Vec<f64> = q.iter().zip(&e).map(|(a, b)| -(a + b)).collect();
        x = model.right_inverse(&rhs)?;
        let res = residual(&x);
        let prev = *history.last().unwrap();
        if !res.is_finite() || res > prev {
            return Err(Error::Divergence(it + 1));
        }
        ratios.push(prev / res);
        history.push(res);
        norms.push(model.domain_norm(&x));
        converged = res <= opts.tol;
    }
    if !converged {
        return Err(Error::NoConvergence { iterations: opts.max_iter, residual: *history.last().unwrap() });
    }
    Ok(FixedPointState {
        lambda: model.config.lambda,
        radii: model.r.clone(),
        iterate: x,
        residual_history: history,
        contraction_estimates: ratios,
        iterate_norms: norms,
        re_norm,
        gate,
        constants,
        converged,
    })
}

/// Weighted `ℓ = −2` sup of `|π₇F|` before and after adding the correction
/// `h(r) Im(y dȳ)` to the grafted connection, evaluated in eight dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionReport {
    pub before: f64,
    pub after: f64,
    pub improvement: f64,
}

pub fn correction_report(model: &RadialModel, x: &[f64], n_radii: usize, dir_level: usize) -> Result<CorrectionReport> {
    let lam = model.config.lambda;
    let spec = crate::norms::WeightSpec::new(-2.0, 0.0, lam)?;
    let grafted = crate::glue::graft(&model.config, &OneInstanton::unit())?;
    let proj = Proj7F64::standard();
    let corrected = model.corrected_connection(x);
    let dirs = crate::asd4::sphere_directions(dir_level);
    let radii = geomspace(0.01 * lam, 0.95 * RadialModel::R_MAX, n_radii);
    let pi7 = |c: &dyn Connection4, y: Point4| {
        let f = crate::asd4::curvature_from(&c.potential(y), &c.jacobian(y));
        let mut f8 = [Quat::ZERO; 28];
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            if i >= 4 {
                f8[p] = f[crate::asd4::pair4(i - 4, j - 4)];
            }
        }
        crate::product::pi7_norm(&proj, &f8)
    };
    let (before, after) = radii
        .par_iter()
        .map(|&r| {
            let w = crate::norms::weight(&spec, r);
            dirs.iter().fold((0.0f64, 0.0f64), |(b, a), d| {
                let y = d.map(|v| v * r);
                (b.max(w * pi7(&grafted, y)), a.max(w * pi7(&corrected, y)))
            })
        })
        .reduce(|| (0.0, 0.0), |p, q| (p.0.max(q.0), p.1.max(q.1)));
    Ok(CorrectionReport { before, after, improvement: before / after })
}
