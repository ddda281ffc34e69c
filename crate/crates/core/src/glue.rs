//! Pregluing on the flat model: a rescaled one-instanton on the fiber ℝ⁴,
//! cut off at the overlap radius and grafted onto the trivial product
//! connection over Q = ℝ⁴ × {0}.
//!
//! With a trivial background the `a`-tail vanishes, so
//! `A_λ = χ⁺ i_λ` where `i_λ` is the instanton in the gauge radial from
//! infinity. Everything depends on the fiber coordinate only.

use crate::asd4::{curvature_from, sphere_directions, Connection4, Gauge, OneForm4, OneInstanton, Point4, TwoForm4};
use crate::error::{Error, Result};
use crate::exterior8::{phi0, wedge, KForm8, Proj7F64, Provenance, Scalar, Spin7Structure, PAIRS};
use crate::norms::{weight, WeightSpec};
use crate::numerics::fit::loglog_slope;
use crate::numerics::linspace;
use crate::product::{two_form8_norm_sqr, FiberPullback, TwoForm8};
use crate::quat::Quat;
use nalgebra::SMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Quintic smoothstep: 0 on (−∞, 1], 1 on [2, ∞).
pub fn chi(t: f64) -> f64 {
    if t <= 1.0 {
        0.0
    } else if t >= 2.0 {
        1.0
    } else {
        let s = t - 1.0;
        s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

pub fn chi_d(t: f64) -> f64 {
    if t <= 1.0 || t >= 2.0 {
        0.0
    } else {
        let s = t - 1.0;
        30.0 * s * s * (1.0 - s) * (1.0 - s)
    }
}

/// `sup |χ'|`, attained at t = 3/2.
pub const CHI_D1_BOUND: f64 = 15.0 / 8.0;
/// `sup |χ''| = 10/√3`.
pub const CHI_D2_BOUND: f64 = 5.773_502_691_896_258;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluingConfig {
    pub lambda: f64,
    pub zeta: f64,
    pub sigma: f64,
    /// Global threshold Λ; only λ < Λ is accepted.
    pub max_lambda: f64,
}

impl GluingConfig {
    pub const DEFAULT_ZETA: f64 = 1.0;
    pub const DEFAULT_MAX_LAMBDA: f64 = 0.25;

    pub fn new(lambda: f64) -> Result<Self> {
        let zeta = Self::DEFAULT_ZETA;
        GluingConfig { lambda, zeta, sigma: 4.0 * zeta, max_lambda: Self::DEFAULT_MAX_LAMBDA }.validated()
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        GluingConfig { lambda, ..self }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::NonPositiveScale(self.lambda));
        }
        if self.lambda >= self.max_lambda {
            return Err(Error::LambdaOutOfRange { lambda: self.lambda, max: self.max_lambda });
        }
        if !(self.zeta > 0.0) || !(self.sigma > 0.0) {
            return Err(Error::InvalidGluing(format!("zeta = {}, sigma = {} must be positive", self.zeta, self.sigma)));
        }
        if self.lambda >= self.sigma / 4.0 {
            return Err(Error::InvalidGluing(format!("lambda {} must be below sigma/4 = {}", self.lambda, self.sigma / 4.0)));
        }
        Ok(self)
    }

    /// `χ⁻_λ(r) = χ(r/λ)`.
    pub fn chi_minus(&self, r: f64) -> f64 {
        chi(r / self.lambda)
    }

    /// `χ⁺(r) = 1 − χ(2r/σ)`: 1 on r ≤ σ/2, 0 on r ≥ σ.
    pub fn chi_plus(&self, r: f64) -> f64 {
        1.0 - chi(2.0 * r / self.sigma)
    }

    pub fn chi_plus_d(&self, r: f64) -> f64 {
        -2.0 / self.sigma * chi_d(2.0 * r / self.sigma)
    }
}

/// The instanton in the gauge radial from infinity,
/// `i = λ² Im(y dȳ)/(r²(r² + λ²))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialGaugeTail {
    inst: OneInstanton,
}

pub fn radial_gauge_tail(i: &OneInstanton) -> Result<RadialGaugeTail> {
    if i.center.iter().any(|&c| c != 0.0) {
        return Err(Error::NotCentred);
    }
    let inst = OneInstanton::with_gauge([0.0; 4], i.scale, i.framing, Gauge::Singular)?;
    Ok(RadialGaugeTail { inst })
}

impl RadialGaugeTail {
    pub fn scale(&self) -> f64 {
        self.inst.scale
    }

    /// Scalar profile `g(r)` with `i = g(r) Im(y dȳ)` up to framing.
    pub fn profile(&self, r: f64) -> f64 {
        let l2 = self.inst.scale * self.inst.scale;
        l2 / (r * r * (r * r + l2))
    }

    pub fn instanton(&self) -> &OneInstanton {
        &self.inst
    }
}

impl Connection4 for RadialGaugeTail {
    fn potential(&self, x: Point4) -> OneForm4 {
        self.inst.potential(x)
    }

    fn jacobian(&self, x: Point4) -> [OneForm4; 4] {
        self.inst.jacobian(x)
    }
}

/// `A_λ = χ⁺ i_λ` on the fiber, pulled back to ℝ⁸.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraftedConnection {
    pub config: GluingConfig,
    pub tail: RadialGaugeTail,
    /// Replace χ⁺ by 1 everywhere (the pure pulled-back instanton).
    pub uncut: bool,
}

/// Graft the λ-rescaled instanton `s*_{1/λ} I` onto the trivial product
/// background. `i` supplies the framing and a unit of scale.
pub fn graft(config: &GluingConfig, i: &OneInstanton) -> Result<GraftedConnection> {
    let config = config.validated()?;
    let rescaled = OneInstanton::new(i.center, config.lambda * i.scale, i.framing)?;
    let tail = radial_gauge_tail(&rescaled)?;
    Ok(GraftedConnection { config, tail, uncut: false })
}

impl GraftedConnection {
    pub fn uncut(mut self) -> Self {
        self.uncut = true;
        self
    }

    fn cut(&self, r: f64) -> (f64, f64) {
        if self.uncut {
            (1.0, 0.0)
        } else {
            (self.config.chi_plus(r), self.config.chi_plus_d(r))
        }
    }

    pub fn pullback(&self) -> FiberPullback<GraftedConnection> {
        FiberPullback { inner: *self }
    }

    /// Curvature on the fiber, analytic.
    pub fn fiber_curvature(&self, y: Point4) -> TwoForm4 {
        curvature_from(&self.potential(y), &self.jacobian(y))
    }

    /// Curvature on ℝ⁸; only fiber–fiber components are nonzero.
    pub fn curvature8(&self, y: Point4) -> TwoForm8 {
        embed_fiber(&self.fiber_curvature(y))
    }
}

impl Connection4 for GraftedConnection {
    fn potential(&self, y: Point4) -> OneForm4 {
        let r = norm4(&y);
        let (c, _) = self.cut(r);
        self.tail.potential(y).map(|q| q.scale(c))
    }

    fn jacobian(&self, y: Point4) -> [OneForm4; 4] {
        let r = norm4(&y);
        let (c, dc) = self.cut(r);
        let a = self.tail.potential(y);
        let da = self.tail.jacobian(y);
        std::array::from_fn(|nu| {
            let radial = if r > 0.0 { dc * y[nu] / r } else { 0.0 };
            std::array::from_fn(|mu| da[nu][mu].scale(c) + a[mu].scale(radial))
        })
    }
}

fn norm4(y: &Point4) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn embed_fiber(f: &TwoForm4) -> TwoForm8 {
    let mut out = [Quat::ZERO; 28];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        if i >= 4 && j >= 4 {
            out[k] = f[crate::asd4::pair4(i - 4, j - 4)];
        }
    }
    out
}

/// `e_λ = π₇(F_{A_λ})`.
#[derive(Clone, Debug)]
pub struct ErrorField {
    pub connection: GraftedConnection,
    proj: Proj7F64,
}

pub fn error_field<S: Scalar>(a: &GraftedConnection, s: &Spin7Structure<S>) -> Result<ErrorField> {
    if s.provenance() != Provenance::Standard {
        return Err(Error::InvalidArgument("error field requires the standard structure".into()));
    }
    Ok(ErrorField { connection: *a, proj: Proj7F64::new(s) })
}

impl ErrorField {
    /// Evaluate at a fiber point (the field is constant along Q).
    pub fn eval(&self, y: Point4) -> TwoForm8 {
        self.proj.apply_quat(&self.connection.curvature8(y))
    }

    pub fn norm_at(&self, y: Point4) -> f64 {
        two_form8_norm_sqr(&self.eval(y)).sqrt()
    }

    /// `(|π₇F|, |π₂₁F|)`.
    pub fn split_norms(&self, y: Point4) -> (f64, f64) {
        let f = self.connection.curvature8(y);
        let p7 = self.proj.apply_quat(&f);
        let p21: TwoForm8 = std::array::from_fn(|k| f[k] - p7[k]);
        (two_form8_norm_sqr(&p7).sqrt(), two_form8_norm_sqr(&p21).sqrt())
    }

    /// Weighted C⁰ norm `max w(r)|e(y)|` over `radii × dirs`.
    pub fn weighted_sup(&self, spec: &WeightSpec, radii: &[f64], dirs: &[Point4]) -> f64 {
        radii
            .par_iter()
            .map(|&r| {
                let w = weight(spec, r);
                dirs.iter().map(|d| w * self.norm_at(d.map(|v| v * r))).fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Sampling resolution for [`error_sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub n_radii: usize,
    /// Angular level passed to [`sphere_directions`].
    pub dir_level: usize,
    pub ell: f64,
    pub delta: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { n_radii: 400, dir_level: 3, ell: -2.0, delta: 0.0 }
    }
}

impl SweepOptions {
    pub fn refined(self) -> Self {
        SweepOptions { n_radii: 2 * self.n_radii - 1, dir_level: self.dir_level + 1, ..self }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub err_norm: f64,
    pub c_ratio: f64,
    pub grid_h: f64,
    pub refined_norm: f64,
    pub refinement_change: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub slope: f64,
    /// `max ‖e_λ‖/λ²`.
    pub c: f64,
    pub max_refinement_change: f64,
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["lambda", "err_norm", "c_ratio", "grid_h"])?;
        for r in &self.rows {
            w.serialize((r.lambda, r.err_norm, r.c_ratio, r.grid_h))?;
        }
        w.flush()?;
        Ok(())
    }

    /// `‖e_λ‖ ≤ c λ²` for every row.
    pub fn bound_holds(&self) -> bool {
        self.rows.iter().all(|r| r.err_norm <= self.c * r.lambda * r.lambda * (1.0 + 1e-12))
    }
}

/// Radii covering the annulus `[σ/4, 2σ]` that contains the error support.
pub fn sweep_radii(config: &GluingConfig, n: usize) -> Vec<f64> {
    linspace(config.sigma / 4.0, 2.0 * config.sigma, n)
}

/// Weighted C⁰ norm of `e_λ` for each λ, with a log–log slope fit and a
/// refinement comparison at doubled resolution.
pub fn error_sweep(lambdas: &[f64], template: &GluingConfig, i: &OneInstanton, opts: SweepOptions) -> Result<SweepResult> {
    if lambdas.len() < 4 {
        return Err(Error::TooFewValues { needed: 4, got: lambdas.len() });
    }
    let s = Spin7Structure::standard();
    let fine = opts.refined();
    let (dirs, dirs_fine) = (sphere_directions(opts.dir_level), sphere_directions(fine.dir_level));
    let rows = lambdas
        .par_iter()
        .map(|&lambda| -> Result<SweepRow> {
            let cfg = template.with_lambda(lambda)?;
            let e = error_field(&graft(&cfg, i)?, &s)?;
            let spec = WeightSpec::new(opts.ell, opts.delta, lambda)?;
            let radii = sweep_radii(&cfg, opts.n_radii);
            let err_norm = e.weighted_sup(&spec, &radii, &dirs);
            let refined_norm = e.weighted_sup(&spec, &sweep_radii(&cfg, fine.n_radii), &dirs_fine);
            Ok(SweepRow {
                lambda,
                err_norm,
                c_ratio: err_norm / (lambda * lambda),
                grid_h: radii[1] - radii[0],
                refined_norm,
                refinement_change: (refined_norm - err_norm).abs() / refined_norm.max(f64::MIN_POSITIVE),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.err_norm).collect();
    Ok(SweepResult {
        slope: loglog_slope(&xs, &ys),
        c: rows.iter().map(|r| r.c_ratio).fold(0.0, f64::max),
        max_refinement_change: rows.iter().map(|r| r.refinement_change).fold(0.0, f64::max),
        rows,
    })
}

type Mat8 = SMatrix<f64, 8, 8>;
type Mat28 = SMatrix<f64, 28, 28>;

/// Position-dependent mock structure `Φ(y) = exp(Σ y_k B_k)* Φ₀` on the
/// normal coordinates y. Each generator is a combination of the Λ²₇
/// elements `ω_i − μ_i`, read as skew endomorphisms.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorMock {
    generators: [Mat8; 4],
}

/// Degree-0, degree-1 and remainder parts of `π₇(y)`.
#[derive(Clone, Debug)]
pub struct TaylorSplit {
    pub p0: Mat28,
    pub p1: Mat28,
    pub rest: Mat28,
}

impl TaylorSplit {
    pub fn total(&self) -> Mat28 {
        self.p0 + self.p1 + self.rest
    }
}

impl TaylorMock {
    /// Generators `B_k = Σ_i c[k][i] (ω_i − μ_i)`.
    pub fn new(coeffs: [[f64; 3]; 4]) -> Self {
        let basis = crate::exterior8::standard_omegas::<f64>()
            .iter()
            .zip(crate::exterior8::standard_mus::<f64>().iter())
            .map(|(w, m)| skew_of(&w.sub(m)))
            .collect::<Vec<_>>();
        let generators = coeffs.map(|c| basis[0] * c[0] + basis[1] * c[1] + basis[2] * c[2]);
        TaylorMock { generators }
    }

    pub fn standard() -> Self {
        Self::new([[0.3, -0.1, 0.2], [0.05, 0.25, -0.15], [-0.2, 0.1, 0.3], [0.15, -0.3, 0.05]])
    }

    pub fn zero() -> Self {
        Self::new([[0.0; 3]; 4])
    }

    pub fn generator(&self, y: [f64; 4]) -> Mat8 {
        (0..4).map(|k| self.generators[k] * y[k]).sum()
    }

    fn checked_generator(&self, y: [f64; 4]) -> Result<Mat8> {
        let b = self.generator(y);
        let n = b.singular_values().max();
        if n >= 1.0 {
            return Err(Error::PerturbationTooLarge(n));
        }
        Ok(b)
    }

    /// `Φ(y)` built term by term and validated.
    pub fn structure(&self, y: [f64; 4]) -> Result<Spin7Structure<f64>> {
        let m = self.checked_generator(y)?.exp();
        let one_form = |a: usize| {
            let terms: Vec<([usize; 1], f64)> = (0..8).map(|k| ([k], m[(k, a)])).collect();
            let refs: Vec<(&[usize], f64)> = terms.iter().map(|(i, c)| (&i[..], *c)).collect();
            KForm8::from_terms(1, &refs)
        };
        let mut phi = KForm8::<f64>::zero(4);
        for (idx, c) in phi0().to_f64().terms() {
            let mut t = one_form(idx[0])?;
            for &a in &idx[1..] {
                t = wedge(&t, &one_form(a)?)?;
            }
            phi = phi.add(&t.scale(c));
        }
        Spin7Structure::new(phi, Provenance::Custom)
    }

    /// Direct projector of `Φ(y)`.
    pub fn exact_projector(&self, y: [f64; 4]) -> Result<Mat28> {
        let p = Proj7F64::new(&self.structure(y)?);
        Ok(Mat28::from_fn(|i, j| p.matrix()[i][j]))
    }
}

fn skew_of(w: &KForm8<f64>) -> Mat8 {
    Mat8::from_fn(|a, b| match a.cmp(&b) {
        std::cmp::Ordering::Less => w.coeff(&[a, b]),
        std::cmp::Ordering::Greater => -w.coeff(&[b, a]),
        std::cmp::Ordering::Equal => 0.0,
    })
}

/// Action on Λ² induced by `e^i ↦ Σ_k B[k][i] e^k`.
pub fn two_form_derivation(b: &Mat8) -> Mat28 {
    let mut d = Mat28::zeros();
    for (col, &(i, j)) in PAIRS.iter().enumerate() {
        for k in 0..8 {
            for (p, q, c) in [(k, j, b[(k, i)]), (i, k, b[(k, j)])] {
                if c == 0.0 || p == q {
                    continue;
                }
                let (row, sign) = if p < q { (crate::exterior8::pair_index(p, q), 1.0) } else { (crate::exterior8::pair_index(q, p), -1.0) };
                d[(row, col)] += sign * c;
            }
        }
    }
    d
}

/// Split `π₇(y) = e^D P₀ e^{−D}` into `P₀`, `[D, P₀]` and `Σ_{n≥2} ad_D^n P₀ / n!`.
pub fn taylor_pi7_split(mock: &TaylorMock, y: [f64; 4]) -> Result<TaylorSplit> {
    let d = two_form_derivation(&mock.checked_generator(y)?);
    let std = Proj7F64::standard();
    let p0 = Mat28::from_fn(|i, j| std.matrix()[i][j]);
    let p1 = d * p0 - p0 * d;
    let mut rest = Mat28::zeros();
    let mut term = p1;
    for n in 2..200 {
        term = (d * term - term * d) / n as f64;
        rest += term;
        if term.abs().max() < 1e-18 {
            break;
        }
    }
    Ok(TaylorSplit { p0, p1, rest })
}

/// Anti-self-dual 2-forms on the normal factor (coordinates 4..7) as vectors.
pub fn normal_asd_basis() -> [[f64; 28]; 3] {
    let pi = crate::exterior8::pair_index;
    let mut out = [[0.0; 28]; 3];
    out[0][pi(4, 5)] = 1.0;
    out[0][pi(6, 7)] = -1.0;
    out[1][pi(4, 6)] = 1.0;
    out[1][pi(5, 7)] = 1.0;
    out[2][pi(4, 7)] = 1.0;
    out[2][pi(5, 6)] = -1.0;
    out
}
