//! Weighted Hölder norms on finite sample sets.
//!
//! The weight `w_{ℓ,δ;λ}(r)` is `λ^δ (λ + r)^{−ℓ−δ}` for `r ≤ √λ` and
//! `r^{−ℓ+δ}` beyond. All norms are suprema over the samples, so they are
//! lower bounds for the continuum norms and grow monotonically as samples are
//! added.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Default cap on the number of Hölder pairs.
pub const DEFAULT_PAIR_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub ell: f64,
    pub delta: f64,
    pub lambda: f64,
}

impl WeightSpec {
    pub fn new(ell: f64, delta: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::NonPositiveScale(lambda));
        }
        Ok(WeightSpec { ell, delta, lambda })
    }

    /// As [`WeightSpec::new`] with the global threshold `λ ≤ Λ` enforced.
    pub fn bounded(ell: f64, delta: f64, lambda: f64, max_lambda: f64) -> Result<Self> {
        if lambda > max_lambda {
            return Err(Error::LambdaOutOfRange { lambda, max: max_lambda });
        }
        Self::new(ell, delta, lambda)
    }

    /// Same δ and λ, ℓ shifted (used for the `ℓ − α` Hölder weight).
    pub fn shift_ell(self, by: f64) -> Self {
        WeightSpec { ell: self.ell + by, ..self }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        WeightSpec { delta, ..self }
    }

    /// Weights of the product: `(ℓ₁ + ℓ₂, δ₁ + δ₂)` at the same λ.
    pub fn product(self, other: WeightSpec) -> Result<Self> {
        if self.lambda != other.lambda {
            return Err(Error::InvalidArgument(format!("λ mismatch: {} vs {}", self.lambda, other.lambda)));
        }
        Ok(WeightSpec { ell: self.ell + other.ell, delta: self.delta + other.delta, lambda: self.lambda })
    }
}

pub fn weight(spec: &WeightSpec, r: f64) -> f64 {
    let WeightSpec { ell, delta, lambda } = *spec;
    if r <= lambda.sqrt() {
        lambda.powf(delta) * (lambda + r).powf(-ell - delta)
    } else {
        r.powf(-ell + delta)
    }
}

/// Pair weight `min{w(x), w(y)}`.
pub fn pair_weight(spec: &WeightSpec, rx: f64, ry: f64) -> f64 {
    weight(spec, rx).min(weight(spec, ry))
}

/// ℝ⁸ model weight `(1 + r)^{−ℓ}` built from `1 + |π₂x|`.
pub fn model_weight(ell: f64, r: f64) -> f64 {
    (1.0 + r).powf(-ell)
}

/// Range of `model_weight / weight(λ = 1)` over the given radii.
pub fn model_weight_comparison(ell: f64, radii: &[f64]) -> (f64, f64) {
    let spec = WeightSpec { ell, delta: 0.0, lambda: 1.0 };
    radii.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| {
        let q = model_weight(ell, r) / weight(&spec, r);
        (lo.min(q), hi.max(q))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub position: Vec<f64>,
    /// Distance to Q.
    pub r: f64,
    /// Tensor components; `|f|` is their Euclidean norm.
    pub value: Vec<f64>,
}

impl Sample {
    pub fn new(position: Vec<f64>, r: f64, value: Vec<f64>) -> Self {
        Sample { position, r, value }
    }

    pub fn abs(&self) -> f64 {
        self.value.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledField {
    samples: Vec<Sample>,
    pairs: Vec<(usize, usize)>,
}

impl SampledField {
    /// Field without Hölder pairs; call [`SampledField::with_pairs`] before
    /// asking for seminorms.
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyField);
        }
        Ok(SampledField { samples, pairs: Vec::new() })
    }

    /// Collect pairs with `0 < d(x,y) ≤ λ + min{r(x), r(y)}`. When there are
    /// more than `cap`, keep an equal share per r-decile of the first point,
    /// drawn with the given seed.
    pub fn with_pairs(mut self, lambda: f64, cap: usize, seed: u64) -> Self {
        let n = self.samples.len();
        let s = &self.samples;
        let mut all: Vec<(usize, usize)> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                (i + 1..n).filter_map(move |j| {
                    let d = distance(&s[i].position, &s[j].position);
                    (d > 0.0 && d <= lambda + s[i].r.min(s[j].r)).then_some((i, j))
                })
            })
            .collect();
        if all.len() > cap {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut by_r: Vec<f64> = s.iter().map(|p| p.r).collect();
            by_r.sort_by(|a, b| a.total_cmp(b));
            let cut: Vec<f64> = (1..10).map(|k| by_r[k * (n - 1) / 10]).collect();
            let bin = |r: f64| cut.iter().filter(|&&c| r > c).count();
            let mut bins: Vec<Vec<(usize, usize)>> = vec![Vec::new(); 10];
            for p in all {
                bins[bin(s[p.0].r)].push(p);
            }
            let quota = cap / 10;
            all = Vec::with_capacity(cap);
            for mut b in bins {
                b.shuffle(&mut rng);
                b.truncate(quota);
                all.extend(b);
            }
            all.sort_unstable();
        }
        self.pairs = all;
        self
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Pointwise bilinear product with the same positions and pairs.
    pub fn pointwise<P: Fn(&[f64], &[f64]) -> Vec<f64>>(&self, other: &SampledField, pairing: P) -> Result<SampledField> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::IncompatibleGrids(format!("{} vs {} samples", self.samples.len(), other.samples.len())));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| {
                if a.position != b.position {
                    Err(Error::IncompatibleGrids("sample positions differ".into()))
                } else {
                    Ok(Sample::new(a.position.clone(), a.r, pairing(&a.value, &b.value)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SampledField { samples, pairs: self.pairs.clone() })
    }

    /// Write `(r, weight, |f|, contribution)` rows.
    pub fn write_csv<W: Write>(&self, spec: &WeightSpec, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "weight", "abs", "contribution"])?;
        for s in &self.samples {
            let (wt, a) = (weight(spec, s.r), s.abs());
            w.serialize((s.r, wt, a, wt * a))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `max w(x)|f(x)|` over samples.
pub fn weighted_sup_norm(f: &SampledField, spec: &WeightSpec) -> Result<f64> {
    if f.samples.is_empty() {
        return Err(Error::EmptyField);
    }
    Ok(f.samples.par_iter().map(|s| weight(spec, s.r) * s.abs()).reduce(|| 0.0, f64::max))
}

/// `max w_{ℓ−α,δ}(x,y) |f(x) − f(y)| / d(x,y)^α` over the admissible pairs.
pub fn weighted_holder_seminorm(f: &SampledField, spec: &WeightSpec, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("Hölder exponent {alpha} outside (0, 1)")));
    }
    if f.pairs.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    let ws = spec.shift_ell(-alpha);
    let s = &f.samples;
    Ok(f.pairs
        .par_iter()
        .map(|&(i, j)| {
            let d = distance(&s[i].position, &s[j].position);
            pair_weight(&ws, s[i].r, s[j].r) * distance(&s[i].value, &s[j].value) / d.powf(alpha)
        })
        .reduce(|| 0.0, f64::max))
}

/// Full `C^{0,α}` norm: sup part plus Hölder seminorm.
pub fn holder_norm(f: &SampledField, spec: &WeightSpec, alpha: f64) -> Result<f64> {
    Ok(weighted_sup_norm(f, spec)? + weighted_holder_seminorm(f, spec, alpha)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicationCheck {
    pub product_norm: f64,
    pub bound: f64,
    pub product_sup: f64,
    pub sup_bound: f64,
    /// `bound − product_norm`; negative means a violation.
    pub slack: f64,
    pub holds: bool,
}

/// Checks `‖f·g‖_{ℓ₁+ℓ₂,δ₁+δ₂} ≤ ‖f‖_{ℓ₁,δ₁} ‖g‖_{ℓ₂,δ₂}` in `C^{0,α}` for a
/// pairing with `|f·g| ≤ |f||g|`.
pub fn check_multiplication<P: Fn(&[f64], &[f64]) -> Vec<f64>>(
    f: &SampledField,
    g: &SampledField,
    spec_f: &WeightSpec,
    spec_g: &WeightSpec,
    alpha: f64,
    pairing: P,
) -> Result<MultiplicationCheck> {
    let fg = f.pointwise(g, pairing)?;
    let spec = spec_f.product(*spec_g)?;
    let product_norm = holder_norm(&fg, &spec, alpha)?;
    let bound = holder_norm(f, spec_f, alpha)? * holder_norm(g, spec_g, alpha)?;
    let product_sup = weighted_sup_norm(&fg, &spec)?;
    let sup_bound = weighted_sup_norm(f, spec_f)? * weighted_sup_norm(g, spec_g)?;
    let slack = bound - product_norm;
    let tol = 1e-12 * bound.max(1.0);
    Ok(MultiplicationCheck {
        product_norm,
        bound,
        product_sup,
        sup_bound,
        slack,
        holds: slack >= -tol && product_sup <= sup_bound + tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaNormComparison {
    /// `‖f‖_{ℓ,δ} / ‖f‖_{ℓ,0}`.
    pub r1: f64,
    /// `‖f‖_{ℓ,0} / ‖f‖_{ℓ,δ}`.
    pub r2: f64,
    /// `c λ^{δ/2}`.
    pub bound1: f64,
    pub bound2: f64,
    pub holds: bool,
}

/// Constant in the δ-norm comparison for fields supported in `r ≤ r_max`
/// with `λ ≤ max_lambda`, from the pointwise weight ratios:
/// `w_{ℓ,δ}/w_{ℓ,0} ≤ (1 + √λ)^{−δ} λ^{δ/2}` and `w_{ℓ,0}/w_{ℓ,δ} ≤ max{1, r_max^{−δ}}`.
pub fn delta_norm_constant(delta: f64, max_lambda: f64, r_max: f64) -> f64 {
    (1.0 + max_lambda.sqrt()).powf(-delta).max(r_max.powf(-delta)).max(1.0)
}

/// Compares the δ-weighted and unweighted `C^{0,α}` norms for `δ ≤ 0`.
pub fn delta_norm_comparison(f: &SampledField, spec: &WeightSpec, alpha: f64, c: f64) -> Result<DeltaNormComparison> {
    if spec.delta > 0.0 {
        return Err(Error::NonNegativeDelta(spec.delta));
    }
    let with = holder_norm(f, spec, alpha)?;
    let without = holder_norm(f, &spec.with_delta(0.0), alpha)?;
    let (r1, r2) = (with / without, without / with);
    let bound1 = c * spec.lambda.powf(spec.delta / 2.0);
    Ok(DeltaNormComparison { r1, r2, bound1, bound2: c, holds: r1 <= bound1 && r2 <= c })
}
