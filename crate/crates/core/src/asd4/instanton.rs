use super::{curvature_from, fd_jacobian, Connection4, OneForm4, Point4, TwoForm4};
use crate::error::{Error, Result};
use crate::quat::Quat;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gauge {
    /// `A = Im(x̄ dx)/(r² + λ²)`, smooth at the centre.
    Regular,
    /// `A = λ² Im(x dx̄)/(r²(r² + λ²))`, radial from infinity; decays like r⁻³.
    Singular,
}

/// Closed-form charge-one instanton with centre, scale and framing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneInstanton {
    pub center: Point4,
    pub scale: f64,
    /// Unit quaternion g acting by `A ↦ g A ḡ`.
    pub framing: Quat,
    pub gauge: Gauge,
}

impl OneInstanton {
    pub fn new(center: Point4, scale: f64, framing: Quat) -> Result<Self> {
        Self::with_gauge(center, scale, framing, Gauge::Regular)
    }

    pub fn with_gauge(center: Point4, scale: f64, framing: Quat, gauge: Gauge) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::NonPositiveScale(scale));
        }
        let n = framing.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("framing must be a unit quaternion, |g| = {n}")));
        }
        Ok(OneInstanton { center, scale, framing, gauge })
    }

    pub fn unit() -> Self {
        OneInstanton { center: [0.0; 4], scale: 1.0, framing: Quat::ONE, gauge: Gauge::Regular }
    }

    pub(crate) fn local(&self, x: Point4) -> Quat {
        Quat::new(x[0] - self.center[0], x[1] - self.center[1], x[2] - self.center[2], x[3] - self.center[3])
    }

    fn frame(&self, q: Quat) -> Quat {
        self.framing.adjoint(q)
    }

    /// Closed-form `|F|² = 48 λ⁴/(r² + λ²)⁴` (gauge invariant).
    pub fn curvature_norm_sqr(&self, x: Point4) -> f64 {
        let r2 = self.local(x).norm_sqr();
        let l2 = self.scale * self.scale;
        48.0 * l2 * l2 / (r2 + l2).powi(4)
    }

    /// Analytic curvature.
    pub fn curvature(&self, x: Point4) -> TwoForm4 {
        curvature_from(&self.potential(x), &self.jacobian(x))
    }
}

impl Connection4 for OneInstanton {
    fn potential(&self, x: Point4) -> OneForm4 {
        let y = self.local(x);
        let r2 = y.norm_sqr();
        let l2 = self.scale * self.scale;
        match self.gauge {
            Gauge::Regular => {
                let d = r2 + l2;
                std::array::from_fn(|mu| self.frame((y.conj() * Quat::basis(mu)).im().scale(1.0 / d)))
            }
            Gauge::Singular => {
                if r2 == 0.0 {
                    return [Quat::ZERO; 4];
                }
                let c = l2 / (r2 * (r2 + l2));
                std::array::from_fn(|mu| self.frame((y * Quat::basis(mu).conj()).im().scale(c)))
            }
        }
    }

    fn jacobian(&self, x: Point4) -> [OneForm4; 4] {
        let y = self.local(x);
        let yv = y.to_array();
        let r2 = y.norm_sqr();
        let l2 = self.scale * self.scale;
        let d = r2 + l2;
        std::array::from_fn(|nu| {
            std::array::from_fn(|mu| {
                let e_mu = Quat::basis(mu);
                let e_nu = Quat::basis(nu);
                let v = match self.gauge {
                    Gauge::Regular => {
                        (e_nu.conj() * e_mu).im().scale(1.0 / d) - (y.conj() * e_mu).im().scale(2.0 * yv[nu] / (d * d))
                    }
                    Gauge::Singular => {
                        if r2 == 0.0 {
                            Quat::ZERO
                        } else {
                            let c = l2 / (r2 * d);
                            let dc = -2.0 * yv[nu] * l2 * (d + r2) / (r2 * r2 * d * d);
                            (e_nu * e_mu.conj()).im().scale(c) + (y * e_mu.conj()).im().scale(dc)
                        }
                    }
                };
                self.frame(v)
            })
        })
    }
}

/// A connection known only through point samples; derivatives are taken by
/// fourth-order central differences with spacing `h`.
#[derive(Clone)]
pub struct SampledGauge {
    pub eval: Arc<dyn Fn(Point4) -> OneForm4 + Send + Sync>,
    pub h: f64,
}

impl std::fmt::Debug for SampledGauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledGauge").field("h", &self.h).finish()
    }
}

impl Connection4 for SampledGauge {
    fn potential(&self, x: Point4) -> OneForm4 {
        (self.eval)(x)
    }
    fn jacobian(&self, x: Point4) -> [OneForm4; 4] {
        fd_jacobian(|p| (self.eval)(p), x, self.h)
    }
}

/// An su(2) gauge field on ℝ⁴: closed form or sampled.
#[derive(Clone, Debug)]
pub enum GaugeField4 {
    OneInstanton(OneInstanton),
    Sampled(SampledGauge),
}

impl GaugeField4 {
    pub fn one_instanton(center: Point4, scale: f64, framing: Quat) -> Result<Self> {
        Ok(GaugeField4::OneInstanton(OneInstanton::new(center, scale, framing)?))
    }

    pub fn flat() -> Self {
        GaugeField4::Sampled(SampledGauge { eval: Arc::new(|_| [Quat::ZERO; 4]), h: 1e-3 })
    }

    /// Sample-based view of any field, for finite-difference derivatives.
    pub fn sampled_from<C: Connection4 + Clone + 'static>(c: &C, h: f64) -> Self {
        let c = c.clone();
        GaugeField4::Sampled(SampledGauge { eval: Arc::new(move |x| c.potential(x)), h })
    }

    pub fn as_instanton(&self) -> Option<&OneInstanton> {
        match self {
            GaugeField4::OneInstanton(i) => Some(i),
            GaugeField4::Sampled(_) => None,
        }
    }
}

impl Connection4 for GaugeField4 {
    fn potential(&self, x: Point4) -> OneForm4 {
        match self {
            GaugeField4::OneInstanton(i) => i.potential(x),
            GaugeField4::Sampled(s) => s.potential(x),
        }
    }
    fn jacobian(&self, x: Point4) -> [OneForm4; 4] {
        match self {
            GaugeField4::OneInstanton(i) => i.jacobian(x),
            GaugeField4::Sampled(s) => s.jacobian(x),
        }
    }
}

/// Curvature sampler of a connection.
#[derive(Clone, Debug)]
pub struct Curvature {
    field: GaugeField4,
}

impl Curvature {
    pub fn eval(&self, x: Point4) -> TwoForm4 {
        curvature_from(&self.field.potential(x), &self.field.jacobian(x))
    }
}

/// Default upper bound on the finite-difference spacing for sampled fields.
pub const DEFAULT_MAX_H: f64 = 0.05;

pub fn curvature(a: &GaugeField4) -> Result<Curvature> {
    curvature_with_bound(a, DEFAULT_MAX_H)
}

/// Curvature with an explicit bound on the sampling step of grid fields.
pub fn curvature_with_bound(a: &GaugeField4, max_h: f64) -> Result<Curvature> {
    if let GaugeField4::Sampled(s) = a {
        if s.h > max_h {
            return Err(Error::GridTooCoarse { h: s.h, bound: max_h });
        }
    }
    Ok(Curvature { field: a.clone() })
}
