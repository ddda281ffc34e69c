use super::{curvature_from, two_form_norm_sqr, Connection4, Point4};
use crate::numerics::quad::{gauss_legendre_on, sphere3_rule};
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;

/// Radial–spherical product rule on ℝ⁴ about `center`, with radius
/// `r = s·tan θ`, θ Gauss–Legendre on (0, π/2).
#[derive(Clone, Debug)]
pub struct RadialRule {
    pub points: Vec<(Point4, f64)>,
}

pub fn radial_rule(center: Point4, s: f64, n_r: usize, n_ang: (usize, usize, usize)) -> RadialRule {
    let (th, wth) = gauss_legendre_on(n_r, 0.0, FRAC_PI_2);
    let sphere = sphere3_rule(n_ang.0, n_ang.1, n_ang.2);
    let mut points = Vec::with_capacity(n_r * sphere.len());
    for (t, wt) in th.iter().zip(&wth) {
        let r = s * t.tan();
        let jac = s / (t.cos() * t.cos()) * r.powi(3) * wt;
        for (v, wv) in &sphere {
            points.push(([center[0] + r * v[0], center[1] + r * v[1], center[2] + r * v[2], center[3] + r * v[3]], jac * wv));
        }
    }
    RadialRule { points }
}

impl RadialRule {
    /// `∫ f` as a parallel map with a sequential (deterministic) sum.
    pub fn integrate<F: Fn(Point4) -> f64 + Sync>(&self, f: F) -> f64 {
        let vals: Vec<f64> = self.points.par_iter().map(|(x, w)| w * f(*x)).collect();
        vals.iter().sum()
    }
}

/// `∫ |F_A|²` over ℝ⁴ with the su(2) trace norm; 8π² for the one-instanton.
pub fn yang_mills_energy<C: Connection4>(a: &C, rule: &RadialRule) -> f64 {
    rule.integrate(|x| two_form_norm_sqr(&curvature_from(&a.potential(x), &a.jacobian(x))))
}

/// L² inner product of two su(2)-valued 1-forms, `∫ Σ_μ 2⟨a_μ, b_μ⟩`.
pub fn l2_inner<F, G>(a: F, b: G, rule: &RadialRule) -> f64
where
    F: Fn(Point4) -> super::OneForm4 + Sync,
    G: Fn(Point4) -> super::OneForm4 + Sync,
{
    rule.integrate(|x| {
        let (u, v) = (a(x), b(x));
        (0..4).map(|m| 2.0 * u[m].dot(v[m])).sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_gaussian() {
        let rule = radial_rule([0.0; 4], 1.0, 80, (8, 8, 8));
        let v = rule.integrate(|x| (-(x.iter().map(|c| c * c).sum::<f64>())).exp());
        assert!((v - std::f64::consts::PI.powi(2)).abs() < 1e-9, "{v}");
    }
}
