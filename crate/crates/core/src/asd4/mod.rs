//! The charge-one SU(2) ASD instanton on ℝ⁴, its curvature, the deformation
//! operator δ_I and the 8-dimensional framed moduli tangent space.

mod decay;
mod deformation;
mod energy;
mod instanton;

pub use decay::{decay_slope, radial_envelope, sample_radial, sphere_directions};
pub use deformation::{
    delta_i_apply, gram_matrix, moduli_tangent_basis, one_form_norm_sqr, quaternionic_action, DeltaI, FramingProfile,
    InfinitesimalDeformation, TangentLabel,
};
pub use energy::{l2_inner, radial_rule, yang_mills_energy, RadialRule};
pub use instanton::{curvature, curvature_with_bound, Curvature, Gauge, GaugeField4, OneInstanton, SampledGauge};

use crate::quat::Quat;

pub type Point4 = [f64; 4];
/// su(2)-valued 1-form components `A_μ`.
pub type OneForm4 = [Quat; 4];
/// su(2)-valued 2-form components in the order (01, 02, 03, 12, 13, 23).
pub type TwoForm4 = [Quat; 6];

/// Index of `e^{μν}` (`μ < ν`) in [`TwoForm4`].
pub const fn pair4(mu: usize, nu: usize) -> usize {
    match (mu, nu) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("pair4 expects mu < nu < 4"),
    }
}

pub const PAIRS4: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// A connection on the trivial bundle over ℝ⁴ with derivatives.
pub trait Connection4: Send + Sync {
    fn potential(&self, x: Point4) -> OneForm4;

    /// `d[ν][μ] = ∂_ν A_μ`; defaults to fourth-order central differences.
    fn jacobian(&self, x: Point4) -> [OneForm4; 4] {
        fd_jacobian(|p| self.potential(p), x, 1e-3)
    }
}

/// Fourth-order central-difference Jacobian of a 1-form sampler.
pub fn fd_jacobian<F: Fn(Point4) -> OneForm4>(f: F, x: Point4, h: f64) -> [OneForm4; 4] {
    let mut out = [[Quat::ZERO; 4]; 4];
    for (nu, row) in out.iter_mut().enumerate() {
        let at = |t: f64| {
            let mut p = x;
            p[nu] += t;
            f(p)
        };
        let (m2, m1, p1, p2) = (at(-2.0 * h), at(-h), at(h), at(2.0 * h));
        for mu in 0..4 {
            row[mu] = (m2[mu] - m1[mu].scale(8.0) + p1[mu].scale(8.0) - p2[mu]).scale(1.0 / (12.0 * h));
        }
    }
    out
}

/// `F_μν = ∂_μA_ν − ∂_νA_μ + [A_μ, A_ν]`.
pub fn curvature_from(a: &OneForm4, da: &[OneForm4; 4]) -> TwoForm4 {
    PAIRS4.map(|(m, n)| da[m][n] - da[n][m] + a[m].bracket(a[n]))
}

/// Coefficients `c_i` of `F⁺ = Σ c_i ω_i` for ω₁ = e⁰¹+e²³, ω₂ = e⁰²−e¹³, ω₃ = e⁰³+e¹².
pub fn sd_coefficients(f: &TwoForm4) -> [Quat; 3] {
    [
        (f[0] + f[5]).scale(0.5),
        (f[1] - f[4]).scale(0.5),
        (f[2] + f[3]).scale(0.5),
    ]
}

/// Self-dual part of a 2-form.
pub fn sd_part(f: &TwoForm4) -> TwoForm4 {
    let [c1, c2, c3] = sd_coefficients(f);
    [c1, c2, c3, c3, -c2, c1]
}

/// Anti-self-dual part of a 2-form.
pub fn asd_part(f: &TwoForm4) -> TwoForm4 {
    let s = sd_part(f);
    std::array::from_fn(|k| f[k] - s[k])
}

/// `Σ_{μ<ν} |F_μν|²` with the su(2) norm `|a|² = 2|a|²_ℍ`.
pub fn two_form_norm_sqr(f: &TwoForm4) -> f64 {
    f.iter().map(|q| q.su2_norm_sqr()).sum()
}

/// Apply a map to each component of a 2-form.
pub fn map_two_form(f: &TwoForm4, g: impl Fn(Quat) -> Quat) -> TwoForm4 {
    f.map(g)
}
