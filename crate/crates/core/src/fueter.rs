//! The charge-one Fueter operator on the flat torus T⁴ = (ℝ/2πℤ)⁴ and the
//! component-wise Spin(7)-instanton check on ℝ⁴ × ℝ⁴.
//!
//! Sections carry two quaternions per node. The Dirac operator is
//! `D = ∂₀ + I∂₁ + J∂₂ + K∂₃` with `I, J, K` right multiplication by
//! `i, j, k`. The Fueter operator is `γ` applied to the flat derivative `∇n`,
//! regarded as a block `TQ → NQ ≅ ℍ`; evaluated on `e₀` it satisfies
//! `4 γ(∇n)(e₀) = conj(D(conj n))`.

use crate::asd4::{sd_coefficients, Point4, TwoForm4};
use crate::error::{Error, Result};
use crate::exterior8::{gamma_project, Mat4, Proj7F64, Provenance, QuaternionicPair, Scalar, Spin7Structure};
use crate::product::{component, curvature8, pi7_norm, two_form8_norm_sqr, Connection8, Point8};
use crate::quat::Quat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Finest allowed spacing bound by default: eight nodes per period.
pub const DEFAULT_MAX_SPACING: f64 = 2.0 * PI / 8.0;

/// A section over a periodic `n⁴` grid with two quaternion components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuaternionField {
    n: usize,
    data: Vec<[Quat; 2]>,
}

impl QuaternionField {
    pub fn new(n: usize, data: Vec<[Quat; 2]>) -> Result<Self> {
        if n < 5 {
            return Err(Error::TooFewValues { needed: 5, got: n });
        }
        if data.len() != n.pow(4) {
            return Err(Error::IncompatibleGrids(format!("{} samples for an {n}⁴ grid", data.len())));
        }
        Ok(QuaternionField { n, data })
    }

    pub fn from_fn<F: Fn(Point4) -> [Quat; 2] + Sync + Send>(n: usize, f: F) -> Result<Self> {
        let h = 2.0 * PI / n as f64;
        let data = (0..n.pow(4))
            .into_par_iter()
            .map(|idx| f(Self::position(n, h, idx)))
            .collect();
        Self::new(n, data)
    }

    pub fn constant(n: usize, v: [Quat; 2]) -> Result<Self> {
        Self::new(n, vec![v; n.pow(4)])
    }

    fn position(n: usize, h: f64, idx: usize) -> Point4 {
        let c = Self::coords(n, idx);
        c.map(|i| i as f64 * h)
    }

    fn coords(n: usize, idx: usize) -> [usize; 4] {
        [idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn data(&self) -> &[[Quat; 2]] {
        &self.data
    }

    pub fn point(&self, idx: usize) -> Point4 {
        Self::position(self.n, self.spacing(), idx)
    }

    pub fn conj(&self) -> Self {
        QuaternionField { n: self.n, data: self.data.iter().map(|p| p.map(|q| q.conj())).collect() }
    }

    /// `max_x (|s₀(x)|² + |s₁(x)|²)^{1/2}`.
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(|p| (p[0].norm_sqr() + p[1].norm_sqr()).sqrt()).fold(0.0, f64::max)
    }

    pub fn max_difference(&self, other: &QuaternionField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt())
            .fold(0.0, f64::max)
    }

    fn shifted(&self, idx: usize, axis: usize, by: isize) -> usize {
        let n = self.n;
        let mut c = Self::coords(n, idx);
        c[axis] = (c[axis] as isize + by).rem_euclid(n as isize) as usize;
        ((c[0] * n + c[1]) * n + c[2]) * n + c[3]
    }

    /// Fourth-order periodic central difference along `axis` at node `idx`.
    pub fn derivative(&self, idx: usize, axis: usize) -> [Quat; 2] {
        let h = self.spacing();
        let g = |k| self.data[self.shifted(idx, axis, k)];
        let (m2, m1, p1, p2) = (g(-2), g(-1), g(1), g(2));
        std::array::from_fn(|c| (m2[c] - m1[c].scale(8.0) + p1[c].scale(8.0) - p2[c]).scale(1.0 / (12.0 * h)))
    }

    /// Fourth-order periodic second difference along `axis`.
    pub fn second_derivative(&self, idx: usize, axis: usize) -> [Quat; 2] {
        let h = self.spacing();
        let g = |k| self.data[self.shifted(idx, axis, k)];
        let (m2, m1, z, p1, p2) = (g(-2), g(-1), g(0), g(1), g(2));
        std::array::from_fn(|c| {
            (-m2[c] + m1[c].scale(16.0) - z[c].scale(30.0) + p1[c].scale(16.0) - p2[c]).scale(1.0 / (12.0 * h * h))
        })
    }

    fn map_nodes<F: Fn(usize) -> [Quat; 2] + Sync + Send>(&self, f: F) -> Self {
        QuaternionField { n: self.n, data: (0..self.data.len()).into_par_iter().map(f).collect() }
    }
}

fn check_spacing(s: &QuaternionField, max_h: f64) -> Result<()> {
    if s.spacing() > max_h {
        return Err(Error::GridTooCoarse { h: s.spacing(), bound: max_h });
    }
    Ok(())
}

const UNITS: [Quat; 4] = [Quat::ONE, Quat::I, Quat::J, Quat::K];

/// `Ds = ∂₀s + (∂₁s)i + (∂₂s)j + (∂₃s)k`, componentwise.
pub fn dirac_apply(s: &QuaternionField) -> Result<QuaternionField> {
    dirac_apply_with_bound(s, DEFAULT_MAX_SPACING)
}

pub fn dirac_apply_with_bound(s: &QuaternionField, max_h: f64) -> Result<QuaternionField> {
    check_spacing(s, max_h)?;
    Ok(s.map_nodes(|idx| {
        let mut out = [Quat::ZERO; 2];
        for (mu, e) in UNITS.iter().enumerate() {
            let d = s.derivative(idx, mu);
            for c in 0..2 {
                out[c] += d[c] * *e;
            }
        }
        out
    }))
}

/// Formal adjoint `D* = −∂₀ + (∂₁·)i + (∂₂·)j + (∂₃·)k`; `D*D` is the flat
/// Laplacian `−Σ∂²`.
pub fn dirac_adjoint_apply(s: &QuaternionField) -> Result<QuaternionField> {
    check_spacing(s, DEFAULT_MAX_SPACING)?;
    Ok(s.map_nodes(|idx| {
        let mut out = [Quat::ZERO; 2];
        for (mu, e) in UNITS.iter().enumerate() {
            let d = s.derivative(idx, mu);
            for c in 0..2 {
                out[c] += if mu == 0 { -d[c] } else { d[c] * *e };
            }
        }
        out
    }))
}

/// `−Σ_μ ∂²_μ s` by direct second differences.
pub fn flat_laplacian(s: &QuaternionField) -> QuaternionField {
    s.map_nodes(|idx| {
        let mut out = [Quat::ZERO; 2];
        for mu in 0..4 {
            let d = s.second_derivative(idx, mu);
            for c in 0..2 {
                out[c] -= d[c];
            }
        }
        out
    })
}

/// Per-node blocks in the image of γ, one for each quaternion component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomPhiField {
    n: usize,
    data: Vec<[Mat4<f64>; 2]>,
}

impl HomPhiField {
    pub fn data(&self) -> &[[Mat4<f64>; 2]] {
        &self.data
    }

    /// Largest `|γL − L|` over all blocks (zero for a valid field).
    pub fn image_residual(&self, pair: &QuaternionicPair<f64>) -> f64 {
        self.data
            .iter()
            .flat_map(|b| b.iter())
            .map(|l| {
                let g = gamma_project(pair, l);
                (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (g[i][j] - l[i][j]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().flat_map(|b| b.iter()).map(frobenius).fold(0.0, f64::max)
    }

    /// Values on `e₀`, as quaternions.
    pub fn eval_e0(&self) -> Vec<[Quat; 2]> {
        self.data.iter().map(|b| b.map(|l| ev_e0(&l))).collect()
    }
}

fn frobenius(l: &Mat4<f64>) -> f64 {
    l.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// `L(e₀)` as a quaternion.
pub fn ev_e0(l: &Mat4<f64>) -> Quat {
    Quat::new(l[0][0], l[1][0], l[2][0], l[3][0])
}

/// The block `L[b][a] = ∂_a n_b` of a quaternion-valued derivative.
fn derivative_block(d: &[Quat; 4]) -> Mat4<f64> {
    std::array::from_fn(|b| std::array::from_fn(|a| d[a].to_array()[b]))
}

/// `γ(∇n)` on the torus grid.
pub fn fueter_apply(s: &QuaternionField) -> Result<HomPhiField> {
    check_spacing(s, DEFAULT_MAX_SPACING)?;
    let pair = QuaternionicPair::<f64>::standard();
    let data = (0..s.data.len())
        .into_par_iter()
        .map(|idx| {
            let d: [[Quat; 2]; 4] = std::array::from_fn(|mu| s.derivative(idx, mu));
            std::array::from_fn(|c| gamma_project(&pair, &derivative_block(&d.map(|x| x[c]))))
        })
        .collect();
    Ok(HomPhiField { n: s.n, data })
}

/// `γ(∇n)(x)` for a section of ℝ⁴ given by a sampler, with central
/// differences of spacing `h`.
pub fn fueter_at<F: Fn(Point4) -> [Quat; 2]>(f: F, x: Point4, h: f64) -> [Mat4<f64>; 2] {
    let pair = QuaternionicPair::<f64>::standard();
    let d: [[Quat; 2]; 4] = std::array::from_fn(|mu| {
        let at = |t: f64| {
            let mut p = x;
            p[mu] += t;
            f(p)
        };
        let (m2, m1, p1, p2) = (at(-2.0 * h), at(-h), at(h), at(2.0 * h));
        std::array::from_fn(|c| (m2[c] - m1[c].scale(8.0) + p1[c].scale(8.0) - p2[c]).scale(1.0 / (12.0 * h)))
    });
    std::array::from_fn(|c| gamma_project(&pair, &derivative_block(&d.map(|x| x[c]))))
}

/// `max |4γ(∇n)(e₀) − conj(D(conj n))|` over the grid.
pub fn lift_residual(s: &QuaternionField) -> Result<f64> {
    let f = fueter_apply(s)?.eval_e0();
    let d = dirac_apply(&s.conj())?;
    Ok(f.iter()
        .zip(d.data())
        .map(|(a, b)| (0..2).map(|c| (a[c].scale(4.0) - b[c].conj()).norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max))
}

/// Integer frequency vectors with `|k|² ≤ kmax_sq`, one of each `±k` pair.
pub fn half_frequencies(kmax_sq: i64) -> Vec<[i64; 4]> {
    let m = (kmax_sq as f64).sqrt().floor() as i64;
    let mut out = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            for c in -m..=m {
                for d in -m..=m {
                    let k = [a, b, c, d];
                    let n2: i64 = k.iter().map(|v| v * v).sum();
                    let first = k.iter().find(|&&v| v != 0).copied().unwrap_or(0);
                    if n2 > 0 && n2 <= kmax_sq && first > 0 {
                        out.push(k);
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelCount {
    /// Real dimension of the trial space.
    pub trial_dim: usize,
    pub kernel_dim: usize,
    /// Smallest nonzero singular value ratio seen, a gap indicator.
    pub min_nonzero_ratio: f64,
}

/// Real dimension of the kernel of the grid Fueter operator restricted to the
/// real Fourier modes `cos(k·x)c`, `sin(k·x)c` with `|k|² ≤ kmax_sq`.
pub fn fueter_kernel_dimension(n: usize, kmax_sq: i64, tol: f64) -> Result<KernelCount> {
    let probes: Vec<usize> = (0..32).map(|i| (i * 7919 + 13) % n.pow(4)).collect();
    let mut modes = vec![[0i64; 4]];
    modes.extend(half_frequencies(kmax_sq));
    let mut count = KernelCount { trial_dim: 0, kernel_dim: 0, min_nonzero_ratio: f64::INFINITY };
    for k in modes {
        let trig: &[fn(f64) -> f64] = if k == [0; 4] { &[f64::cos] } else { &[f64::cos, f64::sin] };
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for t in trig {
            for comp in 0..2 {
                for e in UNITS {
                    let field = QuaternionField::from_fn(n, |x| {
                        let ph = (0..4).map(|i| k[i] as f64 * x[i]).sum::<f64>();
                        let mut v = [Quat::ZERO; 2];
                        v[comp] = e.scale(t(ph));
                        v
                    })?;
                    let out = fueter_apply(&field)?;
                    cols.push(probes.iter().flat_map(|&p| out.data[p].iter().flat_map(|l| l.iter().flatten().copied())).collect());
                }
            }
        }
        let m = nalgebra::DMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i]);
        let sv = m.singular_values();
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let scale = if smax > 0.0 { smax } else { 1.0 };
        let rank = sv.iter().filter(|&&s| s > tol * scale).count();
        if let Some(m) = sv.iter().filter(|&&s| s > tol * scale).map(|s| s / scale).reduce(f64::min) {
            count.min_nonzero_ratio = count.min_nonzero_ratio.min(m);
        }
        count.trial_dim += cols.len();
        count.kernel_dim += cols.len() - rank;
    }
    Ok(count)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentwiseReport {
    pub points: usize,
    /// `max |(F^{2,0})⁺ − (F^{0,2})⁺|` under `ω_i ↔ μ_i`.
    pub sd_difference: f64,
    /// `max |γ(F^{1,1})|`.
    pub gamma_mixed: f64,
    /// `max |π₇ F|`.
    pub pi7: f64,
    /// `max ||π₇F| − (½ r₁² + r₂²)^{1/2}|` with `r₁, r₂` the two above.
    pub equivalence_residual: f64,
    /// Same, divided by `max |F|`.
    pub relative_equivalence_residual: f64,
}

fn block_coefficients(f: &crate::product::TwoForm8, off: usize) -> [Quat; 3] {
    let g: TwoForm4 = crate::asd4::PAIRS4.map(|(a, b)| component(f, off + a, off + b));
    sd_coefficients(&g)
}

/// The three residuals of the component-wise characterization at the given
/// points, with `π₇` from the hyperkähler-pair structure.
pub fn componentwise_instanton_check<C: Connection8 + ?Sized, S: Scalar>(
    a: &C,
    s: &Spin7Structure<S>,
    points: &[Point8],
) -> Result<ComponentwiseReport> {
    if !matches!(s.provenance(), Provenance::Standard | Provenance::HyperkahlerPair) {
        return Err(Error::InvalidArgument("component-wise check needs the hyperkähler-pair structure".into()));
    }
    if points.is_empty() {
        return Err(Error::EmptyField);
    }
    let proj = Proj7F64::new(s);
    let pair = QuaternionicPair::<f64>::standard();
    let rows: Vec<[f64; 5]> = points
        .par_iter()
        .map(|&x| {
            let f = curvature8(a, x);
            let (sc, tc) = (block_coefficients(&f, 0), block_coefficients(&f, 4));
            let r1 = (0..3).map(|i| 2.0 * (sc[i] - tc[i]).su2_norm_sqr()).sum::<f64>().sqrt();
            let mut r2 = 0.0;
            for comp in 0..4 {
                let l: Mat4<f64> = std::array::from_fn(|b| std::array::from_fn(|c| component(&f, c, 4 + b).to_array()[comp]));
                r2 += 2.0 * frobenius(&gamma_project(&pair, &l)).powi(2);
            }
            let r2 = r2.sqrt();
            let p = pi7_norm(&proj, &f);
            [r1, r2, p, (p - (0.5 * r1 * r1 + r2 * r2).sqrt()).abs(), two_form8_norm_sqr(&f).sqrt()]
        })
        .collect();
    let max = |k: usize| rows.iter().map(|r| r[k]).fold(0.0, f64::max);
    let fmax = max(4);
    Ok(ComponentwiseReport {
        points: points.len(),
        sd_difference: max(0),
        gamma_mixed: max(1),
        pi7: max(2),
        equivalence_residual: max(3),
        relative_equivalence_residual: if fmax > 0.0 { max(3) / fmax } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_section_is_in_both_kernels() {
        let s = QuaternionField::constant(8, [Quat::new(1.0, 2.0, -1.0, 0.5), Quat::K]).unwrap();
        assert!(dirac_apply(&s).unwrap().sup_norm() < 1e-13);
        assert!(fueter_apply(&s).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn coarse_grid_rejected() {
        let s = QuaternionField::constant(6, [Quat::ONE; 2]).unwrap();
        assert!(matches!(dirac_apply(&s), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn half_frequency_count() {
        // 88 nonzero vectors with |k|² ≤ 4 in ℤ⁴
        assert_eq!(half_frequencies(4).len(), 44);
    }
}
