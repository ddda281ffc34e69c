//! su(2) connections on the flat product ℝ⁴ × ℝ⁴ (base coordinates 0..3,
//! fiber coordinates 4..7) and their curvature.

use crate::asd4::{Connection4, Point4};
use crate::exterior8::{pair_index, Proj7F64, PAIRS};
use crate::quat::Quat;
use std::sync::Arc;

pub type Point8 = [f64; 8];
pub type OneForm8 = [Quat; 8];
/// su(2)-valued 2-form in the lexicographic `e^{ij}` basis.
pub type TwoForm8 = [Quat; 28];

pub trait Connection8: Send + Sync {
    fn potential(&self, x: Point8) -> OneForm8;

    /// `d[k][m] = ∂_k A_m`; fourth-order central differences by default.
    fn jacobian(&self, x: Point8) -> [OneForm8; 8] {
        fd_jacobian8(|p| self.potential(p), x, 1e-3)
    }
}

pub fn fd_jacobian8<F: Fn(Point8) -> OneForm8>(f: F, x: Point8, h: f64) -> [OneForm8; 8] {
    std::array::from_fn(|k| {
        let at = |t: f64| {
            let mut p = x;
            p[k] += t;
            f(p)
        };
        let (m2, m1, p1, p2) = (at(-2.0 * h), at(-h), at(h), at(2.0 * h));
        std::array::from_fn(|m| (m2[m] - m1[m].scale(8.0) + p1[m].scale(8.0) - p2[m]).scale(1.0 / (12.0 * h)))
    })
}

/// `F_{ij} = ∂_i A_j − ∂_j A_i + [A_i, A_j]`.
pub fn curvature8<C: Connection8 + ?Sized>(c: &C, x: Point8) -> TwoForm8 {
    let a = c.potential(x);
    let d = c.jacobian(x);
    PAIRS.map(|(i, j)| d[i][j] - d[j][i] + a[i].bracket(a[j]))
}

/// `Σ 2|F_{ij}|²`.
pub fn two_form8_norm_sqr(f: &TwoForm8) -> f64 {
    f.iter().map(|q| q.su2_norm_sqr()).sum()
}

/// `|π₇ F|` in the su(2) norm.
pub fn pi7_norm(p: &Proj7F64, f: &TwoForm8) -> f64 {
    two_form8_norm_sqr(&p.apply_quat(f)).sqrt()
}

pub fn fiber_part(x: &Point8) -> Point4 {
    [x[4], x[5], x[6], x[7]]
}

pub fn component(f: &TwoForm8, i: usize, j: usize) -> Quat {
    if i < j {
        f[pair_index(i, j)]
    } else {
        -f[pair_index(j, i)]
    }
}

/// Pullback of a connection on the fiber ℝ⁴ along the projection to the fiber.
#[derive(Clone, Debug)]
pub struct FiberPullback<C: Connection4> {
    pub inner: C,
}

impl<C: Connection4> Connection8 for FiberPullback<C> {
    fn potential(&self, x: Point8) -> OneForm8 {
        let a = self.inner.potential(fiber_part(&x));
        std::array::from_fn(|m| if m < 4 { Quat::ZERO } else { a[m - 4] })
    }

    fn jacobian(&self, x: Point8) -> [OneForm8; 8] {
        let d = self.inner.jacobian(fiber_part(&x));
        std::array::from_fn(|k| std::array::from_fn(|m| if k < 4 || m < 4 { Quat::ZERO } else { d[k - 4][m - 4] }))
    }
}

type Potential8 = Arc<dyn Fn(Point8) -> OneForm8 + Send + Sync>;

/// Connection given by a potential sampler, differentiated numerically.
#[derive(Clone)]
pub struct SampledConnection8 {
    eval: Potential8,
    pub h: f64,
}

impl SampledConnection8 {
    pub fn new<F: Fn(Point8) -> OneForm8 + Send + Sync + 'static>(f: F, h: f64) -> Self {
        SampledConnection8 { eval: Arc::new(f), h }
    }

    pub fn flat() -> Self {
        Self::new(|_| [Quat::ZERO; 8], 1e-3)
    }
}

impl Connection8 for SampledConnection8 {
    fn potential(&self, x: Point8) -> OneForm8 {
        (self.eval)(x)
    }

    fn jacobian(&self, x: Point8) -> [OneForm8; 8] {
        fd_jacobian8(|p| (self.eval)(p), x, self.h)
    }
}
