use super::form::{KForm8, Scalar};
use super::spin7::{standard_mus, standard_omegas};

/// A 4×4 block `L[b][a]`: component b of the image of `e_a`.
pub type Mat4<S> = [[S; 4]; 4];

fn mat_mul<S: Scalar>(a: &Mat4<S>, b: &Mat4<S>) -> Mat4<S> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..4).fold(S::zero(), |acc, k| acc + a[i][k].clone() * b[k][j].clone()))
    })
}

/// Complex structure of a 2-form on the 4-dimensional factor starting at
/// coordinate `offset`: `J e_a = Σ_b ω(e_a, e_b) e_b`.
pub fn complex_structure<S: Scalar>(omega: &KForm8<S>, offset: usize) -> Mat4<S> {
    std::array::from_fn(|b| std::array::from_fn(|a| if a == b { S::zero() } else { omega.coeff(&[offset + a, offset + b]) }))
}

/// Quaternionic triples `(I₁, I₂, I₃)` on TQ and `(J₁, J₂, J₃)` on NQ.
#[derive(Clone, Debug)]
pub struct QuaternionicPair<S: Scalar> {
    pub i: [Mat4<S>; 3],
    pub j: [Mat4<S>; 3],
}

impl<S: Scalar> QuaternionicPair<S> {
    /// Triples induced by the standard ω_i on TQ and μ_i on NQ.
    pub fn standard() -> Self {
        let om = standard_omegas::<S>();
        let mu = standard_mus::<S>();
        QuaternionicPair {
            i: std::array::from_fn(|k| complex_structure(&om[k], 0)),
            j: std::array::from_fn(|k| complex_structure(&mu[k], 4)),
        }
    }
}

/// `γL = ¼(L − Σ J_i L I_i)`, the orthogonal projector onto Hom_Φ(TQ, NQ).
pub fn gamma_project<S: Scalar>(pair: &QuaternionicPair<S>, l: &Mat4<S>) -> Mat4<S> {
    let mut acc = l.clone();
    for k in 0..3 {
        let t = mat_mul(&pair.j[k], &mat_mul(l, &pair.i[k]));
        for b in 0..4 {
            for a in 0..4 {
                acc[b][a] = acc[b][a].clone() - t[b][a].clone();
            }
        }
    }
    let four = S::from_i64(4);
    acc.map(|row| row.map(|v| v / four.clone()))
}

/// Matrix of `gamma_project` on the 16-dimensional space of blocks
/// (row-major flattening `b·4 + a`).
pub fn gamma_matrix<S: Scalar>(pair: &QuaternionicPair<S>) -> Vec<Vec<S>> {
    let mut cols = Vec::with_capacity(16);
    for k in 0..16 {
        let e: Mat4<S> = std::array::from_fn(|b| std::array::from_fn(|a| if b * 4 + a == k { S::one() } else { S::zero() }));
        cols.push(gamma_project(pair, &e));
    }
    (0..16).map(|r| (0..16).map(|c| cols[c][r / 4][r % 4].clone()).collect()).collect()
}

/// The mixed 2-form `Σ L[b][a] e^a ∧ e^{4+b}`.
pub fn hom_to_two_form<S: Scalar>(l: &Mat4<S>) -> KForm8<S> {
    let mut terms = Vec::new();
    for (b, row) in l.iter().enumerate() {
        for (a, v) in row.iter().enumerate() {
            terms.push(([a, 4 + b], v.clone()));
        }
    }
    let refs: Vec<(&[usize], S)> = terms.iter().map(|(i, v)| (&i[..], v.clone())).collect();
    KForm8::from_terms(2, &refs).expect("valid indices")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior8::{Exact, Spin7Structure};
    use crate::numerics::exact::rank;

    fn identity<S: Scalar>() -> Mat4<S> {
        std::array::from_fn(|b| std::array::from_fn(|a| if a == b { S::one() } else { S::zero() }))
    }

    #[test]
    fn triples_are_quaternionic() {
        let p = QuaternionicPair::<Exact>::standard();
        let minus_id = identity::<Exact>().map(|r| r.map(|v| -v));
        for t in [&p.i, &p.j] {
            for k in 0..3 {
                assert_eq!(mat_mul(&t[k], &t[k]), minus_id);
            }
            assert_eq!(mat_mul(&t[0], &t[1]), t[2]);
        }
    }

    #[test]
    fn gamma_has_rank_four_and_image_in_lambda7() {
        let p = QuaternionicPair::<Exact>::standard();
        let g = gamma_matrix(&p);
        assert_eq!(rank(g.clone()), 4);
        let complement: Vec<Vec<Exact>> = (0..16)
            .map(|r| (0..16).map(|c| if r == c { Exact::from_i64(1) - g[r][c].clone() } else { -g[r][c].clone() }).collect())
            .collect();
        assert_eq!(rank(complement), 12);
        let s = Spin7Structure::standard();
        for k in 0..16 {
            let e: Mat4<Exact> =
                std::array::from_fn(|b| std::array::from_fn(|a| if b * 4 + a == k { Exact::from_i64(1) } else { Exact::from_i64(0) }));
            let img = hom_to_two_form(&gamma_project(&p, &e));
            assert_eq!(s.proj7(&img).unwrap(), img);
            let rest = hom_to_two_form(&e).sub(&img);
            assert!(s.proj7(&rest).unwrap().is_zero());
        }
    }

    #[test]
    fn gamma_fixed_point_satisfies_minus_three() {
        let p = QuaternionicPair::<Exact>::standard();
        let l = gamma_project(&p, &identity());
        assert_eq!(gamma_project(&p, &l), l);
        let mut sum: Mat4<Exact> = std::array::from_fn(|_| std::array::from_fn(|_| Exact::from_i64(0)));
        for k in 0..3 {
            let t = mat_mul(&p.j[k], &mat_mul(&l, &p.i[k]));
            for b in 0..4 {
                for a in 0..4 {
                    sum[b][a] = sum[b][a].clone() + t[b][a].clone();
                }
            }
        }
        assert_eq!(sum, l.map(|r| r.map(|v| v * Exact::from_i64(-3))));
    }
}
