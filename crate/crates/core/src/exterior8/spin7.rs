use super::form::{hodge_star, merge_sign, wedge, Exact, KForm8, Scalar, PAIRS};
use crate::error::{Error, Result};
use crate::numerics::exact;
use crate::quat::Quat;
use nalgebra::DMatrix;
use serde::Serialize;

const FLOAT_TOL: f64 = 1e-9;

fn q(v: i64) -> Exact {
    Exact::from_i64(v)
}

/// The Cayley form Φ₀ on ℝ⁸ = ℝ⁴ ⊕ ℝ⁴ (14 terms, coefficients ±1).
pub fn phi0() -> KForm8<Exact> {
    let terms: [(&[usize], i64); 14] = [
        (&[0, 1, 2, 3], 1),
        (&[0, 1, 4, 5], -1),
        (&[0, 1, 6, 7], -1),
        (&[0, 2, 4, 6], -1),
        (&[0, 2, 5, 7], 1),
        (&[0, 3, 4, 7], -1),
        (&[0, 3, 5, 6], -1),
        (&[1, 2, 4, 7], -1),
        (&[1, 2, 5, 6], -1),
        (&[1, 3, 4, 6], 1),
        (&[1, 3, 5, 7], -1),
        (&[2, 3, 4, 5], -1),
        (&[2, 3, 6, 7], -1),
        (&[4, 5, 6, 7], 1),
    ];
    let terms: Vec<(&[usize], Exact)> = terms.iter().map(|(i, c)| (*i, q(*c))).collect();
    KForm8::from_terms(4, &terms).expect("static terms are valid")
}

fn two_form<S: Scalar>(a: [usize; 2], b: [usize; 2], sign_b: i64) -> KForm8<S> {
    KForm8::from_terms(2, &[(&a[..], S::one()), (&b[..], S::from_i64(sign_b))]).expect("valid")
}

/// Standard basis of Λ⁺ on the first factor: e⁰¹+e²³, e⁰²−e¹³, e⁰³+e¹².
pub fn standard_omegas<S: Scalar>() -> [KForm8<S>; 3] {
    [two_form([0, 1], [2, 3], 1), two_form([0, 2], [1, 3], -1), two_form([0, 3], [1, 2], 1)]
}

/// Standard basis of Λ⁺ on the second factor: e⁴⁵+e⁶⁷, e⁴⁶−e⁵⁷, e⁴⁷+e⁵⁶.
pub fn standard_mus<S: Scalar>() -> [KForm8<S>; 3] {
    [two_form([4, 5], [6, 7], 1), two_form([4, 6], [5, 7], -1), two_form([4, 7], [5, 6], 1)]
}

/// The standard G₂ 3-form on `span(e₁..e₇)`.
pub fn standard_g2_form<S: Scalar>() -> KForm8<S> {
    let terms: [(&[usize], i64); 7] = [
        (&[1, 2, 3], 1),
        (&[1, 4, 5], -1),
        (&[1, 6, 7], -1),
        (&[2, 4, 6], -1),
        (&[2, 5, 7], 1),
        (&[3, 4, 7], -1),
        (&[3, 5, 6], -1),
    ];
    let terms: Vec<(&[usize], S)> = terms.iter().map(|(i, c)| (*i, S::from_i64(*c))).collect();
    KForm8::from_terms(3, &terms).expect("static terms are valid")
}

/// Hodge star on `span(e₁..e₇)` with orientation `e^{1234567}`.
pub fn hodge_star7<S: Scalar>(a: &KForm8<S>) -> Result<KForm8<S>> {
    if !a.supported_in(&[1, 2, 3, 4, 5, 6, 7]) {
        return Err(Error::InvalidArgument("form involves e⁰".into()));
    }
    let mut terms = Vec::new();
    for (idx, c) in a.terms() {
        let m = super::form::mask_of(&idx);
        let comp = 0xFE & !m;
        let comp_idx: Vec<usize> = (1..8).filter(|i| comp & (1 << i) != 0).collect();
        let v = if merge_sign(m, comp) > 0 { c.clone() } else { -c.clone() };
        terms.push((comp_idx, v));
    }
    let refs: Vec<(&[usize], S)> = terms.iter().map(|(i, c)| (&i[..], c.clone())).collect();
    KForm8::from_terms(7 - a.degree(), &refs)
}

/// Matrix of a linear map Λ² → Λ² in the lexicographic `e^{ij}` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoFormOperator<S: Scalar> {
    data: Vec<S>,
}

impl<S: Scalar> TwoFormOperator<S> {
    /// `α ↦ *(α ∧ Φ)`.
    pub fn star_wedge(phi: &KForm8<S>) -> Result<Self> {
        if phi.degree() != 4 {
            return Err(Error::WrongDegree { expected: 4, got: phi.degree() });
        }
        let mut data = vec![S::zero(); 28 * 28];
        for (col, &(i, j)) in PAIRS.iter().enumerate() {
            let img = hodge_star(&wedge(&KForm8::basis(&[i, j])?, phi)?);
            for (row, v) in img.to_pair_vector()?.into_iter().enumerate() {
                data[row * 28 + col] = v;
            }
        }
        Ok(TwoFormOperator { data })
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.data[row * 28 + col]
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        (0..28)
            .map(|r| {
                let mut acc = S::zero();
                for c in 0..28 {
                    if !v[c].is_zero() {
                        acc = acc + self.data[r * 28 + c].clone() * v[c].clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> S {
        (0..28).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..28).all(|i| (0..i).all(|j| (self.get(i, j).clone() - self.get(j, i).clone()).is_negligible(tol)))
    }

    /// `(T − a)(T − b)` as a dense product.
    pub fn quadratic_residual(&self, a: i64, b: i64) -> Vec<S> {
        let shift = |x: i64| -> Vec<S> {
            let mut m = self.data.clone();
            for i in 0..28 {
                m[i * 28 + i] = m[i * 28 + i].clone() - S::from_i64(x);
            }
            m
        };
        let (ma, mb) = (shift(a), shift(b));
        let mut out = vec![S::zero(); 28 * 28];
        for i in 0..28 {
            for k in 0..28 {
                let x = &ma[i * 28 + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..28 {
                    out[i * 28 + j] = out[i * 28 + j].clone() + x.clone() * mb[k * 28 + j].clone();
                }
            }
        }
        out
    }

    pub fn to_f64(&self) -> TwoFormOperator<f64> {
        TwoFormOperator { data: self.data.iter().map(Scalar::to_f64).collect() }
    }

    /// Floating-point eigenvalues (ascending) of the symmetric part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_fn(28, 28, |i, j| 0.5 * (self.get(i, j).to_f64() + self.get(j, i).to_f64()));
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.data.chunks(28).map(|c| c.to_vec()).collect()
    }
}

/// Multiplicities of the eigenvalues 3 and −1 together with the auxiliary
/// admissibility checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenSignature {
    pub eig3_mult: usize,
    pub eig_minus1_mult: usize,
    pub symmetric: bool,
    /// `(T − 3)(T + 1) = 0` (exactly in rational mode).
    pub minimal_polynomial_holds: bool,
    /// Coefficient of `vol` in `Φ ∧ Φ`.
    pub phi_wedge_phi: f64,
    pub self_dual: bool,
    pub exact: bool,
}

impl EigenSignature {
    pub fn admissible(&self) -> bool {
        self.eig3_mult == 7
            && self.eig_minus1_mult == 21
            && self.symmetric
            && self.minimal_polynomial_holds
            && (self.phi_wedge_phi - 14.0).abs() < 1e-9
            && self.self_dual
    }

    /// Compute the signature of `α ↦ *(α∧Φ)`. Exact forms use exact ranks:
    /// the eigenvalue-3 multiplicity is `rank(T + 1)` once the minimal
    /// polynomial is verified.
    pub fn of<S: Scalar>(phi: &KForm8<S>) -> Result<Self> {
        let t = TwoFormOperator::star_wedge(phi)?;
        let exact = S::zero().to_exact().is_some();
        let symmetric = t.is_symmetric(FLOAT_TOL);
        let minimal_polynomial_holds = t.quadratic_residual(3, -1).iter().all(|v| v.is_negligible(FLOAT_TOL));
        let (eig3_mult, eig_minus1_mult) = if exact && minimal_polynomial_holds {
            let shifted = |x: i64| -> Vec<Vec<Exact>> {
                (0..28)
                    .map(|i| {
                        (0..28)
                            .map(|j| {
                                let v = t.get(i, j).to_exact().expect("exact mode");
                                if i == j {
                                    v - Exact::from_i64(x)
                                } else {
                                    v
                                }
                            })
                            .collect()
                    })
                    .collect()
            };
            (exact::rank(shifted(-1)), exact::rank(shifted(3)))
        } else {
            let ev = t.eigenvalues();
            (
                ev.iter().filter(|v| (*v - 3.0).abs() < 1e-7).count(),
                ev.iter().filter(|v| (*v + 1.0).abs() < 1e-7).count(),
            )
        };
        let vol = wedge(phi, phi)?.coeff(&[0, 1, 2, 3, 4, 5, 6, 7]).to_f64();
        let self_dual = hodge_star(phi).sub(phi).terms().all(|(_, c)| c.is_negligible(FLOAT_TOL));
        Ok(EigenSignature {
            eig3_mult,
            eig_minus1_mult,
            symmetric,
            minimal_polynomial_holds,
            phi_wedge_phi: vol,
            self_dual,
            exact,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Standard,
    HyperkahlerPair,
    G2Line,
    /// User-supplied form; admissibility rests on the eigen-signature test alone.
    Custom,
}

/// A constant admissible 4-form with its cached operator on Λ².
#[derive(Clone, Debug)]
pub struct Spin7Structure<S: Scalar> {
    phi: KForm8<S>,
    provenance: Provenance,
    validated: bool,
    op: TwoFormOperator<S>,
    signature: EigenSignature,
}

impl Spin7Structure<Exact> {
    pub fn standard() -> Self {
        Self::new(phi0(), Provenance::Standard).expect("Φ₀ is admissible")
    }
}

impl<S: Scalar> Spin7Structure<S> {
    /// Validate `phi` by the eigen-signature {3:7, −1:21}, Φ∧Φ = 14 vol and
    /// *Φ = Φ.
    pub fn new(phi: KForm8<S>, provenance: Provenance) -> Result<Self> {
        let signature = EigenSignature::of(&phi)?;
        if !signature.admissible() {
            return Err(Error::NotAdmissible(format!(
                "eig3={}, eig-1={}, Φ∧Φ={}·vol, *Φ=Φ: {}",
                signature.eig3_mult, signature.eig_minus1_mult, signature.phi_wedge_phi, signature.self_dual
            )));
        }
        let op = TwoFormOperator::star_wedge(&phi)?;
        Ok(Spin7Structure { phi, provenance, validated: true, op, signature })
    }

    pub fn phi(&self) -> &KForm8<S> {
        &self.phi
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn validated(&self) -> bool {
        self.validated
    }

    /// Constructor-built forms are admissible by construction; custom forms
    /// only pass the signature test.
    pub fn heuristic(&self) -> bool {
        self.provenance == Provenance::Custom
    }

    pub fn operator(&self) -> &TwoFormOperator<S> {
        &self.op
    }

    pub fn signature(&self) -> &EigenSignature {
        &self.signature
    }

    /// `(T + 1)/4` as a 28×28 matrix.
    pub fn proj7_matrix(&self) -> Vec<S> {
        let four = S::from_i64(4);
        let mut m = vec![S::zero(); 28 * 28];
        for i in 0..28 {
            for j in 0..28 {
                let mut v = self.op.get(i, j).clone();
                if i == j {
                    v = v + S::one();
                }
                m[i * 28 + j] = v / four.clone();
            }
        }
        m
    }

    pub fn proj7(&self, alpha: &KForm8<S>) -> Result<KForm8<S>> {
        let v = alpha.to_pair_vector()?;
        let tv = self.op.apply(&v);
        let four = S::from_i64(4);
        let out: Vec<S> = tv.into_iter().zip(v).map(|(t, a)| (t + a) / four.clone()).collect();
        Ok(KForm8::from_pair_vector(&out))
    }

    pub fn proj21(&self, alpha: &KForm8<S>) -> Result<KForm8<S>> {
        Ok(alpha.sub(&self.proj7(alpha)?))
    }

    pub fn to_f64(&self) -> Spin7Structure<f64> {
        Spin7Structure {
            phi: self.phi.to_f64(),
            provenance: self.provenance,
            validated: self.validated,
            op: self.op.to_f64(),
            signature: self.signature.clone(),
        }
    }
}

/// Φ = vol_S + vol_T − Σ ωᵢ∧μᵢ from hyperkähler triples on the two factors.
pub fn hyperkahler_pair_form<S: Scalar>(omegas: &[KForm8<S>; 3], mus: &[KForm8<S>; 3]) -> Result<Spin7Structure<S>> {
    let vol_s = KForm8::<S>::basis(&[0, 1, 2, 3])?;
    let vol_t = KForm8::<S>::basis(&[4, 5, 6, 7])?;
    let check = |forms: &[KForm8<S>; 3], support: &[usize], vol: &KForm8<S>, name: &str| -> Result<()> {
        for (i, a) in forms.iter().enumerate() {
            if a.degree() != 2 || !a.supported_in(support) {
                return Err(Error::NonOrthonormal(format!("{name}{} is not a 2-form on its factor", i + 1)));
            }
            for (j, b) in forms.iter().enumerate() {
                let expected = if i == j { vol.scale(&S::from_i64(2)) } else { KForm8::zero(4) };
                let diff = wedge(a, b)?.sub(&expected);
                if !diff.terms().all(|(_, c)| c.is_negligible(FLOAT_TOL)) {
                    return Err(Error::NonOrthonormal(format!("{name}{}∧{name}{} ≠ 2δ vol", i + 1, j + 1)));
                }
            }
        }
        Ok(())
    };
    check(omegas, &[0, 1, 2, 3], &vol_s, "ω")?;
    check(mus, &[4, 5, 6, 7], &vol_t, "μ")?;
    let mut phi = vol_s.add(&vol_t);
    for (w, m) in omegas.iter().zip(mus) {
        phi = phi.sub(&wedge(w, m)?);
    }
    Spin7Structure::new(phi, Provenance::HyperkahlerPair)
}

/// Φ = dt∧φ + *₇φ with t = x₀ and φ a 3-form on `span(e₁..e₇)`.
pub fn g2_line_form<S: Scalar>(phi3: &KForm8<S>) -> Result<Spin7Structure<S>> {
    if phi3.degree() != 3 {
        return Err(Error::WrongDegree { expected: 3, got: phi3.degree() });
    }
    let dt = KForm8::<S>::basis(&[0])?;
    let phi = wedge(&dt, phi3)?.add(&hodge_star7(phi3)?);
    Spin7Structure::new(phi, Provenance::G2Line)
}

/// Cached floating-point projector onto Λ²₇ for field computations.
#[derive(Clone, Debug)]
pub struct Proj7F64 {
    m: [[f64; 28]; 28],
}

impl Proj7F64 {
    pub fn new<S: Scalar>(s: &Spin7Structure<S>) -> Self {
        let p = s.proj7_matrix();
        let mut m = [[0.0; 28]; 28];
        for i in 0..28 {
            for j in 0..28 {
                m[i][j] = p[i * 28 + j].to_f64();
            }
        }
        Proj7F64 { m }
    }

    pub fn standard() -> Self {
        Self::new(&Spin7Structure::standard())
    }

    pub fn from_matrix(m: [[f64; 28]; 28]) -> Self {
        Proj7F64 { m }
    }

    pub fn matrix(&self) -> &[[f64; 28]; 28] {
        &self.m
    }

    pub fn apply(&self, v: &[f64; 28]) -> [f64; 28] {
        let mut out = [0.0; 28];
        for (o, row) in out.iter_mut().zip(&self.m) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Projection of an su(2)-valued 2-form, component by component.
    pub fn apply_quat(&self, v: &[Quat; 28]) -> [Quat; 28] {
        let mut out = [Quat::ZERO; 28];
        for (o, row) in out.iter_mut().zip(&self.m) {
            for (a, b) in row.iter().zip(v) {
                if *a != 0.0 {
                    *o += b.scale(*a);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi0_has_expected_terms() {
        let p = phi0();
        assert_eq!(p.len(), 14);
        assert_eq!(p.coeff(&[0, 1, 2, 3]), q(1));
        assert_eq!(p.coeff(&[1, 2, 5, 6]), q(-1));
    }

    #[test]
    fn phi0_squares_to_fourteen_vol_and_is_self_dual() {
        let p = phi0();
        let w = wedge(&p, &p).unwrap();
        assert_eq!(w, KForm8::basis(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap().scale(&q(14)));
        assert_eq!(hodge_star(&p), p);
    }

    #[test]
    fn exact_eigenstructure() {
        let s = Spin7Structure::standard();
        let sig = s.signature();
        assert!(sig.exact && sig.minimal_polynomial_holds);
        assert_eq!((sig.eig3_mult, sig.eig_minus1_mult), (7, 21));
        assert_eq!(s.operator().trace(), q(0));
    }

    #[test]
    fn model_constructions_recover_phi0() {
        let hk = hyperkahler_pair_form(&standard_omegas::<Exact>(), &standard_mus()).unwrap();
        assert_eq!(hk.phi(), &phi0());
        let g2 = g2_line_form(&standard_g2_form::<Exact>()).unwrap();
        assert_eq!(g2.phi(), &phi0());
    }

    #[test]
    fn all_negated_second_triple_is_rejected() {
        let mus = standard_mus::<Exact>().map(|m| m.neg());
        let err = hyperkahler_pair_form(&standard_omegas(), &mus).unwrap_err();
        assert!(matches!(err, Error::NotAdmissible(_)));
        let mut phi = KForm8::<Exact>::basis(&[0, 1, 2, 3]).unwrap().add(&KForm8::basis(&[4, 5, 6, 7]).unwrap());
        for (w, m) in standard_omegas::<Exact>().iter().zip(&mus) {
            phi = phi.sub(&wedge(w, m).unwrap());
        }
        let ev = TwoFormOperator::star_wedge(&phi).unwrap().eigenvalues();
        let count = |x: f64| ev.iter().filter(|v| (*v - x).abs() < 1e-9).count();
        assert_eq!((count(3.0), count(-3.0), count(1.0), count(-1.0)), (3, 4, 12, 9));
    }

    #[test]
    fn rotated_second_triple_is_admissible() {
        let [m1, m2, m3] = standard_mus::<Exact>();
        let s = hyperkahler_pair_form(&standard_omegas(), &[m1.neg(), m2.neg(), m3]).unwrap();
        assert_eq!(s.signature().eig3_mult, 7);
        assert_ne!(s.phi(), &phi0());
    }

    #[test]
    fn scaled_triple_is_rejected() {
        let mut om = standard_omegas::<Exact>();
        om[0] = om[0].scale(&q(2));
        assert!(matches!(hyperkahler_pair_form(&om, &standard_mus()), Err(Error::NonOrthonormal(_))));
    }

    #[test]
    fn six_term_g2_form_is_rejected() {
        let six = standard_g2_form::<Exact>().sub(&KForm8::basis(&[3, 5, 6]).unwrap().neg());
        assert_eq!(six.len(), 6);
        assert!(g2_line_form(&six).is_err());
    }

    #[test]
    fn projector_traces() {
        let s = Spin7Structure::standard();
        let p = s.proj7_matrix();
        let tr = (0..28).fold(q(0), |a, i| a + p[i * 28 + i].clone());
        assert_eq!(tr, q(7));
    }

    #[test]
    fn omega_minus_mu_lies_in_lambda7() {
        let s = Spin7Structure::standard();
        let a = standard_omegas::<Exact>()[0].sub(&standard_mus()[0]);
        assert_eq!(s.proj7(&a).unwrap(), a);
        let b = standard_omegas::<Exact>()[0].add(&standard_mus()[0]);
        assert!(s.proj7(&b).unwrap().is_zero());
    }
}
