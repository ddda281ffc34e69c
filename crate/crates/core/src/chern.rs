//! Exact index formulas over topological ledgers.
//!
//! The characteristic numbers of a Spin(7)-manifold, a bundle over it or a
//! Cayley submanifold cannot be computed here; they are supplied as exact
//! rationals and the formulas relating them are evaluated in `BigRational`.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Rationals travel through JSON as integers or `"p/q"` strings.
pub mod rational_serde {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Text(String),
    }

    pub fn parse(s: &str) -> std::result::Result<BigRational, String> {
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
                let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
                if d.is_zero() {
                    return Err(format!("zero denominator in {s:?}"));
                }
                Ok(BigRational::new(n, d))
            }
            None => s.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| format!("not a rational: {s:?}")),
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> std::result::Result<BigRational, E> {
        match r {
            Repr::Int(n) => Ok(q(n)),
            Repr::Text(s) => parse(&s).map_err(E::custom),
        }
    }

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.serialize_str(&v.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigRational>, D::Error> {
            Option::<Repr>::deserialize(d)?.map(from_repr).transpose()
        }
    }
}

/// Betti numbers and characteristic integrals of a bundle `E → X` over a
/// compact Spin(7)-manifold. SU(r) formulas read `rank_r` and the `c₂`, `c₄`
/// integrals; the general formula reads `dim_g` and the adjoint-bundle
/// integrals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spin7Ledger {
    pub b0: u64,
    pub b1: u64,
    pub b2_7: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_g: Option<u32>,
    /// `∫ p₁(X) c₂(E)`
    #[serde(rename = "int_p1X_c2E", default, with = "rational_serde::option", skip_serializing_if = "Option::is_none")]
    pub int_p1x_c2e: Option<BigRational>,
    /// `∫ c₂(E)²`
    #[serde(rename = "int_c2E_sq", default, with = "rational_serde::option", skip_serializing_if = "Option::is_none")]
    pub int_c2e_sq: Option<BigRational>,
    /// `∫ c₄(E)`
    #[serde(rename = "int_c4E", default, with = "rational_serde::option", skip_serializing_if = "Option::is_none")]
    pub int_c4e: Option<BigRational>,
    /// `∫ p₁(𝔤_E) p₁(X)`
    #[serde(rename = "int_p1gE_p1X", default, with = "rational_serde::option", skip_serializing_if = "Option::is_none")]
    pub int_p1ge_p1x: Option<BigRational>,
    /// `∫ p₁(𝔤_E)² − 2p₂(𝔤_E)`
    #[serde(rename = "int_p1gE_sq_minus_2p2gE", default, with = "rational_serde::option", skip_serializing_if = "Option::is_none")]
    pub int_p1ge_sq_minus_2p2ge: Option<BigRational>,
}

impl Spin7Ledger {
    /// The trivial SU(r) bundle over a manifold with holonomy all of
    /// Spin(7): `b⁰ = 1`, `b¹ = b²₇ = 0`, all integrals zero.
    pub fn trivial_su(r: u32) -> Self {
        Spin7Ledger {
            b0: 1,
            rank_r: Some(r),
            int_p1x_c2e: Some(q(0)),
            int_c2e_sq: Some(q(0)),
            int_c4e: Some(q(0)),
            ..Default::default()
        }
    }

    fn betti(&self) -> BigRational {
        q(self.b1 as i64) - q(self.b0 as i64) - q(self.b2_7 as i64)
    }

    /// Adjoint-bundle integrals of an SU(r) ledger, read off from
    /// `ch(𝔤_E ⊗ ℂ) = r² − 1 − 2r c₂ + (1 + r/6) c₂² − (r/3) c₄`.
    pub fn adjoint_of_su(&self) -> Result<Spin7Ledger> {
        let r = q(self.rank_r.ok_or(Error::MissingField("rank_r"))? as i64);
        let p1c2 = self.int_p1x_c2e.clone().ok_or(Error::MissingField("int_p1X_c2E"))?;
        let c2sq = self.int_c2e_sq.clone().ok_or(Error::MissingField("int_c2E_sq"))?;
        let c4 = self.int_c4e.clone().ok_or(Error::MissingField("int_c4E"))?;
        let dim = self.rank_r.map(|r| r * r - 1);
        let ch4 = (q(1) + &r / q(6)) * c2sq - &r / q(3) * c4;
        Ok(Spin7Ledger {
            b0: self.b0,
            b1: self.b1,
            b2_7: self.b2_7,
            dim_g: dim,
            int_p1ge_p1x: Some(-q(2) * &r * p1c2),
            int_p1ge_sq_minus_2p2ge: Some(q(12) * ch4),
            ..Default::default()
        })
    }
}

/// Invariants of a compact Cayley submanifold `Q` and a bundle restricted to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CayleyLedger {
    /// Signature `b⁺ − b⁻`.
    pub sigma: i64,
    /// Euler characteristic.
    pub chi: i64,
    /// `[Q]·[Q]`
    pub self_int: i64,
    /// `∫_Q c₂(E_∞)`
    #[serde(rename = "int_c2Einf", default = "BigRational::zero", with = "rational_serde")]
    pub int_c2einf: BigRational,
}

impl CayleyLedger {
    /// K3: `b⁺ = 3`, `b⁻ = 19`, `b² = 22`, self-intersection zero, trivial `E_∞`.
    pub fn k3() -> Self {
        CayleyLedger { sigma: 3 - 19, chi: 2 + 22, self_int: 0, int_c2einf: q(0) }
    }

    pub fn zero() -> Self {
        CayleyLedger { sigma: 0, chi: 0, self_int: 0, int_c2einf: q(0) }
    }
}

fn require_integer(v: BigRational, what: &str) -> Result<BigRational> {
    if v.is_integer() {
        Ok(v)
    } else {
        Err(Error::NonIntegerIndex(format!("{what} = {v}")))
    }
}

/// Index of the linearised Spin(7)-instanton operator on an SU(r) bundle:
/// `(r²−1)(b¹−b⁰−b²₇) − (r/12)∫p₁(X)c₂ − ∫(1 + r/6)c₂² + (r/3)∫c₄`.
pub fn index_spin7_su_r(l: &Spin7Ledger) -> Result<BigRational> {
    let rank = l.rank_r.ok_or(Error::MissingField("rank_r"))?;
    if rank < 2 {
        return Err(Error::InvalidArgument(format!("rank must be at least 2, got {rank}")));
    }
    let r = q(rank as i64);
    let p1c2 = l.int_p1x_c2e.as_ref().ok_or(Error::MissingField("int_p1X_c2E"))?;
    let c2sq = l.int_c2e_sq.as_ref().ok_or(Error::MissingField("int_c2E_sq"))?;
    let c4 = l.int_c4e.as_ref().ok_or(Error::MissingField("int_c4E"))?;
    let v = (&r * &r - q(1)) * l.betti() - &r / q(12) * p1c2 - (q(1) + &r / q(6)) * c2sq + &r / q(3) * c4;
    require_integer(v, "SU(r) index")
}

/// `dim 𝔤·(b¹−b⁰−b²₇) + (1/24)∫p₁(X)p₁(𝔤_E) − (1/12)∫(p₁(𝔤_E)² − 2p₂(𝔤_E))`.
pub fn index_spin7_general(l: &Spin7Ledger) -> Result<BigRational> {
    let dim = q(l.dim_g.ok_or(Error::MissingField("dim_g"))? as i64);
    let p1p1 = l.int_p1ge_p1x.as_ref().ok_or(Error::MissingField("int_p1gE_p1X"))?;
    let p2 = l.int_p1ge_sq_minus_2p2ge.as_ref().ok_or(Error::MissingField("int_p1gE_sq_minus_2p2gE"))?;
    Ok(dim * l.betti() + p1p1 / q(24) - p2 / q(12))
}

/// Index of the Cayley deformation operator: `(σ + χ)/2 − [Q]·[Q]`.
pub fn index_cayley(l: &CayleyLedger) -> BigRational {
    frac(l.sigma + l.chi, 2) - q(l.self_int)
}

/// Index of the charge-one Fueter operator: `−σ/4 − ∫_Q c₂(E_∞)`.
pub fn index_fueter_charge1(l: &CayleyLedger) -> BigRational {
    -frac(l.sigma, 4) - &l.int_c2einf
}

/// `(e(V), p₁(V))` for `V = Re(E ⊗ F)` with `E`, `F` SU(2)-bundles over a
/// 4-manifold: `(c₂(F) − c₂(E), −2(c₂(E) + c₂(F)))`.
pub fn spin_bundle_relations(c2e: &BigRational, c2f: &BigRational) -> (BigRational, BigRational) {
    (c2f - c2e, -q(2) * (c2e + c2f))
}

/// `∫_Q c₂(S⁺_Q) = −(3σ + 2χ)/4`, from `p₁ + 2e = −4c₂(S⁺)`.
pub fn c2_positive_spinors(l: &CayleyLedger) -> BigRational {
    -frac(3 * l.sigma + 2 * l.chi, 4)
}

/// `∫_Q p₁(NQ) = 3σ + 2χ − 2[Q]·[Q]`.
pub fn p1_normal(l: &CayleyLedger) -> BigRational {
    q(3 * l.sigma + 2 * l.chi - 2 * l.self_int)
}

/// `∫_Q p₁(X) = p₁(TQ) + p₁(NQ)`, with `p₁(TQ) = 3σ` by the signature theorem.
pub fn p1_ambient_on_q(l: &CayleyLedger) -> BigRational {
    q(3 * l.sigma) + p1_normal(l)
}

/// The SU(2) ledger of `E` with `c₂(E) = c₂(E₀) + PD[Q]`, from that of `E₀`.
pub fn shifted_ledger(e0: &Spin7Ledger, l: &CayleyLedger, int_c2e0_q: &BigRational) -> Result<Spin7Ledger> {
    let p1c2 = e0.int_p1x_c2e.clone().ok_or(Error::MissingField("int_p1X_c2E"))?;
    let c2sq = e0.int_c2e_sq.clone().ok_or(Error::MissingField("int_c2E_sq"))?;
    Ok(Spin7Ledger {
        int_p1x_c2e: Some(p1c2 + p1_ambient_on_q(l)),
        int_c2e_sq: Some(c2sq + q(2) * int_c2e0_q + q(l.self_int)),
        ..e0.clone()
    })
}

/// Both sides of the index comparison between a bundle `E₀` and the bundle
/// `E` obtained by gluing instantons along a Cayley submanifold `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexDifferenceReport {
    #[serde(with = "rational_serde")]
    pub index_e0: BigRational,
    #[serde(with = "rational_serde")]
    pub index_e: BigRational,
    /// `ind L_A − ind L_{A₀}` from the two bundle ledgers.
    #[serde(with = "rational_serde")]
    pub lhs: BigRational,
    /// `−σ − χ/3 − [Q]·[Q] − (8/3)∫_Q c₂(E₀)`.
    #[serde(with = "rational_serde")]
    pub closed_form: BigRational,
    #[serde(with = "rational_serde")]
    pub cayley: BigRational,
    #[serde(with = "rational_serde")]
    pub fueter: BigRational,
    /// `∫_Q e(Re(S⁺_Q ⊗ E₀))`.
    #[serde(with = "rational_serde")]
    pub euler: BigRational,
    /// `cayley + fueter + (5/3)·euler`.
    #[serde(with = "rational_serde")]
    pub rhs: BigRational,
    pub holds: bool,
}

/// Evaluate the index comparison. `e0` must be an SU(2) ledger; if `e` is
/// given it must agree with the ledger shifted by `PD[Q]`.
pub fn index_difference_check(
    l: &CayleyLedger,
    int_c2e0_q: &BigRational,
    e0: &Spin7Ledger,
    e: Option<&Spin7Ledger>,
) -> Result<IndexDifferenceReport> {
    if e0.rank_r != Some(2) {
        return Err(Error::InconsistentLedger(format!("E₀ must be an SU(2) bundle, got rank {:?}", e0.rank_r)));
    }
    let derived = shifted_ledger(e0, l, int_c2e0_q)?;
    if let Some(e) = e {
        if *e != derived {
            return Err(Error::InconsistentLedger("E ledger does not equal the E₀ ledger shifted by PD[Q]".into()));
        }
    }
    let index_e0 = index_spin7_su_r(e0)?;
    let index_e = index_spin7_su_r(&derived)?;
    let c = int_c2e0_q;
    let closed_form = -q(l.sigma) - frac(l.chi, 3) - q(l.self_int) - frac(8, 3) * c;
    let (euler, _) = spin_bundle_relations(c, &c2_positive_spinors(l));
    let cayley = index_cayley(l);
    let fueter = index_fueter_charge1(&CayleyLedger { int_c2einf: c.clone(), ..l.clone() });
    let rhs = &cayley + &fueter + frac(5, 3) * &euler;
    let lhs = &index_e - &index_e0;
    let holds = lhs == rhs && lhs == closed_form;
    Ok(IndexDifferenceReport { index_e0, index_e, lhs, closed_form, cayley, fueter, euler, rhs, holds })
}

/// Dimension `8k − 3` of the family of Spin(7)-instantons obtained from a
/// Cayley K3 fibre carrying charge `k`. For `k = 1` the value is checked
/// against `ind L_θ + ind F_Q + ind F_𝔍 + (5/3)·e` on the K3 ledger.
pub fn thm_b_family_dimension(k: u32) -> Result<i64> {
    if k < 1 {
        return Err(Error::InvalidArgument("charge k must be at least 1".into()));
    }
    let dim = 8 * k as i64 - 3;
    if k == 1 {
        let r = index_difference_check(&CayleyLedger::k3(), &q(0), &Spin7Ledger::trivial_su(2), None)?;
        let total = &r.index_e0 + &r.cayley + &r.fueter + frac(5, 3) * &r.euler;
        if !r.holds || total != q(dim) {
            return Err(Error::InconsistentLedger(format!("charge-one composition gives {total}, expected {dim}")));
        }
    }
    Ok(dim)
}

/// Integer value of an exact rational, if it is one and fits.
pub fn as_integer(v: &BigRational) -> Option<i64> {
    if v.is_integer() {
        v.to_integer().to_i64()
    } else {
        None
    }
}


/// A ledger file: any subset of the inputs the index formulas read.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexLedger {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin7: Option<Spin7Ledger>,
    /// Ledger of the glued bundle `E`; derived from `spin7` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin7_glued: Option<Spin7Ledger>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cayley: Option<CayleyLedger>,
    /// `∫_Q c₂(E₀)`
    #[serde(rename = "int_c2E0_Q", default, with = "rational_serde::option", skip_serializing_if = "Option::is_none")]
    pub int_c2e0_q: Option<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
}

impl IndexLedger {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn spin7(&self) -> Result<&Spin7Ledger> {
        self.spin7.as_ref().ok_or(Error::MissingField("spin7"))
    }

    pub fn cayley(&self) -> Result<&CayleyLedger> {
        self.cayley.as_ref().ok_or(Error::MissingField("cayley"))
    }

    pub fn int_c2e0_q(&self) -> Result<&BigRational> {
        self.int_c2e0_q.as_ref().ok_or(Error::MissingField("int_c2E0_Q"))
    }
}
