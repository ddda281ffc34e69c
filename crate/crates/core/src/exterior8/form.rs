use crate::error::{Error, Result};
use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type Exact = BigRational;

/// Coefficient field for forms: exact rationals or `f64`.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
    /// Zero up to the mode's tolerance (exact zero for rationals).
    fn is_negligible(&self, tol: f64) -> bool;
    /// The exact value, for rational mode only.
    fn to_exact(&self) -> Option<Exact>;
}

impl Scalar for Exact {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
    }
    fn to_json(&self) -> Value {
        let num = self.numer().to_i64().map(Value::from).unwrap_or_else(|| Value::from(self.numer().to_string()));
        let den = self.denom().to_i64().map(Value::from).unwrap_or_else(|| Value::from(self.denom().to_string()));
        json!({ "num": num, "den": den })
    }
    fn from_json(v: &Value) -> Option<Self> {
        let part = |key: &str| -> Option<BigInt> {
            match v.get(key)? {
                Value::Number(n) => n.as_i64().map(BigInt::from),
                Value::String(s) => s.parse().ok(),
                _ => None,
            }
        };
        let den = part("den")?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(part("num")?, den))
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn to_exact(&self) -> Option<Exact> {
        Some(self.clone())
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_json(&self) -> Value {
        json!({ "value": self })
    }
    fn from_json(v: &Value) -> Option<Self> {
        v.get("value")?.as_f64()
    }
    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
    fn to_exact(&self) -> Option<Exact> {
        None
    }
}

/// The 28 index pairs `(i, j)`, `i < j`, in lexicographic order.
pub const PAIRS: [(usize, usize); 28] = {
    let mut out = [(0, 0); 28];
    let mut n = 0;
    let mut i = 0;
    while i < 8 {
        let mut j = i + 1;
        while j < 8 {
            out[n] = (i, j);
            n += 1;
            j += 1;
        }
        i += 1;
    }
    out
};

/// Position of `e^{ij}` (`i < j`) in the lexicographic 2-form basis.
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < 8);
    // rows before i contribute (7 - r) pairs each
    i * (15 - i) / 2 + (j - i - 1)
}

pub(crate) fn mask_of(idx: &[usize]) -> u8 {
    idx.iter().fold(0u8, |m, &i| m | (1 << i))
}

fn indices_of(mask: u8) -> Vec<usize> {
    (0..8).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of `e^I ∧ e^J` relative to `e^{I ∪ J}`: parity of pairs `i ∈ I, j ∈ J`
/// with `i > j`.
pub(crate) fn merge_sign(a: u8, b: u8) -> i64 {
    let mut inv = 0u32;
    for i in 0..8 {
        if a & (1 << i) != 0 {
            inv += (b & ((1u8 << i) - 1)).count_ones();
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A constant-coefficient k-form on ℝ⁸, keyed by the bitmask of its
/// strictly increasing index tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct KForm8<S: Scalar> {
    degree: usize,
    coeffs: BTreeMap<u8, S>,
}

impl<S: Scalar> KForm8<S> {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= 8);
        KForm8 { degree, coeffs: BTreeMap::new() }
    }

    /// `e^{i₁…i_k}` for distinct indices in any order (sign from sorting).
    pub fn basis(idx: &[usize]) -> Result<Self> {
        let mut f = KForm8::zero(idx.len());
        let (mask, sign) = Self::canonical(idx)?;
        f.coeffs.insert(mask, S::from_i64(sign));
        Ok(f)
    }

    fn canonical(idx: &[usize]) -> Result<(u8, i64)> {
        if idx.iter().any(|&i| i >= 8) {
            return Err(Error::InvalidIndex(idx.to_vec()));
        }
        let mask = mask_of(idx);
        if mask.count_ones() as usize != idx.len() {
            return Err(Error::InvalidIndex(idx.to_vec()));
        }
        let mut inv = 0;
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                if idx[a] > idx[b] {
                    inv += 1;
                }
            }
        }
        Ok((mask, if inv % 2 == 0 { 1 } else { -1 }))
    }

    /// Build from `(indices, coefficient)` terms; repeated tuples add up.
    pub fn from_terms(degree: usize, terms: &[(&[usize], S)]) -> Result<Self> {
        let mut f = KForm8::zero(degree);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::WrongDegree { expected: degree, got: idx.len() });
            }
            let (mask, sign) = Self::canonical(idx)?;
            let v = if sign > 0 { c.clone() } else { -c.clone() };
            f.add_term(mask, v);
        }
        Ok(f)
    }

    fn add_term(&mut self, mask: u8, v: S) {
        let e = self.coeffs.entry(mask).or_insert_with(S::zero);
        *e = e.clone() + v;
        if e.is_zero() {
            self.coeffs.remove(&mask);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `e^{idx}`; unsorted tuples pick up the permutation sign.
    pub fn coeff(&self, idx: &[usize]) -> S {
        match Self::canonical(idx) {
            Ok((mask, sign)) if idx.len() == self.degree => {
                let c = self.coeffs.get(&mask).cloned().unwrap_or_else(S::zero);
                if sign > 0 {
                    c
                } else {
                    -c
                }
            }
            _ => S::zero(),
        }
    }

    /// Nonzero terms as (strictly increasing indices, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &S)> {
        self.coeffs.iter().map(|(m, c)| (indices_of(*m), c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.degree, o.degree, "adding forms of different degree");
        let mut f = self.clone();
        for (m, c) in &o.coeffs {
            f.add_term(*m, c.clone());
        }
        f
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-S::one())
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut f = KForm8::zero(self.degree);
        for (m, c) in &self.coeffs {
            f.add_term(*m, c.clone() * s.clone());
        }
        f
    }

    /// Euclidean inner product of coefficient vectors.
    pub fn inner(&self, o: &Self) -> S {
        let mut acc = S::zero();
        for (m, c) in &self.coeffs {
            if let Some(d) = o.coeffs.get(m) {
                acc = acc + c.clone() * d.clone();
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> KForm8<f64> {
        let mut f = KForm8::zero(self.degree);
        for (m, c) in &self.coeffs {
            f.coeffs.insert(*m, c.to_f64());
        }
        f
    }

    /// True when every term uses only indices from `allowed`.
    pub fn supported_in(&self, allowed: &[usize]) -> bool {
        let allowed = mask_of(allowed);
        self.coeffs.keys().all(|m| m & !allowed == 0)
    }

    /// 2-form coefficients in the lexicographic `e^{ij}` basis.
    pub fn to_pair_vector(&self) -> Result<Vec<S>> {
        if self.degree != 2 {
            return Err(Error::WrongDegree { expected: 2, got: self.degree });
        }
        Ok(PAIRS.iter().map(|&(i, j)| self.coeff(&[i, j])).collect())
    }

    pub fn from_pair_vector(v: &[S]) -> Self {
        assert_eq!(v.len(), 28);
        let mut f = KForm8::zero(2);
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            if !v[k].is_zero() {
                f.coeffs.insert(mask_of(&[i, j]), v[k].clone());
            }
        }
        f
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .map(|(idx, c)| {
                let mut t = c.to_json();
                t.as_object_mut().unwrap().insert("idx".into(), json!(idx));
                t
            })
            .collect();
        json!({ "degree": self.degree, "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("form JSON: {m}"));
        let degree = v.get("degree").and_then(Value::as_u64).ok_or_else(|| bad("missing degree"))? as usize;
        if degree > 8 {
            return Err(bad("degree above 8"));
        }
        let mut f = KForm8::zero(degree);
        for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))? {
            let idx: Vec<usize> = serde_json::from_value(t.get("idx").cloned().ok_or_else(|| bad("missing idx"))?)?;
            if idx.len() != degree || idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidIndex(idx));
            }
            let c = S::from_json(t).ok_or_else(|| bad("bad coefficient"))?;
            let (mask, _) = Self::canonical(&idx)?;
            f.add_term(mask, c);
        }
        Ok(f)
    }
}

impl<S: Scalar> Serialize for KForm8<S> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let v = self.to_json();
        let mut st = s.serialize_struct("KForm8", 2)?;
        st.serialize_field("degree", &v["degree"])?;
        st.serialize_field("terms", &v["terms"])?;
        st.end()
    }
}

/// Alternating product; rejects total degree above 8.
pub fn wedge<S: Scalar>(a: &KForm8<S>, b: &KForm8<S>) -> Result<KForm8<S>> {
    if a.degree + b.degree > 8 {
        return Err(Error::DegreeOverflow(a.degree, b.degree));
    }
    let mut f = KForm8::zero(a.degree + b.degree);
    for (ma, ca) in &a.coeffs {
        for (mb, cb) in &b.coeffs {
            if ma & mb != 0 {
                continue;
            }
            let v = ca.clone() * cb.clone();
            let v = if merge_sign(*ma, *mb) > 0 { v } else { -v };
            f.add_term(ma | mb, v);
        }
    }
    Ok(f)
}

/// Euclidean Hodge star with orientation `e^{01234567}`.
pub fn hodge_star<S: Scalar>(a: &KForm8<S>) -> KForm8<S> {
    let mut f = KForm8::zero(8 - a.degree);
    for (m, c) in &a.coeffs {
        let comp = !m;
        let v = if merge_sign(*m, comp) > 0 { c.clone() } else { -c.clone() };
        f.add_term(comp, v);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(idx: &[usize]) -> KForm8<Exact> {
        KForm8::basis(idx).unwrap()
    }

    #[test]
    fn pair_index_is_lexicographic() {
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            assert_eq!(pair_index(i, j), k);
        }
    }

    #[test]
    fn wedge_basis_cases() {
        assert_eq!(wedge(&e(&[0]), &e(&[1])).unwrap(), e(&[0, 1]));
        assert!(wedge(&e(&[0, 1]), &e(&[0, 2])).unwrap().is_zero());
        assert_eq!(wedge(&e(&[0, 1, 2, 3]), &e(&[4, 5, 6, 7])).unwrap(), e(&[0, 1, 2, 3, 4, 5, 6, 7]));
        assert_eq!(wedge(&e(&[1]), &e(&[0])).unwrap(), e(&[0, 1]).neg());
        assert!(matches!(wedge(&e(&[0, 1, 2, 3, 4]), &e(&[5, 6, 7, 0])), Err(Error::DegreeOverflow(5, 4))));
    }

    #[test]
    fn hodge_star_cases() {
        assert_eq!(hodge_star(&e(&[0, 1, 2, 3])), e(&[4, 5, 6, 7]));
        assert_eq!(hodge_star(&hodge_star(&e(&[0, 1]))), e(&[0, 1]));
        // e^I ∧ *e^I = vol
        let vol = e(&[0, 1, 2, 3, 4, 5, 6, 7]);
        for idx in [[0usize, 3, 5], [1, 2, 7], [2, 4, 6]] {
            let a = e(&idx);
            assert_eq!(wedge(&a, &hodge_star(&a)).unwrap(), vol);
        }
    }

    #[test]
    fn basis_rejects_repeats_and_range() {
        assert!(KForm8::<Exact>::basis(&[1, 1]).is_err());
        assert!(KForm8::<Exact>::basis(&[8]).is_err());
        assert_eq!(e(&[2, 1]).coeff(&[1, 2]), Exact::from_i64(-1));
    }

    #[test]
    fn json_round_trip() {
        let f = e(&[0, 1, 2, 3]).add(&e(&[4, 5, 6, 7]).scale(&BigRational::new(3.into(), 4.into())));
        let back = KForm8::<Exact>::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert_eq!(f.to_json()["terms"][1]["den"], 4);
    }
}
