//! Sparse Laurent polynomials in `z` over `F_q`, and truncated power series.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Field, Fq};

/// Exact Laurent polynomial: finite map from exponent to nonzero coefficient.
#[derive(Clone, Debug)]
pub struct LaurentPoly {
    field: Arc<Field>,
    terms: BTreeMap<i64, Fq>,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.terms == other.terms
    }
}

impl Eq for LaurentPoly {}

pub(crate) fn same_field(a: &Arc<Field>, b: &Arc<Field>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn mismatch(a: &Field, b: &Field) -> Error {
    Error::ContextMismatch {
        left: a.size(),
        right: b.size(),
    }
}

impl LaurentPoly {
    pub fn zero(field: &Arc<Field>) -> Self {
        LaurentPoly {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: &Arc<Field>) -> Self {
        Self::monomial(field, Fq::ONE, 0)
    }

    pub fn monomial(field: &Arc<Field>, coeff: Fq, exponent: i64) -> Self {
        let mut out = Self::zero(field);
        if !coeff.is_zero() {
            out.terms.insert(exponent, coeff);
        }
        out
    }

    /// Sum of the given terms; repeated exponents are added.
    pub fn from_terms(field: &Arc<Field>, terms: impl IntoIterator<Item = (i64, Fq)>) -> Self {
        let mut out = Self::zero(field);
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    /// Convenience constructor with prime-field integer coefficients.
    pub fn from_int_terms(field: &Arc<Field>, terms: &[(i64, i64)]) -> Self {
        Self::from_terms(field, terms.iter().map(|&(e, c)| (e, field.from_int(c))))
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Minimal exponent, `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, exponent: i64) -> Fq {
        self.terms.get(&exponent).copied().unwrap_or(Fq::ZERO)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, Fq)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub(crate) fn add_term(&mut self, exponent: i64, coeff: Fq) {
        if coeff.is_zero() {
            return;
        }
        let f = &self.field;
        match self.terms.entry(exponent) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), coeff);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub(crate) fn take_first(&mut self) -> Option<(i64, Fq)> {
        self.terms.pop_first()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(mismatch(&self.field, &other.field))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Exact product; fails only on a field mismatch.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = &self.field;
        let mut out = Self::zero(f);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                out.add_term(ea + eb, f.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        LaurentPoly {
            field: f.clone(),
            terms: self.terms.iter().map(|(&e, &c)| (e, f.neg(c))).collect(),
        }
    }

    pub fn scale(&self, c: Fq) -> Self {
        let f = &self.field;
        if c.is_zero() {
            return Self::zero(f);
        }
        LaurentPoly {
            field: f.clone(),
            terms: self.terms.iter().map(|(&e, &a)| (e, f.mul(a, c))).collect(),
        }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&e, &c)| (e + k, c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = Self::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `a^(p^k)`: Frobenius on coefficients, exponents scaled by `p^k`.
    pub fn pow_pk(&self, k: u32) -> Self {
        let f = &self.field;
        let scale = (f.p() as i64).pow(k);
        LaurentPoly {
            field: f.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&e, &c)| (e * scale, f.frobenius_iter(c, k as i64)))
                .collect(),
        }
    }

    /// `a^e` via the base-`p` digits of `e`: a product of Frobenius twists,
    /// which stays sparse when the digits of `e` are sparse.
    pub fn pow_by_digits(&self, e: u64) -> Self {
        let p = self.field.p() as u64;
        let mut result = Self::one(&self.field);
        let mut rest = e;
        let mut k = 0u32;
        while rest > 0 {
            let d = rest % p;
            if d > 0 {
                let twisted = self.pow_pk(k);
                result = &result * &twisted.pow(d);
            }
            rest /= p;
            k += 1;
        }
        result
    }

    /// Sub-sum over strictly negative exponents.
    pub fn principal_part(&self) -> Self {
        LaurentPoly {
            field: self.field.clone(),
            terms: self.terms.range(..0).map(|(&e, &c)| (e, c)).collect(),
        }
    }

    /// Sub-sum over nonnegative exponents.
    pub fn regular_part(&self) -> Self {
        LaurentPoly {
            field: self.field.clone(),
            terms: self.terms.range(0..).map(|(&e, &c)| (e, c)).collect(),
        }
    }

    /// Terms with exponent strictly below `bound`.
    pub fn truncate(&self, bound: i64) -> Self {
        LaurentPoly {
            field: self.field.clone(),
            terms: self.terms.range(..bound).map(|(&e, &c)| (e, c)).collect(),
        }
    }

    /// `[[exponent, [c0, .., c_{n-1}]], ...]`, exponent-ascending.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(e, c)| json!([e, self.field.coords(c)]))
                .collect(),
        )
    }

    pub fn from_json(field: &Arc<Field>, value: &Value) -> Result<Self> {
        let bad = || Error::Parameter("malformed Laurent polynomial JSON".into());
        let arr = value.as_array().ok_or_else(bad)?;
        let mut out = Self::zero(field);
        for item in arr {
            let pair = item.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let e = pair[0].as_i64().ok_or_else(bad)?;
            let coords: Vec<i64> = pair[1]
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|v| v.as_i64().ok_or_else(bad))
                .collect::<Result<_>>()?;
            out.add_term(e, field.from_coords(&coords)?);
        }
        Ok(out)
    }
}

macro_rules! forward_op {
    ($trait:ident, $method:ident, $try:ident) => {
        impl std::ops::$trait<&LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            /// Panics when the operands live over different fields; use the
            /// `try_` method to get an error instead.
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$try(rhs).expect("Laurent polynomials over different fields")
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly::neg(self)
    }
}

/// Power series known modulo `z^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    known: LaurentPoly,
    prec: i64,
}

impl TruncatedSeries {
    /// Truncates `poly` to exponents below `prec`.
    pub fn new(poly: &LaurentPoly, prec: i64) -> Self {
        TruncatedSeries {
            known: poly.truncate(prec),
            prec,
        }
    }

    pub fn zero(field: &Arc<Field>, prec: i64) -> Self {
        TruncatedSeries {
            known: LaurentPoly::zero(field),
            prec,
        }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Known terms (all below `prec`).
    pub fn known(&self) -> &LaurentPoly {
        &self.known
    }

    /// Valuation, if some nonzero coefficient is known.
    pub fn valuation(&self) -> Option<i64> {
        self.known.valuation()
    }

    pub fn coeff(&self, exponent: i64) -> Result<Fq> {
        if exponent >= self.prec {
            return Err(Error::BeyondPrecision {
                exponent,
                prec: self.prec,
            });
        }
        Ok(self.known.coeff(exponent))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let prec = self.prec.min(other.prec);
        Ok(TruncatedSeries::new(&self.known.try_add(&other.known)?, prec))
    }

    pub fn add_poly(&self, other: &LaurentPoly) -> Result<Self> {
        Ok(TruncatedSeries::new(&self.known.try_add(other)?, self.prec))
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            known: self.known.neg(),
            prec: self.prec,
        }
    }

    /// Product with an exact Laurent polynomial: precision shifts by `v(a)`.
    pub fn mul_poly(&self, a: &LaurentPoly) -> Result<Self> {
        let Some(va) = a.valuation() else {
            return Ok(TruncatedSeries::zero(&self.known.field, i64::MAX / 4));
        };
        let prec = self.prec + va;
        Ok(TruncatedSeries::new(&self.known.try_mul(a)?, prec))
    }

    /// Product of two truncated series: `min(prec_a + v(b), prec_b + v(a))`,
    /// where an unknown valuation is bounded below by the precision.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let va = self.valuation().unwrap_or(self.prec);
        let vb = other.valuation().unwrap_or(other.prec);
        let prec = (self.prec + vb).min(other.prec + va);
        Ok(TruncatedSeries::new(&self.known.try_mul(&other.known)?, prec))
    }

    /// `s^(p^k)`; precision scales with `p^k` because the map is additive.
    pub fn pow_pk(&self, k: u32) -> Self {
        let scale = (self.known.field.p() as i64).pow(k);
        TruncatedSeries {
            known: self.known.pow_pk(k),
            prec: self.prec.saturating_mul(scale),
        }
    }
}
