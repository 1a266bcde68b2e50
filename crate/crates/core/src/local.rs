//! Local analysis at the place over `x = ∞`.
//!
//! Over `K(y1)` the place is totally ramified and `z` with
//! `x = z^-q + z^a1 - z^a2` is a uniformizer; `y1 = y_head + T0` where
//! `y_head` is an explicit nine-term Laurent polynomial and `T0` a power
//! series of valuation `q*b1`. Cover right-hand sides are expanded in `z`,
//! reduced modulo `(Frob_p - Id)(F_q((z)))`, and the conductor is read off the
//! largest surviving pole.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::laurent::{LaurentPoly, TruncatedSeries};
use crate::params::Params;
use crate::tower::TowerElement;

/// Exponents and expansions defining the uniformizer of `K(y1)` at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct UniformizerData {
    pub params: Params,
    pub a1: i64,
    pub a2: i64,
    pub b1: i64,
    pub b2: i64,
    /// `x = z^-q + z^a1 - z^a2`.
    pub x_of_z: LaurentPoly,
    /// `y_T` at `T = 0`.
    pub y_head: LaurentPoly,
    /// `y_head^q - y_head - f1(x(z))`.
    pub residual: LaurentPoly,
}

/// Exponents of the uniformizer construction.
pub fn uniformizer_exponents(params: Params) -> (i64, i64, i64, i64) {
    let q = params.q() as i64;
    let q0 = params.q0() as i64;
    let a1 = (q * q - q * q0 - q) / q0;
    let a2 = (q * q - q0 - q) / q0;
    (a1, a2, a1 - q * q0, a2 - q * q0)
}

/// `x^q0 (x^q - x)` for a Laurent polynomial `x`, using additive `p`-powers.
pub(crate) fn f1_of(x: &LaurentPoly, params: Params) -> LaurentPoly {
    let xq0 = x.pow_pk(params.s());
    let xq = x.pow_pk(params.n());
    &xq0 * &(&xq - x)
}

/// Builds `x(z)`, `y_head` and the exact residual, and checks
/// `v(residual) = q*b1` with lowest coefficient 1.
pub fn build_uniformizer(field: &Arc<Field>, params: Params) -> Result<UniformizerData> {
    if field.size() != params.q() {
        return Err(Error::Parameter(format!("field F_{} does not match q = {}", field.size(), params.q())));
    }
    let q = params.q() as i64;
    let q0 = params.q0() as i64;
    let (a1, a2, b1, b2) = uniformizer_exponents(params);
    if !(a1 > 0 && a2 > 0 && b1 > 0 && b2 > 0) {
        return Err(Error::integrity("uniformizer exponents", format!("a1={a1} a2={a2} b1={b1} b2={b2}")));
    }
    let x_of_z = LaurentPoly::from_int_terms(field, &[(-q, 1), (a1, 1), (a2, -1)]);
    let y_head = LaurentPoly::from_int_terms(
        field,
        &[
            (-(q + q0), 1),
            (b1, 1),
            (b2, -1),
            (a1 * q0 - q, 1),
            (a2 * q0 - q, -1),
            (a1 * (1 + q0), 1),
            (a2 * (1 + q0), 1),
            (a1 + a2 * q0, -1),
            (a1 * q0 + a2, -1),
        ],
    );
    let f1 = f1_of(&x_of_z, params);
    let residual = &(&y_head.pow_pk(params.n()) - &y_head) - &f1;

    let data = UniformizerData {
        params,
        a1,
        a2,
        b1,
        b2,
        x_of_z,
        y_head,
        residual,
    };
    data.check()?;
    Ok(data)
}

impl UniformizerData {
    pub fn field(&self) -> &Arc<Field> {
        self.x_of_z.field()
    }

    /// Valuation the residual must have.
    pub fn expected_residual_valuation(&self) -> i64 {
        self.params.q() as i64 * self.b1
    }

    pub fn residual_valuation(&self) -> Option<i64> {
        self.residual.valuation()
    }

    pub fn check(&self) -> Result<()> {
        let q = self.params.q() as i64;
        let q0 = self.params.q0() as i64;
        if self.x_of_z.valuation() != Some(-q) {
            return Err(Error::integrity("uniformizer", "v(x) != -q"));
        }
        if self.y_head.valuation() != Some(-(q + q0)) {
            return Err(Error::integrity("uniformizer", "v(y_head) != -(q+q0)"));
        }
        let expect = self.expected_residual_valuation();
        match self.residual.valuation() {
            Some(v) if v == expect && self.residual.coeff(v) == Fq::ONE => Ok(()),
            Some(v) => Err(Error::integrity(
                "uniformizer residual",
                format!(
                    "valuation {v} (lowest coefficient {:?}), expected {expect} with coefficient 1",
                    self.field().coords(self.residual.coeff(v))
                ),
            )),
            None => Err(Error::integrity("uniformizer residual", "residual vanishes identically")),
        }
    }

    /// Pole order of `x` in `z`.
    pub fn x_pole(&self) -> i64 {
        -self.x_of_z.valuation().unwrap_or(0)
    }

    /// Pole order of `y1` in `z`.
    pub fn y_pole(&self) -> i64 {
        -self.y_head.valuation().unwrap_or(0)
    }
}

/// Solves `T^q - T + residual = 0` modulo `z^prec`.
///
/// The solution is `T0 = Σ_k residual^(q^k)`: the fixed-point iteration
/// `T <- T^q + residual` is additive, so each step adds one Frobenius twist.
pub fn hensel_t0(data: &UniformizerData, prec: i64) -> Result<TruncatedSeries> {
    let qb1 = data.expected_residual_valuation();
    if prec <= qb1 {
        return Err(Error::Parameter(format!("precision {prec} must exceed q*b1 = {qb1}")));
    }
    let field = data.field();
    let n = data.params.n();
    let mut t0 = LaurentPoly::zero(field);
    let mut twist = data.residual.truncate(prec);
    while !twist.is_zero() {
        t0 = &t0 + &twist;
        twist = twist.pow_pk(n).truncate(prec);
    }
    let series = TruncatedSeries::new(&t0, prec);

    // T0^q - T0 + residual ≡ 0 (mod z^prec)
    let check = series.pow_pk(n).add(&series.neg())?.add_poly(&data.residual)?;
    if !check.known().is_zero() {
        return Err(Error::integrity("hensel", "T0 fails its defining equation"));
    }
    Ok(series)
}

/// Where an expansion is taken.
#[derive(Clone, Copy, Debug)]
pub enum Chart<'a> {
    /// `K = F_q(x)` at infinity, uniformizer `1/x`.
    BaseK { field: &'a Arc<Field>, params: Params },
    /// `K(y1)` at its unique place over infinity, uniformizer `z`.
    OverY1(&'a UniformizerData),
}

impl<'a> Chart<'a> {
    pub fn field(&self) -> &'a Arc<Field> {
        match self {
            Chart::BaseK { field, .. } => field,
            Chart::OverY1(d) => d.field(),
        }
    }

    pub fn params(&self) -> Params {
        match self {
            Chart::BaseK { params, .. } => *params,
            Chart::OverY1(d) => d.params,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Chart::BaseK { .. } => "K",
            Chart::OverY1(_) => "K(y1)",
        }
    }
}

/// Certificate that the omitted `T0` tail only contributes positive powers of `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct T0Certificate {
    /// Largest pole order multiplying `T0` in the expansion.
    pub pole_budget: i64,
    pub t0_valuation: i64,
}

/// Exact expansion of a right-hand side, `y1` replaced by `y_head`.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub poly: LaurentPoly,
    pub certificate: Option<T0Certificate>,
}

fn check_supported(expr: &TowerElement, chart: &Chart) -> Result<()> {
    let allowed: &[usize] = match chart {
        Chart::BaseK { .. } => &[],
        Chart::OverY1(_) => &[1],
    };
    if expr.uses_only(allowed) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "expression over {} may only involve {}",
            chart.name(),
            if allowed.is_empty() { "x" } else { "x and y1" }
        )))
    }
}

/// Substitutes `x <- x(z)` and `y1 <- y_head` into a polynomial in `x, y1`.
///
/// Over `K(y1)` this also certifies that every term involving `T0` has
/// positive valuation, so the principal part and the constant term are exact.
pub fn expand_at_infinity(expr: &TowerElement, chart: &Chart) -> Result<Expansion> {
    check_supported(expr, chart)?;
    let field = chart.field();
    let mut out = LaurentPoly::zero(field);
    match chart {
        Chart::BaseK { .. } => {
            for (m, c) in expr.terms() {
                out.add_term(-(m[0] as i64), c);
            }
            Ok(Expansion {
                poly: out,
                certificate: None,
            })
        }
        Chart::OverY1(data) => {
            let mut budget = i64::MIN;
            let mut x_pows: HashMap<u32, LaurentPoly> = HashMap::new();
            let mut y_pows: HashMap<u32, LaurentPoly> = HashMap::new();
            for (m, c) in expr.terms() {
                let (ex, ey) = (m[0], m[1]);
                if ey > 0 {
                    budget = budget.max((ey as i64 - 1) * data.y_pole() + ex as i64 * data.x_pole());
                }
                let xp = x_pows
                    .entry(ex)
                    .or_insert_with(|| data.x_of_z.pow_by_digits(ex as u64))
                    .clone();
                let yp = y_pows
                    .entry(ey)
                    .or_insert_with(|| data.y_head.pow_by_digits(ey as u64))
                    .clone();
                let term = (&xp * &yp).scale(c);
                out = &out + &term;
            }
            let certificate = if budget == i64::MIN {
                None
            } else {
                let cert = T0Certificate {
                    pole_budget: budget,
                    t0_valuation: data.expected_residual_valuation(),
                };
                if cert.pole_budget >= cert.t0_valuation {
                    return Err(Error::T0Relevant {
                        budget: cert.pole_budget,
                        t0_valuation: cert.t0_valuation,
                    });
                }
                Some(cert)
            };
            Ok(Expansion { poly: out, certificate })
        }
    }
}

/// Expansion with `y1 = y_head + T0` for an explicitly truncated `T0`.
pub fn expand_with_t0(expr: &TowerElement, data: &UniformizerData, t0: &TruncatedSeries) -> Result<TruncatedSeries> {
    check_supported(expr, &Chart::OverY1(data))?;
    let field = data.field();
    let exact = |p: &LaurentPoly| TruncatedSeries::new(p, i64::MAX / 8);
    let y1 = exact(&data.y_head).add(t0)?;
    let mut out = exact(&LaurentPoly::zero(field));
    for (m, c) in expr.terms() {
        let mut acc = exact(&data.x_of_z.pow_by_digits(m[0] as u64).scale(c));
        for _ in 0..m[1] {
            acc = acc.mul(&y1)?;
        }
        out = out.add(&acc)?;
    }
    Ok(out)
}

/// `u = coeff * z^-exponent` with `u^p - u` equal to an eliminated term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub exponent: i64,
    pub coeff: Fq,
}

/// Canonical representative modulo `(Frob_p - Id)(F_q((z)))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedPart {
    /// Only negative exponents prime to `p`.
    pub reduced: LaurentPoly,
    /// In processing order (most negative exponent first).
    pub witnesses: Vec<Witness>,
    /// Nonnegative part of the input, dropped.
    pub dropped: LaurentPoly,
    /// Absolute trace of the dropped constant coefficient.
    pub constant_trace: u32,
}

/// Replaces `c z^(-pm)` by `c^(1/p) z^(-m)` until every pole order is prime
/// to `p`, processing from the most negative exponent upward.
pub fn reduce_mod_wp(a: &LaurentPoly) -> ReducedPart {
    let field = a.field().clone();
    let p = field.p() as i64;
    let mut work = a.principal_part();
    let mut reduced = LaurentPoly::zero(&field);
    let mut witnesses = Vec::new();
    while let Some((e, c)) = work.take_first() {
        if e % p == 0 {
            let root = field.pth_root(c);
            witnesses.push(Witness {
                exponent: -e / p,
                coeff: root,
            });
            work.add_term(e / p, root);
        } else {
            reduced.add_term(e, c);
        }
    }
    ReducedPart {
        reduced,
        witnesses,
        dropped: a.regular_part(),
        constant_trace: field.trace_to_prime(a.coeff(0)),
    }
}

impl ReducedPart {
    /// `Σ ℘_p(u_i)` over the witnesses.
    pub fn witness_sum(&self) -> LaurentPoly {
        let field = self.reduced.field();
        let mut out = LaurentPoly::zero(field);
        for w in &self.witnesses {
            let u = LaurentPoly::monomial(field, w.coeff, -w.exponent);
            out = &out + &(&u.pow_pk(1) - &u);
        }
        out
    }

    /// `original = reduced + Σ ℘_p(u_i) + dropped`, exactly.
    pub fn verify(&self, original: &LaurentPoly) -> bool {
        let rebuilt = &(&self.reduced + &self.witness_sum()) + &self.dropped;
        rebuilt == *original
    }

    /// Largest pole order of the reduced part (0 when it is empty).
    pub fn max_pole(&self) -> u64 {
        self.reduced.valuation().map_or(0, |v| (-v) as u64)
    }

    /// Pole orders present in the reduced part, ascending.
    pub fn pole_orders(&self) -> Vec<u64> {
        self.reduced.terms().rev().map(|(e, _)| (-e) as u64).collect()
    }
}

/// Conductor of a degree-`p` Artin-Schreier cover ramified only over infinity.
#[derive(Clone, Debug)]
pub struct ConductorResult {
    pub label: String,
    pub reduced: ReducedPart,
    /// Ramification break `t` (0 when unramified).
    pub break_t: u64,
    /// `t + 1`, or 0 when the reduced part is empty.
    pub conductor: u64,
    /// False when the dropped constant has nonzero trace (constant-field piece).
    pub geometric: bool,
    pub certificate: Option<T0Certificate>,
}

/// Conductor from an already expanded right-hand side.
pub fn conductor_of_expansion(label: &str, expansion: &Expansion) -> ConductorResult {
    let reduced = reduce_mod_wp(&expansion.poly);
    debug_assert!(reduced.verify(&expansion.poly));
    let break_t = reduced.max_pole();
    let conductor = if reduced.reduced.is_zero() { 0 } else { break_t + 1 };
    let geometric = reduced.constant_trace == 0;
    ConductorResult {
        label: label.to_string(),
        reduced,
        break_t,
        conductor,
        geometric,
        certificate: expansion.certificate,
    }
}

/// Expand, reduce, and read off the conductor of `w^p - w = rhs`.
pub fn conductor_of_cover(label: &str, rhs: &TowerElement, chart: &Chart) -> Result<ConductorResult> {
    let expansion = expand_at_infinity(rhs, chart)?;
    let result = conductor_of_expansion(label, &expansion);
    if !result.reduced.verify(&expansion.poly) {
        return Err(Error::integrity("reduce_mod_wp", format!("witness identity fails for {label}")));
    }
    Ok(result)
}
