//! The function field `F` as an iterated Artin-Schreier tower over `F_q(x)`.
//!
//! Elements are polynomials in `x` and five generators `g_1..g_5`, each
//! subject to `g_i^q - g_i = R_i(x, g_1, .., g_{i-1})`. Normal form keeps every
//! generator exponent below `q`; the `x` exponent is unbounded.

pub mod endo;
pub mod equiv;
pub mod prolong;
pub mod solve;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::field::{Field, Fq};
use crate::params::Params;

pub use endo::{check_endo, commutator, compose_endo, invert_endo, sigma, tau, Endo, EndoCheck};
pub use equiv::{presentation_equiv, transport, Link, RingMap};
pub use prolong::{cocycle_defect, prolong_translation, Prolongation};
pub use solve::{wp_solve, Bound, WpSolution};

/// Number of tower generators.
pub const NGEN: usize = 5;

/// Exponent vector: index 0 is `x`, indices `1..=5` the generators.
pub type Mono = [u32; NGEN + 1];

pub const ONE_MONO: Mono = [0; NGEN + 1];

/// Sparse polynomial in `x, g_1, .., g_5` with `F_q` coefficients.
///
/// Arithmetic that needs the relations lives on [`Tower`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TowerElement {
    terms: BTreeMap<Mono, Fq>,
}

impl TowerElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: Fq, mono: Mono) -> Self {
        let mut out = Self::zero();
        if !coeff.is_zero() {
            out.terms.insert(mono, coeff);
        }
        out
    }

    pub fn constant(c: Fq) -> Self {
        Self::monomial(c, ONE_MONO)
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, Fq)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, mono: &Mono) -> Fq {
        self.terms.get(mono).copied().unwrap_or(Fq::ZERO)
    }

    /// `Some(c)` when the element is the constant `c` (including 0).
    pub fn as_constant(&self) -> Option<Fq> {
        match self.terms.len() {
            0 => Some(Fq::ZERO),
            1 => self.terms.get(&ONE_MONO).copied(),
            _ => None,
        }
    }

    pub(crate) fn add_term(&mut self, field: &Field, mono: Mono, coeff: Fq) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = field.add(*o.get(), coeff);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub(crate) fn leading(&self) -> Option<(&Mono, Fq)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    pub(crate) fn remove(&mut self, mono: &Mono) -> Option<Fq> {
        self.terms.remove(mono)
    }

    /// Componentwise maximum exponent.
    pub fn multidegree(&self) -> Mono {
        let mut out = ONE_MONO;
        for m in self.terms.keys() {
            for i in 0..=NGEN {
                out[i] = out[i].max(m[i]);
            }
        }
        out
    }

    /// Highest generator index with a nonzero exponent (0 if only `x`).
    pub fn top_generator(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| (1..=NGEN).filter(move |&i| m[i] > 0))
            .max()
            .unwrap_or(0)
    }

    /// True if only `x` and the generators with the given indices occur.
    pub fn uses_only(&self, generators: &[usize]) -> bool {
        self.terms
            .keys()
            .all(|m| (1..=NGEN).all(|i| m[i] == 0 || generators.contains(&i)))
    }

    pub fn neg(&self, field: &Field) -> Self {
        TowerElement {
            terms: self.terms.iter().map(|(m, &c)| (*m, field.neg(c))).collect(),
        }
    }

    pub fn scale(&self, field: &Field, c: Fq) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        TowerElement {
            terms: self.terms.iter().map(|(m, &a)| (*m, field.mul(a, c))).collect(),
        }
    }

    pub fn add(&self, field: &Field, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(field, *m, c);
        }
        out
    }

    pub fn sub(&self, field: &Field, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(field, *m, field.neg(c));
        }
        out
    }

    /// Multiplication by a monomial without any normalization.
    pub(crate) fn shift(&self, mono: &Mono) -> Self {
        TowerElement {
            terms: self.terms.iter().map(|(m, &c)| (add_mono(m, mono), c)).collect(),
        }
    }
}

pub(crate) fn add_mono(a: &Mono, b: &Mono) -> Mono {
    let mut out = *a;
    for i in 0..=NGEN {
        out[i] += b[i];
    }
    out
}

pub(crate) fn unit(i: usize, e: u32) -> Mono {
    let mut m = ONE_MONO;
    m[i] = e;
    m
}

/// The three built-in presentations of `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresentationKind {
    /// `y1, y2, v1, v2, w` with `v_i^q - v_i = y_i^q x - x^q y_i` and
    /// `w^q - w = f2 y1 - f1 y2`.
    Unprimed,
    /// `y1, y2, v1', v2', w'` with right-hand sides `g1, g2` and
    /// `2 y1 f2 + f1 f2`.
    Primed,
    /// `y1, y2, v1', v2', w`: the generator set on which the automorphisms
    /// `sigma_i`, `tau_i` are written down.
    Mixed,
}

impl PresentationKind {
    pub fn generator_names(self) -> [&'static str; NGEN] {
        match self {
            PresentationKind::Unprimed => ["y1", "y2", "v1", "v2", "w"],
            PresentationKind::Primed => ["y1", "y2", "v1'", "v2'", "w'"],
            PresentationKind::Mixed => ["y1", "y2", "v1'", "v2'", "w"],
        }
    }
}

/// Order in which overflowing generators are rewritten by
/// [`Tower::normalize_by_rewriting`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteOrder {
    HighestFirst,
    LowestFirst,
}

/// A presentation of `F` over a fixed field, with ring arithmetic in normal form.
#[derive(Clone, Debug)]
pub struct Tower {
    field: Arc<Field>,
    params: Params,
    kind: PresentationKind,
    q: u32,
    relations: Vec<TowerElement>,
}

impl Tower {
    pub fn new(field: &Arc<Field>, params: Params, kind: PresentationKind) -> Self {
        assert_eq!(field.size(), params.q(), "field must be F_q for the given parameters");
        let q = params.q() as u32;
        let q0 = params.q0() as u32;
        let f = field.as_ref();
        let one = Fq::ONE;
        let minus = f.from_int(-1);
        let two = f.from_int(2);
        let xpoly = |terms: &[(u32, Fq)]| {
            let mut out = TowerElement::zero();
            for &(e, c) in terms {
                out.add_term(f, unit(0, e), c);
            }
            out
        };
        let f1 = xpoly(&[(q0 + q, one), (q0 + 1, minus)]);
        let f2 = xpoly(&[(2 * q0 + q, one), (2 * q0 + 1, minus)]);
        let g1 = xpoly(&[(q0 + 2 * q, one), (q0 + 2, minus)]);
        let g2 = xpoly(&[(2 * q0 + 2 * q, one), (2 * q0 + 2, minus)]);
        let y1 = TowerElement::monomial(one, unit(1, 1));
        let y2 = TowerElement::monomial(one, unit(2, 1));
        let x = unit(0, 1);
        let xq = unit(0, q);

        // Products below never overflow a generator exponent, so plain
        // polynomial multiplication already yields normal forms.
        let times = |a: &TowerElement, b: &TowerElement| {
            let mut out = TowerElement::zero();
            for (ma, ca) in a.terms() {
                for (mb, cb) in b.terms() {
                    out.add_term(f, add_mono(ma, mb), f.mul(ca, cb));
                }
            }
            out
        };
        // f2*y1 - f1*y2
        let w_rhs = times(&f2, &y1).sub(f, &times(&f1, &y2));
        // y_i^q x - x^q y_i normalizes to y_i x + f_i x - x^q y_i.
        let v_rhs = |y: &TowerElement, fi: &TowerElement| {
            y.shift(&x).add(f, &fi.shift(&x)).sub(f, &y.shift(&xq))
        };
        let relations = match kind {
            PresentationKind::Unprimed => vec![
                f1.clone(),
                f2.clone(),
                v_rhs(&y1, &f1),
                v_rhs(&y2, &f2),
                w_rhs,
            ],
            PresentationKind::Primed => {
                let w_prime = times(&y1, &f2).scale(f, two).add(f, &times(&f1, &f2));
                vec![f1, f2, g1, g2, w_prime]
            }
            PresentationKind::Mixed => vec![f1, f2, g1, g2, w_rhs],
        };
        Tower {
            field: field.clone(),
            params,
            kind,
            q,
            relations,
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn kind(&self) -> PresentationKind {
        self.kind
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn generator_names(&self) -> [&'static str; NGEN] {
        self.kind.generator_names()
    }

    /// Right-hand side `R_i` of generator `i` (1-based).
    pub fn relation(&self, i: usize) -> &TowerElement {
        &self.relations[i - 1]
    }

    pub fn x(&self) -> TowerElement {
        TowerElement::monomial(Fq::ONE, unit(0, 1))
    }

    /// Generator `g_i`, 1-based; index 0 returns `x`.
    pub fn gen(&self, i: usize) -> TowerElement {
        TowerElement::monomial(Fq::ONE, unit(i, 1))
    }

    pub fn constant(&self, c: Fq) -> TowerElement {
        TowerElement::constant(c)
    }

    /// Polynomial in `x` from `(exponent, integer coefficient)` pairs.
    pub fn x_poly(&self, terms: &[(u32, i64)]) -> TowerElement {
        let mut out = TowerElement::zero();
        for &(e, c) in terms {
            out.add_term(&self.field, unit(0, e), self.field.from_int(c));
        }
        out
    }

    pub fn f1(&self) -> TowerElement {
        self.relations[0].clone()
    }

    pub fn f2(&self) -> TowerElement {
        self.relations[1].clone()
    }

    pub fn add(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        a.add(&self.field, b)
    }

    pub fn sub(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        a.sub(&self.field, b)
    }

    pub fn scale(&self, a: &TowerElement, c: Fq) -> TowerElement {
        a.scale(&self.field, c)
    }

    pub fn neg(&self, a: &TowerElement) -> TowerElement {
        a.neg(&self.field)
    }

    fn overflows(&self, m: &Mono) -> bool {
        m[1..].iter().any(|&e| e >= self.q)
    }

    fn is_normal(&self, e: &TowerElement) -> bool {
        e.terms.keys().all(|m| !self.overflows(m))
    }

    /// Adds `c * m` to `out` in normal form, assuming every generator exponent
    /// of `m` is at most `2q - 2`.
    ///
    /// Rewrites the lowest overflowing generator first: its relation only
    /// involves lower generators, which are then below `q`, so the bound is
    /// preserved. The vector of exponents read from the top generator down
    /// decreases lexicographically, hence termination.
    fn reduce_pair_into(&self, m: Mono, c: Fq, out: &mut TowerElement) {
        let f = self.field.as_ref();
        let mut stack = vec![(m, c)];
        while let Some((m, c)) = stack.pop() {
            match (1..=NGEN).find(|&i| m[i] >= self.q) {
                None => out.add_term(f, m, c),
                Some(i) => {
                    debug_assert!(m[i] <= 2 * self.q - 2);
                    let mut kept = m;
                    kept[i] -= self.q - 1;
                    stack.push((kept, c));
                    let mut base = m;
                    base[i] -= self.q;
                    for (r, rc) in self.relations[i - 1].terms() {
                        stack.push((add_mono(&base, r), f.mul(c, rc)));
                    }
                }
            }
        }
    }

    /// Product of two elements in normal form.
    pub fn mul(&self, a: &TowerElement, b: &TowerElement) -> TowerElement {
        debug_assert!(self.is_normal(a) && self.is_normal(b));
        let f = self.field.as_ref();
        let mut out = TowerElement::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let m = add_mono(ma, mb);
                let c = f.mul(ca, cb);
                if self.overflows(&m) {
                    self.reduce_pair_into(m, c, &mut out);
                } else {
                    out.add_term(f, m, c);
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &TowerElement, mut e: u64) -> TowerElement {
        let mut result = TowerElement::constant(Fq::ONE);
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// Normal form of `g_i^e` for any `e`, using `g_i^q = g_i + R_i`.
    fn gen_power(&self, i: usize, e: u32, cache: &mut HashMap<(usize, u32), TowerElement>) -> TowerElement {
        if e < self.q {
            return TowerElement::monomial(Fq::ONE, unit(i, e));
        }
        if let Some(v) = cache.get(&(i, e)) {
            return v.clone();
        }
        let g_plus_r = self.add(&self.gen(i), &self.relations[i - 1]);
        let high = self.pow(&g_plus_r, (e / self.q) as u64);
        let low = TowerElement::monomial(Fq::ONE, unit(i, e % self.q));
        let v = self.mul(&high, &low);
        cache.insert((i, e), v.clone());
        v
    }

    fn normalize_mono(&self, m: &Mono, cache: &mut HashMap<(usize, u32), TowerElement>) -> TowerElement {
        if m[1..].iter().all(|&e| e <= 2 * self.q - 2) {
            let mut out = TowerElement::zero();
            self.reduce_pair_into(*m, Fq::ONE, &mut out);
            return out;
        }
        let mut acc = TowerElement::monomial(Fq::ONE, unit(0, m[0]));
        for i in 1..=NGEN {
            if m[i] > 0 {
                let pw = self.gen_power(i, m[i], cache);
                acc = self.mul(&acc, &pw);
            }
        }
        acc
    }

    /// Unique normal form of an arbitrary polynomial in `x, g_1, .., g_5`.
    pub fn normalize(&self, e: &TowerElement) -> TowerElement {
        let mut cache = HashMap::new();
        let f = self.field.as_ref();
        let mut out = TowerElement::zero();
        for (m, c) in e.terms() {
            if !self.overflows(m) {
                out.add_term(f, *m, c);
            } else {
                for (mm, cc) in self.normalize_mono(m, &mut cache).terms() {
                    out.add_term(f, *mm, f.mul(c, cc));
                }
            }
        }
        out
    }

    /// Normal form by one-rule-at-a-time rewriting `g_i^q -> g_i + R_i` in the
    /// given order. Independent of [`Tower::normalize`]; used to test confluence.
    pub fn normalize_by_rewriting(&self, e: &TowerElement, order: RewriteOrder) -> TowerElement {
        let f = self.field.as_ref();
        let mut work = e.clone();
        loop {
            let Some((m, c, i)) = work.terms().find_map(|(m, c)| {
                let over = (1..=NGEN).filter(|&i| m[i] >= self.q);
                let pick = match order {
                    RewriteOrder::HighestFirst => over.max(),
                    RewriteOrder::LowestFirst => over.min(),
                };
                pick.map(|i| (*m, c, i))
            }) else {
                return work;
            };
            work.remove(&m);
            let mut kept = m;
            kept[i] -= self.q - 1;
            work.add_term(f, kept, c);
            let mut base = m;
            base[i] -= self.q;
            for (r, rc) in self.relations[i - 1].terms() {
                work.add_term(f, add_mono(&base, r), f.mul(c, rc));
            }
        }
    }

    /// `a^q` in normal form. Coefficients are fixed by the `q`-power map.
    pub fn frob_q(&self, a: &TowerElement) -> TowerElement {
        let f = self.field.as_ref();
        let mut cache = HashMap::new();
        let mut out = TowerElement::zero();
        for (m, c) in a.terms() {
            let mq = m.map(|e| e * self.q);
            for (mm, cc) in self.normalize_mono(&mq, &mut cache).terms() {
                out.add_term(f, *mm, f.mul(c, cc));
            }
        }
        out
    }

    /// The Artin-Schreier operator `u -> u^q - u`.
    pub fn wp(&self, a: &TowerElement) -> TowerElement {
        self.sub(&self.frob_q(a), a)
    }

    /// Evaluates `e` (a polynomial in `x, g_1..g_5`, possibly written in
    /// another presentation) at the given images, which must be normal
    /// elements of this tower. `images[0]` is the image of `x`.
    pub fn substitute(&self, e: &TowerElement, images: &[TowerElement]) -> TowerElement {
        let f = self.field.as_ref();
        let mut powers: HashMap<(usize, u32), TowerElement> = HashMap::new();
        let mut out = TowerElement::zero();
        for (m, c) in e.terms() {
            let mut acc = TowerElement::constant(c);
            for (i, &ei) in m.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                let pw = powers
                    .entry((i, ei))
                    .or_insert_with(|| self.pow(&images[i], ei as u64))
                    .clone();
                acc = self.mul(&acc, &pw);
                if acc.is_zero() {
                    break;
                }
            }
            for (mm, cc) in acc.terms() {
                out.add_term(f, *mm, cc);
            }
        }
        out
    }

    /// Human-readable rendering, e.g. `y1*x + 2*y2`.
    pub fn format(&self, e: &TowerElement) -> String {
        if e.is_zero() {
            return "0".into();
        }
        let names = self.generator_names();
        let mut parts = Vec::new();
        for (m, c) in e.terms().rev() {
            let mut factors = Vec::new();
            for i in (1..=NGEN).chain(std::iter::once(0)) {
                let name = if i == 0 { "x" } else { names[i - 1] };
                match m[i] {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    k => factors.push(format!("{name}^{k}")),
                }
            }
            let coeff = self.field.format(c);
            let coeff = if coeff.contains('+') { format!("({coeff})") } else { coeff };
            let term = match (factors.is_empty(), coeff.as_str()) {
                (true, _) => coeff,
                (false, "1") => factors.join("*"),
                (false, _) => format!("{coeff}*{}", factors.join("*")),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }

    /// JSON form: list of `[exponents, coefficient coordinates]`.
    pub fn to_json(&self, e: &TowerElement) -> serde_json::Value {
        serde_json::Value::Array(
            e.terms()
                .map(|(m, c)| serde_json::json!([m.to_vec(), self.field.coords(c)]))
                .collect(),
        )
    }
}

/// Formats an element with its tower.
pub struct Display<'a>(pub &'a Tower, pub &'a TowerElement);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.format(self.1))
    }
}
