//! Solving `u^q - u = target` inside a box of monomials.
//!
//! `u -> u^q - u` is `F_q`-linear on `F` (coefficients are fixed by the
//! `q`-power map), so the search is a sparse linear system over `F_q`, solved
//! by echelon reduction on leading monomials. The constant monomial is left
//! out: its image is zero and the kernel of the operator on `F` is `F_q`, so
//! the solution, when it exists, is unique.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Fq};

use super::{Mono, Tower, TowerElement, NGEN, ONE_MONO};

/// Inclusive exponent bounds for the search box; index 0 is `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bound(pub Mono);

impl Bound {
    /// Generator bounds `deg + 1` for every generator below `level_cap`
    /// (capped at `q - 1`), the target's own degree at and above it, and
    /// `ceil(deg_x / q) + q` for `x`.
    pub fn for_target(tower: &Tower, target: &TowerElement, level_cap: usize) -> Bound {
        let q = tower.q();
        let md = target.multidegree();
        let mut b = ONE_MONO;
        b[0] = md[0].div_ceil(q) + q;
        for i in 1..=NGEN {
            b[i] = if i < level_cap { (md[i] + 1).min(q - 1) } else { md[i] };
        }
        Bound(b)
    }

    /// Default bound: `+1` on `g_1..g_4`, none on the top generator.
    pub fn default_for(tower: &Tower, target: &TowerElement) -> Bound {
        Self::for_target(tower, target, NGEN)
    }

    fn monomials(&self) -> Vec<Mono> {
        let mut out = vec![ONE_MONO];
        for i in 0..=NGEN {
            let mut next = Vec::with_capacity(out.len() * (self.0[i] as usize + 1));
            for m in &out {
                for e in 0..=self.0[i] {
                    let mut mm = *m;
                    mm[i] = e;
                    next.push(mm);
                }
            }
            out = next;
        }
        out.retain(|m| *m != ONE_MONO);
        out
    }

    pub fn size(&self) -> u64 {
        self.0.iter().map(|&e| e as u64 + 1).product::<u64>() - 1
    }
}

/// Result of [`wp_solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WpSolution {
    /// Unique solution with zero constant term.
    Found(TowerElement),
    /// No solution among the monomials of the bound; this is not a proof
    /// that none exists in `F`.
    NotInBound(Bound),
}

impl WpSolution {
    pub fn found(self) -> Result<TowerElement> {
        match self {
            WpSolution::Found(u) => Ok(u),
            WpSolution::NotInBound(b) => Err(Error::NoSolution { bound: b.0.to_vec() }),
        }
    }
}

struct Row {
    vec: TowerElement,
    combo: BTreeMap<usize, Fq>,
}

fn axpy_combo(field: &Field, dst: &mut BTreeMap<usize, Fq>, src: &BTreeMap<usize, Fq>, c: Fq) {
    for (&k, &v) in src {
        let add = field.mul(v, c);
        let entry = dst.entry(k).or_insert(Fq::ZERO);
        *entry = field.add(*entry, add);
        if entry.is_zero() {
            dst.remove(&k);
        }
    }
}

/// Echelon basis of the images `wp(m)` keyed by leading monomial.
struct Echelon<'a> {
    field: &'a Field,
    pivots: HashMap<Mono, Row>,
}

impl<'a> Echelon<'a> {
    /// Reduces `row` by the pivots until its leading monomial is new (or the
    /// row vanishes). Returns the reduced row.
    fn reduce_lead(&self, mut row: Row) -> Row {
        while let Some((lead, c)) = row.vec.leading().map(|(m, c)| (*m, c)) {
            let Some(piv) = self.pivots.get(&lead) else {
                break;
            };
            let pc = piv.vec.coeff(&lead);
            let factor = self.field.neg(self.field.div(c, pc).expect("pivot is nonzero"));
            row.vec = row.vec.add(self.field, &piv.vec.scale(self.field, factor));
            axpy_combo(self.field, &mut row.combo, &piv.combo, factor);
        }
        row
    }

    fn insert(&mut self, row: Row) {
        let row = self.reduce_lead(row);
        if let Some((lead, _)) = row.vec.leading() {
            let lead = *lead;
            self.pivots.insert(lead, row);
        }
    }
}

/// Finds `u` with `u^q - u = target` among monomials inside `bound`.
///
/// The target must be in normal form. A returned witness has been verified
/// by substitution.
pub fn wp_solve(tower: &Tower, target: &TowerElement, bound: Bound) -> Result<WpSolution> {
    let field = tower.field().as_ref();
    if target.is_zero() {
        return Ok(WpSolution::Found(TowerElement::zero()));
    }
    let monos = bound.monomials();
    let mut ech = Echelon {
        field,
        pivots: HashMap::new(),
    };
    for (k, m) in monos.iter().enumerate() {
        let unit = TowerElement::monomial(Fq::ONE, *m);
        let image = tower.wp(&unit);
        let mut combo = BTreeMap::new();
        combo.insert(k, Fq::ONE);
        ech.insert(Row { vec: image, combo });
    }

    // target = Σ c_k wp(m_k)  <=>  reducing (target, 0) by the pivots, with
    // the combination negated, reaches zero.
    let row = ech.reduce_lead(Row {
        vec: target.clone(),
        combo: BTreeMap::new(),
    });
    if !row.vec.is_zero() {
        return Ok(WpSolution::NotInBound(bound));
    }
    let mut u = TowerElement::zero();
    for (k, c) in row.combo {
        u.add_term(field, monos[k], field.neg(c));
    }
    if tower.wp(&u) != *target {
        return Err(Error::integrity("wp_solve", "witness fails exact substitution"));
    }
    Ok(WpSolution::Found(u))
}

#[cfg(test)]
mod tests {
    use super::super::tests::tower;
    use super::super::PresentationKind;
    use super::*;

    #[test]
    fn translation_witness_in_x() {
        let t = tower(3, 1, PresentationKind::Primed);
        let f = t.field().clone();
        let a = f.generator();
        let a_q0 = f.pow(a, 3);
        let target = t.scale(&t.x_poly(&[(27, 1), (1, -1)]), a_q0);
        let u = wp_solve(&t, &target, Bound::default_for(&t, &target)).unwrap().found().unwrap();
        assert_eq!(u, t.scale(&t.x(), a_q0));
    }

    #[test]
    fn v1_link_witness() {
        // g1(x) - (y1^q x - x^q y1) = wp(y1 x)
        let primed = tower(3, 1, PresentationKind::Primed);
        let unprimed = tower(3, 1, PresentationKind::Unprimed);
        let target = primed.sub(primed.relation(3), unprimed.relation(3));
        let u = wp_solve(&primed, &target, Bound::default_for(&primed, &target))
            .unwrap()
            .found()
            .unwrap();
        assert_eq!(u, primed.mul(&primed.gen(1), &primed.x()));
    }

    #[test]
    fn zero_target_gives_zero() {
        let t = tower(3, 1, PresentationKind::Primed);
        let u = wp_solve(&t, &TowerElement::zero(), Bound::default_for(&t, &TowerElement::zero())).unwrap();
        assert_eq!(u, WpSolution::Found(TowerElement::zero()));
    }

    #[test]
    fn unsolvable_in_bound_reports_bound() {
        // x itself is not in the image of wp on polynomials of bounded degree:
        // wp(anything nonconstant) has degree >= q in x or involves generators.
        let t = tower(3, 1, PresentationKind::Primed);
        let target = t.x();
        match wp_solve(&t, &target, Bound::default_for(&t, &target)).unwrap() {
            WpSolution::NotInBound(b) => assert_eq!(b, Bound::default_for(&t, &target)),
            WpSolution::Found(u) => panic!("unexpected witness {}", t.format(&u)),
        }
    }
}
