//! Prolongation of the translations `x -> x + a` of `F_q(x)` to `F`.

use crate::error::{Error, Result};
use crate::field::Fq;

use super::endo::{check_endo, compose_endo, invert_endo, Endo, EndoCheck};
use super::solve::{wp_solve, Bound, WpSolution};
use super::{Tower, TowerElement, NGEN};

/// A certified automorphism restricting to `x -> x + a`.
#[derive(Clone, Debug)]
pub struct Prolongation {
    pub a: Fq,
    pub endo: Endo,
    /// `u_i` with `σ(g_i) = g_i + u_i`.
    pub witnesses: Vec<TowerElement>,
    /// Number of prolongations: the canonical one times `F_q` per level.
    pub multiplicity: u128,
}

/// Builds the canonical prolongation of `x -> x + a`: level by level,
/// `σ(g_i) = g_i + u_i` with `u_i^q - u_i = σ(R_i) - R_i`.
pub fn prolong_translation(tower: &Tower, a: Fq) -> Result<Prolongation> {
    let mut images: Vec<TowerElement> = (0..=NGEN).map(|i| tower.gen(i)).collect();
    images[0] = tower.add(&tower.x(), &TowerElement::constant(a));
    let mut witnesses = Vec::with_capacity(NGEN);
    for i in 1..=NGEN {
        let rel = tower.relation(i);
        // R_i only involves x and g_j, j < i, whose images are already final.
        let target = tower.sub(&tower.substitute(rel, &images), rel);
        let bound = Bound::for_target(tower, &target, i);
        let u = match wp_solve(tower, &target, bound)? {
            WpSolution::Found(u) => u,
            WpSolution::NotInBound(_) => {
                return Err(Error::Prolongation {
                    level: i,
                    generator: tower.generator_names()[i - 1].to_string(),
                })
            }
        };
        images[i] = tower.add(&tower.gen(i), &u);
        witnesses.push(u);
    }
    let endo = match check_endo(tower, images) {
        EndoCheck::Certified(e) => e,
        EndoCheck::Violation { level, .. } => {
            return Err(Error::integrity("prolong_translation", format!("relation {level} not preserved")))
        }
    };
    Ok(Prolongation {
        a,
        endo,
        witnesses,
        multiplicity: (tower.q() as u128).pow(NGEN as u32),
    })
}

/// `prolong(a+b)^-1 ∘ prolong(a) ∘ prolong(b)`, checked to be a certified
/// automorphism fixing `F_q(x)`.
pub fn cocycle_defect(tower: &Tower, pa: &Prolongation, pb: &Prolongation, pab: &Prolongation) -> Result<Endo> {
    let inv = invert_endo(tower, &pab.endo)?;
    let d = compose_endo(tower, &inv, &compose_endo(tower, &pa.endo, &pb.endo));
    if !d.is_certified() || !d.fixes_base(tower) {
        return Err(Error::integrity(
            "prolongation cocycle",
            "prolong(a) ∘ prolong(b) and prolong(a+b) differ outside Gal(F/K)",
        ));
    }
    Ok(d)
}
