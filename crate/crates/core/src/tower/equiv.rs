//! Dictionary between the primed, unprimed and mixed presentations.
//!
//! `v1' = v1 + y1 x`, `v2' = v2 + y2 x`, `w' = w + y1 y2`, each up to an
//! additive constant in `F_q`; the witnesses are recomputed with
//! [`wp_solve`] rather than assumed.

use crate::error::{Error, Result};

use super::endo::Endo;
use super::solve::{wp_solve, Bound, WpSolution};
use super::{PresentationKind, Tower, TowerElement, NGEN};

/// `primed = unprimed + witness (+ constant)` for one generator slot.
#[derive(Clone, Debug)]
pub struct Link {
    pub unprimed: &'static str,
    pub primed: &'static str,
    pub witness: TowerElement,
    pub verified: bool,
}

/// Solves `u^q - u = R'_i - R_i` for every generator slot. Both right-hand
/// sides only involve `x, y1, y2`, which have the same relations in both
/// presentations.
pub fn presentation_equiv(unprimed: &Tower, primed: &Tower) -> Result<Vec<Link>> {
    assert_eq!(unprimed.kind(), PresentationKind::Unprimed);
    assert_eq!(primed.kind(), PresentationKind::Primed);
    let mut links = Vec::with_capacity(NGEN);
    for i in 1..=NGEN {
        let target = primed.sub(primed.relation(i), unprimed.relation(i));
        let bound = Bound::default_for(primed, &target);
        let witness = match wp_solve(primed, &target, bound)? {
            WpSolution::Found(u) => u,
            WpSolution::NotInBound(b) => {
                return Err(Error::integrity(
                    "presentation_equiv",
                    format!(
                        "no witness for {} within bound {:?}",
                        primed.generator_names()[i - 1],
                        b.0
                    ),
                ))
            }
        };
        let verified = primed.wp(&witness) == target;
        links.push(Link {
            unprimed: unprimed.generator_names()[i - 1],
            primed: primed.generator_names()[i - 1],
            witness,
            verified,
        });
    }
    Ok(links)
}

/// Ring map between two presentations, given by the images of the source
/// generators as elements of the target tower.
#[derive(Clone, Debug)]
pub struct RingMap {
    pub source: PresentationKind,
    pub target: PresentationKind,
    images: Vec<TowerElement>,
}

impl RingMap {
    /// The substitution rewriting `from`-generators in terms of
    /// `to`-generators, with constants normalized to zero.
    pub fn between(to: &Tower, from: PresentationKind) -> RingMap {
        use PresentationKind::*;
        let t = to;
        let y1x = t.mul(&t.gen(1), &t.x());
        let y2x = t.mul(&t.gen(2), &t.x());
        let y1y2 = t.mul(&t.gen(1), &t.gen(2));
        let mut images: Vec<TowerElement> = (0..=NGEN).map(|i| t.gen(i)).collect();
        // v' = v + y x, w' = w + y1 y2
        match (from, t.kind()) {
            (Mixed, Primed) => images[5] = t.sub(&t.gen(5), &y1y2),
            (Primed, Mixed) => images[5] = t.add(&t.gen(5), &y1y2),
            (Mixed, Unprimed) => {
                images[3] = t.add(&t.gen(3), &y1x);
                images[4] = t.add(&t.gen(4), &y2x);
            }
            (Unprimed, Mixed) => {
                images[3] = t.sub(&t.gen(3), &y1x);
                images[4] = t.sub(&t.gen(4), &y2x);
            }
            (Primed, Unprimed) => {
                images[3] = t.add(&t.gen(3), &y1x);
                images[4] = t.add(&t.gen(4), &y2x);
                images[5] = t.add(&t.gen(5), &y1y2);
            }
            (Unprimed, Primed) => {
                images[3] = t.sub(&t.gen(3), &y1x);
                images[4] = t.sub(&t.gen(4), &y2x);
                images[5] = t.sub(&t.gen(5), &y1y2);
            }
            _ => {}
        }
        RingMap {
            source: from,
            target: t.kind(),
            images,
        }
    }

    pub fn apply(&self, to: &Tower, e: &TowerElement) -> TowerElement {
        to.substitute(e, &self.images)
    }

    /// Checks that every source relation maps to a valid relation in the
    /// target: `φ(g_i)^q - φ(g_i) = φ(R_i)`.
    pub fn is_homomorphism(&self, from: &Tower, to: &Tower) -> bool {
        (1..=NGEN).all(|i| to.wp(&self.images[i]) == self.apply(to, from.relation(i)))
    }
}

/// Transports an endomorphism of `from` to `to` by conjugating with the
/// presentation dictionary. The result still has to be certified in `to`.
pub fn transport(from: &Tower, to: &Tower, endo: &Endo) -> Endo {
    let forward = RingMap::between(to, from.kind());
    let back = RingMap::between(from, to.kind());
    let images = (0..=NGEN)
        .map(|i| {
            let pulled = back.apply(from, &to.gen(i));
            let moved = endo.apply(from, &pulled);
            forward.apply(to, &moved)
        })
        .collect();
    Endo::from_images(to, images)
}

#[cfg(test)]
mod tests {
    use super::super::endo::{check_endo, sigma, tau};
    use super::super::tests::tower;
    use super::*;

    #[test]
    fn links_match_expected_witnesses() {
        let u = tower(3, 1, PresentationKind::Unprimed);
        let p = tower(3, 1, PresentationKind::Primed);
        let links = presentation_equiv(&u, &p).unwrap();
        assert!(links.iter().all(|l| l.verified));
        assert!(links[0].witness.is_zero());
        assert!(links[1].witness.is_zero());
        assert_eq!(links[2].witness, p.mul(&p.gen(1), &p.x()));
        assert_eq!(links[3].witness, p.mul(&p.gen(2), &p.x()));
        assert_eq!(links[4].witness, p.mul(&p.gen(1), &p.gen(2)));
    }

    #[test]
    fn dictionary_maps_are_homomorphisms() {
        use PresentationKind::*;
        for (a, b) in [(Mixed, Primed), (Primed, Mixed), (Mixed, Unprimed), (Unprimed, Mixed), (Primed, Unprimed), (Unprimed, Primed)] {
            let from = tower(3, 1, a);
            let to = tower(3, 1, b);
            assert!(RingMap::between(&to, a).is_homomorphism(&from, &to), "{a:?} -> {b:?}");
        }
    }

    #[test]
    fn sigma_tau_transport_to_both_presentations() {
        let m = tower(3, 1, PresentationKind::Mixed);
        let f = m.field().clone();
        for kind in [PresentationKind::Primed, PresentationKind::Unprimed] {
            let to = tower(3, 1, kind);
            for g in f.basis() {
                for e in [sigma(&m, g), tau(&m, g)] {
                    let moved = transport(&m, &to, &e);
                    assert!(check_endo(&to, moved.images().to_vec()).certified().is_some());
                }
            }
        }
    }
}
