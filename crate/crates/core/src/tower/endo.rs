//! Endomorphisms of the tower given by images of `x` and the generators.
//!
//! Composition convention: `(a ∘ b)(e) = a(b(e))`, and the commutator is
//! `[a, b] = a ∘ b ∘ a^-1 ∘ b^-1`.

use crate::error::{Error, Result};
use crate::field::Fq;

use super::{Tower, TowerElement, NGEN};

/// Images of `x, g_1, .., g_5`. Only [`check_endo`] and operations on
/// certified inputs produce certified endomorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endo {
    images: Vec<TowerElement>,
    certified: bool,
}

/// Outcome of [`check_endo`].
#[derive(Clone, Debug)]
pub enum EndoCheck {
    Certified(Endo),
    /// First relation that is not preserved: `defect = σ(g_i)^q - σ(g_i) - σ(R_i)`.
    Violation {
        level: usize,
        generator: String,
        defect: TowerElement,
    },
}

impl EndoCheck {
    pub fn certified(self) -> Option<Endo> {
        match self {
            EndoCheck::Certified(e) => Some(e),
            EndoCheck::Violation { .. } => None,
        }
    }
}

impl Endo {
    pub fn identity(tower: &Tower) -> Self {
        Endo {
            images: (0..=NGEN).map(|i| tower.gen(i)).collect(),
            certified: true,
        }
    }

    /// Unchecked endomorphism; run [`check_endo`] to certify it.
    pub fn from_images(tower: &Tower, images: Vec<TowerElement>) -> Self {
        assert_eq!(images.len(), NGEN + 1, "need images of x and all five generators");
        Endo {
            images: images.iter().map(|e| tower.normalize(e)).collect(),
            certified: false,
        }
    }

    pub fn images(&self) -> &[TowerElement] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &TowerElement {
        &self.images[i]
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn apply(&self, tower: &Tower, e: &TowerElement) -> TowerElement {
        tower.substitute(e, &self.images)
    }

    pub fn is_identity(&self, tower: &Tower) -> bool {
        (0..=NGEN).all(|i| self.images[i] == tower.gen(i))
    }

    /// `image(g_i) - g_i` for each index (0 is `x`).
    pub fn shift(&self, tower: &Tower, i: usize) -> TowerElement {
        tower.sub(&self.images[i], &tower.gen(i))
    }

    /// True if `x -> x + c` with `c` constant and every `g_i -> g_i + u_i`
    /// where `u_i` only involves `x` and lower generators.
    pub fn is_unipotent_triangular(&self, tower: &Tower) -> bool {
        if self.shift(tower, 0).as_constant().is_none() {
            return false;
        }
        (1..=NGEN).all(|i| {
            let lower: Vec<usize> = (1..i).collect();
            self.shift(tower, i).uses_only(&lower)
        })
    }

    /// True if `x` is fixed, i.e. the endomorphism is the identity on `F_q(x)`.
    pub fn fixes_base(&self, tower: &Tower) -> bool {
        self.images[0] == tower.x()
    }
}

/// Checks that the images preserve every defining relation.
pub fn check_endo(tower: &Tower, images: Vec<TowerElement>) -> EndoCheck {
    let mut endo = Endo::from_images(tower, images);
    for i in 1..=NGEN {
        let lhs = tower.wp(&endo.images[i]);
        let rhs = endo.apply(tower, tower.relation(i));
        let defect = tower.sub(&lhs, &rhs);
        if !defect.is_zero() {
            return EndoCheck::Violation {
                level: i,
                generator: tower.generator_names()[i - 1].to_string(),
                defect,
            };
        }
    }
    endo.certified = true;
    EndoCheck::Certified(endo)
}

/// `a ∘ b`: apply `b`, then `a`.
pub fn compose_endo(tower: &Tower, a: &Endo, b: &Endo) -> Endo {
    Endo {
        images: b.images.iter().map(|img| a.apply(tower, img)).collect(),
        certified: a.certified && b.certified,
    }
}

/// Inverse of a unipotent-triangular endomorphism, by back-substitution
/// level by level: if `a(g_i) = g_i + u_i` then `a^-1(g_i) = g_i - a^-1(u_i)`.
pub fn invert_endo(tower: &Tower, a: &Endo) -> Result<Endo> {
    if !a.is_unipotent_triangular(tower) {
        return Err(Error::Unsupported(
            "inversion is only implemented for unipotent-triangular endomorphisms".into(),
        ));
    }
    let f = tower.field();
    let mut inv = Endo::identity(tower);
    inv.certified = a.certified;
    let c = a.shift(tower, 0).as_constant().unwrap_or(Fq::ZERO);
    inv.images[0] = tower.add(&tower.x(), &TowerElement::constant(f.neg(c)));
    for i in 1..=NGEN {
        // Only levels < i of `inv` are read here.
        let u = a.shift(tower, i);
        let back = inv.apply(tower, &u);
        inv.images[i] = tower.sub(&tower.gen(i), &back);
    }
    debug_assert!(compose_endo(tower, a, &inv).is_identity(tower));
    Ok(inv)
}

/// `[a, b] = a ∘ b ∘ a^-1 ∘ b^-1`.
pub fn commutator(tower: &Tower, a: &Endo, b: &Endo) -> Result<Endo> {
    let ai = invert_endo(tower, a)?;
    let bi = invert_endo(tower, b)?;
    let ab = compose_endo(tower, a, b);
    let ab_ai = compose_endo(tower, &ab, &ai);
    Ok(compose_endo(tower, &ab_ai, &bi))
}

fn table_images(tower: &Tower, shifts: [TowerElement; NGEN]) -> Vec<TowerElement> {
    let mut images = vec![tower.x()];
    for (i, s) in shifts.into_iter().enumerate() {
        images.push(tower.add(&tower.gen(i + 1), &s));
    }
    images
}

/// `σ_γ`: `y1 -> y1 + γ`, `y2 -> y2`, `v1' -> v1' + γ`, `v2' -> v2'`,
/// `w -> w + γ y2`, on the mixed generator set. Not certified.
pub fn sigma(tower: &Tower, gamma: Fq) -> Endo {
    let c = TowerElement::constant(gamma);
    let shifts = [
        c.clone(),
        TowerElement::zero(),
        c,
        TowerElement::zero(),
        tower.scale(&tower.gen(2), gamma),
    ];
    Endo::from_images(tower, table_images(tower, shifts))
}

/// `τ_γ`: `y1 -> y1`, `y2 -> y2 + γ`, `v1' -> v1' + γ`, `v2' -> v2'`,
/// `w -> w - γ y1`, on the mixed generator set. Not certified.
pub fn tau(tower: &Tower, gamma: Fq) -> Endo {
    let f = tower.field();
    let c = TowerElement::constant(gamma);
    let shifts = [
        TowerElement::zero(),
        c.clone(),
        c,
        TowerElement::zero(),
        tower.scale(&tower.gen(1), f.neg(gamma)),
    ];
    Endo::from_images(tower, table_images(tower, shifts))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{random_element, tower};
    use super::super::PresentationKind;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn certify(t: &Tower, e: &Endo) -> Endo {
        check_endo(t, e.images().to_vec()).certified().expect("relations preserved")
    }

    #[test]
    fn identity_is_certified() {
        let t = tower(3, 1, PresentationKind::Mixed);
        assert!(check_endo(&t, Endo::identity(&t).images().to_vec()).certified().is_some());
    }

    #[test]
    fn sigma_and_tau_are_certified() {
        let t = tower(3, 1, PresentationKind::Mixed);
        for g in t.field().basis() {
            certify(&t, &sigma(&t, g));
            certify(&t, &tau(&t, g));
        }
    }

    #[test]
    fn broken_y1_image_reports_defect() {
        let t = tower(3, 1, PresentationKind::Mixed);
        let mut images = Endo::identity(&t).images().to_vec();
        images[1] = t.add(&t.gen(1), &t.x());
        match check_endo(&t, images) {
            EndoCheck::Violation { level, defect, .. } => {
                assert_eq!(level, 1);
                assert_eq!(defect, t.x_poly(&[(27, 1), (1, -1)]));
            }
            EndoCheck::Certified(_) => panic!("expected a violation"),
        }
    }

    #[test]
    fn sigma_has_order_p() {
        let t = tower(3, 1, PresentationKind::Mixed);
        let s = certify(&t, &sigma(&t, t.field().basis()[1]));
        let s2 = compose_endo(&t, &s, &s);
        let s3 = compose_endo(&t, &s2, &s);
        assert!(!s2.is_identity(&t));
        assert!(s3.is_identity(&t));
        assert_eq!(invert_endo(&t, &s).unwrap(), s2);
    }

    #[test]
    fn identity_is_neutral() {
        let t = tower(3, 1, PresentationKind::Mixed);
        let tau1 = certify(&t, &tau(&t, Fq::ONE));
        assert_eq!(compose_endo(&t, &Endo::identity(&t), &tau1), tau1);
        assert_eq!(compose_endo(&t, &tau1, &Endo::identity(&t)), tau1);
    }

    #[test]
    fn sigma_tau_commutator_shifts_w() {
        let t = tower(3, 1, PresentationKind::Mixed);
        let f = t.field().clone();
        let basis = f.basis();
        for &gi in &basis {
            for &gj in &basis {
                let s = certify(&t, &sigma(&t, gi));
                let u = certify(&t, &tau(&t, gj));
                let c = commutator(&t, &s, &u).unwrap();
                assert!(c.is_certified());
                for k in 0..NGEN {
                    assert_eq!(c.image(k), &t.gen(k));
                }
                let shift = c.shift(&t, NGEN).as_constant().unwrap();
                let two = f.mul(f.from_int(2), f.mul(gi, gj));
                assert!(shift == two || shift == f.neg(two));
                assert!(!shift.is_zero());

                let s2 = certify(&t, &sigma(&t, gj));
                assert!(commutator(&t, &s, &s2).unwrap().is_identity(&t));
                assert!(commutator(&t, &s, &s).unwrap().is_identity(&t));
            }
        }
    }

    #[test]
    fn non_triangular_inversion_unsupported() {
        let t = tower(3, 1, PresentationKind::Mixed);
        let mut images = Endo::identity(&t).images().to_vec();
        images[1] = t.add(&t.gen(1), &t.gen(2));
        let e = Endo::from_images(&t, images);
        assert!(matches!(invert_endo(&t, &e), Err(Error::Unsupported(_))));
    }

    #[test]
    fn certified_endos_are_ring_homomorphisms() {
        let t = tower(3, 1, PresentationKind::Mixed);
        let f = t.field().clone();
        let s = certify(&t, &sigma(&t, f.generator()));
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let a = random_element(&t, &mut rng, 2, 3);
            let b = random_element(&t, &mut rng, 2, 3);
            let lhs = s.apply(&t, &t.mul(&a, &b));
            let rhs = t.mul(&s.apply(&t, &a), &s.apply(&t, &b));
            assert_eq!(lhs, rhs);
        }
    }
}
