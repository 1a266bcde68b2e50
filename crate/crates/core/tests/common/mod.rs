#![allow(dead_code)]

use std::sync::Arc;

use bigaction::tower::{Mono, Tower, TowerElement, NGEN};
use bigaction::{Field, Fq, LaurentPoly};
use rand::Rng;

pub fn random_fq<R: Rng>(f: &Field, rng: &mut R) -> Fq {
    f.from_packed(rng.gen_range(0..f.size() as u32)).unwrap()
}

pub fn random_laurent<R: Rng>(f: &Arc<Field>, rng: &mut R, terms: usize, span: i64) -> LaurentPoly {
    LaurentPoly::from_terms(f, (0..terms).map(|_| (rng.gen_range(-span..=span / 4), random_fq(f, rng))))
}

/// Sparse element with mostly small exponents and an occasional one near q.
pub fn random_element<R: Rng>(t: &Tower, rng: &mut R, terms: usize, max_x: u32) -> TowerElement {
    let f = t.field();
    let mut out = TowerElement::zero();
    for _ in 0..terms {
        let mut m: Mono = [0; NGEN + 1];
        m[0] = rng.gen_range(0..=max_x);
        for e in m.iter_mut().skip(1) {
            *e = if rng.gen_bool(0.3) { rng.gen_range(0..t.q()) } else { rng.gen_range(0..2) };
        }
        let c = f.from_packed(rng.gen_range(1..f.size() as u32)).unwrap();
        out = t.add(&out, &TowerElement::monomial(c, m));
    }
    out
}

/// Term-by-term product without reduction; exponents may reach 2q - 2.
pub fn raw_product(t: &Tower, a: &TowerElement, b: &TowerElement) -> TowerElement {
    let f = t.field();
    let mut out = TowerElement::zero();
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let mut m = *ma;
            for i in 0..=NGEN {
                m[i] += mb[i];
            }
            out = out.add(f, &TowerElement::monomial(f.mul(ca, cb), m));
        }
    }
    out
}
