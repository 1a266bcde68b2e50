//! Arithmetic in `F_p` and `F_q = F_{p^n}`.
//!
//! Elements are packed base-`p` digit vectors in the power basis of a root `t`
//! of the modulus: `c0 + c1*p + ... + c_{n-1}*p^(n-1)` stands for
//! `c0 + c1*t + ... + c_{n-1}*t^(n-1)`. Multiplication, inversion and Frobenius
//! go through discrete-log tables over a primitive element; addition uses Zech
//! logarithms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::is_prime;

/// Largest field size for which tables are built.
pub const MAX_FIELD_SIZE: u64 = 1 << 22;

const NONE: u32 = u32::MAX;

/// An element of `F_q`, packed as base-`p` digits. Only meaningful together
/// with the [`Field`] that produced it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fq(u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Packed base-`p` representation.
    pub fn packed(self) -> u32 {
        self.0
    }
}

/// Finite field context. Immutable after construction.
#[derive(Clone)]
pub struct Field {
    p: u32,
    n: u32,
    size: u32,
    /// Monic modulus, coefficients from the constant term upward (length n+1).
    modulus: Vec<u32>,
    primitive: Fq,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[k] = log(1 + g^k)`, or `NONE` when `1 + g^k = 0`.
    zech: Vec<u32>,
    pow_p: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}

impl Eq for Field {}

// Dense polynomials over F_p, constant term first, used only while building
// the context.
mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv_mod_p(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        trim(&mut a);
        let dm = m.len() - 1;
        let lead_inv = inv_mod_p(m[dm], p) as u64;
        while a.len() > dm {
            let da = a.len() - 1;
            let c = a[da] as u64 * lead_inv % p as u64;
            for i in 0..=dm {
                let idx = da - dm + i;
                a[idx] = ((a[idx] as u64 + (p as u64 - c) * m[i] as u64) % p as u64) as u32;
            }
            trim(&mut a);
        }
        a
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let out: Vec<u32> = out.into_iter().map(|v| v as u32).collect();
        rem(&out, m, p)
    }

    pub fn pow_mod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut result = vec![1u32];
        let mut base = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &base, m, p);
            }
            base = mul_mod(&base, &base, m, p);
            e >>= 1;
        }
        result
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let len = a.len().max(b.len());
        let mut out: Vec<u32> = (0..len)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's irreducibility test for a monic `f` of degree `n`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let n = (f.len() - 1) as u32;
        if n == 1 {
            return true;
        }
        let t = vec![0, 1];
        let q = (p as u64).pow(n);
        if sub(&pow_mod(&t, q, f, p), &rem(&t, f, p), p) != Vec::<u32>::new() {
            return false;
        }
        for r in (2..=n).filter(|r| n % r == 0 && super::is_prime(*r as u64)) {
            let qr = (p as u64).pow(n / r);
            let h = sub(&pow_mod(&t, qr, f, p), &t, p);
            if gcd(f, &h, p).len() != 1 {
                return false;
            }
        }
        true
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Field {
    /// Builds the deterministic context for `F_{p^n}`.
    ///
    /// The modulus is the smallest monic irreducible of degree `n` when the
    /// coefficient vector `[c0, .., c_{n-1}]` is read as a base-`p` number with
    /// `c0` least significant (for `F_27` this is `t^3 + 2t + 1`).
    pub fn new(p: u32, n: u32) -> Result<Field> {
        if p == 2 || !is_prime(p as u64) {
            return Err(Error::Parameter(format!("p = {p} must be an odd prime")));
        }
        if n == 0 {
            return Err(Error::Parameter("extension degree must be positive".into()));
        }
        let size = (p as u64)
            .checked_pow(n)
            .filter(|&q| q <= MAX_FIELD_SIZE)
            .ok_or_else(|| Error::Parameter(format!("F_{{{p}^{n}}} exceeds table limit {MAX_FIELD_SIZE}")))?;

        let modulus = smallest_irreducible(p, n);
        let size32 = size as u32;
        let order = size - 1;
        let factors = prime_factors(order);

        let unpack = |v: u32| -> Vec<u32> {
            let mut out = Vec::with_capacity(n as usize);
            let mut v = v;
            for _ in 0..n {
                out.push(v % p);
                v /= p;
            }
            fp_poly::trim(&mut out);
            out
        };
        let pack = |c: &[u32]| -> u32 { c.iter().rev().fold(0u32, |acc, &d| acc * p + d) };

        let primitive = (1..size32)
            .find(|&cand| {
                let poly = unpack(cand);
                factors
                    .iter()
                    .all(|&r| fp_poly::pow_mod(&poly, order / r, &modulus, p) != vec![1])
            })
            .expect("multiplicative group is cyclic");

        let gen_poly = unpack(primitive);
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![NONE; size as usize];
        let mut cur = vec![1u32];
        for k in 0..order as usize {
            let packed = pack(&cur);
            exp[k] = packed;
            log[packed as usize] = k as u32;
            cur = fp_poly::mul_mod(&cur, &gen_poly, &modulus, p);
        }

        let mut pow_p = Vec::with_capacity(n as usize + 1);
        let mut acc = 1u32;
        for _ in 0..=n {
            pow_p.push(acc);
            acc = acc.wrapping_mul(p);
        }

        let mut field = Field {
            p,
            n,
            size: size32,
            modulus,
            primitive: Fq(primitive),
            exp,
            log,
            zech: Vec::new(),
            pow_p,
        };
        // 1 + g^k computed with digit-wise addition of the constant 1.
        field.zech = (0..order as usize)
            .map(|k| {
                let v = field.add_digits(field.exp[k], 1);
                if v == 0 {
                    NONE
                } else {
                    field.log[v as usize]
                }
            })
            .collect();
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> u64 {
        self.size as u64
    }

    /// Monic modulus, constant coefficient first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive(&self) -> Fq {
        self.primitive
    }

    fn order(&self) -> u32 {
        self.size - 1
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        for i in 0..self.n as usize {
            let d = (a % p + b % p) % p;
            out += d * self.pow_p[i];
            a /= p;
            b /= p;
        }
        out
    }

    /// Element from a coordinate vector in the power basis; coordinates are
    /// reduced mod `p` and missing entries are zero.
    pub fn from_coords(&self, coords: &[i64]) -> Result<Fq> {
        if coords.len() > self.n as usize {
            return Err(Error::Parameter(format!(
                "{} coordinates given for a degree-{} field",
                coords.len(),
                self.n
            )));
        }
        let p = self.p as i64;
        let packed = coords
            .iter()
            .enumerate()
            .map(|(i, &c)| c.rem_euclid(p) as u32 * self.pow_p[i])
            .sum();
        Ok(Fq(packed))
    }

    pub fn coords(&self, e: Fq) -> Vec<u32> {
        let mut v = e.0;
        (0..self.n)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn from_packed(&self, packed: u32) -> Result<Fq> {
        if packed >= self.size {
            return Err(Error::Parameter(format!("{packed} is not a packed element of F_{}", self.size)));
        }
        Ok(Fq(packed))
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, v: i64) -> Fq {
        Fq(v.rem_euclid(self.p as i64) as u32)
    }

    /// Root `t` of the modulus (the power-basis generator).
    pub fn generator(&self) -> Fq {
        if self.n == 1 {
            // F_p itself: t is a root of the modulus `t`, i.e. zero; the basis
            // is {1} and we report t = 0 only through `basis`.
            Fq::ZERO
        } else {
            Fq(self.p)
        }
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let d = (lb + self.order() - la) % self.order();
        let z = self.zech[d as usize];
        if z == NONE {
            Fq::ZERO
        } else {
            Fq(self.exp[((la as u64 + z as u64) % self.order() as u64) as usize])
        }
    }

    pub fn neg(&self, a: Fq) -> Fq {
        if a.0 == 0 {
            return a;
        }
        let half = self.order() / 2;
        Fq(self.exp[((self.log[a.0 as usize] + half) % self.order()) as usize])
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq::ZERO;
        }
        let s = self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64;
        Fq(self.exp[(s % self.order() as u64) as usize])
    }

    pub fn inv(&self, a: Fq) -> Option<Fq> {
        if a.0 == 0 {
            return None;
        }
        let l = self.log[a.0 as usize];
        Some(Fq(self.exp[((self.order() - l) % self.order()) as usize]))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Option<Fq> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq::ONE;
        }
        if a.0 == 0 {
            return Fq::ZERO;
        }
        let l = self.log[a.0 as usize] as u128 * e as u128 % self.order() as u128;
        Fq(self.exp[l as usize])
    }

    /// `e^(p^k)` with `k` taken mod `n`; negative `k` gives iterated `p`-th roots.
    pub fn frobenius_iter(&self, e: Fq, k: i64) -> Fq {
        let k = k.rem_euclid(self.n as i64) as u32;
        if k == 0 || e.0 == 0 {
            return e;
        }
        let l = self.log[e.0 as usize] as u64 * self.pow_p[k as usize] as u64 % self.order() as u64;
        Fq(self.exp[l as usize])
    }

    /// Unique `p`-th root.
    pub fn pth_root(&self, e: Fq) -> Fq {
        self.frobenius_iter(e, -1)
    }

    /// Absolute trace `F_q -> F_p`, returned as an integer in `0..p`.
    pub fn trace_to_prime(&self, e: Fq) -> u32 {
        let mut acc = Fq::ZERO;
        for k in 0..self.n as i64 {
            acc = self.add(acc, self.frobenius_iter(e, k));
        }
        debug_assert!(acc.0 < self.p, "trace must land in F_p");
        acc.0
    }

    /// Power basis `gamma_i = t^(i-1)`, `i = 1..=n`.
    pub fn basis(&self) -> Vec<Fq> {
        (0..self.n as usize).map(|i| Fq(self.pow_p[i])).collect()
    }

    /// Representatives of `F_q^* / F_p^*`: elements whose highest nonzero
    /// coordinate is 1.
    pub fn line_reps(&self) -> Vec<Fq> {
        (1..self.size)
            .filter(|&v| {
                let mut v = v;
                while v >= self.p {
                    v /= self.p;
                }
                v == 1
            })
            .map(Fq)
            .collect()
    }

    /// Canonical representative of the class of a nonzero `e` together with
    /// the scalar `lambda in F_p^*` such that `e = lambda * rep`.
    pub fn line_rep_of(&self, e: Fq) -> Option<(Fq, u32)> {
        if e.0 == 0 {
            return None;
        }
        let lead = *self.coords(e).iter().rev().find(|&&c| c != 0)?;
        let inv = fp_poly::inv_mod_p(lead, self.p);
        Some((self.mul(e, Fq(inv)), lead))
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.size).map(Fq)
    }

    /// Human-readable form as a polynomial in `t`, e.g. `t^2+2t+1`.
    pub fn format(&self, e: Fq) -> String {
        let coords = self.coords(e);
        let mut parts = Vec::new();
        for (i, &c) in coords.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let s = match (i, c) {
                (0, c) => format!("{c}"),
                (1, 1) => "t".to_string(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            };
            parts.push(s);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

fn smallest_irreducible(p: u32, n: u32) -> Vec<u32> {
    let count = (p as u64).pow(n);
    for k in 0..count {
        // Coefficient vectors are enumerated as base-p integers with the
        // constant term as the least significant digit.
        let mut coeffs = vec![0u32; n as usize + 1];
        let mut v = k;
        for i in 0..n as usize {
            coeffs[i] = (v % p as u64) as u32;
            v /= p as u64;
        }
        coeffs[n as usize] = 1;
        if fp_poly::is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive oracle: smallest monic cubic over F_p without roots, in the
    /// order where c2 varies slowest and c0 fastest.
    fn cubic_oracle(p: u32) -> Vec<u32> {
        for c2 in 0..p {
            for c1 in 0..p {
                for c0 in 0..p {
                    let has_root = (0..p).any(|t| {
                        let v = (c0 as u64 + c1 as u64 * t as u64 + c2 as u64 * (t * t) as u64 + (t as u64).pow(3))
                            % p as u64;
                        v == 0
                    });
                    if !has_root {
                        return vec![c0, c1, c2, 1];
                    }
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn moduli_match_exhaustive_oracle() {
        assert_eq!(Field::new(3, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(Field::new(3, 3).unwrap().modulus(), &[1, 2, 0, 1]);
        assert_eq!(Field::new(3, 3).unwrap().modulus(), cubic_oracle(3).as_slice());
        assert_eq!(Field::new(5, 3).unwrap().modulus(), cubic_oracle(5).as_slice());
        // Deterministic across constructions.
        assert_eq!(Field::new(5, 3).unwrap(), Field::new(5, 3).unwrap());
    }

    #[test]
    fn rejects_even_and_composite() {
        assert!(Field::new(2, 3).is_err());
        assert!(Field::new(15, 1).is_err());
        assert!(Field::new(3, 0).is_err());
    }

    #[test]
    fn frobenius_examples_in_f27() {
        let f = Field::new(3, 3).unwrap();
        let t = f.generator();
        let t_plus_2 = f.from_coords(&[2, 1]).unwrap();
        assert_eq!(f.frobenius_iter(t, 1), t_plus_2);
        assert_eq!(f.frobenius_iter(t_plus_2, -1), t);
        for e in f.elements() {
            assert_eq!(f.frobenius_iter(e, 3), e);
        }
    }

    #[test]
    fn traces_in_f27() {
        let f = Field::new(3, 3).unwrap();
        assert_eq!(f.trace_to_prime(Fq::ZERO), 0);
        assert_eq!(f.trace_to_prime(f.generator()), 0);
        let t2 = f.from_coords(&[0, 0, 1]).unwrap();
        assert_eq!(f.trace_to_prime(t2), 2);
    }

    #[test]
    fn trace_is_surjective_and_additive() {
        for (p, n) in [(3, 3), (5, 3), (3, 5)] {
            let f = Field::new(p, n).unwrap();
            let mut seen = vec![false; p as usize];
            for e in f.elements() {
                seen[f.trace_to_prime(e) as usize] = true;
            }
            assert!(seen.iter().all(|&b| b));
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..200 {
                let a = f.from_packed(rng.gen_range(0..f.size() as u32)).unwrap();
                let b = f.from_packed(rng.gen_range(0..f.size() as u32)).unwrap();
                assert_eq!(
                    f.trace_to_prime(f.add(a, b)),
                    (f.trace_to_prime(a) + f.trace_to_prime(b)) % p
                );
            }
        }
    }

    #[test]
    fn reps_counts() {
        assert_eq!(Field::new(3, 1).unwrap().line_reps(), vec![Fq::ONE]);
        assert_eq!(Field::new(3, 3).unwrap().line_reps().len(), 13);
        assert_eq!(Field::new(5, 3).unwrap().line_reps().len(), 31);
    }

    #[test]
    fn reps_partition_nonzero_elements() {
        let f = Field::new(5, 3).unwrap();
        let reps = f.line_reps();
        let mut hit = std::collections::HashSet::new();
        for e in f.elements().skip(1) {
            let (rep, lambda) = f.line_rep_of(e).unwrap();
            assert!(reps.contains(&rep));
            assert_eq!(f.mul(rep, f.from_int(lambda as i64)), e);
            hit.insert(rep);
        }
        assert_eq!(hit.len(), reps.len());
    }

    #[test]
    fn basis_is_power_basis() {
        let f = Field::new(3, 5).unwrap();
        let basis = f.basis();
        let t = f.generator();
        for (i, &g) in basis.iter().enumerate() {
            assert_eq!(g, f.pow(t, i as u64));
        }
    }

    #[test]
    fn field_axioms_random() {
        for (p, n) in [(3, 3), (3, 5), (5, 3)] {
            let f = Field::new(p, n).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(p as u64 * 100 + n as u64);
            let mut r = || f.from_packed(rng.gen_range(0..f.size() as u32)).unwrap();
            for _ in 0..300 {
                let (a, b, c) = (r(), r(), r());
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(a, f.neg(a)), Fq::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
                }
                // Frobenius is a ring automorphism.
                assert_eq!(f.frobenius_iter(f.mul(a, b), 1), f.mul(f.frobenius_iter(a, 1), f.frobenius_iter(b, 1)));
                assert_eq!(f.frobenius_iter(f.add(a, b), 1), f.add(f.frobenius_iter(a, 1), f.frobenius_iter(b, 1)));
                assert_eq!(f.pow(f.pth_root(a), p as u64), a);
                assert_eq!(f.pow(a, f.size()), a);
            }
        }
    }

    #[test]
    fn addition_matches_digitwise() {
        let f = Field::new(5, 3).unwrap();
        for a in f.elements().step_by(7) {
            for b in f.elements().step_by(11) {
                let expect: Vec<u32> = f.coords(a).iter().zip(f.coords(b)).map(|(x, y)| (x + y) % 5).collect();
                assert_eq!(f.coords(f.add(a, b)), expect);
            }
        }
    }

    #[test]
    fn prime_field_degree_one() {
        let f = Field::new(7, 1).unwrap();
        assert_eq!(f.size(), 7);
        assert_eq!(f.mul(f.from_int(3), f.from_int(5)), f.from_int(1));
        assert_eq!(f.format(f.from_int(4)), "4");
    }
}
