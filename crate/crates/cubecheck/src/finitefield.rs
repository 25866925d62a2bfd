//! Arithmetic in F_p and F_p² and the cubic residue character.
//!
//! F_p² only arises for p ≡ 2 (mod 3) and is always written in the basis
//! {1, j} with j² + j + 1 = 0, so the symbol calculus of the Brauer classes
//! can be transcribed literally. A [`CubicCharContext`] pins a primitive
//! cube root of unity once and for all; every cubic index this crate
//! reports is relative to that choice, and certificates record it.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::factor;
use crate::{Error, Result};

/// An element of F_p (degree 1) or F_p² = F_p[j] (degree 2), as c0 + c1·j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FqElement {
    pub p: u64,
    pub degree: u8,
    pub c0: u64,
    pub c1: u64,
}

fn mulp(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn addp(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

fn subp(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

impl FqElement {
    pub fn scalar(p: u64, c0: i64) -> Self {
        FqElement { p, degree: 1, c0: c0.rem_euclid(p as i64) as u64, c1: 0 }
    }

    /// c0 + c1·j in F_p²; only meaningful when p ≡ 2 (mod 3).
    pub fn quadratic(p: u64, c0: i64, c1: i64) -> Self {
        FqElement {
            p,
            degree: 2,
            c0: c0.rem_euclid(p as i64) as u64,
            c1: c1.rem_euclid(p as i64) as u64,
        }
    }

    pub fn zero(p: u64, degree: u8) -> Self {
        FqElement { p, degree, c0: 0, c1: 0 }
    }

    pub fn one(p: u64, degree: u8) -> Self {
        FqElement { p, degree, c0: 1, c1: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }

    pub fn q(&self) -> u64 {
        if self.degree == 1 { self.p } else { self.p * self.p }
    }

    fn check_compat(&self, o: &Self) {
        assert!(self.p == o.p && self.degree == o.degree, "mixed fields");
    }

    /// Embeds into the degree-2 field (identity if already there).
    pub fn lift(&self, degree: u8) -> Self {
        assert!(degree >= self.degree);
        FqElement { degree, ..*self }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_compat(o);
        FqElement { c0: addp(self.c0, o.c0, self.p), c1: addp(self.c1, o.c1, self.p), ..*self }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check_compat(o);
        FqElement { c0: subp(self.c0, o.c0, self.p), c1: subp(self.c1, o.c1, self.p), ..*self }
    }

    pub fn neg(&self) -> Self {
        FqElement { c0: subp(0, self.c0, self.p), c1: subp(0, self.c1, self.p), ..*self }
    }

    /// Product, using j² = −1 − j.
    pub fn mul(&self, o: &Self) -> Self {
        self.check_compat(o);
        let p = self.p;
        let ac = mulp(self.c0, o.c0, p);
        let bd = mulp(self.c1, o.c1, p);
        let ad_bc = addp(mulp(self.c0, o.c1, p), mulp(self.c1, o.c0, p), p);
        FqElement { c0: subp(ac, bd, p), c1: subp(ad_bc, bd, p), ..*self }
    }

    /// The nontrivial field automorphism σ: j ↦ j² (identity on degree 1).
    pub fn sigma(&self) -> Self {
        FqElement { c0: subp(self.c0, self.c1, self.p), c1: subp(0, self.c1, self.p), ..*self }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::one(self.p, self.degree);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::domain("inverse of zero"));
        }
        Ok(self.pow(self.q() - 2))
    }
}

impl std::fmt::Display for FqElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.degree == 1 || self.c1 == 0 {
            write!(f, "{}", self.c0)
        } else if self.c0 == 0 {
            write!(f, "{}j", self.c1)
        } else {
            write!(f, "{}+{}j", self.c0, self.c1)
        }
    }
}

/// Norm from F_p² to F_p: u·σ(u) = c0² − c0·c1 + c1².
pub fn fq2_norm(u: &FqElement) -> FqElement {
    assert_eq!(u.degree, 2);
    let n = u.mul(&u.sigma());
    debug_assert_eq!(n.c1, 0);
    FqElement { p: u.p, degree: 1, c0: n.c0, c1: 0 }
}

/// A fixed identification of the cube roots of unity in F_q with Z/3.
///
/// The distinguished root is j = g^((q−1)/3) where g is the least primitive
/// root mod p when p ≡ 1 (mod 3), or the lexicographically least generator
/// of F_p²* (ordered by (c0, c1)) when p ≡ 2 (mod 3). The index of u is
/// read off by comparing u^((q−1)/3) against powers of ζ = j^((q−1)/3),
/// which makes "u ≡ j^e modulo cubes" literal; when 9 | q−1 that element
/// collapses to 1 and ζ = j itself is used instead.
#[derive(Debug, Clone)]
pub struct CubicCharContext {
    pub p: u64,
    pub degree: u8,
    pub generator: FqElement,
    pub j: FqElement,
    pub zeta: FqElement,
}

fn pick_zeta(j: &FqElement, q: u64) -> FqElement {
    if ((q - 1) / 3) % 3 != 0 {
        j.pow((q - 1) / 3)
    } else {
        *j
    }
}

fn prime_divisors_u64(n: u64) -> Vec<u64> {
    factor(&BigInt::from(n))
        .expect("nonzero")
        .factors
        .iter()
        .map(|(p, _)| p.to_u64().unwrap())
        .collect()
}

fn is_generator(g: &FqElement, order: u64, prime_divs: &[u64]) -> bool {
    if g.is_zero() {
        return false;
    }
    prime_divs.iter().all(|&f| g.pow(order / f) != FqElement::one(g.p, g.degree))
}

impl CubicCharContext {
    pub fn new(p: u64) -> Result<Self> {
        if p == 3 || !crate::arith::is_prime(&BigInt::from(p)) {
            return Err(Error::domain(format!("cubic character needs a prime p ≠ 3, got {p}")));
        }
        if p % 3 == 1 {
            let order = p - 1;
            let divs = prime_divisors_u64(order);
            let g = (2..p)
                .map(|c| FqElement::scalar(p, c as i64))
                .find(|g| is_generator(g, order, &divs))
                .ok_or_else(|| Error::Inconsistent("no primitive root".into()))?;
            let j = g.pow(order / 3);
            let zeta = pick_zeta(&j, p);
            Ok(CubicCharContext { p, degree: 1, generator: g, j, zeta })
        } else {
            let order = p * p - 1;
            let divs = prime_divisors_u64(order);
            let mut found = None;
            'outer: for c0 in 0..p {
                for c1 in 0..p {
                    let g = FqElement { p, degree: 2, c0, c1 };
                    if is_generator(&g, order, &divs) {
                        found = Some(g);
                        break 'outer;
                    }
                }
            }
            let g = found.ok_or_else(|| Error::Inconsistent("no generator of F_p2*".into()))?;
            let j = g.pow(order / 3);
            debug_assert!(j != FqElement::one(p, 2) && j.pow(3) == FqElement::one(p, 2));
            let zeta = pick_zeta(&j, p * p);
            Ok(CubicCharContext { p, degree: 2, generator: g, j, zeta })
        }
    }

    pub fn q(&self) -> u64 {
        if self.degree == 1 { self.p } else { self.p * self.p }
    }

    /// Short description recorded in certificates.
    pub fn convention(&self) -> String {
        format!(
            "j = g^((q-1)/3), g = {} (least generator of F_{}*), index read against zeta = {}",
            self.generator,
            self.q(),
            self.zeta
        )
    }
}

/// Cubic index of a nonzero u ∈ F_q*: the e ∈ {0,1,2} with
/// u^((q−1)/3) = j^e. It is 0 exactly when u is a cube.
pub fn cubic_index(u: &FqElement, ctx: &CubicCharContext) -> Result<u8> {
    if u.is_zero() {
        return Err(Error::domain("cubic_index of zero"));
    }
    if u.p != ctx.p || u.degree != ctx.degree {
        return Err(Error::domain("cubic_index: element not in the context field"));
    }
    let q = ctx.q();
    if (q - 1) % 3 != 0 {
        return Err(Error::domain(format!("3 does not divide q - 1 = {}", q - 1)));
    }
    let t = u.pow((q - 1) / 3);
    let mut ze = FqElement::one(u.p, u.degree);
    for e in 0..3u8 {
        if t == ze {
            return Ok(e);
        }
        ze = ze.mul(&ctx.zeta);
    }
    Err(Error::Inconsistent(format!("u^((q-1)/3) = {t} is not a cube root of unity")))
}
