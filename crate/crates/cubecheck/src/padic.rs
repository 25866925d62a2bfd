//! p-adic numbers at finite precision, cube roots, Hensel lifting, and
//! local solvability of the cubic surfaces at finite places.
//!
//! A [`PadicApprox`] stores a value as `p^valuation · unit` with the unit
//! known modulo `p^precision`. Arithmetic tracks how many digits of the
//! result are actually justified by the inputs, so a computed quantity never
//! claims more precision than it has.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::arith::Rational;
use crate::{Error, Result};

/// Default number of p-adic digits carried by lifted witnesses.
pub const DEFAULT_PRECISION: u32 = 20;

/// Which surface (or auxiliary quadric) an operation refers to.
///
/// `ThreeCubes` is `x³+y³+z³ = a`, `Twisted` is `x³+y³+2z³ = a`, and
/// `Quadric([c₁,c₂,c₃])` is `c₁x²+c₂y²+c₃z² = a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    ThreeCubes,
    Twisted,
    Quadric([i64; 3]),
}

impl Equation {
    /// Coefficient and degree of the monomial in variable `i`.
    pub fn coeff_deg(&self, i: usize) -> (BigInt, u32) {
        match self {
            Equation::ThreeCubes => (BigInt::one(), 3),
            Equation::Twisted => (BigInt::from(if i == 2 { 2 } else { 1 }), 3),
            Equation::Quadric(c) => (BigInt::from(c[i]), 2),
        }
    }

    /// Left-hand side evaluated at integer coordinates.
    pub fn lhs(&self, v: [&BigInt; 3]) -> BigInt {
        let mut s = BigInt::zero();
        for i in 0..3 {
            let (c, d) = self.coeff_deg(i);
            s += c * v[i].pow(d);
        }
        s
    }

    /// Partial derivative of the left-hand side in variable `i`.
    pub fn partial(&self, i: usize, v: [&BigInt; 3]) -> BigInt {
        let (c, d) = self.coeff_deg(i);
        c * BigInt::from(d) * v[i].pow(d - 1)
    }

    pub fn is_cubic(&self) -> bool {
        !matches!(self, Equation::Quadric(_))
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Equation::ThreeCubes => write!(f, "x^3+y^3+z^3"),
            Equation::Twisted => write!(f, "x^3+y^3+2z^3"),
            Equation::Quadric(c) => write!(f, "{}x^2+{}y^2+{}z^2", c[0], c[1], c[2]),
        }
    }
}

/// A p-adic number known to finite precision: `p^val · unit + O(p^{val+prec})`.
///
/// Exact zero carries an explicit flag. A fully cancelled sum (zero to the
/// known precision, but not provably zero) is stored with `prec = 0`; its
/// `val` is then only a lower bound on the true valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicApprox {
    p: u64,
    zero: bool,
    val: i64,
    unit: BigInt,
    prec: u32,
}

fn ppow(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

fn mod_inverse(u: &BigInt, m: &BigInt) -> Result<BigInt> {
    let e = u.extended_gcd(m);
    if !e.gcd.is_one() {
        return Err(Error::domain(format!("{u} is not invertible mod {m}")));
    }
    Ok(e.x.mod_floor(m))
}

impl PadicApprox {
    pub fn exact_zero(p: u64) -> Self {
        PadicApprox { p, zero: true, val: 0, unit: BigInt::zero(), prec: 0 }
    }

    /// Builds a value from an integer, keeping `prec` digits of the unit part.
    pub fn from_int(n: &BigInt, p: u64, prec: u32) -> Self {
        if n.is_zero() {
            return Self::exact_zero(p);
        }
        let pb = BigInt::from(p);
        let mut m = n.clone();
        let mut v = 0i64;
        while m.is_multiple_of(&pb) {
            m /= &pb;
            v += 1;
        }
        let unit = m.mod_floor(&ppow(p, prec));
        PadicApprox { p, zero: false, val: v, unit, prec }
    }

    /// Builds a value known only modulo `p^known_exp` from a representative.
    ///
    /// If the representative vanishes modulo `p^known_exp` the result is the
    /// indeterminate `O(p^known_exp)` with precision 0.
    pub fn from_residue(n: &BigInt, p: u64, known_exp: u32) -> Self {
        let m = ppow(p, known_exp);
        let r = n.mod_floor(&m);
        if r.is_zero() {
            return PadicApprox {
                p,
                zero: false,
                val: known_exp as i64,
                unit: BigInt::zero(),
                prec: 0,
            };
        }
        let pb = BigInt::from(p);
        let mut u = r;
        let mut v = 0u32;
        while u.is_multiple_of(&pb) {
            u /= &pb;
            v += 1;
        }
        PadicApprox { p, zero: false, val: v as i64, unit: u, prec: known_exp - v }
    }

    pub fn from_rational(q: &Rational, p: u64, prec: u32) -> Result<Self> {
        if q.is_zero() {
            return Ok(Self::exact_zero(p));
        }
        let num = Self::from_int(q.numer(), p, prec + 2);
        let den = Self::from_int(q.denom(), p, prec + 2);
        let m = ppow(p, prec);
        let inv = mod_inverse(&den.unit, &m)?;
        Ok(PadicApprox {
            p,
            zero: false,
            val: num.val - den.val,
            unit: (num.unit * inv).mod_floor(&m),
            prec,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        self.zero
    }

    /// True when the value cancelled to its full known precision; only
    /// [`Self::min_valuation`] is meaningful then.
    pub fn is_indeterminate(&self) -> bool {
        !self.zero && self.prec == 0
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Exact valuation; `None` for exact zero. Panics on indeterminate values.
    pub fn valuation(&self) -> Option<i64> {
        if self.zero {
            return None;
        }
        assert!(self.prec > 0, "valuation of an indeterminate p-adic value");
        Some(self.val)
    }

    /// Lower bound on the valuation; `None` means +∞ (exact zero).
    pub fn min_valuation(&self) -> Option<i64> {
        if self.zero {
            None
        } else {
            Some(self.val)
        }
    }

    /// Unit part reduced modulo `p^k`, for `k ≤ precision`.
    pub fn unit_mod(&self, k: u32) -> BigInt {
        assert!(k <= self.prec && !self.zero);
        self.unit.mod_floor(&ppow(self.p, k))
    }

    /// The value modulo `p^k`, for integral values with `val + prec ≥ k`.
    pub fn residue_mod(&self, k: u32) -> BigInt {
        assert!(!self.zero && self.val >= 0);
        assert!(self.val + self.prec as i64 >= k as i64);
        if self.val >= k as i64 {
            return BigInt::zero();
        }
        (&self.unit * ppow(self.p, self.val as u32)).mod_floor(&ppow(self.p, k))
    }

    fn known_exp(&self) -> i64 {
        self.val + self.prec as i64
    }

    pub fn neg(&self) -> Self {
        if self.zero || self.prec == 0 {
            return self.clone();
        }
        let m = ppow(self.p, self.prec);
        PadicApprox { unit: (&m - &self.unit).mod_floor(&m), ..self.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        if self.zero || o.zero {
            return Self::exact_zero(self.p);
        }
        if self.prec == 0 || o.prec == 0 {
            // indeterminate · known: only a valuation bound survives
            return PadicApprox {
                p: self.p,
                zero: false,
                val: self.val + o.val,
                unit: BigInt::zero(),
                prec: 0,
            };
        }
        let prec = self.prec.min(o.prec);
        let m = ppow(self.p, prec);
        PadicApprox {
            p: self.p,
            zero: false,
            val: self.val + o.val,
            unit: (&self.unit * &o.unit).mod_floor(&m),
            prec,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        if self.zero {
            return o.clone();
        }
        if o.zero {
            return self.clone();
        }
        let v = self.val.min(o.val);
        let known = self.known_exp().min(o.known_exp());
        let digits = (known - v) as u32;
        if digits == 0 {
            return PadicApprox { p: self.p, zero: false, val: v, unit: BigInt::zero(), prec: 0 };
        }
        let m = ppow(self.p, digits);
        let lift = |x: &Self| {
            (&x.unit * ppow(self.p, (x.val - v) as u32)).mod_floor(&m)
        };
        let s = (lift(self) + lift(o)).mod_floor(&m);
        Self::from_residue(&s, self.p, digits).shift_val(v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::from_int(&BigInt::one(), self.p, self.prec.max(1));
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    fn shift_val(&self, by: i64) -> Self {
        if self.zero {
            return self.clone();
        }
        PadicApprox { val: self.val + by, ..self.clone() }
    }

    /// Scales by an exact integer.
    pub fn scale(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::exact_zero(self.p);
        }
        self.mul(&Self::from_int(n, self.p, self.prec.max(1)))
    }

    /// Agreement to `digits` significant digits (same valuation, congruent units).
    pub fn congruent_to(&self, o: &Self, digits: u32) -> bool {
        if self.zero && o.zero {
            return true;
        }
        if self.zero || o.zero || self.prec < digits || o.prec < digits {
            return false;
        }
        self.val == o.val && self.unit_mod(digits) == o.unit_mod(digits)
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return write!(f, "0");
        }
        if self.prec == 0 {
            return write!(f, "O({}^{})", self.p, self.val);
        }
        if self.val == 0 {
            write!(f, "{} + O({}^{})", self.unit, self.p, self.prec)
        } else {
            write!(f, "{}^{}*{} + O({}^{})", self.p, self.val, self.unit, self.p, self.known_exp())
        }
    }
}

/// v_p of a rational; `None` encodes +∞ (the zero rational).
pub fn valuation(q: &Rational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut m = n.abs();
        let mut v = 0i64;
        while m.is_multiple_of(&pb) {
            m /= &pb;
            v += 1;
        }
        v
    };
    Some(count(q.numer()) - count(q.denom()))
}

/// All cube roots of a p-adic unit `c`, to the precision of `c`.
///
/// For `p = 2` and `p ≡ 2 (mod 3)` the root exists and is unique. For
/// `p = 3` it exists iff `c ≡ ±1 (mod 9)`. For `p ≡ 1 (mod 3)` there are 0
/// or 3 roots, returned with unit parts in ascending order.
pub fn cube_root(c: &PadicApprox) -> Result<Vec<PadicApprox>> {
    if c.is_exact_zero() || c.is_indeterminate() || c.val != 0 {
        return Err(Error::domain("cube_root: input must be a p-adic unit"));
    }
    let p = c.p;
    let k = c.prec;
    let m = ppow(p, k);
    let u = &c.unit;

    let verify = |r: &BigInt| debug_assert!((r * r * r).mod_floor(&m) == u.mod_floor(&m));

    if p == 2 {
        // (Z/2^k)* has exponent 2^{k-2}; cubing is a bijection.
        let lambda = BigInt::from(2u32).pow(k.max(3) - 2);
        let e = mod_inverse(&BigInt::from(3u32), &lambda)?;
        let big_m = ppow(2, k.max(3));
        let r = u.modpow(&e, &big_m).mod_floor(&m);
        verify(&r);
        return Ok(vec![PadicApprox { p, zero: false, val: 0, unit: r, prec: k }]);
    }
    if p == 3 {
        let r9 = u.mod_floor(&BigInt::from(9u32));
        let start = if r9.is_one() {
            BigInt::one()
        } else if r9 == BigInt::from(8u32) {
            BigInt::from(2u32)
        } else {
            return Ok(vec![]);
        };
        // digit-by-digit lift: the derivative has v_3 = 1, so the digit at
        // 3^n moves the cube at 3^{n+1} and pins it modulo 3^{n+2}
        let mut r = start;
        for n in 1..k.max(2) - 1 {
            let step = ppow(3, n);
            let check = ppow(3, n + 2);
            let target = u.mod_floor(&check);
            for d in 0..3u32 {
                let cand = &r + &step * BigInt::from(d);
                if (&cand * &cand * &cand).mod_floor(&check) == target {
                    r = cand;
                    break;
                }
            }
        }
        let r = r.mod_floor(&m);
        verify(&r);
        return Ok(vec![PadicApprox { p, zero: false, val: 0, unit: r, prec: k }]);
    }
    if p % 3 == 2 {
        // gcd(3, p^{k-1}(p-1)) = 1: cubing is a bijection on units.
        let order = ppow(p, k - 1) * BigInt::from(p - 1);
        let e = mod_inverse(&BigInt::from(3u32), &order)?;
        let r = u.modpow(&e, &m);
        verify(&r);
        return Ok(vec![PadicApprox { p, zero: false, val: 0, unit: r, prec: k }]);
    }

    // p ≡ 1 (mod 3): cube test, brute root mod p, Hensel lift, three roots.
    let pb = BigInt::from(p);
    let exp = BigInt::from((p - 1) / 3);
    if !u.modpow(&exp, &pb).is_one() {
        return Ok(vec![]);
    }
    let u0 = u.mod_floor(&pb).to_u64().unwrap();
    let mut root0 = None;
    for s in 1..p {
        if mulmod(mulmod(s as u128, s as u128, p as u128), s as u128, p as u128) == u0 as u128 {
            root0 = Some(s);
            break;
        }
    }
    let root0 = root0.ok_or_else(|| Error::Inconsistent("cube test passed but no root".into()))?;
    let mut omega0 = None;
    for s in 2..p {
        if mulmod(mulmod(s as u128, s as u128, p as u128), s as u128, p as u128) == 1 {
            omega0 = Some(s);
            break;
        }
    }
    let omega0 = omega0.ok_or_else(|| Error::Inconsistent("no cube root of unity".into()))?;

    let lift = |r0: u64, target: &BigInt| -> BigInt {
        // Newton for t^3 - target, unit derivative
        let mut t = BigInt::from(r0);
        for _ in 0..(64 - (k as u64).leading_zeros() + 2) {
            let g = (&t * &t * &t - target).mod_floor(&m);
            let gp = (BigInt::from(3u32) * &t * &t).mod_floor(&m);
            let inv = mod_inverse(&gp, &m).expect("unit derivative");
            t = (&t - g * inv).mod_floor(&m);
        }
        t
    };
    let r = lift(root0, u);
    let w = lift(omega0, &BigInt::one());
    let mut roots = vec![
        r.clone(),
        (&r * &w).mod_floor(&m),
        (&r * &w * &w).mod_floor(&m),
    ];
    roots.sort();
    for r in &roots {
        verify(r);
    }
    Ok(roots
        .into_iter()
        .map(|r| PadicApprox { p, zero: false, val: 0, unit: r, prec: k })
        .collect())
}

fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    (a * b) % m
}

/// Outcome of a local solvability search: a Hensel-certified point, or a
/// proof that no residue solution survives to the stated modulus.
#[derive(Debug, Clone)]
pub enum LocalWitness {
    Point {
        coords: [PadicApprox; 3],
        /// integer residues the point was lifted from, modulo p^level
        residue: [BigInt; 3],
        level: u32,
        /// the coordinate satisfying the Newton condition
        newton_index: usize,
    },
    Empty {
        p: u64,
        /// the frontier of residue solutions died at modulus p^level
        level: u32,
    },
}

impl LocalWitness {
    pub fn is_empty(&self) -> bool {
        matches!(self, LocalWitness::Empty { .. })
    }
}

fn vp_u128(mut n: u128, p: u128, cap: u32) -> u32 {
    if n == 0 {
        return cap;
    }
    let mut v = 0;
    while n % p == 0 && v < cap {
        n /= p;
        v += 1;
    }
    v
}

struct ResidueSearch {
    a: BigInt,
    p: u64,
    coeffs: [i128; 3],
    deg: u32,
}

impl ResidueSearch {
    fn lhs_mod(&self, x: [u128; 3], m: u128) -> u128 {
        let mut s = 0u128;
        for i in 0..3 {
            let c = self.coeffs[i].rem_euclid(m as i128) as u128;
            let mut t = c % m;
            for _ in 0..self.deg {
                t = mulmod(t, x[i] % m, m);
            }
            s = (s + t) % m;
        }
        s
    }

    fn a_mod(&self, m: u128) -> u128 {
        self.a.mod_floor(&BigInt::from(m)).to_u128().unwrap()
    }

    /// Newton-certifying coordinate index at level `level`, if any.
    fn certify(&self, x: [u128; 3], level: u32) -> Option<usize> {
        let m = (self.p as u128).pow(level);
        for i in 0..3 {
            let c = self.coeffs[i].rem_euclid(m as i128) as u128;
            let mut d = mulmod(c % m, self.deg as u128 % m, m);
            for _ in 0..self.deg - 1 {
                d = mulmod(d, x[i] % m, m);
            }
            let w = vp_u128(d, self.p as u128, level);
            if 2 * w < level {
                return Some(i);
            }
        }
        None
    }
}

/// Decides solvability of `eq = a` over Z_p by exhaustive residue search
/// with the Newton condition `v_p(f−a) > 2·v_p(∂f/∂xᵢ)` as lift certificate.
///
/// Searches modulo `p^max_level`; returns the lexicographically least
/// certified witness, an emptiness proof, or an "undecided" error if the
/// frontier is still alive unresolved at the last level.
pub fn local_solvable_at(
    eq: &Equation,
    a: &BigInt,
    p: u64,
    max_level: u32,
    lift_prec: u32,
) -> Result<LocalWitness> {
    if a.is_zero() {
        return Err(Error::domain("local_solvable: a must be nonzero"));
    }
    let coeffs = [
        eq.coeff_deg(0).0.to_i128().unwrap(),
        eq.coeff_deg(1).0.to_i128().unwrap(),
        eq.coeff_deg(2).0.to_i128().unwrap(),
    ];
    let deg = eq.coeff_deg(0).1;
    let s = ResidueSearch { a: a.clone(), p, coeffs, deg };

    // level 1: solve for z through a table of d-th powers
    let pm = p as u128;
    let mut table: Vec<Vec<u128>> = vec![vec![]; p as usize];
    for z in 0..pm {
        let c = coeffs[2].rem_euclid(pm as i128) as u128;
        let mut t = c % pm;
        for _ in 0..deg {
            t = mulmod(t, z, pm);
        }
        table[t as usize].push(z);
    }
    let a1 = s.a_mod(pm);
    let mut frontier: Vec<[u128; 3]> = Vec::new();
    for x in 0..pm {
        for y in 0..pm {
            let partial = s.lhs_mod([x, y, 0], pm);
            let need = (a1 + pm - partial) % pm;
            for &z in &table[need as usize] {
                frontier.push([x, y, z]);
            }
        }
    }
    frontier.sort_unstable();

    let mut level = 1u32;
    loop {
        if frontier.is_empty() {
            return Ok(LocalWitness::Empty { p, level });
        }
        for &node in &frontier {
            if let Some(i) = s.certify(node, level) {
                return lift_witness(eq, a, p, node, level, i, lift_prec);
            }
        }
        if level >= max_level {
            return Err(Error::Undecided {
                level,
                context: format!("local solvability of {eq} = {a} at p = {p}"),
            });
        }
        let m_next = pm.pow(level + 1);
        let step = pm.pow(level);
        let a_next = s.a_mod(m_next);
        let mut next = Vec::new();
        for &node in &frontier {
            for dx in 0..pm {
                for dy in 0..pm {
                    for dz in 0..pm {
                        let cand = [node[0] + dx * step, node[1] + dy * step, node[2] + dz * step];
                        if s.lhs_mod(cand, m_next) == a_next {
                            next.push(cand);
                        }
                    }
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        frontier = next;
        level += 1;
    }
}

/// [`local_solvable_at`] with the default search depth: 6 levels for
/// p ∈ {2,3}, 2 otherwise.
pub fn local_solvable(eq: &Equation, a: &BigInt, p: u64) -> Result<LocalWitness> {
    let k = if p <= 3 { 6 } else { 2 };
    local_solvable_at(eq, a, p, k, DEFAULT_PRECISION)
}

fn lift_witness(
    eq: &Equation,
    a: &BigInt,
    p: u64,
    node: [u128; 3],
    level: u32,
    i: usize,
    lift_prec: u32,
) -> Result<LocalWitness> {
    let residue = [BigInt::from(node[0]), BigInt::from(node[1]), BigInt::from(node[2])];
    let (c, d) = eq.coeff_deg(i);
    let mut rest = BigInt::zero();
    for j in 0..3 {
        if j != i {
            let (cj, dj) = eq.coeff_deg(j);
            rest += cj * residue[j].pow(dj);
        }
    }
    // solve c·t^d = a − rest by Newton from the residue witness
    let target = a - rest;
    let root = newton_root(&c, d, &target, &residue[i], p, level, lift_prec)?;
    let mut coords = [
        PadicApprox::from_int(&residue[0], p, lift_prec),
        PadicApprox::from_int(&residue[1], p, lift_prec),
        PadicApprox::from_int(&residue[2], p, lift_prec),
    ];
    coords[i] = root;
    Ok(LocalWitness::Point { coords, residue, level, newton_index: i })
}

/// Newton iteration for `c·t^d = target` in Z_p starting from `t0`, which
/// must satisfy the lift condition at modulus `p^level`. The root is
/// returned with at least `prec` significant digits.
pub(crate) fn newton_root(
    c: &BigInt,
    d: u32,
    target: &BigInt,
    t0: &BigInt,
    p: u64,
    level: u32,
    prec: u32,
) -> Result<PadicApprox> {
    let g = |t: &BigInt| c * t.pow(d) - target;
    let gp = |t: &BigInt| c * BigInt::from(d) * t.pow(d - 1);
    let pb = BigInt::from(p);
    let w = {
        let d0 = gp(t0);
        if d0.is_zero() {
            return Err(Error::domain("newton_root: zero derivative"));
        }
        crate::arith::int_valuation(&d0, &pb)
    };
    if 2 * w >= level || !g(t0).mod_floor(&ppow(p, level)).is_zero() {
        return Err(Error::domain("newton_root: lift condition fails at start"));
    }
    let n = prec + 2 * w + 4;
    let m = ppow(p, n);
    let pw = ppow(p, w);
    let mut t = t0.mod_floor(&m);
    for _ in 0..64 {
        let gv = g(&t).mod_floor(&(&m * &pw));
        if gv.mod_floor(&(&m * &pw)).is_zero() {
            break;
        }
        let dv = gp(&t);
        let du = (dv / &pw).mod_floor(&m);
        let inv = mod_inverse(&du, &m)?;
        let q = (&gv / &pw) * inv;
        t = (t - q).mod_floor(&m);
        if g(&t).mod_floor(&(&m * &pw)).is_zero() {
            break;
        }
    }
    let resid = g(&t);
    let got = if resid.is_zero() { n + w } else { crate::arith::int_valuation(&resid, &pb) };
    if got < prec + w {
        return Err(Error::Inconsistent(format!(
            "newton_root: converged only to {got} digits, wanted {}",
            prec + w
        )));
    }
    Ok(PadicApprox::from_residue(&t, p, got - w))
}

/// The working precision: `PADIC_PRECISION` from the environment if set,
/// otherwise [`DEFAULT_PRECISION`].
pub fn default_precision() -> u32 {
    std::env::var("PADIC_PRECISION")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&k| k > 0)
        .unwrap_or(DEFAULT_PRECISION)
}

/// Real-place solvability: the cubic surfaces always have real points; a
/// diagonal quadric represents `a` iff some coefficient has the sign of `a`.
pub fn real_solvable(eq: &Equation, a: &Rational) -> bool {
    match eq {
        Equation::ThreeCubes | Equation::Twisted => true,
        Equation::Quadric(c) => {
            if a.is_zero() {
                return true;
            }
            if a.is_positive() {
                c.iter().any(|&ci| ci > 0)
            } else {
                c.iter().any(|&ci| ci < 0)
            }
        }
    }
}
