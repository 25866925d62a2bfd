//! Exact integer arithmetic: factoring, primality, quadratic residues.
//!
//! Everything here is deterministic. Factoring is trial division up to 10⁶
//! followed by Brent's variant of Pollard rho, which is ample for the
//! desk-scale inputs of this crate (|a| ≤ 10⁶ typical, cubes thereof at
//! worst).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub use num_bigint::BigInt as Int;
pub use num_rational::BigRational as Rational;

/// A nonzero integer as `sign · ∏ pᵢ^eᵢ` with the primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    pub sign: i8,
    pub factors: Vec<(BigInt, u32)>,
}

impl FactoredInteger {
    /// Multiplies the factorization back out.
    pub fn reconstruct(&self) -> BigInt {
        let mut n = BigInt::from(self.sign);
        for (p, e) in &self.factors {
            n *= p.pow(*e);
        }
        n
    }

    pub fn valuation(&self, p: &BigInt) -> u32 {
        self.factors
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }
}

/// Factors a nonzero integer.
///
/// ```
/// use cubecheck::arith::factor;
/// use num_bigint::BigInt;
///
/// let f = factor(&BigInt::from(1458)).unwrap();
/// assert_eq!(f.factors, vec![(BigInt::from(2), 1), (BigInt::from(3), 6)]);
/// ```
pub fn factor(n: &BigInt) -> Result<FactoredInteger> {
    if n.is_zero() {
        return Err(Error::domain("factor: n must be nonzero"));
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();

    // Trial division up to 10^6 removes everything we meet in practice.
    let mut d = BigInt::from(2u32);
    let limit = BigInt::from(1_000_000u64);
    while &d * &d <= m && d <= limit {
        if m.is_multiple_of(&d) {
            let mut e = 0u32;
            while m.is_multiple_of(&d) {
                m /= &d;
                e += 1;
            }
            factors.push((d.clone(), e));
        }
        d += if d == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    if m > BigInt::one() {
        // Leftover cofactor: prime, or split with Pollard rho.
        let mut stack = vec![m];
        let mut extra: Vec<BigInt> = Vec::new();
        while let Some(c) = stack.pop() {
            if is_prime(&c) {
                extra.push(c);
            } else {
                let f = pollard_rho(&c);
                stack.push(c / &f);
                stack.push(f);
            }
        }
        extra.sort();
        let mut i = 0;
        while i < extra.len() {
            let mut e = 1u32;
            while i + 1 < extra.len() && extra[i + 1] == extra[i] {
                e += 1;
                i += 1;
            }
            factors.push((extra[i].clone(), e));
            i += 1;
        }
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(FactoredInteger { sign, factors })
}

/// Miller–Rabin with the 12 witnesses that are deterministic below 3.3·10²⁴,
/// which comfortably covers every integer this crate manipulates.
pub fn is_prime(n: &BigInt) -> bool {
    if n < &BigInt::from(2u32) {
        return false;
    }
    for small in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let s = BigInt::from(small);
        if n == &s {
            return true;
        }
        if n.is_multiple_of(&s) {
            return false;
        }
    }
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&BigInt::from(2u32), n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigInt) -> BigInt {
    // Brent's cycle detection; n is odd, composite, and not a small prime.
    let one = BigInt::one();
    let mut c = BigInt::from(1u32);
    loop {
        let mut x = BigInt::from(2u32);
        let mut y = BigInt::from(2u32);
        let mut d = BigInt::one();
        let f = |v: &BigInt| (v * v + &c) % n;
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if &d != n {
            return d;
        }
        c += &one;
    }
}

/// Legendre symbol `(u/p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre_symbol(u: &BigInt, p: &BigInt) -> Result<i8> {
    if p.is_even() || !is_prime(p) {
        return Err(Error::domain(format!("legendre_symbol: {p} is not an odd prime")));
    }
    let r = u.mod_floor(p);
    if r.is_zero() {
        return Ok(0);
    }
    let e = (p - BigInt::one()) >> 1;
    let v = r.modpow(&e, p);
    if v.is_one() {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// v_p of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: &BigInt) -> u32 {
    assert!(!n.is_zero());
    let mut m = n.abs();
    let mut v = 0;
    while m.is_multiple_of(p) {
        m /= p;
        v += 1;
    }
    v
}

/// Floor of the real cube root, exact for integers (used by the searches).
pub fn int_cbrt(n: i128) -> i128 {
    if n < 0 {
        let mut r = -int_cbrt(-n);
        if r * r * r > n {
            r -= 1;
        }
        return r;
    }
    let mut r = (n as f64).cbrt() as i128;
    while r > 0 && r * r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factor_small() {
        let f = factor(&BigInt::from(33)).unwrap();
        assert_eq!(f.factors, vec![(BigInt::from(3), 1), (BigInt::from(11), 1)]);
        assert_eq!(f.sign, 1);

        let f = factor(&BigInt::from(-1)).unwrap();
        assert_eq!(f.sign, -1);
        assert!(f.factors.is_empty());

        // trial-division oracle for 1458 = 2 · 3^6
        let mut n = 1458i64;
        let mut oracle = vec![];
        for p in 2..40 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                oracle.push((BigInt::from(p), e));
            }
        }
        assert_eq!(factor(&BigInt::from(1458)).unwrap().factors, oracle);
    }

    #[test]
    fn factor_rejects_zero() {
        assert!(factor(&BigInt::zero()).is_err());
    }

    #[test]
    fn primality() {
        assert!(!is_prime(&BigInt::from(91))); // 7 · 13
        assert!(is_prime(&BigInt::from(11)));
        // 2^61 - 1 is a Mersenne prime
        assert!(is_prime(&((BigInt::one() << 61) - 1)));
        assert!(!is_prime(&((BigInt::one() << 67) - 1)));
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre_symbol(&BigInt::from(2), &BigInt::from(7)).unwrap(), 1);
        assert_eq!(legendre_symbol(&BigInt::from(2), &BigInt::from(3)).unwrap(), -1);
        assert_eq!(legendre_symbol(&BigInt::from(14), &BigInt::from(7)).unwrap(), 0);
        assert!(legendre_symbol(&BigInt::from(2), &BigInt::from(9)).is_err());
        assert!(legendre_symbol(&BigInt::from(2), &BigInt::from(10)).is_err());
    }

    proptest! {
        #[test]
        fn factor_reconstructs(n in -1_000_000_000_000i64..1_000_000_000_000i64) {
            prop_assume!(n != 0);
            let big = BigInt::from(n);
            let f = factor(&big).unwrap();
            prop_assert_eq!(f.reconstruct(), big);
            for (p, _) in &f.factors {
                prop_assert!(is_prime(p));
            }
            for w in f.factors.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
        }

        #[test]
        fn legendre_multiplicative(u in 1i64..10_000, v in 1i64..10_000, pi in 0usize..8) {
            let ps = [3i64, 5, 7, 11, 13, 101, 997, 65537];
            let p = BigInt::from(ps[pi]);
            let lu = legendre_symbol(&BigInt::from(u), &p).unwrap();
            let lv = legendre_symbol(&BigInt::from(v), &p).unwrap();
            let luv = legendre_symbol(&BigInt::from(u * v), &p).unwrap();
            prop_assert_eq!(luv, lu * lv);
        }

        #[test]
        fn legendre_matches_euler(u in 1i64..100_000) {
            let p = BigInt::from(10007);
            let l = legendre_symbol(&BigInt::from(u), &p).unwrap();
            let e = BigInt::from(u).modpow(&BigInt::from(5003), &p);
            let expected = if e.is_zero() { 0 } else if e.is_one() { 1 } else { -1 };
            prop_assert_eq!(l, expected);
        }

        #[test]
        fn cbrt_exact(r in -1_000_000i128..1_000_000i128, off in 0i128..100) {
            let n = r * r * r + off;
            let c = int_cbrt(n);
            prop_assert!(c * c * c <= n);
            prop_assert!((c + 1) * (c + 1) * (c + 1) > n);
        }
    }
}
