//! Bounded integer-point search with congruence filters, and exact
//! multivariate polynomial identity verification.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::int_cbrt;
use crate::padic::Equation;
use crate::{Error, Result};

/// A condition `c₁x + c₂y + c₃z ≡ r (mod m)` with `m ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceFilter {
    pub coeffs: [i64; 3],
    pub residue: i64,
    pub modulus: i64,
}

impl CongruenceFilter {
    pub fn new(coeffs: [i64; 3], residue: i64, modulus: i64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::domain(format!("filter modulus {modulus} must be ≥ 2")));
        }
        Ok(CongruenceFilter { coeffs, residue, modulus })
    }

    pub fn passes(&self, t: &[i128; 3]) -> bool {
        let mut s: i128 = 0;
        for i in 0..3 {
            s += self.coeffs[i] as i128 * t[i];
        }
        s.rem_euclid(self.modulus as i128) == (self.residue as i128).rem_euclid(self.modulus as i128)
    }
}

/// All integer solutions of `eq = a` in the box |x|,|y|,|z| ≤ B passing the
/// filters, in lexicographic order. Quadratic in B: the last coordinate is
/// recovered by integer cube root.
pub fn search_box(
    eq: &Equation,
    a: &BigInt,
    bound: i64,
    filters: &[CongruenceFilter],
) -> Result<Vec<[i64; 3]>> {
    if bound < 1 {
        return Err(Error::domain("search bound must be ≥ 1"));
    }
    if !eq.is_cubic() {
        return Err(Error::domain("search_box covers the cubic surfaces only"));
    }
    let a128 = a
        .to_i128()
        .ok_or_else(|| Error::domain("a is out of the supported search range"))?;
    let twisted = matches!(eq, Equation::Twisted);
    let b = bound as i128;
    let mut out: Vec<[i64; 3]> = Vec::new();
    for x in -b..=b {
        let x3 = x * x * x;
        for y in -b..=b {
            let rem = a128 - x3 - y * y * y;
            let w = if twisted {
                if rem % 2 != 0 {
                    continue;
                }
                rem / 2
            } else {
                rem
            };
            let z = int_cbrt(w);
            if z * z * z != w || z.abs() > b {
                continue;
            }
            let t = [x, y, z];
            if filters.iter().all(|f| f.passes(&t)) {
                out.push([x as i64, y as i64, z as i64]);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

const NVARS: usize = 5;
const VAR_NAMES: [&str; NVARS] = ["x", "y", "z", "a", "t"];

/// A polynomial in Z[x, y, z, a, t], kept in canonical sparse form: sorted
/// monomial exponents, no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPolynomial {
    terms: BTreeMap<[u8; NVARS], BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; NVARS], c);
        }
        IntPolynomial { terms }
    }

    /// The variable named `x`, `y`, `z`, `a`, or `t`.
    pub fn var(name: &str) -> Result<Self> {
        let i = VAR_NAMES
            .iter()
            .position(|&n| n == name)
            .ok_or_else(|| Error::domain(format!("unknown variable {name}")))?;
        let mut e = [0u8; NVARS];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, BigInt::one());
        Ok(IntPolynomial { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, e: [u8; NVARS], c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.insert(*e, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        IntPolynomial {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = IntPolynomial::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let mut e = [0u8; NVARS];
                for i in 0..NVARS {
                    e[i] = e1[i] + e2[i];
                }
                r.insert(e, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = IntPolynomial::constant(1);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return IntPolynomial::zero();
        }
        IntPolynomial {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn degree_in(&self, i: usize) -> u8 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn eval(&self, v: &[BigInt; NVARS]) -> BigInt {
        let mut s = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..NVARS {
                t *= v[i].pow(e[i] as u32);
            }
            s += t;
        }
        s
    }
}

impl std::fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            }
            let ac = c.abs();
            let has_vars = e.iter().any(|&k| k > 0);
            if !ac.is_one() || !has_vars {
                write!(f, "{ac}")?;
            }
            for i in 0..NVARS {
                match e[i] {
                    0 => {}
                    1 => write!(f, "{}", VAR_NAMES[i])?,
                    k => write!(f, "{}^{}", VAR_NAMES[i], k)?,
                }
            }
        }
        Ok(())
    }
}

/// Eliminates variable `i` from `poly` using the relation `modulus = 0`,
/// where the modulus is linear in variable `i` with constant leading
/// coefficient c: substitutes x_i ← −rest/c and clears denominators by c^deg.
fn reduce_by_linear(poly: &IntPolynomial, modulus: &IntPolynomial) -> Result<IntPolynomial> {
    if modulus.is_zero() {
        return Err(Error::domain("division by the zero polynomial"));
    }
    // find a variable in which the modulus is linear with constant coefficient
    let mut choice: Option<(usize, BigInt, IntPolynomial)> = None;
    'vars: for i in 0..NVARS {
        if modulus.degree_in(i) != 1 {
            continue;
        }
        let mut lead = BigInt::zero();
        let mut rest = IntPolynomial::zero();
        for (e, c) in &modulus.terms {
            if e[i] == 1 {
                if e.iter().enumerate().any(|(j, &k)| j != i && k > 0) {
                    continue 'vars; // coefficient of x_i is not constant
                }
                lead = c.clone();
            } else {
                rest.insert(*e, c.clone());
            }
        }
        choice = Some((i, lead, rest));
        break;
    }
    let Some((i, lead, rest)) = choice else {
        return Err(Error::domain(
            "modulus must be linear in some variable with a constant coefficient",
        ));
    };
    let deg = poly.degree_in(i) as u32;
    let neg_rest = rest.neg();
    let mut r = IntPolynomial::zero();
    for (e, c) in &poly.terms {
        let k = e[i] as u32;
        let mut base = e.clone();
        base[i] = 0;
        let mut term = IntPolynomial { terms: [(base, c.clone())].into_iter().collect() };
        // multiply by (−rest)^k · lead^(deg−k): total weight lead^deg
        term = term.mul(&neg_rest.pow(k));
        term = term.scale(&lead.pow(deg - k));
        r = r.add(&term);
    }
    Ok(r)
}

/// True iff `lhs − rhs` is zero, exactly or modulo the given relation.
///
/// ```
/// use cubecheck::search::{verify_identity, IntPolynomial};
///
/// // (a+1)³ + (a−1)³ − 2a³ = 6a
/// let a = IntPolynomial::var("a").unwrap();
/// let one = IntPolynomial::constant(1);
/// let lhs = a.add(&one).pow(3).add(&a.sub(&one).pow(3)).sub(&a.pow(3).scale(&2.into()));
/// let rhs = a.scale(&6.into());
/// assert!(verify_identity(&lhs, &rhs, None).unwrap());
/// ```
pub fn verify_identity(
    lhs: &IntPolynomial,
    rhs: &IntPolynomial,
    modulus: Option<&IntPolynomial>,
) -> Result<bool> {
    let diff = lhs.sub(rhs);
    match modulus {
        None => Ok(diff.is_zero()),
        Some(m) => Ok(reduce_by_linear(&diff, m)?.is_zero()),
    }
}

/// A named identity with an optional defining relation.
pub struct Identity {
    pub name: &'static str,
    pub statement: &'static str,
    pub lhs: IntPolynomial,
    pub rhs: IntPolynomial,
    pub modulus: Option<IntPolynomial>,
}

/// The three identities the toolkit relies on.
pub fn builtin_identities() -> Vec<Identity> {
    let x = IntPolynomial::var("x").unwrap();
    let y = IntPolynomial::var("y").unwrap();
    let z = IntPolynomial::var("z").unwrap();
    let a = IntPolynomial::var("a").unwrap();
    let one = IntPolynomial::constant(1);
    let s = x.add(&y).add(&z.scale(&2.into()));
    let quartic = x.pow(3).add(&y.pow(3)).add(&z.pow(3).scale(&2.into())).scale(&4.into());
    let main_term = x.add(&y).mul(&x.sub(&y).pow(2)).scale(&3.into());
    let mut out = Vec::new();
    out.push(Identity {
        name: "parametric_six",
        statement: "(a+1)^3 + (a-1)^3 - 2a^3 = 6a",
        lhs: a
            .add(&one)
            .pow(3)
            .add(&a.sub(&one).pow(3))
            .sub(&a.pow(3).scale(&2.into())),
        rhs: a.scale(&6.into()),
        modulus: None,
    });
    out.push(Identity {
        name: "twisted_decomposition",
        statement: "4(x^3+y^3+2z^3) = 3(x+y)(x-y)^2 + (x+y+2z)((x+y+2z)^2 - 6(x+y)z)",
        lhs: quartic.clone(),
        rhs: main_term
            .clone()
            .add(&s.mul(&s.pow(2).sub(&x.add(&y).mul(&z).scale(&6.into())))),
        modulus: None,
    });
    out.push(Identity {
        name: "twisted_mod_s",
        statement: "4(x^3+y^3+2z^3) = 3(x+y)(x-y)^2  (mod x+y+2z)",
        lhs: quartic,
        rhs: main_term,
        modulus: Some(s),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn box_three_cubes_small() {
        let sols = search_box(&Equation::ThreeCubes, &BigInt::from(3), 10, &[]).unwrap();
        let got: BTreeSet<[i64; 3]> = sols.into_iter().collect();
        let mut want = BTreeSet::new();
        for perm in [
            [1, 1, 1],
            [4, 4, -5],
            [4, -5, 4],
            [-5, 4, 4],
        ] {
            want.insert(perm);
        }
        assert_eq!(got, want);
    }

    #[test]
    fn box_matches_exhaustive_oracle() {
        // brute-force all |x|,|y|,|z| ≤ 8 for a handful of a
        for (eq, a) in [
            (Equation::ThreeCubes, 3i64),
            (Equation::ThreeCubes, 2),
            (Equation::Twisted, 4),
            (Equation::Twisted, 1),
        ] {
            let fast: BTreeSet<[i64; 3]> = search_box(&eq, &BigInt::from(a), 8, &[])
                .unwrap()
                .into_iter()
                .collect();
            let mut slow = BTreeSet::new();
            for x in -8i64..=8 {
                for y in -8i64..=8 {
                    for z in -8i64..=8 {
                        let c = if matches!(eq, Equation::Twisted) { 2 } else { 1 };
                        if x.pow(3) + y.pow(3) + c * z.pow(3) == a {
                            slow.insert([x, y, z]);
                        }
                    }
                }
            }
            assert_eq!(fast, slow, "{eq} = {a}");
        }
    }

    #[test]
    fn box_twisted_filtered_empty() {
        let filters = vec![
            CongruenceFilter::new([1, 1, 0], 2, 8).unwrap(),
            CongruenceFilter::new([0, 0, 1], 2, 4).unwrap(),
        ];
        let sols = search_box(&Equation::Twisted, &BigInt::from(2), 500, &filters).unwrap();
        assert!(sols.is_empty());
    }

    #[test]
    fn box_mod9_empty() {
        let sols = search_box(&Equation::ThreeCubes, &BigInt::from(4), 1000, &[]).unwrap();
        assert!(sols.is_empty());
    }

    #[test]
    fn filter_validation() {
        assert!(CongruenceFilter::new([1, 0, 0], 0, 1).is_err());
        assert!(CongruenceFilter::new([1, 0, 0], 0, 2).is_ok());
    }

    #[test]
    fn builtin_identities_verify() {
        for id in builtin_identities() {
            assert!(
                verify_identity(&id.lhs, &id.rhs, id.modulus.as_ref()).unwrap(),
                "{}",
                id.name
            );
        }
    }

    #[test]
    fn negative_control() {
        let x = IntPolynomial::var("x").unwrap();
        let y = IntPolynomial::var("y").unwrap();
        let lhs = x.add(&y).pow(2);
        let rhs = x.pow(2).add(&y.pow(2));
        assert!(!verify_identity(&lhs, &rhs, None).unwrap());
        assert!(verify_identity(&lhs, &lhs, None).unwrap());
    }

    #[test]
    fn reduction_errors() {
        let x = IntPolynomial::var("x").unwrap();
        assert!(verify_identity(&x, &x, Some(&IntPolynomial::zero())).is_err());
        // x² is not linear in anything
        assert!(verify_identity(&x, &x, Some(&x.pow(2))).is_err());
    }

    #[test]
    fn display_roundtrips_shape() {
        let x = IntPolynomial::var("x").unwrap();
        let y = IntPolynomial::var("y").unwrap();
        let p = x.pow(2).sub(&y.scale(&3.into())).add(&IntPolynomial::constant(1));
        assert_eq!(p.to_string(), "x^2 - 3y + 1");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
    }

    proptest! {
        #[test]
        fn solutions_satisfy_equation(a in -50i64..50) {
            prop_assume!(a != 0);
            for eq in [Equation::ThreeCubes, Equation::Twisted] {
                for s in search_box(&eq, &BigInt::from(a), 12, &[]).unwrap() {
                    let v = [BigInt::from(s[0]), BigInt::from(s[1]), BigInt::from(s[2])];
                    prop_assert_eq!(eq.lhs([&v[0], &v[1], &v[2]]), BigInt::from(a));
                }
            }
        }

        #[test]
        fn three_cubes_results_permutation_closed(a in -30i64..30) {
            prop_assume!(a != 0);
            let got: BTreeSet<[i64; 3]> =
                search_box(&Equation::ThreeCubes, &BigInt::from(a), 10, &[])
                    .unwrap().into_iter().collect();
            for s in &got {
                prop_assert!(got.contains(&[s[1], s[0], s[2]]));
                prop_assert!(got.contains(&[s[2], s[1], s[0]]));
            }
        }

        #[test]
        fn identity_check_matches_sampling(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            for id in builtin_identities() {
                if id.modulus.is_some() {
                    continue; // constrained identity: sampling needs on-locus points
                }
                let v: [BigInt; 5] = std::array::from_fn(|_| BigInt::from(rng.gen_range(-50i64..50)));
                prop_assert_eq!(id.lhs.eval(&v), id.rhs.eval(&v), "{}", id.name);
            }
        }
    }
}
