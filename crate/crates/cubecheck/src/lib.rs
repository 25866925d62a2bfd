//! Local-global analysis for the affine cubic surfaces
//! `x³ + y³ + z³ = a` and `x³ + y³ + 2z³ = a` over the integers.
//!
//! The toolkit decides local solvability at every place, evaluates the
//! explicit Brauer classes of these surfaces at local points, computes the
//! images of the local evaluation maps, and assembles machine-checkable
//! certificates that no integral Brauer–Manin obstruction exists for a
//! given right-hand side `a`.
//!
//! The layers, bottom to top:
//!
//! * [`arith`] — exact integers, rationals, factoring, quadratic residues.
//! * [`padic`] — p-adic numbers at finite precision, cube roots, Hensel
//!   lifting, local solvability of the surfaces.
//! * [`finitefield`] — `F_p` and `F_p²` arithmetic and cubic characters.
//! * [`curve`] — the plane cubics `x³+y³+z³=0` and `x³+y³+2z³=0` over
//!   finite fields: group law, Weierstrass models, isogenies, and the
//!   residue character γ.
//! * [`brauer`] — Hilbert symbols and local invariants of the quaternion
//!   and cubic Brauer classes; evaluation-map images.
//! * [`search`] — bounded integer point search and exact polynomial
//!   identity checking.
//! * [`obstruction`] — certificates, the Cassels congruence, and scripted
//!   reproductions of the worked examples.
//!
//! ```
//! use cubecheck::obstruction::{certify, Equation, Outcome, ProblemInstance};
//!
//! let cert = certify(&ProblemInstance::new(Equation::ThreeCubes, 13.into()));
//! assert!(matches!(cert.outcome, Outcome::RefusedMod9 { .. })); // 13 ≡ 4 (mod 9)
//! ```

pub mod arith;
pub mod brauer;
pub mod curve;
pub mod finitefield;
pub mod obstruction;
pub mod padic;
pub mod search;

/// Errors surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A residue search ran out of precision without reaching a decision.
    #[error("undecided at level {level}: {context}")]
    Undecided { level: u32, context: String },

    /// Two routes that must agree did not (e.g. independent perturbations).
    #[error("internal consistency error: {0}")]
    Inconsistent(String),

    /// Malformed user-facing input (CLI syntax and the like).
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

// The guide's code blocks run as doc-tests so the book cannot drift from
// the API.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/local-solvability.md")]
    mod local_solvability {}
    #[doc = include_str!("../../../book/src/brauer-classes.md")]
    mod brauer_classes {}
    #[doc = include_str!("../../../book/src/evaluation-images.md")]
    mod evaluation_images {}
    #[doc = include_str!("../../../book/src/search-and-identities.md")]
    mod search_and_identities {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/reproductions.md")]
    mod reproductions {}
}
