//! Exact workbench for Lie–Rinehart algebras over (Laurent) polynomial rings.
//!
//! * [`arith`]: rationals, Laurent polynomials, rational linear algebra
//! * [`lralg`]: presentations `α: L → Der(A)` and axiom checks
//! * [`cochain`]: the cochain complex, windowed cohomology, `exp`, `Char(L)`
//! * [`env`]: PBW rewriting for twisted enveloping algebras and overlap checks
//! * [`conn`]: connections, curvature, `c₁`, Chern character, tensor and exterior powers
//! * [`vki`]: truncated modules of the twisted enveloping algebra with their connections
//! * [`kledger`]: formal ledgers of connection classes

pub mod arith;
pub mod cochain;
pub mod conn;
pub mod env;
pub mod error;
pub mod kledger;
pub mod lralg;
pub mod vki;

pub use arith::{ExponentVector, LaurentPoly, Rational, Ring, Variable};
pub use cochain::{Cochain, CohomologyClass, EvenClassPolynomial, WindowCohomology};
pub use conn::{Connection, CurvatureForm, PolyMatrix};
pub use env::{Mode, PbwMonomial, RewriteSystem, Token, UElement};
pub use error::{Error, Result};
pub use kledger::{KAtom, KClass};
pub use lralg::{LElement, LieRinehart, Presentation, StandardKind};
pub use vki::VkiModule;
