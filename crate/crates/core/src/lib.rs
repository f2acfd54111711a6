//! Catalan numbers modulo a prime via finite automata.
//!
//! The automaton for `C_n mod p` is built from first principles: states are
//! bivariate polynomials over F_p, and each digit of `n` (least significant
//! first) moves a state `s` to `Λ_{d,d}(s · Q^(p-1))`, where `Λ` is the
//! Cartier operator and `Q = x(y+1)^2 - 1`. The value of `C_n mod p` is the
//! constant term of the final state.
//!
//! - [`field`]: F_p arithmetic and binomials mod p.
//! - [`bipoly`]: sparse polynomials in `x, y` and the Cartier operator.
//! - [`automaton`]: closure, evaluation, closed-form transitions, export.
//! - [`oracle`]: brute-force references.
//! - [`analysis`]: residue censuses and congruence checks.
//! - [`verify`]: verification suites driven by the CLI.

pub mod analysis;
pub mod automaton;
pub mod bipoly;
pub mod cli;
pub mod error;
pub mod field;
pub mod oracle;
pub mod verify;

pub use automaton::{Automaton, CatalanEvaluator, ClosedFormAutomaton, DigitString, StateKind};
pub use bipoly::BiPoly;
pub use error::{Error, Result};
pub use field::{Fp, PrimeContext};
