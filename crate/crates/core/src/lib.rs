//! Certified construction of sparse integer sets whose twisted harmonic
//! series hits a prescribed complex target.
//!
//! Given a real t ≠ 0 and a complex λ, [`construct::construct`] produces an
//! explicit set S ⊆ ℤ^≥2 of disjoint blocks of consecutive integers with
//! Σ_{n∈S} 1/n finite and Σ_{n∈S} n^{-1-it} within a certified distance of
//! λ. With λ = −1 the emitted set drives 1 + Σ n^{-1-it} to zero — a
//! counterexample to the Erdős–Ingham non-vanishing question (Erdős
//! problem 967) at that t.
//!
//! The companion [`scanner`] evaluates g(t) = 1 + Σ_{n∈S} n^{-1-it} for
//! finite sets and certifies t-intervals zero-free by a Lipschitz argument;
//! whether a zero exists for any *finite* set (notably {2, 3, 5}) is open.
//!
//! Every computed sum carries a rigorous absolute error bound
//! ([`Certified`]), so all shipped inequalities are certified rather than
//! eyeballed: |λ − Σ| ≤ residual + err, per-block budget bounds, and the
//! scanner's zero-free margins.

mod dd;

pub mod certified;
pub mod construct;
pub mod powersum;
pub mod scanner;
pub mod setrep;

pub use certified::{Certified, CertifiedReal, CertifiedSum};
pub use num_bigint::BigUint;
pub use num_complex::Complex64;
pub use powersum::BigStart;
