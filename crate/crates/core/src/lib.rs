//! Link invariants for plat closures of pure braids.
//!
//! The pipeline runs from braid words through link diagrams to the two
//! invariant families this crate is about:
//!
//! * Milnor mu-bar invariants, read off the Magnus expansion of longitude
//!   words produced by iterated Chen-Milnor rewriting of a Wirtinger
//!   presentation;
//! * low-order finite type invariants (linking matrix and Conway
//!   coefficients), evaluated exactly by skein recursion.
//!
//! On top of both sits the `equivalence` module: Gusarov-style certificate
//! verification and mechanical cross-checks of the equivalence between
//! "vanishing mu-bar up to a length" and "finite type invariants agree with
//! the unlink up to an order".
//!
//! All arithmetic is exact. Series and polynomial coefficients are generic
//! over [`Scalar`]; the concrete aliases below fix them at `BigInt`, which is
//! what every pipeline entry point uses.

pub mod braid;
pub mod config;
pub mod corpus;
pub mod diagram;
pub mod equivalence;
pub mod freegroup;
pub mod invariants;
pub mod linkgroup;

mod scalar;

pub use config::Config;
pub use scalar::Scalar;

/// Exact integer used throughout the concrete pipeline.
pub type Int = num_bigint::BigInt;

/// Magnus series with exact integer coefficients.
pub type IntSeries = freegroup::MagnusSeries<Int>;

/// Conway polynomial with exact integer coefficients.
pub type IntConway = invariants::ConwayPolynomial<Int>;
