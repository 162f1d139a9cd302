//! Exact arithmetic in number fields given by a monic integral polynomial.

pub mod element;
pub mod field;
pub mod local;
pub mod prime;
pub mod qpoly;
pub mod residue;
pub mod roots;

pub use element::{norm_and_trace, FieldElement};
pub use field::{make_field, make_field_i64, rationals, Field, FieldExt, IrreducibilityCertificate, NumberField};
pub use local::{is_local_square, LocalSquare};
pub use prime::{factor_rational_prime, factor_rational_prime_u64, PrimeIdeal, Valuation};
pub use residue::{ResidueElement, ResidueField};
pub use roots::{roots_in_field, sqrt_in_field, NotFoundReason, RootSearch, SqrtOutcome, DEFAULT_HEIGHT_BOUND};
