//! Families of subsets of `[n]` under diameter and union constraints.
//!
//! Members are `u64` bitmasks with element `i` in bit `i - 1`, so `n <= 64`.

pub mod bounds;
pub mod classify;
pub mod compression;
pub mod constructions;
pub mod error;
pub mod family;
pub mod io;
pub mod search;
pub mod suite;

pub use num_bigint::BigInt;

pub use bounds::{bound_ladder, evaluate, BoundId, BoundValueOf, ExactInt, Ladder};
pub use classify::{
    canonical_form, classify_extremal, classify_extremal_in, fits_ball, fits_template, ClassLabel, IsometryWitness, LevelReport, Mode,
};
pub use compression::{compress_to_complex, down_shift, normalize_translation, CompressionTrace};
pub use constructions::{lex_family, Template, TemplateArgs, TemplateKind};
pub use error::{Error, Result};
pub use family::{GroundSize, Presence, Restriction, SetFamily, SetMask};

/// Bound values with arbitrary-precision integers.
pub type BoundValue = BoundValueOf<BigInt>;
/// Ladders with arbitrary-precision integers.
pub type BoundLadder = Ladder<BigInt>;
