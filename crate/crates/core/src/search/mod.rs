//! Exhaustive verification at desk scale.

mod clique;
mod lemmas;

pub use clique::{
    enumerate_maximum_families, level_exclusions, Enumeration, max_diameter_family, SearchConfig, SearchOutcome, Target,
    SEARCH_MAX_N,
};
pub use lemmas::{
    cross_intersecting_max, lemma_bound, verify_lemma, verify_ln, CheckResult, LemmaId, LemmaKind, LemmaReport,
    LEMMA_ENUM_BITS, LN_TRIALS,
};
