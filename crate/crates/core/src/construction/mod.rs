//! Bounded goodness, the lemma searches, and approximations.

pub mod approximation;
pub mod goodness;
pub mod lemmas;

pub use approximation::{
    build_approximation, extend_approximation, verify_approximation, Approximation,
    ApproximationReport, Stage, StageKind, StepRecord,
};
pub use goodness::{
    find_extension, is_good_bounded, is_good_bounded_with, GoodnessConfig, GoodnessProfile,
    GoodnessVerdict, Window,
};
pub use lemmas::{
    check_lemma_result, lemma22_search, lemma22_trace, lemma23_search, lemma23_trace, LemmaCheck,
    LemmaResult, SearchConfig, SearchTrace,
};
