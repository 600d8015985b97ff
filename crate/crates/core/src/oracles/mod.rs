//! Brute-force and Monte Carlo checks of the bounds.

pub mod lemmas;
pub mod mi;
pub mod tails;

pub use lemmas::{
    run_suite, stirling_report, verify_lemma, Detail, LemmaId, LemmaReport, StirlingRow, SuiteReport, VerifyCaps,
};
pub use mi::{exact_mi, MIResult};
pub use tails::{documented_instances, tail_check, TailBound, TailCheck, TailInstance};
