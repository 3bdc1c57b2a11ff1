//! Continuous maps on Cantor space as prefix-monotone stream machines,
//! with harnesses for the continuity and productivity claims they make.

mod certificate;
mod checks;
pub mod fixtures;
mod machine;

pub use certificate::{CertificateError, Mismatch, ReductionCertificate, TargetOracle};
pub use checks::{
    check_monotone, check_productive, determined_by, MonotoneConfig, MonotoneReport, MonotoneViolation,
    ProductiveReport,
};
pub(crate) use machine::stages_for;
pub use machine::{
    compose, identity, run, run_all, BitStaged, DiagramStaged, ElementRun, Identity, Machine, SharedTransducer,
    StagedRun, Transducer, TransducerError,
};
