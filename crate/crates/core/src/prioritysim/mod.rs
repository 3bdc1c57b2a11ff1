//! Stagewise enactments of the switching and tower constructions: model
//! factories that commit diagram bits and repair toward compatible targets,
//! stagewise index approximations, and a verifier for finished runs.
//!
//! The nonrecursive ingredients of the general argument (Scott sets and
//! their enumerations, jumps) are replaced by the decidable theory families
//! of [`crate::theories`]. What remains is the control flow: which target a
//! construction builds toward at each stage, and what it may change.

mod corelemma;
mod factory;
mod tower;
mod trace;
mod verify;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::diagrams::{DiagramPrefix, Presentation};
use crate::pointclasses::UPPoint;

pub use corelemma::{approximate_index, run_corelemma, CoreLevel, CorePair, PAIR_CAP};
pub use factory::{reduct, ModelFactory};
pub use tower::{k0_estimate, run_tower, tower_vocabulary, SimConfig, K0};
pub use trace::{EventKind, InjuryTrace, TraceEvent};
pub use verify::{observe, predict, predict_k0, verify_run, window, Limit, VerifyReport, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("incompatible theories: {0}")]
    Incompatible(String),
    #[error("stage budget must be positive")]
    ZeroBudget,
    #[error("malformed configuration: {0}")]
    MalformedConfig(String),
}

/// The shipped demonstrations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Demo {
    Core1,
    Core2,
    Tower2,
}

impl Demo {
    /// Runs the demo on `p`.
    pub fn run(self, p: &UPPoint, stages: usize) -> Result<Run, SimError> {
        match self {
            Demo::Core1 => run_corelemma(CorePair::shipped(CoreLevel::One), p, stages),
            Demo::Core2 => run_corelemma(CorePair::shipped(CoreLevel::Two), p, stages),
            Demo::Tower2 => run_tower(&SimConfig::tower2(stages), p),
        }
    }
}

impl fmt::Display for Demo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Demo::Core1 => "core1",
            Demo::Core2 => "core2",
            Demo::Tower2 => "tower2",
        })
    }
}

impl FromStr for Demo {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "core1" => Ok(Demo::Core1),
            "core2" => Ok(Demo::Core2),
            "tower2" => Ok(Demo::Tower2),
            other => Err(SimError::MalformedConfig(format!("unknown demo `{other}`"))),
        }
    }
}

/// A finished run: the structure built, stage by stage, and its trace.
#[derive(Clone, Debug)]
pub struct Run {
    pub demo: Demo,
    pub point: UPPoint,
    pub stages: usize,
    pub presentation: Presentation,
    pub trace: InjuryTrace,
}

impl Run {
    /// The committed diagram.
    pub fn diagram(&self) -> DiagramPrefix {
        self.presentation.diagram(self.presentation.settled())
    }
}
