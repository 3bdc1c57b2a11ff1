use std::fmt;
use std::sync::Arc;

use super::factory::ModelFactory;
use super::trace::EventKind;
use super::{Demo, Run, SimError};
use crate::formulas::Vocabulary;
use crate::pointclasses::{split_point_family, DecreasingFamily, Track, UPPoint};
use crate::theories::{CanonicalModel, Card, MonadicModel};

/// The tower demo's configuration: the decreasing family whose first two
/// levels drive the construction, and a stage budget.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub family: DecreasingFamily,
    pub levels: usize,
    pub stage_budget: usize,
}

impl SimConfig {
    /// The shipped two-level tower on the split-point family.
    pub fn tower2(stage_budget: usize) -> Self {
        SimConfig { family: split_point_family(), levels: 2, stage_budget }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.levels != 2 || self.family.name != "split_point" {
            return Err(SimError::MalformedConfig(format!(
                "the tower construction runs the two-level split_point family, got {} levels of `{}`",
                self.levels, self.family.name
            )));
        }
        if self.stage_budget == 0 {
            return Err(SimError::ZeroBudget);
        }
        Ok(())
    }
}

/// The least level the input fails, as estimated at a stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum K0 {
    FailsP1,
    FailsP2,
    NoFailure,
}

impl fmt::Display for K0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            K0::FailsP1 => "k0=1 (fails P1)",
            K0::FailsP2 => "k0=2 (fails P2)",
            K0::NoFailure => "k0=3 (in P1, in P2)",
        })
    }
}

pub fn tower_vocabulary() -> Vocabulary {
    Vocabulary::parse("P/1,R/2").expect("valid vocabulary")
}

/// The `k₀` estimate at stage `s`: 1 once the even track has shown a 1;
/// otherwise 3 at stages whose odd-track bit is 1 and 2 elsewhere.
pub fn k0_estimate(p: &UPPoint, s: usize) -> K0 {
    let even = |t: usize| p.bit(Track::Even.position(t));
    if (0..=s).any(even) {
        K0::FailsP1
    } else if p.bit(Track::Odd.position(s)) {
        K0::NoFailure
    } else {
        K0::FailsP2
    }
}

/// Runs the two-level tower on `p` over `{P/1, R/2}`.
///
/// Each stage adds a matched pair and a `P`-candidate. While the even track
/// is all zero, the pairs alternate between `¬P` and `P`; after the first
/// even-track 1 they are `P` for good. Reading a 1 on the odd track gives
/// every pending candidate a fresh `P` partner.
pub fn run_tower(cfg: &SimConfig, p: &UPPoint) -> Result<Run, SimError> {
    cfg.validate()?;
    let stages = cfg.stage_budget;
    let (p_sym, r_sym) = (0, 1);
    let mut f = ModelFactory::new(&tower_vocabulary(), &K0::NoFailure.to_string());
    let mut failed_p1 = false;
    let mut not_p = 0usize;
    let mut pending: Vec<usize> = Vec::new();
    for s in 0..stages {
        let k0 = k0_estimate(p, s);
        if !failed_p1 && k0 == K0::FailsP1 {
            let model: Arc<dyn CanonicalModel> =
                Arc::new(MonadicModel::new(Card::Inf, Card::Fin(not_p)).expect("infinite"));
            f.switch_to(&model.label(), Some(&model))?;
            failed_p1 = true;
        }
        let negative = !failed_p1 && s % 2 == 0;
        let (u, v) = (f.add_element(), f.add_element());
        f.add_symmetric(r_sym, u, v);
        if negative {
            not_p += 2;
        } else {
            f.add_fact(p_sym, &[u]);
            f.add_fact(p_sym, &[v]);
        }
        let w = f.add_element();
        f.add_fact(p_sym, &[w]);
        pending.push(w);
        if p.bit(Track::Odd.position(s)) {
            let repaired = std::mem::take(&mut pending);
            for &c in &repaired {
                let partner = f.add_element();
                f.add_fact(p_sym, &[partner]);
                f.add_symmetric(r_sym, c, partner);
            }
            f.note(EventKind::InjuryRepair { repaired });
        }
        f.note(EventKind::Estimate { value: k0.to_string() });
        f.commit_stage();
    }
    let (presentation, trace) = f.finish();
    Ok(Run { demo: Demo::Tower2, point: p.clone(), stages, presentation, trace })
}
