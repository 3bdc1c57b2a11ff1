use std::fmt;

/// What happened at one stage of a construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    /// Diagram bits `start..start+bits.len()` became final.
    Commit { start: usize, bits: Vec<bool> },
    /// The construction changed the theory it is building toward.
    Switch { from: String, to: String },
    /// Pending candidates were given fresh partners.
    InjuryRepair { repaired: Vec<usize> },
    /// The current approximation: a theory id, or a `k₀` description.
    Estimate { value: String },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Commit { .. } => "commit",
            EventKind::Switch { .. } => "switch",
            EventKind::InjuryRepair { .. } => "injury-repair",
            EventKind::Estimate { .. } => "estimate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub stage: usize,
    pub kind: EventKind,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage={} kind={} detail=", self.stage, self.kind.name())?;
        match &self.kind {
            EventKind::Commit { start, bits } => {
                let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                write!(f, "{start}:{s}")
            }
            EventKind::Switch { from, to } => write!(f, "{from} -> {to}"),
            EventKind::InjuryRepair { repaired } => {
                let s: Vec<String> = repaired.iter().map(|e| e.to_string()).collect();
                write!(f, "{}", s.join(","))
            }
            EventKind::Estimate { value } => write!(f, "{value}"),
        }
    }
}

/// An append-only record of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InjuryTrace {
    pub events: Vec<TraceEvent>,
}

impl InjuryTrace {
    pub fn push(&mut self, stage: usize, kind: EventKind) {
        self.events.push(TraceEvent { stage, kind });
    }

    pub fn count(&self, name: &str) -> usize {
        self.events.iter().filter(|e| e.kind.name() == name).count()
    }

    /// Estimates in stage order.
    pub fn estimates(&self) -> Vec<&str> {
        self.events
            .iter()
            .filter_map(|e| match &e.kind {
                EventKind::Estimate { value } => Some(value.as_str()),
                _ => None,
            })
            .collect()
    }

    /// One line per event.
    pub fn to_text(&self) -> String {
        self.events.iter().map(|e| format!("{e}\n")).collect()
    }
}
