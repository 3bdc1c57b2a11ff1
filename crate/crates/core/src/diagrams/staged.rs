use super::stream::StructureStream;
use crate::formulas::{Compiled, Formula, Level, PrenexForm};
use crate::verdict::Verdict;

/// Per-stage truth values of a sentence on a growing structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagedVerdict {
    /// Entry `s` is the value on the structure after `s` stages; stage 0 is
    /// the empty structure and always `Unknown`.
    pub per_stage: Vec<Verdict>,
    /// Universe size after each stage.
    pub sizes: Vec<usize>,
    pub level: Level,
    /// Decision of the supplied limit oracle, if any.
    pub limit: Option<bool>,
}

impl StagedVerdict {
    pub fn first(&self, v: Verdict) -> Option<usize> {
        self.per_stage.iter().position(|&x| x == v)
    }

    /// For `E(1)` sentences a finite true value persists, and for `A(1)`
    /// sentences a finite false value persists. Higher levels carry no such
    /// guarantee and always pass.
    pub fn respects_level(&self) -> bool {
        let sticky = if Level::e(1).contains(self.level) {
            Some(Verdict::True)
        } else if Level::a(1).contains(self.level) {
            Some(Verdict::False)
        } else {
            None
        };
        match (sticky, self.first(sticky.unwrap_or(Verdict::Unknown))) {
            (Some(v), Some(i)) => self.per_stage[i..].iter().all(|&x| x == v),
            _ => true,
        }
    }
}

/// Evaluates `f` on the stage structures of `st` for stages `0..=stages`.
///
/// Finite verdicts say nothing about the limit for sentences with two or more
/// alternations; the `limit` field is filled only from `oracle`.
pub fn eval_staged(
    f: &PrenexForm,
    st: &mut StructureStream,
    stages: usize,
    oracle: Option<&dyn Fn(&Formula) -> bool>,
) -> StagedVerdict {
    let formula = f.to_formula();
    let compiled = Compiled::new(&formula, st.vocabulary()).expect("sentence over the stream's vocabulary");
    st.run_to(stages);
    let pres = st.presentation();
    let mut per_stage = Vec::with_capacity(pres.stages() + 1);
    let mut sizes = Vec::with_capacity(pres.stages() + 1);
    for s in 0..=pres.stages().min(stages) {
        let n = pres.elements_after(s);
        sizes.push(n);
        per_stage.push(if n == 0 { Verdict::Unknown } else { Verdict::from_bool(compiled.holds(&pres.structure(n))) });
    }
    StagedVerdict { per_stage, sizes, level: f.level(), limit: oracle.map(|o| o(&formula)) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::stream::{FiniteSource, StructureStream};
    use crate::formulas::{parse_formula, prenex, FiniteStructure, Vocabulary};

    #[test]
    fn existential_on_all_p() {
        let v = Vocabulary::parse("P/1").unwrap();
        let s = FiniteStructure::parse(&v, "size=4; P 0; P 1; P 2; P 3").unwrap();
        let mut st = StructureStream::new(FiniteSource::new(s));
        let f = prenex(&parse_formula("(exists x0 (P x0))", &v).unwrap());
        let sv = eval_staged(&f, &mut st, 4, None);
        assert_eq!(sv.per_stage[0], Verdict::Unknown);
        assert!(sv.per_stage[1..].iter().all(|&x| x == Verdict::True));
        assert!(sv.respects_level());
        assert_eq!(sv.limit, None);
    }
}
