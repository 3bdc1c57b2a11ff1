use std::sync::Arc;

use rayon::prelude::*;

use super::machine::{run, SharedTransducer, TransducerError};
use crate::pointclasses::{member_up, BorelCode, CodeError, UPPoint};

/// Decides a property of the structure a transducer writes on an
/// ultimately periodic input.
pub trait TargetOracle: Send + Sync {
    fn describe(&self) -> String;

    /// The verdict on the output for input `p`. `output(n)` returns the
    /// first `n` output bits; the oracle picks how many it needs.
    fn verdict(
        &self,
        p: &UPPoint,
        output: &mut dyn FnMut(usize) -> Result<Vec<bool>, TransducerError>,
    ) -> Result<bool, TransducerError>;
}

/// A transducer with the claim that it reduces `source` to the property
/// decided by `target`.
#[derive(Clone)]
pub struct ReductionCertificate {
    pub transducer: SharedTransducer,
    pub source: BorelCode,
    pub target: Arc<dyn TargetOracle>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub point: UPPoint,
    pub source: bool,
    pub target: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CertificateError {
    #[error(transparent)]
    Source(#[from] CodeError),
    #[error(transparent)]
    Run(#[from] TransducerError),
}

impl ReductionCertificate {
    /// Source membership and target verdict on one point.
    pub fn evaluate(&self, p: &UPPoint) -> Result<(bool, bool), CertificateError> {
        let source = member_up(&self.source, p)?;
        let t = self.transducer.as_ref();
        let mut output = |n: usize| run(t, p.bits(), n, t.modulus(n));
        let target = self.target.verdict(p, &mut output)?;
        Ok((source, target))
    }

    /// All points where source membership and target verdict differ.
    pub fn check(&self, points: &[UPPoint]) -> Result<Vec<Mismatch>, CertificateError> {
        let results: Vec<Result<Option<Mismatch>, CertificateError>> = points
            .par_iter()
            .map(|p| {
                let (source, target) = self.evaluate(p)?;
                Ok((source != target).then(|| Mismatch { point: p.clone(), source, target }))
            })
            .collect();
        let mut out = Vec::new();
        for r in results {
            if let Some(m) = r? {
                out.push(m);
            }
        }
        Ok(out)
    }
}
