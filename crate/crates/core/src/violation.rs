use thiserror::Error;

/// A guarantee the algorithm relies on failed at run time. On a valid
/// well-structured input this indicates a bug; the pipeline attaches the
/// offending instance before reporting it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{stage}: {detail}")]
pub struct Violation {
    pub stage: &'static str,
    pub detail: String,
}

impl Violation {
    pub fn new(stage: &'static str, detail: impl Into<String>) -> Self {
        Violation { stage, detail: detail.into() }
    }
}

pub(crate) fn ensure(cond: bool, stage: &'static str, detail: impl FnOnce() -> String) -> Result<(), Violation> {
    if cond {
        Ok(())
    } else {
        Err(Violation::new(stage, detail()))
    }
}
