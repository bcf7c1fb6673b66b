use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A request exceeds one of the configured resource caps.
    #[error("{resource} {requested} exceeds the cap {cap}")]
    Cap {
        resource: &'static str,
        requested: u64,
        cap: u64,
    },
    #[error("invalid argument: {0}")]
    Invalid(String),
    /// A quantity depends on a complexity value above the search cap.
    #[error("not evaluable: {0}")]
    NonEvaluable(String),
    /// A constructive search found nothing that qualifies.
    #[error("search failed: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_cap(resource: &'static str, requested: usize, cap: usize) -> Result<()> {
    if requested > cap {
        Err(Error::Cap {
            resource,
            requested: requested as u64,
            cap: cap as u64,
        })
    } else {
        Ok(())
    }
}
