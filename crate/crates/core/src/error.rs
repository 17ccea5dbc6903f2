use thiserror::Error;

/// Errors raised by the cover algebra, the planner and the document layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("universe must contain at least one feature")]
    EmptyUniverse,
    #[error("duplicate feature label `{0}`")]
    DuplicateLabel(String),
    #[error("feature labels must be non-empty")]
    EmptyLabel,
    #[error("universe has {size} features; at most {max} are supported")]
    UniverseTooLarge { size: usize, max: usize },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("empty pre-image")]
    EmptyPreimage,
    #[error("features not covered: {}", .0.join(", "))]
    Uncovered(Vec<String>),
    #[error("covers are defined over different universes")]
    UniverseMismatch,
    #[error("{what}: size {size} exceeds the limit of {limit}")]
    LimitExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("cover `{0}` is not a partition")]
    NotPartition(String),
    #[error("order is not antisymmetric on the items: `{0}` and `{1}` precede each other")]
    NotAntisymmetric(String, String),
    #[error("order is not transitive on the items: `{0}` precedes `{1}` and `{1}` precedes `{2}`, but not `{0}` `{2}`")]
    NotTransitive(String, String, String),
    #[error("goal is not attainable under this cover")]
    Unsolvable,
    #[error("invalid planning problem: {0}")]
    InvalidProblem(String),
    #[error("invalid sensor map: {0}")]
    InvalidSensorMap(String),
    #[error("stipulation must name at least one sensitive feature")]
    EmptyStipulation,
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
