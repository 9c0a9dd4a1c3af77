use thiserror::Error;

/// Errors raised by the engine.
///
/// Element references are reported by name so messages stay meaningful after
/// restriction to sub-posets (which re-index but keep names).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("relation is not a partial order: `{0}` and `{1}` lie on a cycle")]
    CycleDetected(String, String),

    #[error("map is not order-preserving: `{lo}` <= `{hi}` but `{lo_image}` is not <= `{hi_image}`")]
    NotMonotone {
        lo: String,
        hi: String,
        lo_image: String,
        hi_image: String,
    },

    #[error("map assigns {got} values but the domain has {expected} elements")]
    ArityMismatch { expected: usize, got: usize },

    #[error("map leaves `{0}` unassigned")]
    Unassigned(String),

    #[error("hom-poset guard exceeded: {bound} candidate maps against a guard of {guard}")]
    GuardExceeded { bound: String, guard: usize },

    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),

    #[error("operation requires a nonempty poset")]
    EmptyPoset,

    #[error("operation requires a map with nonempty domain")]
    EmptyDomain,

    #[error("map is not below the identity at `{0}`")]
    NotDescending(String),

    #[error("map is not an endomap")]
    NotEndomap,

    #[error("maps do not share a codomain")]
    CodomainMismatch,

    #[error("maps do not share a domain")]
    DomainMismatch,

    #[error("map is not over the base at `{0}`")]
    NotOverBase(String),

    #[error("element set is not a connected component of the base")]
    NotAComponent,

    #[error("not a Grothendieck fibration: {0}")]
    NotGrothendieckFibration(String),

    #[error("not a Grothendieck opfibration: {0}")]
    NotGrothendieckOpfibration(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("functoriality violated: {0}")]
    FunctorialityViolated(String),

    #[error("reconstruction mismatch: {0}")]
    ReconstructionMismatch(String),

    #[error("unknown gallery id `{0}`")]
    UnknownGalleryId(String),

    #[error("parse error{}: {message}", location(.line, .field))]
    Parse {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },
}

fn location(line: &Option<usize>, field: &Option<String>) -> String {
    match (line, field) {
        (Some(l), Some(f)) => format!(" at line {l}, field `{f}`"),
        (Some(l), None) => format!(" at line {l}"),
        (None, Some(f)) => format!(" in field `{f}`"),
        (None, None) => String::new(),
    }
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            line: None,
            field: Some(field.into()),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
