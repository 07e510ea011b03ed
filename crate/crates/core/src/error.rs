use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Config(String),

    #[error("unknown {kind} id {id}")]
    Lookup { kind: &'static str, id: usize },

    #[error("{0}")]
    Contract(String),

    #[error("{0}")]
    Usage(String),

    #[error("non-finite value in {layer}: {detail}")]
    Numeric { layer: String, detail: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Checkpoint(String),

    #[error("{0}")]
    Invariant(String),

    #[error("{phase}: {source}")]
    Phase {
        phase: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn in_phase(phase: impl Into<String>, source: Error) -> Self {
        Error::Phase {
            phase: phase.into(),
            source: Box::new(source),
        }
    }

    /// Short machine-parsable category used by the command line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Lookup { .. } => "lookup",
            Error::Contract(_) => "contract",
            Error::Usage(_) => "usage",
            Error::Numeric { .. } => "numeric",
            Error::Parse { .. } => "parse",
            Error::Checkpoint(_) => "checkpoint",
            Error::Invariant(_) => "invariant",
            Error::Phase { source, .. } => source.category(),
            Error::Io(_) => "io",
        }
    }
}
