use thiserror::Error;

/// Failures before a report could be produced.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Spec { path: String, line: usize, message: String },

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("argument `{argument}`: {source}")]
    Argument {
        argument: String,
        #[source]
        source: contactkit::Error,
    },

    #[error("argument `{argument}`: {message}")]
    BadArgument { argument: String, message: String },

    #[error(transparent)]
    Library(#[from] contactkit::Error),
}

impl CliError {
    /// 1 for failures discovered while computing, 2 for unusable input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Library(contactkit::Error::Inconsistent { .. } | contactkit::Error::NonFinite { .. }) => 1,
            _ => 2,
        }
    }
}
