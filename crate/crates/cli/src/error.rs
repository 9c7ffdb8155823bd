use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] workbench_core::Error),
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON in `{path}`: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
    /// The report was produced but records a failed precondition.
    #[error("{0}")]
    Rejected(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use workbench_core::Error as E;
        match self {
            CliError::Io { .. } | CliError::Json { .. } | CliError::Usage(_) => 2,
            CliError::Rejected(_) => 4,
            CliError::Core(e) => match e {
                E::Arith(_) | E::Schema(_) | E::InvalidArgument(_) => 2,
                E::UnsupportedGrading(_) => 3,
                E::Axioms(_) | E::NotCocycle(_) | E::OutsideWindow(_) | E::Unsupported(_) => 4,
                E::Inconsistent(_) => 1,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
