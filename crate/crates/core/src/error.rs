use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("ParseError: {0}")]
    Parse(String),

    #[error("ValidationError: {0}")]
    Validation(String),

    #[error("ConfigError: {0}")]
    Config(String),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("unknown overhead type `{0}`")]
    UnknownOverheadType(String),

    #[error("unknown attack step `{step}` for {kind} artifacts")]
    UnknownStep { step: String, kind: String },

    #[error("degenerate vanilla value of metric `{metric}` on artifact `{artifact}`")]
    DegenerateVanilla { metric: String, artifact: String },

    #[error("SplitError: {0}")]
    Split(String),

    #[error("solution space too large: estimated {estimated:.3e} solutions, limit {limit}")]
    SpaceTooLarge { estimated: f64, limit: u64 },

    #[error("no feasible solution to explore")]
    EmptySolutionSpace,

    #[error("search tree too large to render: {nodes} nodes, limit {limit}")]
    TooLarge { nodes: usize, limit: usize },

    #[error("ccs `{ccs}`: {source}")]
    InCcs {
        ccs: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn in_ccs(self, ccs: &str) -> Self {
        Error::InCcs {
            ccs: ccs.to_string(),
            source: Box::new(self),
        }
    }
}
