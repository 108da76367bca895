use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {lhs:?} vs {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    #[error("tape does not match network: {0}")]
    TapeMismatch(String),

    #[error("loss evaluated to a non-finite value ({0})")]
    NonFiniteLoss(f64),

    #[error("non-finite gradient{}", context_suffix(.context))]
    NonFiniteGradient { context: Option<String> },

    #[error("a static alpha schedule has no gradient")]
    StaticScheduleHasNoGradient,

    #[error("batch size {batch} is not divisible by {discriminators} discriminators")]
    IndivisibleBatch { batch: usize, discriminators: usize },

    #[error("empty batch")]
    EmptyBatch,

    #[error("too few samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("covariance is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NonPsdCovariance { min_eigenvalue: f64 },

    #[error("empty sequence")]
    EmptySequence,

    #[error("invalid config key `{key}`: {reason}")]
    ConfigInvalid { key: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corrupt checkpoint: {0}")]
    CheckpointCorrupt(String),

    #[error("shape mismatch for tensor `{tensor}`: checkpoint has {found}, config expects {expected}")]
    ShapeMismatch {
        tensor: String,
        expected: String,
        found: String,
    },
}

fn context_suffix(context: &Option<String>) -> String {
    match context {
        Some(c) => format!(" ({c})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::ConfigInvalid {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Attaches context to a `NonFiniteGradient`; other variants pass through.
    pub fn with_gradient_context(self, ctx: impl Into<String>) -> Self {
        match self {
            Error::NonFiniteGradient { context: None } => Error::NonFiniteGradient {
                context: Some(ctx.into()),
            },
            Error::NonFiniteGradient { context: Some(inner) } => Error::NonFiniteGradient {
                context: Some(format!("{}: {inner}", ctx.into())),
            },
            other => other,
        }
    }
}
