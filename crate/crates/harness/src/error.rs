use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: nsopo_core::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn core(context: impl Into<String>, source: nsopo_core::Error) -> Self {
        HarnessError::Core { context: context.into(), source }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.as_ref().display().to_string(), source }
    }

    /// Process exit code: 2 for numerical guard trips, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core { source, .. } if source.is_numeric_guard() => 2,
            _ => 1,
        }
    }
}

/// Attaches a context string to core results.
pub(crate) trait CoreContext<T> {
    fn ctx(self, context: &str) -> Result<T>;
}

impl<T> CoreContext<T> for nsopo_core::Result<T> {
    fn ctx(self, context: &str) -> Result<T> {
        self.map_err(|e| HarnessError::core(context, e))
    }
}
