use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("config error{}: key `{key}`: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        key: String,
        message: String,
    },

    #[error(transparent)]
    Core(#[from] conewave_core::Error),

    #[error("table `{table}`: {message}")]
    Schema { table: String, message: String },
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, e: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Io { .. } => "io",
            Self::Config { .. } => "config",
            Self::Core(_) => "computation",
            Self::Schema { .. } => "schema",
        }
    }

    /// Machine-readable error record printed on failure.
    pub fn to_json(&self) -> Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        if let Self::Config { line, key, .. } = self {
            body["key"] = json!(key);
            body["line"] = json!(line);
        }
        json!({ "error": body })
    }
}
