use metrikos::expr::ParseError;
use thiserror::Error;

/// Anything that makes a job unrunnable. Always exit code 2.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{origin}: {message}")]
    Schema { origin: String, message: String },
    #[error("{field}: {source}")]
    Dsl {
        field: String,
        #[source]
        source: ParseError,
    },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: metrikos::Error,
    },
    #[error("{0}")]
    Config(String),
}

impl InputError {
    pub fn core(context: impl Into<String>, source: metrikos::Error) -> Self {
        InputError::Core {
            context: context.into(),
            source,
        }
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
