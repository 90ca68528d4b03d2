use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller supplied an argument outside the operation's domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config syntax error at line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("config key `{key}`: {message}")]
    ConfigValue { key: String, message: String },

    #[error("unknown access policy `{0}`")]
    UnknownPolicy(String),

    #[error("state space exceeds the configured cap of {cap} states")]
    StateCap { cap: usize },

    #[error("malformed state space: {0}")]
    MalformedChain(String),

    #[error("steady-state system is singular: {0}")]
    Singular(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the user's configuration rather than the model.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::ConfigSyntax { .. } | Error::ConfigValue { .. } | Error::UnknownPolicy(_))
    }
}
