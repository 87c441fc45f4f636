use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or out-of-range configuration; `key` is the dotted path.
    #[error("invalid configuration at `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{0}")]
    Model(#[from] endfire::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Input { path: PathBuf, reason: String },

    /// The reproduction ran but some rows fell outside tolerance.
    #[error("{failed} of {total} comparison rows outside tolerance")]
    Tolerance { failed: usize, total: usize },
}

impl CliError {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for validation problems, 3 for infeasible designs and failed
    /// initialization, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        use endfire::Error as E;
        match self {
            CliError::Config { .. } | CliError::Input { .. } => 2,
            CliError::Model(e) => match e {
                E::InvalidParameter { .. } | E::Domain(_) | E::Argument(_) | E::DegenerateReference(_) => 2,
                E::Constraint(_) | E::Initialization { .. } | E::Numerical(_) => 3,
            },
            CliError::Io { .. } | CliError::Tolerance { .. } => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
