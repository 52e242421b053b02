use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Engine(#[from] painlin::Error),
    #[error("residual {residual:.3e} exceeds the bound {bound:.3e}; no output written (use --no-check to override)")]
    ResidualExceeded { residual: f64, bound: f64 },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 1 for a breakdown of a valid problem, 2 for invalid input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Engine(e) if e.is_breakdown() => 1,
            CliError::ResidualExceeded { .. } => 1,
            _ => 2,
        }
    }
}
