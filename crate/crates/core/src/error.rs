use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProcaError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid initial data: {0}")]
    InitialData(String),

    #[error("solver configuration: {0}")]
    Config(String),

    #[error("singular implicit system at wavevector ({:.6}, {:.6}, {:.6})", .wavevector[0], .wavevector[1], .wavevector[2])]
    SingularMode { wavevector: [f64; 3] },

    #[error("iterative solver did not converge in {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
}

pub type Result<T, E = ProcaError> = std::result::Result<T, E>;
