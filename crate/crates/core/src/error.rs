//! Error type shared by all vision modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VisionError {
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point behind camera (z = {z})")]
    BehindCamera { z: f64 },

    #[error("undistortion did not converge after {iterations} iterations (residual {residual} px)")]
    NonConvergent { iterations: usize, residual: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, VisionError>;
