use thiserror::Error;

use crate::graph::GraphFamily;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ladder must have at least one layer")]
    EmptyLadder,

    #[error("Bessel argument {0} outside [0, 4]")]
    BesselDomain(f64),

    #[error("Bessel order {0} not supported (orders 0, 1, 2 only)")]
    BesselOrder(u32),

    #[error("invalid family {0:?}: use distinct letters from V, W, X, Y, Z")]
    ParseFamily(String),

    #[error("family {family}: {reason}")]
    UnsupportedFamily {
        family: GraphFamily,
        reason: &'static str,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("power iteration did not converge after {iterations} iterations (last L1 change {change:e})")]
    NoConvergence { iterations: usize, change: f64 },

    #[error("shard {shard} produced a non-finite frontier")]
    DegenerateShard { shard: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
