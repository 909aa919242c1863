pub mod bessel;
pub mod cli;
pub mod engine;
pub mod error;
pub mod hyp2f1;
pub mod params;
pub mod polylog;
pub mod report;
pub mod series;
pub mod special;
pub mod sum_j;
pub mod sum_k;
pub mod verify;

pub use error::{Error, Result};
pub use params::*;
