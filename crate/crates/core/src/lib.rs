//! Asymptotic key-rate analysis for QKD advantage distillation built on
//! classical binary linear codes.
//!
//! The pipeline is: build a [`LinearCode`](codes::LinearCode), pick a
//! Bell-diagonal channel ([`BellDiagonal`](channel::BellDiagonal)), enumerate
//! the [`SyndromeDistribution`](distribution::SyndromeDistribution), then
//! evaluate one of the key-rate [`Formula`](rates::Formula)s on it.
//!
//! ```
//! use adkey::{channel::BellDiagonal, codes::LinearCode, distribution::syndrome_distribution, rates};
//!
//! let code = LinearCode::repetition(2).unwrap();
//! let dist = syndrome_distribution(&code, &BellDiagonal::six_state(0.1).unwrap()).unwrap();
//! let report = rates::rate_no_otp(&dist);
//! assert!((report.total_rate - 0.16984).abs() < 1e-4);
//! ```

pub mod asymptotics;
pub mod channel;
pub mod codes;
pub mod distribution;
pub mod eigen;
pub mod entropy;
pub mod error;
pub mod exec;
pub mod gf2;
pub mod montecarlo;
pub mod noise;
pub mod optimizer;
pub mod protocol;
pub mod rates;

pub use error::{Error, Result};
pub use exec::Exec;
