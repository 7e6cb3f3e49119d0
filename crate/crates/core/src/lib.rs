//! Three-setting Bell inequality for N-particle GHZ correlations.
//!
//! * [`ghz`] builds the settings grid and the quantum correlation tensor `Q`.
//! * [`lhv`] enumerates deterministic local strategies and certifies the
//!   local bound `2^(N-1)√3`.
//! * [`thresholds`] solves for critical visibility and detection efficiency.
//! * [`sim`] simulates imperfect experiments and evaluates the
//!   detection-corrected inequality on the data.
//! * [`verify`] bundles the identities above into a pass/fail suite.
//!
//! Data-parallel loops go through [`exec`]; with the default `parallel`
//! feature they run on rayon, without it they run sequentially. Results are
//! identical either way.

pub mod error;
pub mod exec;
pub mod ghz;
pub mod lhv;
pub mod phase;
pub mod sim;
pub mod thresholds;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
