//! Joint placement and passive beamforming design for an aerial
//! reflecting-surface (AIRS) relay.
//!
//! A ground source at the origin serves a rectangular target area through a
//! reflecting array carried at a fixed altitude. The crate covers:
//!
//! - [`geometry`]: placements, target areas, spatial frequencies and spans.
//! - [`channel`]: free-space LoS gains, array gain and exact end-to-end SNR.
//! - [`beamform`]: conjugate phasing, sub-array beam broadening/flattening
//!   for linear arrays and its separable extension to planar arrays.
//! - [`placement`]: closed-form single-location placement and grid search
//!   for worst-case area coverage.
//! - [`bench`]: benchmark schemes and the figure-reproduction experiments.
//!
//! All lengths are meters, angles radians, and power quantities linear
//! unless a name ends in `_db`/`_dbm`.

pub mod beamform;
pub mod bench;
pub mod channel;
mod error;
pub mod geometry;
pub mod placement;
pub mod units;

pub use error::{Error, Result};
