//! Space-bounded algorithmic statistics, computed exactly at desk scale.
//!
//! Everything is defined relative to one fixed metered machine
//! ([`machine`]). Complexity values come from exhaustive program search
//! ([`complexity`]); the constructive procedures over model families live in
//! [`families`], [`model_search`], [`subfamily`], [`nwgen`], [`dist2set`]
//! and [`symmetry`].

pub mod bits;
pub mod certificate;
pub mod complexity;
pub mod dist2set;
pub mod error;
pub mod families;
pub mod machine;
pub mod model_search;
pub mod nwgen;
pub mod subfamily;
pub mod symmetry;

pub use bits::{BitString, StringSet};
pub use certificate::{CertifiedDescription, DecoderId};
pub use complexity::{ComplexityValue, Lab};
pub use error::{Error, Result};
