//! Buildings over finite fields, their Steinberg modules, and the group
//! homology and Dyer–Lashof bookkeeping around them.

pub mod buildings;
pub mod complexes;
pub mod dlss;
pub mod error;
pub mod ffield;
pub mod ghomology;
pub mod glgroup;
pub mod steinberg;
pub mod verify;

pub use error::{Error, Result};
