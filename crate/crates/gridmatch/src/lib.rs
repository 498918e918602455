//! Files, command-line plumbing and validation suites around
//! [`gridmatch_core`].

mod error;
pub mod gen;
pub mod io;
pub mod persist;
pub mod report;
pub mod validate;

pub use error::Error;
