pub mod cli;
pub mod coleman;
pub mod curve;
pub mod error;
pub mod field;
pub mod jacobian;
pub mod oracle;
pub mod padic;
pub mod sieve;

pub use error::{Error, Result};
