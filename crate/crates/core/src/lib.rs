pub mod channels;
pub mod entanglement;
pub mod error;
pub mod matrix;
pub mod measures;
pub mod optimize;
pub mod plot;
pub mod states;
pub mod sweep;

pub use error::{Error, Result};
pub mod verify;
