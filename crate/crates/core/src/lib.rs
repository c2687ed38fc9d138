pub mod app;
pub mod chain;
pub mod error;
pub mod io;
pub mod lie;
pub mod linalg;
pub mod plot;
pub mod propagator;
pub mod synth;
pub mod table1;

pub use error::{Error, Result};
