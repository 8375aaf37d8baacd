pub mod badprimes;
pub mod error;
pub mod exactnum;
pub mod filters;
pub mod groebner;
pub mod ideals;
pub mod mpoly;
pub mod pipeline;
pub mod polycheck;
pub mod scenario;

pub use error::{Error, Result};
