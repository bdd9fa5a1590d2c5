pub mod analysis;
pub mod cli;
pub mod cutplane;
pub mod enumerate;
pub mod error;
pub mod inner;
pub mod lp;
pub mod milp;
pub mod modelio;
pub mod netmodel;
pub mod scenario;
pub mod singlelevel;

pub use error::{Error, Result};
