pub mod annihilator;
pub mod corpus;
pub mod error;
pub mod fixture;
pub mod groebner;
pub mod int;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod univariate;
pub mod weyl;

pub use error::{Error, Result};
