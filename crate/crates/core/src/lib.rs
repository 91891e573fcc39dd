pub mod algebroid;
pub mod cli;
pub mod error;
pub mod matrix;
pub mod poly;
pub mod polytext;
pub mod random;
pub mod rep2;
pub mod report;
pub mod subgeom;
pub mod suites;
pub mod vbalg;

pub use error::{Error, Result};
pub use matrix::PolyMatrix;
pub use poly::{rat, ratio, Poly, Rational};
