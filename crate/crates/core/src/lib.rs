//! Basic spectra of singular Riemannian foliations on space forms,
//! reduced to weighted Sturm–Liouville problems on the leaf space.

pub mod cli;
pub mod error;
pub mod isocheck;
pub mod jacobi;
pub mod meancurv;
pub mod profiles;
pub mod sturm;

pub use error::{Error, Result};
