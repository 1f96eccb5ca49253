pub mod abelian;
pub mod error;
pub mod labelling;
pub mod minors;
pub mod chains;
pub mod oracle;
pub mod ramsey;
pub mod solver;

pub use error::{Error, Result};
