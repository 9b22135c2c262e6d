pub mod compile;
mod error;
pub mod grounding;
pub mod inference;
pub mod learn;
pub mod measures;
pub mod oracle;
pub mod propositional;
pub mod semirings;
pub mod syntax;

pub use error::{Error, ErrorClass};
