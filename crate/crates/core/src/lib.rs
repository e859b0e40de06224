pub mod error;
pub mod harness;
pub mod norm2;
pub mod real;
pub mod spaces;
pub mod sums;
