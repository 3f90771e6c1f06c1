pub mod cayley;
pub mod error;
pub mod escape;
pub mod freeprod;
pub mod groups;
pub mod heights;
pub mod modp;
pub mod primes;
pub mod ring;
pub mod rng;
pub mod selftest;
pub mod ssa;
pub mod walk;

pub use error::{Diagnostics, Error, Result};
