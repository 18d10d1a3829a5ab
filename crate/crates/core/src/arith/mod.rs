//! Exact integer, modular and polynomial kernels shared by every other module.

pub mod modular;
mod modpoly;
mod parse;
mod poly;
mod primes;
pub mod zpoly;

pub use modpoly::{
    has_root_mod, has_root_mod_with, poly_gcd_mod, ModPoly, RootStrategy, DEFAULT_EXHAUSTIVE_BELOW,
};
pub use parse::parse_poly;
pub use poly::{IntPoly, PolyError};
pub use primes::{prime_stream, PrimeStream};
