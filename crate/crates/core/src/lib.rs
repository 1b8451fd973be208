//! Hyperbolic-metric tools for the dynamics of transcendental entire maps.
//!
//! * [`maps`]: the supported entire-function families (`e^z`,
//!   `λ·sinh(z)/z + a`, truncated Laguerre–Pólya products and polynomial
//!   precompositions) with exact derivatives and singular values.
//! * [`hypgeo`]: exact hyperbolic densities of model domains, Koebe-type
//!   bounds, the sharp comparison bounds for nested domains, hyperbolic curve
//!   length and the hyperbolic derivative.
//! * [`orbits`]: orbits, hyperbolic-derivative bookkeeping along them,
//!   singular-orbit escape and escape-time grids.
//! * [`sector`]: the real sector condition and its logarithmic-derivative
//!   characterisation.
//! * [`output`] and [`parse`]: the CSV/PPM writers and the textual input
//!   formats used by the command-line driver.

use std::fmt;
use std::str::FromStr;

pub mod error;
pub mod hypgeo;
pub mod maps;
pub mod orbits;
pub mod output;
pub mod parse;
pub mod poly;
pub mod quad;
pub mod sector;

pub use error::{Error, Result};
pub use hypgeo::{GeneralDomain, Interval, ModelDomain};
pub use maps::{EntireMap, SingularSet, ZeroRule};
pub use poly::Polynomial;

pub use num_complex::Complex64;

/// A real direction `σ ∈ {+, −}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }

    pub const BOTH: [Direction; 2] = [Direction::Plus, Direction::Minus];
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Plus => "+",
            Direction::Minus => "-",
        })
    }
}

impl FromStr for Direction {
    type Err = parse::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" | "plus" | "+1" | "1" => Ok(Direction::Plus),
            "-" | "minus" | "-1" => Ok(Direction::Minus),
            other => Err(parse::ParseError::new(format!("unknown direction '{other}'"))),
        }
    }
}
