//! Exact arithmetic used throughout: F_p residues, Q[t], Q(t), integer matrices.

pub mod intmat;
pub mod modp;
pub mod qpoly;
pub mod ratfunc;

pub use modp::{format_rational, parse_rational, FactorialTable, Prime, PrimeError};
pub use qpoly::QPoly;
pub use ratfunc::RatFunc;
