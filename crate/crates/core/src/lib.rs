pub mod arith;
pub mod census;
pub mod family;
pub mod hasse_witt;
pub mod hypergeometric;
pub mod lattice_polytope;
pub mod pencil;
pub mod picard_fuchs;
pub mod point_count;
