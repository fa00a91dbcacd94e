//! Exact F2 computations with magnetized, conditionally convergent tensor
//! powers over dyadic towers, together with the torus-algebra type-DA
//! bimodule calculus used to cross-check their dimensions.

pub mod bits;
pub mod f2cat;
pub mod tower;
pub mod mcc;
pub mod solenoidal;
pub mod floer;
pub mod checks;
