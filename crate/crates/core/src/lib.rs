#![no_std]
// Float methods come from num-traits (backed by libm). When std is linked
// into the build, e.g. by dev-dependencies, the inherent f64 methods shadow
// them and the trait imports look unused; hence the scattered allows.

extern crate alloc;

pub mod analysis;
pub mod complex;
pub mod homology;
pub mod linalg;
pub mod odesolve;
pub mod quantum;
