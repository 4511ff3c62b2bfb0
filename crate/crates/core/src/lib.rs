//! Exact computation with fusion rules, feudal rules, fusion systems over
//! prime fields, überderivations and small-group cohomology.

pub mod cohom;
pub mod error;
pub mod feudal;
pub mod fsys;
pub mod group;
pub mod io;
pub mod multimagma;
pub mod report;
pub mod scalars;
pub mod uber;
pub mod zn;

pub use error::{Error, Result};
pub use multimagma::{FusionRule, Multiset, Subrule};
pub use report::{AxiomCheck, AxiomReport};
pub use scalars::{Exponent, Field, Fp};
