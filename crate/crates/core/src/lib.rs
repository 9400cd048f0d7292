//! Finite groupoids, their partial actions on rings of orthogonal
//! idempotents, and the associated Galois correspondences.

pub mod action;
pub mod algebra;
pub mod catalog;
pub mod constructions;
pub mod correspondence;
pub mod enumeration;
pub mod fuzzing;
pub mod galois;
pub mod groupoid;
pub mod io;
pub mod partition;
pub mod random;
pub mod subgroupoid;

pub use action::{ActionError, PartialAction};
pub use algebra::{BaseRing, IdempotentAlgebra, RingElement};
pub use correspondence::{CorrespondenceError, CorrespondenceTable, Mode};
pub use groupoid::{FiniteGroupoid, Morphism};
pub use partition::PartitionSubalgebra;
pub use subgroupoid::WideSubgroupoid;
