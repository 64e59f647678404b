//! Exact computation of the Jordan normal form of the Milnor monodromy of a
//! convenient non-degenerate polynomial from its Newton polyhedron.
//!
//! The pipeline runs from a [`SupportSet`] through the [`NewtonPolyhedron`]
//! and the equivariant Hodge tables of its faces to a [`JordanSpectrum`].

pub mod ehrhart;
pub mod error;
pub mod fan;
pub mod hodge;
pub mod hull;
pub mod intmat;
pub mod monodromy;
pub mod newton;
pub mod oracles;
pub mod poly;
pub mod polytope;
pub mod root;

pub use ehrhart::PhiTable;
pub use error::{Error, Result};
pub use fan::Fan;
pub use hodge::{Engine, EquivariantHodgeTable};
pub use monodromy::{JordanSpectrum, MotivicTable};
pub use newton::{CompactFace, FaceChart, NewtonPolyhedron};
pub use oracles::{CheckResult, ValidationReport};
pub use poly::{ExponentVector, SupportSet};
pub use polytope::{Character, EquivariantPolytope, LatticePolytope, Primeness, Region};
pub use root::RootOfUnity;
