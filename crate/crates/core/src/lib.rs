//! Executable wedge geometry and symmetry-group reconstruction.
//!
//! The crate covers wedge regions of Minkowski and de Sitter space, recovery
//! of the point transformation behind a wedge bijection, the Poincaré group
//! and its SL(2,C) covering, finite-dimensional Tomita–Takesaki theory and
//! the combinatorics of involution families on finite index sets.

pub mod coxeter_index;
pub mod desitter;
pub mod error;
pub mod feasibility;
pub mod minkowski;
pub mod modular_findim;
pub mod poincare;
pub mod reconstruction;
pub mod sampling;
pub mod sl2c;
pub mod suites;
pub mod tolerances;

pub use error::{Error, Result};
pub use minkowski::{
    are_disjoint, characteristic_data, is_maximal_pair, is_spacelike_separated, is_subset, make_wedge,
    project_time_x1, CharacteristicData, CharacteristicFamily, CharacteristicHalfSpace, CharacteristicHyperplane,
    FamilyDirection, FourVector, HalfPlaneOrAll, LightlikeDirection, Sign, Wedge,
};
pub use poincare::{
    classify_component, Act, ComponentLabel, ExtendedPoincareElement, LorentzMatrix, PoincareElement,
};
