//! Finite topological spaces as finite posets: beat-point reduction and
//! homotopy type, maps over a base, Grothendieck (op)fibrations and a decision
//! procedure for the Hurewicz fibration property of maps between finite
//! spaces.
//!
//! ```
//! use std::sync::Arc;
//! use fintop::{decide_hurewicz, gallery, SliceMap, Status};
//!
//! let p = SliceMap::new(gallery::p1()).unwrap();
//! assert_eq!(decide_hurewicz(&p).unwrap().status, Status::Fibration);
//! # let _ = Arc::new(fintop::Poset::sierpinski());
//! ```

pub mod document;
pub mod error;
pub mod gallery;
pub mod grothendieck;
pub mod hom;
pub mod iso;
pub mod map;
pub mod poset;
mod reduce;
pub mod slice;
pub mod stong;
pub mod verdict;

pub use document::{parse_document, Document};
pub use error::{Error, Result};
pub use grothendieck::{
    alpha_functor, beta_functor, cartesian_lift, classify_grothendieck, cocartesian_lift, grothendieck_construction,
    is_bifibration, is_fiber_bundle, is_grothendieck_fibration, is_grothendieck_opfibration, BundleReport,
    GrothendieckReport, PosetFunctor, Variance,
};
pub use hom::{hom_poset, HomPoset, DEFAULT_GUARD};
pub use iso::{find_isomorphism, find_isomorphism_over_base};
pub use map::MonotoneMap;
pub use poset::{Direction, ElemSet, Poset};
pub use slice::{
    is_minimal_map, map_beat_points, map_core, smallest_dbp_retract_of_map, smallest_ubp_retract_of_map, SliceMap,
};
pub use stong::{
    beat_points, core, f_infinity, homotopy_equivalent, is_contractible, is_minimal_space, BeatKind, ReductionTrace,
    RemovalOrder,
};
pub use verdict::{
    decide_hurewicz, decide_hurewicz_with, necessary_conditions, Certificate, DecideOptions, Status, Verdict,
};
