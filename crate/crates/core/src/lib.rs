//! Exceptional collections, helices and tilting on del Pezzo surfaces.
//!
//! Everything is generic over an integer [`Scalar`]; the `*64` aliases cover
//! the usual case.

pub mod cy3quiver;
pub mod excol;
pub mod explorer;
pub mod helix;
pub mod klattice;
pub mod scalar;
pub mod seeds;

pub use cy3quiver::{
    cross_check_tilt, fz_mutate, helix_quiver, rolled_b_matrix, rolled_quiver, thread_quiver,
    tilted_simple_classes, BMatrix, CrossCheckReport, Quiver, QuiverError,
};
pub use excol::{
    chi, hom_profile, left_mutate, mutate_through, right_mutate, tau, tau_inverse, BlockStructure,
    Collection, ExcError, ExcObject, HomProfile, Side,
};
pub use explorer::{canonical_quiver_key, web_bfs, ExplorerError, WebEdge, WebGraph, WebNode};
pub use helix::{
    build_height_function, enumerate_height_functions, is_tilting_at_level, levelled_sigma,
    levelled_sigma_inverse, tilt, Helix, HelixError, HeightFunction, Levelling, TiltOutcome,
};
pub use klattice::{
    euler_pairing, serre_twist, sheaf_normalize, slope_compare, ChernClass, LatticeError,
    SlopeOrder, Surface,
};
pub use scalar::{Overflow, Scalar};

pub type ChernClass64 = ChernClass<i64>;
pub type ExcObject64 = ExcObject<i64>;
pub type Collection64 = Collection<i64>;
pub type Helix64 = Helix<i64>;
pub type BMatrix64 = BMatrix<i64>;
pub type Quiver64 = Quiver<i64>;
pub type WebGraph64 = WebGraph<i64>;
