//! Irreducible convex paving for martingale optimal transport between
//! finitely supported measures on R^d.
//!
//! All combinatorial predicates (hulls, faces, LP feasibility, polarity) are
//! decided in exact rational arithmetic. Floating point only enters the
//! Gaussian measurement functional [`geometry::g_functional`].

pub mod cli;
pub mod coupling;
pub mod duality;
pub mod error;
pub mod geometry;
pub mod golden;
pub mod lp;
pub mod measures;
pub mod oned;
pub mod paving;
pub mod random;
pub mod rational;

pub use coupling::{maximal_support_coupling, sample_vertices, support_functional, Coupling};
pub use error::{Error, Result};
pub use geometry::{Point, Polytope, RelOpenConvexSet};
pub use measures::{convex_order, DiscreteMeasure, MotInstance};
pub use paving::{classify_pair, irreducible_paving, j_maps, ComponentMap, JMaps};
pub use rational::Rational;
