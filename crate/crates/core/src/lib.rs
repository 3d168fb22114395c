//! Steadily translating Hele-Shaw bubbles without surface tension, computed
//! from pairs of slit conformal maps of multiply connected circular domains.
//!
//! The maps come from a boundary integral equation with the generalized
//! Neumann kernel, discretized by the Nyström method and solved with GMRES.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

pub mod bie;
pub mod bubbles;
pub mod domain;
pub mod error;
pub mod gmres;
pub mod kernel;
pub mod slitmap;
pub mod spectral;
pub mod streamlines;

pub use bie::{cauchy_eval, cauchy_eval_many, solve_bie, BieSolution};
pub use domain::{BoundarySampling, CircularDomain, Location, DEFAULT_MIN_GAP};
pub use error::{Error, Result};
pub use gmres::{gmres_solve, GmresOutcome, GmresSettings};
pub use kernel::{FnMap, KernelContext, LinearMap, ThetaSpec};
pub use slitmap::{
    eval_maps, map_channel, map_free_space, map_half_plane, Geometry, MapOptions, SlitMap,
};
pub use bubbles::{
    bubble_areas, rescale_to_area, solve_bubbles, BubbleProblem, BubbleSolution, Diagnostics,
    ScaleTarget,
};
pub use streamlines::{streamlines, Levels, StreamlineSettings, Streamline, Window};
