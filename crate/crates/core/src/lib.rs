//! Numerical laboratory for graph-form geometric flows (mean curvature,
//! surface diffusion, Willmore) with self-similar cone data.
//!
//! The crate is organized around a pseudo-spectral discretization of entire
//! graphs: fields carry an analytic cone background plus a periodic residual,
//! flows are evaluated in their exact divergence forms, time integration uses
//! exponential integrators in Fourier space, and a harness runs rescaling
//! (lambda-sweep) convergence studies against extracted self-similar
//! profiles, together with kernel and weighted-norm diagnostics.

pub mod background;
pub mod error;
pub mod fft;
pub mod field;
pub mod fitting;
pub mod flow;
pub mod grid;
pub mod harness;
pub mod io;
pub mod kernels;
pub mod norms;
pub mod selfsim;
pub mod semigroup;

pub use background::{ConeData, ConeProfile};
pub use error::{Error, Result};
pub use field::{Field, Jet};
pub use flow::{FlowKind, FlowSpec};
pub use grid::Grid;
