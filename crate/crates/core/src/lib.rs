//! Convexification hulls and level-convex envelopes of discretized nonlocal
//! densities `W: R^d x R^d -> R`, evaluation of the supremal functional
//! `J(u) = esssup W(u'(x), u'(y))` on piecewise-affine fields, and brute-force
//! relaxation oracles.

pub mod envelopes;
pub mod error;
pub mod exec;
pub mod exprlang;
pub mod functionals;
pub mod hulls;
pub mod io;
pub mod lattice;
pub mod oracle;

pub use error::{Error, Result};
pub use exec::{Exec, Settings};
pub use exprlang::DensityExpr;
pub use lattice::{
    sample_density, sublevel, Cell, DensityTable, Interval, PairMask, PwAffineFn, SlopeCloud,
    SlopeField, UniformGrid,
};
