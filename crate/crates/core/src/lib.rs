//! Smooth traveling-wave shock profiles for an inviscid gas coupled to
//! radiation through a stationary diffusion equation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baby;
pub mod error;
pub mod gas;
pub mod glue;
pub mod io;
pub mod manifold;
pub mod nullcline;
pub mod ode;
pub mod pipeline;
pub mod poly;
pub mod reduced;
pub mod verify;

pub use error::{Error, ErrorClass, Result};
pub use gas::{GasConstants, GasState, ShockData};
pub use glue::{GasParameters, GlueOptions, Profile, ProfileMeta};
pub use manifold::{ManifoldOptions, Method, Side, Trajectory};
pub use reduced::{EquilibriumReport, ReducedSystem};
