//! Numerical engine for a quantum particle on the unit sphere prepared in a
//! coherent state.
//!
//! The crate builds the truncated angular-momentum representation of the
//! sphere's position/rotation algebra ([`hilbert`]), constructs coherent
//! states from classical phase-space data ([`coherent`]), evolves them
//! exactly under the free Hamiltonian J^2/2 or a uniform rotation omega.J
//! ([`dynamics`]), and extracts the wave-packet phenomenology: probability
//! densities on the sphere, spherical-angle trajectories, quantum beats and
//! their envelope, the pulse/oscillation event at odd multiples of pi, and
//! saddle points of the density ([`analysis`]).  [`verify`] bundles the
//! measurable invariants into a deterministic report.
//!
//! Everything is plain `f64` numerics; products that would overflow on the
//! way to a representable result are carried in log-magnitude/phase form
//! ([`scaled`]).  The practical working range is |l| up to roughly 20.

pub mod analysis;
mod blockexp;
pub mod coherent;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod scaled;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
