//! Flat complex tori, grid fields, discrete `dd^c` and Monge-Ampère densities.

mod alpha;
mod field;
mod grid;
mod herm;
pub mod io;
mod ops;
pub mod quadrature;
mod trig;

pub use alpha::{AlphaForm, HermSpec, StrictPair};
pub use field::{LogPole, Sampler, ScalarField, POLE_CLAMP};
pub use grid::{TorusGrid, MIN_NODES};
pub use herm::{Herm, HermitianField};
pub use ops::{
    ddc_box_mass, hessian_fd, integrate, integrate_exp, ma_density, min_eigenvalue,
    pole_neighbourhood, POLE_REFINE_NODES,
};
pub use trig::{TrigPoly, TrigTerm};
