//! Upper envelopes `φ = sup{ψ <= obstacle, ψ α-psh}` and their contact sets.
//!
//! Two solvers: a projected SOR for the one-dimensional obstacle problem and
//! a Perron-type disc-average iteration that works in dimensions one and two.

mod candidates;
mod disc;
mod obstacle;
pub(crate) mod sweep;

use serde::{Deserialize, Serialize};

pub use candidates::{candidate_generator, Candidate, CandidateOptions};
pub use disc::{disc_directions, envelope_disc_average, envelope_disc_from, DiscDirection};
pub use obstacle::{envelope_obstacle_1d, envelope_obstacle_from};

use crate::error::{Error, Result};
use crate::geometry::{ScalarField, TorusGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Obstacle,
    DiscAverage,
}

#[derive(Debug, Clone)]
pub struct EnvelopeResult {
    pub phi: ScalarField,
    pub contact: Vec<bool>,
    pub iterations: usize,
    /// Largest change during the final sweep.
    pub residual: f64,
    pub method: Method,
    pub tol_solve: f64,
}

impl EnvelopeResult {
    pub fn contact_fraction(&self) -> f64 {
        self.contact.iter().filter(|&&c| c).count() as f64 / self.contact.len() as f64
    }

    pub fn contact_tol(&self) -> f64 {
        10.0 * self.tol_solve
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relaxation factor. The disc-average iteration uses it as stated on
    /// grids with 32 nodes per axis and `2 - (2 - ω)·32/N` on `N` nodes.
    pub omega: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Start from the interpolated solution on the grid with half the nodes
    /// (recursively); the fixed point is unchanged.
    pub nested: bool,
}

impl SolverOptions {
    pub fn for_dim(n: usize) -> Self {
        Self {
            omega: 1.8,
            tol: if n == 1 { 1e-8 } else { 1e-6 },
            max_iter: 200_000,
            nested: true,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Relaxation used by the disc-average iteration on `nodes` nodes per axis.
    pub fn omega_at(&self, nodes: usize) -> f64 {
        if self.omega <= 1.0 {
            return self.omega;
        }
        (2.0 - (2.0 - self.omega) * 32.0 / nodes as f64).clamp(1.0, 1.99)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega < 2.0) {
            return Err(Error::Validation(format!("relaxation factor {} outside (0,2)", self.omega)));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Validation("tolerance and max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// `D = {φ >= -contact_tol}`.
pub fn contact_set(phi: &ScalarField, contact_tol: f64) -> Vec<bool> {
    phi.values()
        .iter()
        .zip(phi.pole_mask())
        .map(|(&v, &p)| !p && v >= -contact_tol)
        .collect()
}

/// Coarse grid used for nested initial guesses, if any.
pub(crate) fn coarse_grid(grid: TorusGrid) -> Option<TorusGrid> {
    let coarse = grid.nodes() / 2;
    let min = if grid.n() == 1 { 32 } else { 16 };
    if coarse < min {
        None
    } else {
        TorusGrid::new(grid.n(), coarse).ok()
    }
}

/// Multilinear prolongation of a coarse field to `fine`.
pub(crate) fn prolong(coarse: &ScalarField, fine: TorusGrid) -> ScalarField {
    use crate::geometry::Sampler;
    ScalarField::from_fn(fine, |x| coarse.sample(x))
}

/// Morphological dilation of a mask by `radius` nodes (Chebyshev metric).
pub fn dilate(grid: TorusGrid, mask: &[bool], radius: usize) -> Vec<bool> {
    let mut out = mask.to_vec();
    for axis in 0..grid.real_dim() {
        let prev = out.clone();
        for i in 0..grid.len() {
            if prev[i] {
                continue;
            }
            out[i] = (1..=radius as isize)
                .any(|d| prev[grid.step(i, axis, d)] || prev[grid.step(i, axis, -d)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contact_of_zero_is_everything() {
        let g = TorusGrid::new(1, 8).unwrap();
        assert!(contact_set(&ScalarField::zeros(g), 1e-7).iter().all(|&c| c));
    }

    #[test]
    fn dilation_grows_a_point_into_a_square() {
        let g = TorusGrid::new(1, 16).unwrap();
        let mut m = vec![false; g.len()];
        m[g.index(&[3, 3])] = true;
        let d = dilate(g, &m, 2);
        assert_eq!(d.iter().filter(|&&b| b).count(), 25);
        assert!(d[g.index(&[1, 5])] && !d[g.index(&[0, 3])]);
    }
}
