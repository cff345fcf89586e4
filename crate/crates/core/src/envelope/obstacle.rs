use std::f64::consts::PI;

use super::sweep::{colored_sweep, parity, Lattice};
use super::{coarse_grid, contact_set, prolong, EnvelopeResult, Method, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::{AlphaForm, ScalarField, TorusGrid};

/// Envelope of `α = a ω` on a curve: the largest `u <= 0` with
/// `a + Δu/(4π) >= 0`, i.e. the linear complementarity problem
/// `u <= 0`, `a + Δ_h u/(4π) >= 0`, one of them an equality at every node,
/// solved by projected SOR with red-black ordering.
pub fn envelope_obstacle_1d(
    alpha: &AlphaForm,
    grid: TorusGrid,
    opts: &SolverOptions,
) -> Result<EnvelopeResult> {
    if grid.n() != 1 || alpha.n() != 1 {
        return Err(Error::Validation("the obstacle solver is one-dimensional".into()));
    }
    opts.validate()?;
    let mass = alpha.class_mass();
    if mass < 0.0 {
        return Err(Error::NotPseudoEffective { mass });
    }
    let initial = match coarse_grid(grid).filter(|_| opts.nested) {
        Some(cg) => {
            let coarse = envelope_obstacle_1d(alpha, cg, opts)?;
            prolong(&coarse.phi, grid).map(|v| v.min(0.0))
        }
        None => ScalarField::zeros(grid),
    };
    solve(alpha, grid, opts, initial)
}

pub(crate) fn solve(
    alpha: &AlphaForm,
    grid: TorusGrid,
    opts: &SolverOptions,
    initial: ScalarField,
) -> Result<EnvelopeResult> {
    let a: Vec<f64> = alpha.coeff(grid)?.coeff().iter().map(|h| h.d1).collect();
    let n = grid.nodes();
    let mask = n - 1;
    let src = 4.0 * PI * grid.h() * grid.h();
    let lattice = Lattice::new(&[n, n]);
    let mut u = initial.into_values();
    let omega = opts.omega;
    let mut residual = f64::INFINITY;
    for sweep in 1..=opts.max_iter {
        residual = colored_sweep(lattice, &mut u, 2, parity, |idx, c, r| {
            let (x, y) = (c[0], c[1]);
            let nb = r.get(((x + 1) & mask) + n * y)
                + r.get(((x + n - 1) & mask) + n * y)
                + r.get(x + n * ((y + 1) & mask))
                + r.get(x + n * ((y + n - 1) & mask));
            let gs = 0.25 * (nb + src * a[idx]);
            let old = r.get(idx);
            Some((old + omega * (gs - old)).min(0.0))
        });
        if residual < opts.tol {
            let phi = ScalarField::from_values(grid, u)?;
            return Ok(EnvelopeResult {
                contact: contact_set(&phi, 10.0 * opts.tol),
                phi,
                iterations: sweep,
                residual,
                method: Method::Obstacle,
                tol_solve: opts.tol,
            });
        }
    }
    Err(Error::NonConvergence {
        method: "projected SOR",
        iterations: opts.max_iter,
        residual,
    })
}

/// Re-runs the solver from a given start (used to test idempotence).
pub fn envelope_obstacle_from(
    alpha: &AlphaForm,
    start: &ScalarField,
    opts: &SolverOptions,
) -> Result<EnvelopeResult> {
    solve(alpha, start.grid(), opts, start.map(|v| v.min(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{hessian_fd, TrigPoly};

    fn mixed(lambda: f64, m: f64) -> AlphaForm {
        // a = λ + M cos(2πx) = λ + dd^c q with q = -(M/π) cos(2πx)
        AlphaForm::scalar(lambda, TrigPoly::cosine([1, 0, 0, 0], -m / PI))
    }

    #[test]
    fn positive_constant_gives_zero() {
        let g = TorusGrid::new(1, 32).unwrap();
        let r = envelope_obstacle_1d(&AlphaForm::scalar(0.5, TrigPoly::zero()), g, &SolverOptions::for_dim(1)).unwrap();
        assert!(r.phi.values().iter().all(|&v| v == 0.0));
        assert!(r.contact.iter().all(|&c| c));
    }

    #[test]
    fn negative_mass_is_rejected() {
        let g = TorusGrid::new(1, 32).unwrap();
        let e = envelope_obstacle_1d(&mixed(-0.1, 1.0), g, &SolverOptions::for_dim(1));
        assert!(matches!(e, Err(Error::NotPseudoEffective { .. })));
    }

    #[test]
    fn mixed_sign_band_and_complementarity() {
        let g = TorusGrid::new(1, 128).unwrap();
        let alpha = mixed(0.3, 1.0);
        let r = envelope_obstacle_1d(&alpha, g, &SolverOptions::for_dim(1)).unwrap();
        assert!(r.phi.min() < -1e-3);
        let a = alpha.coeff(g).unwrap();
        let lap = hessian_fd(&r.phi);
        for i in 0..g.len() {
            let x = g.point(i)[0];
            let res = (-r.phi.value(i)).min(a.at(i).d1 + lap.at(i).d1);
            assert!(res.abs() < 1e-4, "node {i}: {res}");
            // contact set is contained in {a >= 0} up to one node
            if (x - 0.5).abs() < 0.25 {
                assert!(!r.contact[i]);
            }
        }
    }

    #[test]
    fn rerun_from_solution_stops_at_once() {
        let g = TorusGrid::new(1, 64).unwrap();
        let alpha = mixed(0.3, 1.0);
        let opts = SolverOptions::for_dim(1);
        let r = envelope_obstacle_1d(&alpha, g, &opts).unwrap();
        let again = envelope_obstacle_from(&alpha, &r.phi, &opts).unwrap();
        assert!(again.iterations <= 2);
    }
}
