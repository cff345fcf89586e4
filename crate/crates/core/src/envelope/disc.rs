use std::f64::consts::PI;

use num_complex::Complex64;

use super::sweep::{colored_sweep, parity, Lattice};
use super::{coarse_grid, contact_set, prolong, EnvelopeResult, Method, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::{AlphaForm, ScalarField, TorusGrid};

/// A complex direction `ζ ∈ Z[i]^n` (in units of the grid spacing). The
/// "circle" of radius `|ζ| h` in the complex line through `z` is sampled at
/// the four lattice points `z + i^k ζ h`, `k = 0..3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscDirection {
    pub zeta: [Complex64; 2],
}

impl DiscDirection {
    fn new(a: (i32, i32), b: (i32, i32)) -> Self {
        Self {
            zeta: [
                Complex64::new(a.0 as f64, a.1 as f64),
                Complex64::new(b.0 as f64, b.1 as f64),
            ],
        }
    }

    /// Real lattice offsets `(x1, y1, x2, y2)` of the four circle points.
    pub fn offsets(&self) -> [[isize; 4]; 4] {
        let mut out = [[0isize; 4]; 4];
        let mut rot = Complex64::new(1.0, 0.0);
        for o in out.iter_mut() {
            let p = [self.zeta[0] * rot, self.zeta[1] * rot];
            *o = [p[0].re as isize, p[0].im as isize, p[1].re as isize, p[1].im as isize];
            rot *= Complex64::new(0.0, 1.0);
        }
        out
    }
}

/// Direction set: in dimension one the circles through `2+i` and `1+2i`
/// (averaged); in dimension two 18 directions of odd parity covering the
/// projective line of complex directions (minimum taken).
pub fn disc_directions(n: usize) -> Vec<DiscDirection> {
    if n == 1 {
        return vec![DiscDirection::new((2, 1), (0, 0)), DiscDirection::new((1, 2), (0, 0))];
    }
    let mut d = vec![DiscDirection::new((1, 0), (0, 0)), DiscDirection::new((0, 0), (1, 0))];
    for (re, im) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        d.push(DiscDirection::new((1, 0), (re, im)));
        d.push(DiscDirection::new((re, im), (1, 0)));
    }
    for w in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
        d.push(DiscDirection::new((2, 0), w));
        d.push(DiscDirection::new((1, 0), (2 * w.0, 2 * w.1)));
    }
    d
}

/// Perron iteration for the largest α-psh function below `obstacle`.
///
/// The iteration runs on `v = u + q` (where `α = β + dd^c q`), for which
/// α-psh means `v + P` psh with `dd^c P = β`. Along a direction `ζ` the
/// sub-mean-value inequality of the four-point circle reads
/// `v(z) <= M_ζ v(z) + π h^2 β(ζ, ζ̄)`; the constant `π` makes every quadratic
/// with `β + dd^c v ≡ 0` an exact fixed point. The update is
/// `v ← min(obstacle + q, v + ω (T v − v))` with `T` the mean (n = 1) or the
/// minimum (n = 2) over directions.
pub fn envelope_disc_average(
    alpha: &AlphaForm,
    obstacle: &ScalarField,
    opts: &SolverOptions,
) -> Result<EnvelopeResult> {
    let grid = obstacle.grid();
    alpha.check_grid(grid)?;
    opts.validate()?;
    if obstacle.has_poles() {
        return Err(Error::Validation("the obstacle must be bounded".into()));
    }
    if alpha.beta().min_eig() < 0.0 {
        return Err(Error::Precondition("β must be positive semidefinite".into()));
    }
    let start = match coarse_grid(grid).filter(|_| opts.nested) {
        Some(cg) => {
            let coarse_obs = obstacle.restrict_to(cg)?;
            let coarse = envelope_disc_average(alpha, &coarse_obs, opts)?;
            let p = prolong(&coarse.phi, grid);
            ScalarField::from_values(
                grid,
                p.values().iter().zip(obstacle.values()).map(|(a, b)| a.min(*b)).collect(),
            )?
        }
        None => obstacle.map(|v| v.min(0.0)),
    };
    solve(alpha, obstacle, opts, start)
}

pub(crate) fn solve(
    alpha: &AlphaForm,
    obstacle: &ScalarField,
    opts: &SolverOptions,
    start: ScalarField,
) -> Result<EnvelopeResult> {
    let grid = obstacle.grid();
    let q = alpha.q_field(grid);
    let cap: Vec<f64> = obstacle.values().iter().zip(q.values()).map(|(o, q)| o + q).collect();
    let mut v: Vec<f64> = start.values().iter().zip(q.values()).map(|(u, q)| u + q).collect();
    let op = DiscOperator::new(alpha, grid);
    let lattice = Lattice::new(&vec![grid.nodes(); grid.real_dim()]);
    let omega = opts.omega_at(grid.nodes());
    let mut residual = f64::INFINITY;
    for sweep in 1..=opts.max_iter {
        residual = colored_sweep(lattice, &mut v, 2, parity, |idx, c, r| {
            let old = r.get(idx);
            let t = op.apply(c, |j| r.get(j));
            Some((old + omega * (t - old)).min(cap[idx]))
        });
        if residual < opts.tol {
            let phi = ScalarField::from_values(
                grid,
                v.iter().zip(q.values()).map(|(v, q)| v - q).collect(),
            )?;
            return Ok(EnvelopeResult {
                contact: contact_set(&phi, 10.0 * opts.tol),
                phi,
                iterations: sweep,
                residual,
                method: Method::DiscAverage,
                tol_solve: opts.tol,
            });
        }
    }
    Err(Error::NonConvergence {
        method: "disc-average iteration",
        iterations: opts.max_iter,
        residual,
    })
}

/// Re-runs the iteration from a given start.
pub fn envelope_disc_from(
    alpha: &AlphaForm,
    obstacle: &ScalarField,
    start: &ScalarField,
    opts: &SolverOptions,
) -> Result<EnvelopeResult> {
    solve(alpha, obstacle, opts, start.clone())
}

/// `T v(z)` for the disc-average iteration, on a lattice with `N` nodes per
/// axis; coordinates wrap with a bit mask.
pub(crate) struct DiscOperator {
    n: usize,
    dims: usize,
    offsets: Vec<[[isize; 4]; 4]>,
    /// The same offsets as flat index differences (valid away from the wrap).
    linear: Vec<[isize; 4]>,
    reach: usize,
    shifts: Vec<f64>,
    mean: bool,
}

impl DiscOperator {
    pub fn new(alpha: &AlphaForm, grid: TorusGrid) -> Self {
        let dirs = disc_directions(grid.n());
        let beta = alpha.beta();
        let h2 = grid.h() * grid.h();
        let offsets: Vec<[[isize; 4]; 4]> = dirs.iter().map(|d| d.offsets()).collect();
        let nodes = grid.nodes() as isize;
        let dims = grid.real_dim();
        let flat = |o: &[isize; 4]| (0..dims).rev().fold(0isize, |acc, a| acc * nodes + o[a]);
        let linear = offsets.iter().map(|c| [flat(&c[0]), flat(&c[1]), flat(&c[2]), flat(&c[3])]).collect();
        let reach = offsets.iter().flatten().flatten().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        Self {
            n: grid.nodes(),
            dims,
            linear,
            reach,
            offsets,
            shifts: dirs
                .iter()
                .map(|d| PI * h2 * beta.quad_form(&d.zeta[..grid.n()]))
                .collect(),
            mean: grid.n() == 1,
        }
    }

    #[inline]
    pub fn apply(&self, c: &[usize; 5], get: impl Fn(usize) -> f64) -> f64 {
        let mask = (self.n - 1) as isize;
        let index = |o: &[isize; 4]| {
            let mut idx = 0usize;
            let mut stride = 1usize;
            for a in 0..self.dims {
                idx += (((c[a] as isize + o[a]) & mask) as usize) * stride;
                stride *= self.n;
            }
            idx
        };
        let interior = c[..self.dims].iter().all(|&x| x >= self.reach && x + self.reach < self.n);
        let here = (0..self.dims).rev().fold(0usize, |acc, a| acc * self.n + c[a]) as isize;
        let mut acc = if self.mean { 0.0 } else { f64::INFINITY };
        for ((circle, lin), shift) in self.offsets.iter().zip(&self.linear).zip(&self.shifts) {
            let sum = if interior {
                lin.iter().map(|d| get((here + d) as usize)).sum::<f64>()
            } else {
                circle.iter().map(|o| get(index(o))).sum::<f64>()
            };
            let m = 0.25 * sum + shift;
            if self.mean {
                acc += m;
            } else {
                acc = acc.min(m);
            }
        }
        if self.mean {
            acc / self.offsets.len() as f64
        } else {
            acc
        }
    }
}
