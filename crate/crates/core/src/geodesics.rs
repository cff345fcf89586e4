//! Rotation-invariant weak geodesics between α-psh potentials on a curve.
//!
//! On `M = A × X` with `A` an annulus and data invariant under rotations, the
//! unknown depends on `t = log|s|` (normalized to `[0, 1]`) and `x ∈ X`. The
//! geodesic is the largest function, psh in the two complex variables
//! `(w = t + iθ, z)` after adding `α`, with boundary values at most `f0`, `f1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::envelope::SolverOptions;
use crate::error::{Error, Result};
use crate::geometry::{hessian_fd, AlphaForm, Sampler, ScalarField, TorusGrid};
use crate::monge_ampere::EPS_GRID;

#[derive(Debug, Clone)]
pub struct GeodesicProblem {
    pub alpha: AlphaForm,
    pub f0: ScalarField,
    pub f1: ScalarField,
    /// Intervals on `[0, 1]`; slices are `t = j / nt`, `j = 0..=nt`.
    pub nt: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Initialization {
    /// `max(f0 − C t, f1 − C (1 − t))`, a subsolution.
    LowerBarrier,
    /// `(1 − t) f0 + t f1`, a supersolution.
    Linear,
}

/// Values on the `(nt + 1) × N × N` lattice, slice-major.
#[derive(Debug, Clone)]
pub struct GeodesicField {
    grid: TorusGrid,
    nt: usize,
    values: Vec<f64>,
}

impl GeodesicField {
    pub fn from_fn(grid: TorusGrid, nt: usize, f: impl Fn(f64, usize) -> f64) -> Self {
        let m = grid.len();
        let values = (0..=nt)
            .flat_map(|j| {
                let t = j as f64 / nt as f64;
                (0..m).map(move |i| (t, i))
            })
            .map(|(t, i)| f(t, i))
            .collect();
        Self { grid, nt, values }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slice(&self, j: usize) -> ScalarField {
        let m = self.grid.len();
        ScalarField::from_values(self.grid, self.values[j * m..(j + 1) * m].to_vec())
            .expect("slice length matches the grid")
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicResult {
    pub phi: GeodesicField,
    pub iterations: usize,
    pub residual: f64,
    pub tol_solve: f64,
    pub report: GeodesicReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicReport {
    pub boundary_error: f64,
    pub interior_ma_median: f64,
    pub interior_ma_max: f64,
    pub eigen_cap: f64,
    /// Smallest eigenvalue of `α + dd^c_x φ_t` over all slices.
    pub slice_min_eigenvalue: f64,
    /// Most negative `∂_t² φ` (second differences over `h_t²`).
    pub min_t_second_derivative: f64,
    pub convexity_violations: usize,
}

/// `ζ = (ζ_w, ζ_z)`: `ζ_w` in units of the t-spacing, `ζ_z ∈ Z[i]` in units of
/// the x-spacing. Only `Re(i^k ζ_w)` enters, since the unknown is θ-invariant.
fn directions() -> Vec<(i64, (i64, i64))> {
    let mut d = vec![(0, (1, 0)), (0, (2, 1)), (0, (1, 2)), (1, (0, 0))];
    for u in [
        (1, 0), (-1, 0), (0, 1), (0, -1),
        (1, 1), (1, -1), (-1, 1), (-1, -1),
        (2, 0), (-2, 0), (0, 2), (0, -2),
        (2, 1), (2, -1), (-2, 1), (-2, -1), (1, 2), (1, -2), (-1, 2), (-1, -2),
    ] {
        d.push((1, u));
    }
    for u in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
        d.push((2, u));
    }
    d
}

struct Circle {
    /// `(dt, dx, dy)` of the four points, self-hits removed.
    points: Vec<(isize, isize, isize)>,
    self_hits: usize,
    /// `π h² |ζ_z|² β`.
    shift: f64,
    reach: usize,
}

fn circles(beta: f64, h: f64) -> Vec<Circle> {
    directions()
        .into_iter()
        .map(|(w, (a, b))| {
            let mut points = Vec::new();
            let mut self_hits = 0;
            // i^k (w, a + ib): w-component real parts are w, 0, −w, 0
            let rot = [(w, a, b), (0, -b, a), (-w, -a, -b), (0, b, -a)];
            for (dt, dx, dy) in rot {
                if dt == 0 && dx == 0 && dy == 0 {
                    self_hits += 1;
                } else {
                    points.push((dt as isize, dx as isize, dy as isize));
                }
            }
            Circle {
                points,
                self_hits,
                shift: PI * h * h * ((a * a + b * b) as f64) * beta,
                reach: w as usize,
            }
        })
        .collect()
}

impl GeodesicProblem {
    pub fn validate(&self) -> Result<()> {
        let g = self.f0.grid();
        if g.n() != 1 || self.alpha.n() != 1 {
            return Err(Error::Validation("geodesics are implemented on curves".into()));
        }
        if self.f1.grid() != g {
            return Err(Error::Validation("boundary data live on different grids".into()));
        }
        if self.nt < 2 {
            return Err(Error::Validation("need at least two t-intervals".into()));
        }
        self.alpha.check_grid(g)?;
        if self.alpha.class_mass() <= 0.0 {
            return Err(Error::Precondition("the class must have positive mass".into()));
        }
        for (name, f) in [("f0", &self.f0), ("f1", &self.f1)] {
            if f.has_poles() {
                return Err(Error::Validation(format!("{name} must be bounded")));
            }
            let h = self.alpha.coeff(g)?.add(&hessian_fd(f));
            let worst = h.coeff().iter().map(|c| c.min_eig()).fold(f64::INFINITY, f64::min);
            if worst < -1e-9 {
                return Err(Error::Precondition(format!(
                    "{name} is not α-psh (min eigenvalue {worst:.3e})"
                )));
            }
        }
        Ok(())
    }

    fn initial(&self, init: Initialization) -> GeodesicField {
        let (f0, f1) = (self.f0.values(), self.f1.values());
        let c = f0.iter().zip(f1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        GeodesicField::from_fn(self.f0.grid(), self.nt, |t, i| match init {
            Initialization::LowerBarrier => (f0[i] - c * t).max(f1[i] - c * (1.0 - t)),
            Initialization::Linear => (1.0 - t) * f0[i] + t * f1[i],
        })
    }

    fn coarse(&self) -> Option<Self> {
        let g = self.f0.grid();
        let cg = TorusGrid::new(1, g.nodes() / 2).ok().filter(|c| c.nodes() >= 32)?;
        if self.nt % 2 != 0 || self.nt < 8 {
            return None;
        }
        Some(Self {
            alpha: self.alpha.clone(),
            f0: self.f0.restrict_to(cg).ok()?,
            f1: self.f1.restrict_to(cg).ok()?,
            nt: self.nt / 2,
        })
    }
}

fn prolong(coarse: &GeodesicField, grid: TorusGrid, nt: usize) -> GeodesicField {
    let slices: Vec<ScalarField> = (0..=coarse.nt).map(|j| coarse.slice(j)).collect();
    let m = grid.len();
    let mut values = Vec::with_capacity((nt + 1) * m);
    for j in 0..=nt {
        let s = j as f64 * coarse.nt as f64 / nt as f64;
        let j0 = (s.floor() as usize).min(coarse.nt - 1);
        let f = s - j0 as f64;
        for i in 0..m {
            let x = grid.point(i);
            values.push((1.0 - f) * slices[j0].sample(&x) + f * slices[j0 + 1].sample(&x));
        }
    }
    GeodesicField { grid, nt, values }
}

/// Perron iteration on `v = φ + q` with `α = β + dd^c q`. Along each complex
/// direction the four-point circle gives `v(p) <= mean + π h² |ζ_z|² β`; the
/// update takes the minimum over directions, with boundary slices clamped.
/// Convergence is declared when the estimated distance to the fixed point,
/// `δ_k ρ / (1 − ρ)` with `ρ` the observed contraction of the sweep updates,
/// drops below `tol`.
pub fn weak_geodesic(
    problem: &GeodesicProblem,
    init: Initialization,
    opts: &SolverOptions,
) -> Result<GeodesicResult> {
    problem.validate()?;
    opts.validate()?;
    let grid = problem.f0.grid();
    let start = match problem.coarse().filter(|_| opts.nested) {
        Some(cp) => {
            let c = weak_geodesic(&cp, init, opts)?;
            let mut p = prolong(&c.phi, grid, problem.nt);
            let m = grid.len();
            p.values[..m].copy_from_slice(problem.f0.values());
            p.values[problem.nt * m..].copy_from_slice(problem.f1.values());
            p
        }
        None => problem.initial(init),
    };
    solve(problem, start, opts)
}

fn solve(problem: &GeodesicProblem, start: GeodesicField, opts: &SolverOptions) -> Result<GeodesicResult> {
    let grid = problem.f0.grid();
    let (n, nt, m) = (grid.nodes(), problem.nt, grid.len());
    let q = problem.alpha.q_field(grid);
    let circ = circles(problem.alpha.beta().d1, grid.h());
    let mut v = start.values;
    for j in 0..=nt {
        for i in 0..m {
            v[j * m + i] += q.value(i);
        }
    }
    let mask = (n - 1) as isize;
    let omega = opts.omega;
    let window = 10;
    let mut history: Vec<f64> = Vec::new();
    let mut residual = f64::INFINITY;
    for sweep in 1..=opts.max_iter {
        let mut worst = 0.0f64;
        for j in 1..nt {
            for y in 0..n as isize {
                for x in 0..n as isize {
                    let idx = j * m + (x + n as isize * y) as usize;
                    let old = v[idx];
                    let mut best = f64::INFINITY;
                    for c in &circ {
                        if c.reach > j.min(nt - j) {
                            continue;
                        }
                        let mut s = 0.0;
                        for &(dt, dx, dy) in &c.points {
                            let jj = (j as isize + dt) as usize;
                            let xx = (x + dx) & mask;
                            let yy = (y + dy) & mask;
                            s += v[jj * m + (xx + n as isize * yy) as usize];
                        }
                        let val = (s + 4.0 * c.shift) / (4 - c.self_hits) as f64;
                        best = best.min(val);
                    }
                    let new = old + omega * (best - old);
                    worst = worst.max((new - old).abs());
                    v[idx] = new;
                }
            }
        }
        residual = worst;
        history.push(worst);
        if history.len() > window && worst < opts.tol {
            let prev = history[history.len() - 1 - window];
            let rho = (worst / prev).powf(1.0 / window as f64);
            let est = if rho < 1.0 { worst * rho / (1.0 - rho) } else { f64::INFINITY };
            if est < opts.tol || worst == 0.0 {
                for j in 0..=nt {
                    for i in 0..m {
                        v[j * m + i] -= q.value(i);
                    }
                }
                let phi = GeodesicField { grid, nt, values: v };
                let report = diagnose(problem, &phi)?;
                return Ok(GeodesicResult { phi, iterations: sweep, residual, tol_solve: opts.tol, report });
            }
        }
        if worst == 0.0 {
            history.push(0.0);
        }
    }
    Err(Error::NonConvergence { method: "geodesic Perron iteration", iterations: opts.max_iter, residual })
}

/// Finite-difference diagnostics of a computed geodesic.
pub fn diagnose(problem: &GeodesicProblem, phi: &GeodesicField) -> Result<GeodesicReport> {
    let grid = phi.grid;
    let (n, nt, m) = (grid.nodes(), phi.nt, grid.len());
    let a = problem.alpha.coeff(grid)?;
    let h = grid.h();
    let ht = 1.0 / nt as f64;
    let s0 = phi.slice(0);
    let s1 = phi.slice(nt);
    let boundary_error = s0.sup_distance(&problem.f0).max(s1.sup_distance(&problem.f1));
    let at = |j: usize, i: usize| phi.values[j * m + i];
    let mut eigen_cap = f64::NEG_INFINITY;
    let mut slice_min = f64::INFINITY;
    for j in 0..=nt {
        let hs = a.add(&hessian_fd(&phi.slice(j)));
        for c in hs.coeff() {
            eigen_cap = eigen_cap.max(c.max_eig());
            slice_min = slice_min.min(c.min_eig());
        }
    }
    let mut residuals = Vec::with_capacity((nt - 1) * m);
    let mut min_tt = f64::INFINITY;
    let mut violations = 0;
    for j in 1..nt {
        for i in 0..m {
            let ptt = (at(j + 1, i) - 2.0 * at(j, i) + at(j - 1, i)) / (ht * ht);
            min_tt = min_tt.min(ptt);
            if ptt < -EPS_GRID {
                violations += 1;
            }
            let dx = |j: usize| (at(j, grid.step(i, 0, 1)) - at(j, grid.step(i, 0, -1))) / (2.0 * h);
            let dy = |j: usize| (at(j, grid.step(i, 1, 1)) - at(j, grid.step(i, 1, -1))) / (2.0 * h);
            let ptx = (dx(j + 1) - dx(j - 1)) / (2.0 * ht);
            let pty = (dy(j + 1) - dy(j - 1)) / (2.0 * ht);
            let lap = (0..2)
                .map(|ax| at(j, grid.step(i, ax, 1)) + at(j, grid.step(i, ax, -1)))
                .sum::<f64>()
                - 4.0 * at(j, i);
            let hww = ptt / (4.0 * PI);
            let hzz = a.at(i).d1 + lap / (h * h * 4.0 * PI);
            let hwz2 = (ptx * ptx + pty * pty) / (16.0 * PI * PI);
            residuals.push((2.0 * (hww * hzz - hwz2)).abs());
        }
    }
    let _ = n;
    let interior_ma_max = residuals.iter().cloned().fold(0.0, f64::max);
    residuals.sort_by(f64::total_cmp);
    let interior_ma_median = residuals[residuals.len() / 2];
    Ok(GeodesicReport {
        boundary_error,
        interior_ma_median,
        interior_ma_max,
        eigen_cap,
        slice_min_eigenvalue: slice_min,
        min_t_second_derivative: min_tt,
        convexity_violations: violations,
    })
}

/// Relative spread of `eigen_cap` over results at different resolutions.
pub fn uniform_bound_check(results: &[&GeodesicResult]) -> Result<f64> {
    if results.len() < 2 {
        return Err(Error::Validation("need at least two resolutions".into()));
    }
    let caps: Vec<f64> = results.iter().map(|r| r.report.eigen_cap).collect();
    let max = caps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = caps.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((max - min) / max.abs().max(1e-300))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryContinuity {
    /// Smallest `C` with `|φ(t) − f0| <= C t` on all slices.
    pub c0: f64,
    /// Smallest `C` with `|φ(t) − f1| <= C (1 − t)`.
    pub c1: f64,
}

pub fn boundary_continuity_check(problem: &GeodesicProblem, phi: &GeodesicField) -> BoundaryContinuity {
    let nt = phi.nt;
    let mut c0 = 0.0f64;
    let mut c1 = 0.0f64;
    for j in 1..=nt {
        let t = j as f64 / nt as f64;
        c0 = c0.max(phi.slice(j).sup_distance(&problem.f0) / t);
        let s = phi.slice(nt - j);
        c1 = c1.max(s.sup_distance(&problem.f1) / t);
    }
    BoundaryContinuity { c0, c1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{TrigPoly, TrigTerm};

    fn problem(nodes: usize, f1: TrigPoly, shift: f64) -> GeodesicProblem {
        let g = TorusGrid::new(1, nodes).unwrap();
        let alpha = AlphaForm::scalar(1.0, TrigPoly::zero());
        let f0 = TrigPoly::cosine([1, 1, 0, 0], 0.01).to_field(g);
        GeodesicProblem { f1: f1.to_field(g).add(&f0).affine(1.0, shift), f0, alpha, nt: nodes / 4 }
    }

    #[test]
    fn directions_cover_the_pure_lines() {
        let c = circles(1.0, 0.1);
        let pure_w = c.iter().find(|c| c.self_hits == 2).unwrap();
        assert_eq!(pure_w.points, vec![(1, 0, 0), (-1, 0, 0)]);
        assert!(c.iter().all(|c| c.points.len() + c.self_hits == 4));
    }

    #[test]
    fn shifted_boundary_gives_a_linear_geodesic() {
        let p = problem(32, TrigPoly::zero(), -0.3);
        let r = weak_geodesic(&p, Initialization::LowerBarrier, &SolverOptions::for_dim(1).with_tol(1e-10)).unwrap();
        let exact = GeodesicField::from_fn(p.f0.grid(), p.nt, |t, i| p.f0.value(i) - 0.3 * t);
        assert!(r.phi.sup_distance(&exact) < 1e-6);
        let b = boundary_continuity_check(&p, &r.phi);
        assert!((b.c0 - 0.3).abs() < 1e-5 && (b.c1 - 0.3).abs() < 1e-5);
    }

    #[test]
    fn equal_ends_are_stationary() {
        let p = problem(32, TrigPoly::zero(), 0.0);
        let r = weak_geodesic(&p, Initialization::Linear, &SolverOptions::for_dim(1)).unwrap();
        assert!(r.phi.sup_distance(&GeodesicField::from_fn(p.f0.grid(), p.nt, |_, i| p.f0.value(i))) < 1e-9);
        assert!(boundary_continuity_check(&p, &r.phi).c0 < 1e-8);
    }

    #[test]
    fn both_initializations_agree() {
        let f1 = TrigPoly::new(vec![TrigTerm { k: [1, 0, 0, 0], cos: 0.02, sin: 0.01 }]);
        let p = problem(32, f1, 0.0);
        let o = SolverOptions::for_dim(1).with_tol(1e-9);
        let a = weak_geodesic(&p, Initialization::LowerBarrier, &o).unwrap();
        let b = weak_geodesic(&p, Initialization::Linear, &o).unwrap();
        let d = a.phi.sup_distance(&b.phi);
        assert!(d < 5e-9, "{d:e}");
        assert_eq!(a.report.convexity_violations, 0);
        assert!(a.report.interior_ma_median < 10.0 * EPS_GRID, "{:?}", a.report);
    }

    #[test]
    fn rejects_non_psh_boundary_data() {
        let g = TorusGrid::new(1, 32).unwrap();
        let p = GeodesicProblem {
            alpha: AlphaForm::scalar(1.0, TrigPoly::zero()),
            f0: ScalarField::zeros(g),
            f1: TrigPoly::cosine([1, 0, 0, 0], 1.0).to_field(g),
            nt: 8,
        };
        assert!(matches!(p.validate(), Err(Error::Precondition(_))));
    }
}
