//! Convolution regularization `ρ_t`, the slope `λ(z,t)` and the
//! Kiselman-Legendre transform `ψ_{c,δ}` on flat tori (where the holomorphic
//! exponential map is plain translation).

mod kernel;
mod kiselman;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use kernel::{chi_profile, SmoothingKernel, ANGULAR_ORDER, RADIAL_ORDER};
pub use kiselman::{
    hessian_floor_check, kiselman_transform, kiselman_transform_trig, FloorReport, KiselmanResult,
    DENSE_PER_LOG_UNIT,
};

use crate::error::{Error, Result};
use crate::geometry::{AlphaForm, Sampler, ScalarField, TorusGrid, TrigPoly};

pub const DEFAULT_DELTA0: f64 = 0.25;
pub const T_GRID_LEN: usize = 32;
pub const T_GRID_SPAN: f64 = 256.0;

/// Parameters of the regularization. `a` is the curvature bound of the
/// manifold (zero on a flat torus).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizationParams {
    pub k: f64,
    pub a: f64,
    pub delta0: f64,
    pub t_grid: Vec<f64>,
    pub c: f64,
    pub delta: f64,
}

impl RegularizationParams {
    pub fn new(k: f64, c: f64, delta: f64) -> Result<Self> {
        let p = Self {
            k,
            a: 0.0,
            delta0: DEFAULT_DELTA0,
            t_grid: log_spaced(DEFAULT_DELTA0 / T_GRID_SPAN, DEFAULT_DELTA0, T_GRID_LEN),
            c,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k >= 0.0 && self.a >= 0.0) {
            return Err(Error::Validation("K and A must be nonnegative".into()));
        }
        if self.t_grid.is_empty() || self.t_grid[0] <= 0.0 {
            return Err(Error::Validation("t_grid must be positive".into()));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("t_grid must be strictly increasing".into()));
        }
        if *self.t_grid.last().unwrap() > self.delta0 * (1.0 + 1e-12) {
            return Err(Error::Validation("t_grid exceeds delta0".into()));
        }
        if !(self.delta > 0.0 && self.delta <= self.delta0) {
            return Err(Error::Validation(format!(
                "delta = {} must lie in (0, delta0 = {}]",
                self.delta, self.delta0
            )));
        }
        if !(self.c > 0.0) {
            return Err(Error::Validation("c must be positive".into()));
        }
        Ok(())
    }

    /// `B = 2A / ε0`.
    pub fn b(&self, eps0: f64) -> f64 {
        2.0 * self.a / eps0
    }

    /// Radii of the table used for `ψ_{c,δ}`: `t_grid ∩ (0,δ]`, plus `δ`.
    pub fn radii_up_to_delta(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self
            .t_grid
            .iter()
            .copied()
            .filter(|&t| t < self.delta * (1.0 - 1e-12))
            .collect();
        t.push(self.delta);
        t
    }
}

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// `K = sup_x |coeff(α)(x)| + 1`, the spectral norm taken node-wise on the
/// discrete coefficient.
pub fn estimate_k(alpha: &AlphaForm, grid: TorusGrid) -> Result<f64> {
    let c = alpha.coeff(grid)?;
    Ok(c.coeff().iter().map(|h| h.norm()).fold(0.0, f64::max) + 1.0)
}

/// Something that can be averaged against the kernel.
pub trait Smoothable: Sync {
    fn rho_at(&self, kernel: &SmoothingKernel, x: &[f64], t: f64) -> f64;
}

impl Smoothable for ScalarField {
    /// Interpolated samples (pole-aware near declared poles).
    fn rho_at(&self, kernel: &SmoothingKernel, x: &[f64], t: f64) -> f64 {
        let dim = self.grid().real_dim();
        let mut y = [0.0; 4];
        let mut acc = 0.0;
        for (p, w) in kernel.points().iter().zip(kernel.weights()) {
            for a in 0..dim {
                y[a] = x[a] + t * p[a];
            }
            acc += w * self.sample(&y[..dim]);
        }
        acc
    }
}

impl Smoothable for TrigPoly {
    /// Exact: each mode is scaled by the kernel multiplier.
    fn rho_at(&self, kernel: &SmoothingKernel, x: &[f64], t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                let m = kernel.multiplier(&term.k, t).0;
                m * TrigPoly::new(vec![*term]).eval(x)
            })
            .sum()
    }
}

/// `ρ_t ψ(z) = ∫ ψ(z + tζ) χ(|ζ|^2) dV(ζ)` at every node.
pub fn rho(psi: &ScalarField, t: f64, kernel: &SmoothingKernel) -> Result<ScalarField> {
    check_radius(t)?;
    check_kernel(psi.grid(), kernel)?;
    let g = psi.grid();
    let values: Vec<f64> = (0..g.len())
        .into_par_iter()
        .map(|i| psi.rho_at(kernel, &g.point(i), t))
        .collect();
    ScalarField::from_values(g, values)
}

/// `ρ_t` applied to a trigonometric polynomial, again a trigonometric polynomial.
pub fn rho_trig(psi: &TrigPoly, t: f64, kernel: &SmoothingKernel) -> Result<TrigPoly> {
    check_radius(t)?;
    Ok(psi.filtered(|k| kernel.multiplier(k, t).0))
}

fn check_radius(t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::Validation(format!("radius t = {t} must be positive")));
    }
    Ok(())
}

fn check_kernel(grid: TorusGrid, kernel: &SmoothingKernel) -> Result<()> {
    if grid.n() != kernel.n() {
        return Err(Error::Validation("kernel and grid dimensions differ".into()));
    }
    Ok(())
}

/// Values of `t ↦ ρ_t ψ(z) + K t^2` on `t_grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneTable {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest drop between consecutive radii (0 when nondecreasing).
    pub max_decrease: f64,
}

impl MonotoneTable {
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.max_decrease <= tol
    }
}

pub fn monotone_transform(
    psi: &impl Smoothable,
    x: &[f64],
    params: &RegularizationParams,
    kernel: &SmoothingKernel,
) -> MonotoneTable {
    let t = params.t_grid.clone();
    let values: Vec<f64> = t
        .iter()
        .map(|&t| psi.rho_at(kernel, x, t) + params.k * t * t)
        .collect();
    let max_decrease = values.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    MonotoneTable { t, values, max_decrease }
}

/// Finite-difference slope in `log t` at one entry of the table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slope {
    pub value: f64,
    /// True at the ends of the table, where a one-sided difference is used.
    pub one_sided: bool,
}

pub fn lambda_slope(table: &MonotoneTable, i: usize) -> Result<Slope> {
    let m = table.t.len();
    if m < 2 || i >= m {
        return Err(Error::Validation("slope needs two radii and a valid index".into()));
    }
    let (lo, hi) = (i.saturating_sub(1), (i + 1).min(m - 1));
    let value = (table.values[hi] - table.values[lo]) / (table.t[hi].ln() - table.t[lo].ln());
    Ok(Slope {
        value,
        one_sided: lo == i || hi == i,
    })
}

/// Lelong estimate from the slope at the smallest radius `>= min_radius`.
///
/// The slope `λ` is taken per unit of `log t`; a potential `c log|z-a|^2` has
/// `λ → 2c` at `a`, so `λ/2` is the coefficient of `log|z-a|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LelongEstimate {
    pub radius: f64,
    pub lambda: f64,
    pub log_coefficient: f64,
}

pub fn lelong_estimate(
    psi: &impl Smoothable,
    x: &[f64],
    params: &RegularizationParams,
    kernel: &SmoothingKernel,
    min_radius: f64,
) -> Result<LelongEstimate> {
    let table = monotone_transform(psi, x, params, kernel);
    let i = table
        .t
        .iter()
        .position(|&t| t >= min_radius)
        .ok_or_else(|| Error::Validation("min_radius exceeds the table".into()))?
        .max(1)
        .min(table.t.len() - 2);
    let s = lambda_slope(&table, i)?;
    Ok(LelongEstimate {
        radius: table.t[i],
        lambda: s.value,
        log_coefficient: s.value / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TrigTerm;
    use std::f64::consts::PI;

    fn params(k: f64) -> RegularizationParams {
        RegularizationParams::new(k, 1.0, 0.25).unwrap()
    }

    #[test]
    fn t_grid_shape() {
        let p = params(0.0);
        assert_eq!(p.t_grid.len(), 32);
        assert!((p.t_grid[0] - 0.25 / 256.0).abs() < 1e-15);
        assert_eq!(*p.t_grid.last().unwrap(), 0.25);
        assert!(RegularizationParams::new(0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn constants_are_fixed() {
        let g = TorusGrid::new(1, 16).unwrap();
        let kern = SmoothingKernel::new(1);
        let r = rho(&ScalarField::constant(g, 2.5), 0.1, &kern).unwrap();
        assert!(r.values().iter().all(|v| (v - 2.5).abs() < 1e-13));
        assert!(rho(&ScalarField::constant(g, 2.5), 0.0, &kern).is_err());
    }

    #[test]
    fn cosine_is_damped_by_a_nonincreasing_factor() {
        // oracle: m(t) = 2π C ∫ χ0(r^2) J0(2π t r) r dr by a 2-D product rule
        let kern = SmoothingKernel::new(1);
        let c1 = std::f64::consts::E / PI;
        let oracle = |t: f64| {
            let (x, w) = crate::geometry::quadrature::gauss_legendre_unit(200);
            let mut acc = 0.0;
            for (xi, wi) in x.iter().zip(&w) {
                for (yi, wj) in x.iter().zip(&w) {
                    let (u, v) = (2.0 * xi - 1.0, 2.0 * yi - 1.0);
                    acc += 4.0 * wi * wj * c1 * chi_profile(u * u + v * v) * (2.0 * PI * t * u).cos();
                }
            }
            acc
        };
        let g = TorusGrid::new(1, 64).unwrap();
        let psi = ScalarField::from_fn(g, |x| (2.0 * PI * x[0]).cos());
        let mut prev = 1.0;
        for t in [0.02, 0.05, 0.1, 0.2] {
            let m = kern.multiplier(&[1, 0, 0, 0], t).0;
            assert!((m - oracle(t)).abs() < 1e-6, "t={t}: {m} vs {}", oracle(t));
            assert!(m > 0.0 && m <= prev);
            prev = m;
            let r = rho(&psi, t, &kern).unwrap();
            // bilinear interpolation adds an O(h^2) error
            let err = (0..g.len())
                .map(|i| (r.value(i) - m * psi.value(i)).abs())
                .fold(0.0, f64::max);
            assert!(err < 2e-3, "t={t}: {err}");
        }
    }

    #[test]
    fn trig_and_field_paths_agree() {
        let kern = SmoothingKernel::new(1);
        let p = TrigPoly::new(vec![TrigTerm { k: [1, 2, 0, 0], cos: 0.4, sin: -0.3 }]);
        let g = TorusGrid::new(1, 256).unwrap();
        let f = p.to_field(g);
        let x = [0.3, 0.7];
        let a = p.rho_at(&kern, &x, 0.07);
        let b = f.rho_at(&kern, &x, 0.07);
        assert!((a - b).abs() < 1e-3);
        let via_poly = rho_trig(&p, 0.07, &kern).unwrap().eval(&x);
        assert!((a - via_poly).abs() < 1e-14);
    }

    #[test]
    fn zero_potential_gives_k_t_squared() {
        let kern = SmoothingKernel::new(1);
        let tab = monotone_transform(&TrigPoly::zero(), &[0.0, 0.0], &params(3.0), &kern);
        for (t, v) in tab.t.iter().zip(&tab.values) {
            assert!((v - 3.0 * t * t).abs() < 1e-15);
        }
        assert!(tab.values.windows(2).all(|w| w[1] > w[0]));
        let s = lambda_slope(&tab, 0).unwrap();
        assert!(s.one_sided && s.value.abs() < 1e-4);
    }

    #[test]
    fn non_psh_bump_without_compensation_decreases() {
        let kern = SmoothingKernel::new(1);
        let bump = TrigPoly::cosine([1, 0, 0, 0], 5.0);
        let tab = monotone_transform(&bump, &[0.0, 0.0], &params(0.0), &kern);
        assert!(!tab.is_monotone(1e-6));
    }

    #[test]
    fn smooth_potential_has_vanishing_lelong_number() {
        let kern = SmoothingKernel::new(1);
        let p = TrigPoly::new(vec![TrigTerm { k: [1, 1, 0, 0], cos: 0.2, sin: 0.1 }]);
        let tab = monotone_transform(&p, &[0.1, 0.2], &params(2.0), &kern);
        assert!(lambda_slope(&tab, 0).unwrap().value.abs() <= 0.02);
    }

    #[test]
    fn analytic_log_pole_slope() {
        // c log|z-a|^2 with the pole-aware sampler: slope 2c at every radius
        let kern = SmoothingKernel::new(1);
        let g = TorusGrid::new(1, 128).unwrap();
        let a = g.index(&[64, 64]);
        for c in [0.5, 1.0, 2.0] {
            let f = ScalarField::log_distance(g, a, c);
            let est = lelong_estimate(&f, &g.point(a), &params(0.0), &kern, 1e-3).unwrap();
            assert!((est.log_coefficient / c - 1.0).abs() < 1e-3, "{est:?}");
        }
    }
}
