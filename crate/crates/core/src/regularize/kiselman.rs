use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_kernel, RegularizationParams, Smoothable, SmoothingKernel};
use crate::error::{Error, Result};
use crate::geometry::{
    hessian_fd, min_eigenvalue, AlphaForm, LogPole, ScalarField, TorusGrid, TrigPoly, POLE_CLAMP,
};

/// `ψ_{c,δ}` with the minimizing radius at every node.
#[derive(Debug, Clone)]
pub struct KiselmanResult {
    pub field: ScalarField,
    pub t_min: Vec<f64>,
    /// Nodes where the infimum keeps decreasing toward the smallest radius.
    pub unbounded: Vec<bool>,
    /// `λ(z, δ)`, slope of `ρ_t ψ + K t^2` in `log t` at `t = δ`.
    pub lambda_delta: Vec<f64>,
}

impl KiselmanResult {
    /// Fraction of nodes whose infimum is attained at `t = δ`.
    pub fn fraction_at_delta(&self, delta: f64) -> f64 {
        let hits = self.t_min.iter().filter(|&&t| t >= delta * (1.0 - 1e-9)).count();
        hits as f64 / self.t_min.len() as f64
    }
}

/// `ψ_{c,δ}(z) = inf_t ρ_tψ(z) + Kt^2 - Kδ^2 - c log(t/δ)` over the radii
/// `t_grid ∩ (0,δ]`.
///
/// When the minimum sits at the smallest radius and the slope there still
/// exceeds `c`, the infimum over `(0,δ]` is `-∞`; such nodes get the pole
/// clamp and a pole marker with coefficient `(λ - c)/2`.
pub fn kiselman_transform<S: Smoothable>(
    psi: &S,
    g: TorusGrid,
    params: &RegularizationParams,
    kernel: &SmoothingKernel,
) -> Result<KiselmanResult> {
    params.validate()?;
    check_kernel(g, kernel)?;
    let radii = params.radii_up_to_delta();
    if radii.len() < 2 {
        return Err(Error::Validation("need at least two radii below delta".into()));
    }
    let (k, c, delta) = (params.k, params.c, params.delta);
    let per_node: Vec<(f64, f64, bool, f64)> = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let x = g.point(i);
            let big: Vec<f64> = radii
                .iter()
                .map(|&t| psi.rho_at(kernel, &x, t) + k * t * t)
                .collect();
            let mut best = (f64::INFINITY, 0usize);
            for (j, (&t, &v)) in radii.iter().zip(&big).enumerate() {
                let f = v - k * delta * delta - c * (t / delta).ln();
                if f < best.0 {
                    best = (f, j);
                }
            }
            let m = radii.len();
            let lam_delta = (big[m - 1] - big[m - 2]) / (radii[m - 1] / radii[m - 2]).ln();
            let lam0 = (big[1] - big[0]) / (radii[1] / radii[0]).ln();
            let unbounded = best.1 == 0 && lam0 > c;
            (best.0, radii[best.1], unbounded, if unbounded { lam0 } else { lam_delta })
        })
        .collect();
    let mut values = Vec::with_capacity(g.len());
    let mut t_min = Vec::with_capacity(g.len());
    let mut unbounded = Vec::with_capacity(g.len());
    let mut lambda_delta = Vec::with_capacity(g.len());
    let mut poles = Vec::new();
    for (i, &(v, t, u, lam)) in per_node.iter().enumerate() {
        values.push(if u { POLE_CLAMP } else { v });
        t_min.push(t);
        unbounded.push(u);
        lambda_delta.push(lam);
        if u {
            poles.push(LogPole { node: i, coeff: (lam - c) / 2.0 });
        }
    }
    let mut field = ScalarField::from_values(g, values)?;
    for p in poles {
        field = field.with_pole(p);
    }
    Ok(KiselmanResult { field, t_min, unbounded, lambda_delta })
}

/// Dense samples per unit of `log t` used by [`kiselman_transform_trig`].
pub const DENSE_PER_LOG_UNIT: f64 = 92.0;

/// `ψ_{c,δ}` for a trigonometric polynomial, with the infimum taken over the
/// continuous range `[t_grid[0], δ]`.
///
/// Each mode of `ρ_t ψ` is tabulated with its `log t` derivative on a dense
/// grid; the infimand is minimized on the piecewise cubic Hermite
/// interpolant, so the result depends smoothly on `z` where the minimizer does.
pub fn kiselman_transform_trig(
    psi: &TrigPoly,
    grid: TorusGrid,
    params: &RegularizationParams,
    kernel: &SmoothingKernel,
) -> Result<KiselmanResult> {
    params.validate()?;
    check_kernel(grid, kernel)?;
    let (k, c, delta) = (params.k, params.c, params.delta);
    let s0 = params.t_grid[0].ln();
    let s1 = delta.ln();
    if s1 <= s0 {
        return Err(Error::Validation("delta must exceed the smallest radius".into()));
    }
    let dense = (((s1 - s0) * DENSE_PER_LOG_UNIT).ceil() as usize).max(8) + 1;
    let ds = (s1 - s0) / (dense - 1) as f64;
    let s: Vec<f64> = (0..dense).map(|i| s0 + ds * i as f64).collect();

    let mut cache: HashMap<[i32; 4], (Vec<f64>, Vec<f64>)> = HashMap::new();
    for term in &psi.terms {
        cache.entry(term.k).or_insert_with(|| {
            s.iter().map(|&si| kernel.multiplier(&term.k, si.exp())).unzip()
        });
    }
    let tables: Vec<&(Vec<f64>, Vec<f64>)> = psi.terms.iter().map(|t| &cache[&t.k]).collect();
    let base: Vec<(f64, f64)> = s
        .iter()
        .map(|&si| {
            let t2 = (2.0 * si).exp();
            (k * t2 - k * delta * delta - c * (si - s1), 2.0 * k * t2 - c)
        })
        .collect();

    let per_node: Vec<(f64, f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            let modes: Vec<f64> = psi
                .terms
                .iter()
                .map(|t| TrigPoly::new(vec![*t]).eval(&x))
                .collect();
            let eval = |j: usize| {
                let mut f = base[j].0;
                let mut df = base[j].1;
                for (e, tab) in modes.iter().zip(&tables) {
                    f += e * tab.0[j];
                    df += e * tab.1[j];
                }
                (f, df)
            };
            let vals: Vec<(f64, f64)> = (0..dense).map(eval).collect();
            let jmin = (0..dense)
                .min_by(|&a, &b| vals[a].0.total_cmp(&vals[b].0))
                .unwrap();
            let mut best = (vals[jmin].0, s[jmin]);
            for j in [jmin.wrapping_sub(1), jmin] {
                if j + 1 >= dense {
                    continue;
                }
                if let Some((u, f)) = hermite_min(vals[j], vals[j + 1], ds) {
                    if f < best.0 {
                        best = (f, s[j] + u * ds);
                    }
                }
            }
            let lam_delta = vals[dense - 1].1 + c;
            (best.0, best.1.exp(), lam_delta)
        })
        .collect();
    let field = ScalarField::from_values(grid, per_node.iter().map(|p| p.0).collect())?;
    Ok(KiselmanResult {
        field,
        t_min: per_node.iter().map(|p| p.1).collect(),
        unbounded: vec![false; grid.len()],
        lambda_delta: per_node.iter().map(|p| p.2).collect(),
    })
}

/// Minimum over `u ∈ [0,1]` of the cubic Hermite interpolant with values and
/// derivatives (per unit of the original variable) at both ends.
fn hermite_min(a: (f64, f64), b: (f64, f64), h: f64) -> Option<(f64, f64)> {
    let (p0, m0, p1, m1) = (a.0, a.1 * h, b.0, b.1 * h);
    let value = |u: f64| {
        let (u2, u3) = (u * u, u * u * u);
        (2.0 * u3 - 3.0 * u2 + 1.0) * p0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * p1
            + (u3 - u2) * m1
    };
    let qa = 6.0 * p0 + 3.0 * m0 - 6.0 * p1 + 3.0 * m1;
    let qb = -6.0 * p0 - 4.0 * m0 + 6.0 * p1 - 2.0 * m1;
    let qc = m0;
    let mut roots = Vec::with_capacity(2);
    if qa.abs() < 1e-300 {
        if qb != 0.0 {
            roots.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // numerically stable pair
            let q = -0.5 * (qb + qb.signum() * sq);
            if q != 0.0 {
                roots.push(q / qa);
                roots.push(qc / q);
            } else {
                roots.push(0.0);
            }
        }
    }
    roots
        .into_iter()
        .filter(|u| *u > 0.0 && *u < 1.0)
        .map(|u| (u, value(u)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
}

/// Outcome of testing `α + dd^c ψ_{c,δ} >= -(A min(c, λ(z,δ)) + Kδ^2) ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorReport {
    /// Largest amount by which the smallest eigenvalue falls below the floor.
    pub worst_violation: f64,
    pub worst_node: usize,
    pub min_eigenvalue: f64,
    /// Floor at the worst node.
    pub floor: f64,
    pub checked_nodes: usize,
}

pub fn hessian_floor_check(
    result: &KiselmanResult,
    params: &RegularizationParams,
    alpha: &AlphaForm,
) -> Result<FloorReport> {
    let g = result.field.grid();
    let h = alpha.coeff(g)?.add(&hessian_fd(&result.field));
    let eig = min_eigenvalue(&h);
    let kd2 = params.k * params.delta * params.delta;
    let mut report = FloorReport {
        worst_violation: 0.0,
        worst_node: 0,
        min_eigenvalue: f64::INFINITY,
        floor: -kd2,
        checked_nodes: 0,
    };
    let mut worst = f64::NEG_INFINITY;
    for i in 0..g.len() {
        if h.flagged()[i] || result.field.pole_mask()[i] {
            continue;
        }
        report.checked_nodes += 1;
        let floor = -(params.a * params.c.min(result.lambda_delta[i]) + kd2);
        let e = eig.value(i);
        report.min_eigenvalue = report.min_eigenvalue.min(e);
        if floor - e > worst {
            worst = floor - e;
            report.worst_node = i;
            report.floor = floor;
        }
    }
    report.worst_violation = worst.max(0.0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TrigTerm;

    #[test]
    fn hermite_minimum_of_a_parabola() {
        // f(s) = (s - 0.3)^2 sampled at 0 and 1
        let r = hermite_min((0.09, -0.6), (0.49, 1.4), 1.0).unwrap();
        assert!((r.0 - 0.3).abs() < 1e-14 && r.1.abs() < 1e-14);
    }

    #[test]
    fn small_slope_keeps_delta() {
        let kern = SmoothingKernel::new(1);
        let g = TorusGrid::new(1, 32).unwrap();
        let p = TrigPoly::new(vec![TrigTerm { k: [1, 0, 0, 0], cos: 0.05, sin: 0.0 }]);
        let params = RegularizationParams::new(1.0, 1.0, 0.25).unwrap();
        let r = kiselman_transform_trig(&p, g, &params, &kern).unwrap();
        assert!(r.lambda_delta.iter().all(|&l| l <= params.c));
        assert_eq!(r.fraction_at_delta(params.delta), 1.0);
        let rd = super::super::rho_trig(&p, params.delta, &kern).unwrap().to_field(g);
        assert!(r.field.sup_distance(&rd) < 1e-14);
    }

    #[test]
    fn field_and_trig_transforms_agree_on_grid_radii() {
        let kern = SmoothingKernel::new(1);
        let g = TorusGrid::new(1, 64).unwrap();
        let p = TrigPoly::new(vec![TrigTerm { k: [1, 1, 0, 0], cos: 0.3, sin: 0.2 }]);
        let params = RegularizationParams::new(2.0, 0.05, 0.125).unwrap();
        let a = kiselman_transform_trig(&p, g, &params, &kern).unwrap();
        let b = kiselman_transform(&p, g, &params, &kern).unwrap();
        let c = kiselman_transform(&p.to_field(g), g, &params, &kern).unwrap();
        assert!(a.fraction_at_delta(params.delta) < 1.0);
        // the continuous infimum lies below the one over the radii table
        for i in 0..g.len() {
            let (x, y, z) = (a.field.value(i), b.field.value(i), c.field.value(i));
            assert!(x <= y + 1e-12 && y - x < 5e-3, "node {i}: {x} {y}");
            assert!((y - z).abs() < 2e-3, "node {i}: {y} {z}");
        }
    }
}
