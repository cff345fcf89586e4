//! Monge-Ampère measures of envelopes, volumes, the energy functional and its
//! variational principle, and Hessian-boundedness diagnostics.

use serde::{Deserialize, Serialize};

use crate::envelope::{dilate, envelope_disc_average, envelope_obstacle_1d, EnvelopeResult, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::{
    hessian_fd, integrate, ma_density, quadrature::pairwise_sum, AlphaForm, Herm, HermitianField,
    ScalarField, TorusGrid,
};

/// Declared discretization tolerance for densities (per unit volume).
pub const EPS_GRID: f64 = 1e-3;

/// Width, in nodes, of the dilation of the contact set used to separate the
/// free-boundary layer from the genuinely off-contact region.
pub const BOUNDARY_LAYER_NODES: usize = 2;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MAReport {
    pub total_mass: f64,
    pub contact_mass: f64,
    pub off_contact_mass: f64,
    /// Mass outside the contact set dilated by two nodes.
    pub off_dilated_mass: f64,
    /// Largest density on the complement of the dilated contact set.
    pub off_dilated_density_sup: f64,
    /// `∫_D α^n` over the same contact mask.
    pub alpha_contact_mass: f64,
    pub contact_fraction: f64,
    #[serde(skip)]
    pub density: Option<ScalarField>,
}

fn masked_sum(values: &[f64], mask: impl Fn(usize) -> bool, cell: f64) -> f64 {
    let terms: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| if mask(i) { v } else { 0.0 })
        .collect();
    pairwise_sum(&terms) * cell
}

/// `MA_α(φ) = (α + dd^c φ)^n` with its split over the contact mask.
/// Nodes in `exclude` (and nodes flagged by the Hessian) carry no density.
pub fn ma_measure(
    alpha: &AlphaForm,
    phi: &ScalarField,
    contact: &[bool],
    exclude: Option<&[bool]>,
) -> Result<MAReport> {
    let g = phi.grid();
    if contact.len() != g.len() {
        return Err(Error::Validation("contact mask has the wrong length".into()));
    }
    let a = alpha.coeff(g)?;
    let h = a.add(&hessian_fd(phi));
    let mut density = ma_density(&h);
    let dead = |i: usize| h.flagged()[i] || exclude.is_some_and(|e| e[i]);
    for i in 0..g.len() {
        if dead(i) {
            density.values_mut()[i] = 0.0;
        }
    }
    let alpha_density = ma_density(&a);
    let cell = g.cell_volume();
    let d = density.values();
    let total_mass = masked_sum(d, |_| true, cell);
    let contact_mass = masked_sum(d, |i| contact[i], cell);
    let wide = dilate(g, contact, BOUNDARY_LAYER_NODES);
    let off_dilated_mass = masked_sum(d, |i| !wide[i], cell);
    let off_dilated_density_sup = (0..g.len())
        .filter(|&i| !wide[i])
        .map(|i| d[i])
        .fold(0.0, f64::max);
    let alpha_contact_mass = masked_sum(alpha_density.values(), |i| contact[i] && !dead(i), cell);
    Ok(MAReport {
        total_mass,
        contact_mass,
        off_contact_mass: total_mass - contact_mass,
        off_dilated_mass,
        off_dilated_density_sup,
        alpha_contact_mass,
        contact_fraction: contact.iter().filter(|&&c| c).count() as f64 / g.len() as f64,
        density: Some(density),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeReport {
    /// `∫_D MA_α(φ)`.
    pub volume: f64,
    /// `∫_D α^n` by the node rule on the contact mask.
    pub alpha_on_contact: f64,
    pub class_mass: f64,
    pub contact_fraction: f64,
    pub iterations: usize,
}

/// Solves the envelope and integrates its Monge-Ampère measure over the
/// contact set. Dimension one uses the obstacle solver, dimension two the
/// disc-average iteration.
pub fn volume(alpha: &AlphaForm, grid: TorusGrid, opts: &SolverOptions) -> Result<VolumeReport> {
    let env = solve_envelope(alpha, grid, opts)?;
    volume_of(alpha, &env)
}

pub fn solve_envelope(alpha: &AlphaForm, grid: TorusGrid, opts: &SolverOptions) -> Result<EnvelopeResult> {
    alpha.check_grid(grid)?;
    let mass = alpha.class_mass();
    if mass < 0.0 {
        return Err(Error::NotPseudoEffective { mass });
    }
    if grid.n() == 1 {
        envelope_obstacle_1d(alpha, grid, opts)
    } else {
        envelope_disc_average(alpha, &ScalarField::zeros(grid), opts)
    }
}

pub fn volume_of(alpha: &AlphaForm, env: &EnvelopeResult) -> Result<VolumeReport> {
    let rep = ma_measure(alpha, &env.phi, &env.contact, None)?;
    Ok(VolumeReport {
        volume: rep.contact_mass,
        alpha_on_contact: rep.alpha_contact_mass,
        class_mass: alpha.class_mass(),
        contact_fraction: rep.contact_fraction,
        iterations: env.iterations,
    })
}

/// Node densities of `(α + dd^c ψ)^j ∧ α^{n-j}` for `j = 0..=n`.
fn mixed_densities(a: &HermitianField, h: &HermitianField) -> Vec<Vec<f64>> {
    let n = a.grid().n();
    let len = a.grid().len();
    let mut out = vec![Vec::with_capacity(len); n + 1];
    for i in 0..len {
        let ai = a.at(i);
        let bi = ai.add(h.at(i));
        if n == 1 {
            out[0].push(ai.d1);
            out[1].push(bi.d1);
        } else {
            out[0].push(ai.mixed(&ai));
            out[1].push(bi.mixed(&ai));
            out[2].push(bi.mixed(&bi));
        }
    }
    out
}

/// `E[ψ] = (1/(n+1)) Σ_j ∫ ψ (α + dd^c ψ)^j ∧ α^{n-j}`.
pub fn energy(alpha: &AlphaForm, psi: &ScalarField) -> Result<f64> {
    let g = psi.grid();
    let a = alpha.coeff(g)?;
    let h = hessian_fd(psi);
    let dens = mixed_densities(&a, &h);
    let n = g.n();
    let terms: Vec<f64> = (0..g.len())
        .map(|i| psi.value(i) * dens.iter().map(|d| d[i]).sum::<f64>())
        .collect();
    Ok(pairwise_sum(&terms) * g.cell_volume() / (n + 1) as f64)
}

/// Exact first variation of the discrete energy in the direction `v`.
pub fn energy_variation(alpha: &AlphaForm, psi: &ScalarField, v: &ScalarField) -> Result<f64> {
    let g = psi.grid();
    let a = alpha.coeff(g)?;
    let h = hessian_fd(psi);
    let hv = hessian_fd(v);
    let dens = mixed_densities(&a, &h);
    let n = g.n();
    let terms: Vec<f64> = (0..g.len())
        .map(|i| {
            let p: f64 = dens.iter().map(|d| d[i]).sum();
            let (ai, bi, ci) = (a.at(i), a.at(i).add(h.at(i)), hv.at(i));
            let dp = if n == 1 { ci.d1 } else { ci.mixed(&ai) + 2.0 * bi.mixed(&ci) };
            v.value(i) * p + psi.value(i) * dp
        })
        .collect();
    Ok(pairwise_sum(&terms) * g.cell_volume() / (n + 1) as f64)
}

/// `∫ v · MA_α(ψ)`.
pub fn pairing_with_ma(alpha: &AlphaForm, psi: &ScalarField, v: &ScalarField) -> Result<f64> {
    let g = psi.grid();
    let dens = ma_density(&alpha.coeff(g)?.add(&hessian_fd(psi)));
    integrate(&dens, Some(v))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub steps: Vec<f64>,
    pub central_differences: Vec<f64>,
    /// Exact first variation of the discrete energy.
    pub variation: f64,
    /// `∫ v · MA_α(ψ)`.
    pub ma_pairing: f64,
    /// `|central difference − variation|` per step.
    pub errors: Vec<f64>,
}

impl DerivativeCheck {
    /// Error ratio between consecutive steps (4 for second-order convergence).
    pub fn ratios(&self) -> Vec<f64> {
        self.errors.windows(2).map(|w| w[0] / w[1]).collect()
    }

    /// Relative gap between the discrete first variation and `∫ v MA`.
    pub fn consistency_defect(&self) -> f64 {
        (self.variation - self.ma_pairing).abs() / self.ma_pairing.abs().max(1e-300)
    }
}

/// Central differences `(E[ψ+sv] − E[ψ−sv]) / 2s` for the given steps.
pub fn energy_derivative_check(
    alpha: &AlphaForm,
    psi: &ScalarField,
    v: &ScalarField,
    steps: &[f64],
) -> Result<DerivativeCheck> {
    let variation = energy_variation(alpha, psi, v)?;
    let ma_pairing = pairing_with_ma(alpha, psi, v)?;
    let mut central = Vec::with_capacity(steps.len());
    for &s in steps {
        let plus = energy(alpha, &psi.add(&v.affine(s, 0.0)))?;
        let minus = energy(alpha, &psi.add(&v.affine(-s, 0.0)))?;
        central.push((plus - minus) / (2.0 * s));
    }
    let errors = central.iter().map(|c| (c - variation).abs()).collect();
    Ok(DerivativeCheck { steps: steps.to_vec(), central_differences: central, variation, ma_pairing, errors })
}

/// `F[ψ] = E[ψ] − ∫ ψ MA_α(ψ)`.
pub fn variational_functional(alpha: &AlphaForm, psi: &ScalarField) -> Result<f64> {
    Ok(energy(alpha, psi)? - pairing_with_ma(alpha, psi, psi)?)
}

/// `F[ψ] − F[φ]`.
pub fn variational_gap(alpha: &AlphaForm, psi: &ScalarField, phi_env: &ScalarField) -> Result<f64> {
    Ok(variational_functional(alpha, psi)? - variational_functional(alpha, phi_env)?)
}

/// Sup-norm distance between two fields modulo additive constants.
pub fn distance_mod_constants(a: &ScalarField, b: &ScalarField) -> f64 {
    let d = a.sub(b);
    0.5 * (d.max() - d.min())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityReport {
    pub nodes: Vec<usize>,
    /// `sup_x |dd^c φ(x)|` (spectral norm of the coefficient) per resolution.
    pub sup_hessian: Vec<f64>,
    /// Ratios between consecutive resolutions.
    pub growth: Vec<f64>,
    /// `(max − min) / max` over resolutions.
    pub variation: f64,
}

pub fn sup_hessian(phi: &ScalarField) -> f64 {
    let h = hessian_fd(phi);
    h.coeff()
        .iter()
        .zip(h.flagged())
        .filter(|(_, &f)| !f)
        .map(|(c, _)| Herm::norm(c))
        .fold(0.0, f64::max)
}

/// Hessian sup norms of the same object computed at several resolutions.
pub fn regularity_profile(phis: &[ScalarField]) -> Result<RegularityReport> {
    if phis.len() < 2 {
        return Err(Error::Validation("need at least two resolutions".into()));
    }
    let sup: Vec<f64> = phis.iter().map(sup_hessian).collect();
    let growth = sup.windows(2).map(|w| w[1] / w[0]).collect();
    let max = sup.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = sup.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(RegularityReport {
        nodes: phis.iter().map(|p| p.grid().nodes()).collect(),
        variation: if max > 0.0 { (max - min) / max } else { 0.0 },
        sup_hessian: sup,
        growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{candidate_generator, CandidateOptions};
    use crate::geometry::{TrigPoly, TrigTerm};
    use std::f64::consts::PI;

    fn mixed(lambda: f64) -> AlphaForm {
        AlphaForm::scalar(lambda, TrigPoly::cosine([1, 0, 0, 0], -1.0 / PI))
    }

    #[test]
    fn constant_form_has_all_mass_on_contact() {
        let g = TorusGrid::new(1, 16).unwrap();
        let alpha = AlphaForm::scalar(0.7, TrigPoly::zero());
        let r = ma_measure(&alpha, &ScalarField::zeros(g), &vec![true; g.len()], None).unwrap();
        assert!((r.total_mass - 0.7).abs() < 1e-14 && r.off_contact_mass.abs() < 1e-14);
        let v = volume(&alpha, g, &SolverOptions::for_dim(1)).unwrap();
        assert!((v.volume - 0.7).abs() < 1e-14);
    }

    #[test]
    fn energy_of_constants() {
        let g = TorusGrid::new(1, 16).unwrap();
        let e = energy(&mixed(0.3), &ScalarField::constant(g, -2.0)).unwrap();
        assert!((e + 0.6).abs() < 1e-13);
        let g2 = TorusGrid::new(2, 8).unwrap();
        let a2 = AlphaForm::new(Herm::two(1.0, 2.0, num_complex::Complex64::new(0.3, 0.1)), TrigPoly::zero());
        let e2 = energy(&a2, &ScalarField::constant(g2, 1.5)).unwrap();
        assert!((e2 - 1.5 * a2.class_mass()).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_energy_derivative_is_exact() {
        let g = TorusGrid::new(1, 32).unwrap();
        let alpha = mixed(0.5);
        let psi = TrigPoly::cosine([1, 1, 0, 0], 0.02).to_field(g);
        let v = TrigPoly::new(vec![TrigTerm { k: [0, 1, 0, 0], cos: 0.3, sin: 0.1 }]).to_field(g);
        let c = energy_derivative_check(&alpha, &psi, &v, &[1e-2, 5e-3]).unwrap();
        assert!((c.variation - c.ma_pairing).abs() < 1e-14);
        assert!(c.errors.iter().all(|e| *e < 1e-13));
    }

    #[test]
    fn two_dimensional_energy_derivative_is_second_order() {
        let g = TorusGrid::new(2, 8).unwrap();
        let alpha = AlphaForm::new(Herm::identity(2), TrigPoly::cosine([1, 0, 0, 0], 0.05));
        let psi = TrigPoly::new(vec![
            TrigTerm { k: [1, 0, 1, 1], cos: 0.02, sin: 0.01 },
            TrigTerm { k: [0, 1, 1, 0], cos: 0.01, sin: 0.0 },
        ])
        .to_field(g);
        let v = TrigPoly::new(vec![
            TrigTerm { k: [1, 0, 1, 1], cos: 0.3, sin: -0.2 },
            TrigTerm { k: [0, 1, 1, 0], cos: 0.0, sin: 0.4 },
            TrigTerm { k: [1, 0, 0, 0], cos: 0.2, sin: 0.0 },
            TrigTerm { k: [1, 1, 1, 0], cos: 0.1, sin: 0.1 },
            TrigTerm { k: [0, 0, 1, 0], cos: 0.1, sin: 0.0 },
        ])
        .to_field(g);
        let c = energy_derivative_check(&alpha, &psi, &v, &[1e-2, 5e-3]).unwrap();
        assert!(c.variation.abs() > 1e-4, "{c:?}");
        let r = c.ratios()[0];
        assert!((r - 4.0).abs() < 1e-3, "{c:?}");
        assert!(c.consistency_defect() < 1e-10, "{c:?}");
    }

    #[test]
    fn gap_is_shift_invariant_and_nonnegative() {
        let g = TorusGrid::new(1, 64).unwrap();
        let alpha = mixed(0.3);
        let env = envelope_obstacle_1d(&alpha, g, &SolverOptions::for_dim(1).with_tol(1e-12)).unwrap();
        let f0 = variational_functional(&alpha, &env.phi).unwrap();
        let f1 = variational_functional(&alpha, &env.phi.affine(1.0, -0.25)).unwrap();
        assert!((f0 - f1).abs() < 1e-12);
        for c in candidate_generator(&alpha, g, 3, 10, &CandidateOptions::default()).unwrap() {
            let gap = variational_gap(&alpha, &c.field, &env.phi).unwrap();
            assert!(gap >= -1e-6, "{gap}");
            if distance_mod_constants(&c.field, &env.phi) > 1e-2 {
                assert!(gap > 1e-4, "{gap}");
            }
        }
    }

    #[test]
    fn kink_control_grows_with_resolution() {
        let fields: Vec<ScalarField> = [64, 128, 256]
            .iter()
            .map(|&n| ScalarField::from_fn(TorusGrid::new(1, n).unwrap(), |x| -(PI * x[0]).sin().abs()))
            .collect();
        let r = regularity_profile(&fields).unwrap();
        assert!(r.growth.iter().all(|&g| g > 1.8), "{r:?}");
    }
}
