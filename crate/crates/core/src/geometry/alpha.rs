use serde::{Deserialize, Serialize};

use super::field::ScalarField;
use super::grid::TorusGrid;
use super::herm::{Herm, HermitianField};
use super::ops::{hessian_fd, min_eigenvalue};
use super::trig::TrigPoly;
use crate::error::{Error, Result};

/// A smooth closed real (1,1)-form `α = β + dd^c q` on the torus, with `β`
/// constant and `q` a periodic trigonometric polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaForm {
    pub beta: HermSpec,
    pub q: TrigPoly,
    pub strict: Option<StrictPair>,
}

/// Serializable constant Hermitian matrix (`off` = upper off-diagonal entry).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermSpec {
    pub n: usize,
    pub d1: f64,
    pub d2: f64,
    pub off_re: f64,
    pub off_im: f64,
}

impl From<Herm> for HermSpec {
    fn from(h: Herm) -> Self {
        Self { n: h.n, d1: h.d1, d2: h.d2, off_re: h.off.re, off_im: h.off.im }
    }
}

impl From<HermSpec> for Herm {
    fn from(s: HermSpec) -> Self {
        if s.n == 1 {
            Herm::scalar(s.d1)
        } else {
            Herm::two(s.d1, s.d2, num_complex::Complex64::new(s.off_re, s.off_im))
        }
    }
}

/// Potential `psi0` with `α + dd^c psi0 >= eps0 ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrictPair {
    pub psi0: TrigPoly,
    pub eps0: f64,
}

impl AlphaForm {
    pub fn new(beta: Herm, q: TrigPoly) -> Self {
        Self { beta: beta.into(), q, strict: None }
    }

    /// `a(z) ω` in dimension one with `a = lambda + dd^c q`.
    pub fn scalar(lambda: f64, q: TrigPoly) -> Self {
        Self::new(Herm::scalar(lambda), q)
    }

    pub fn with_strict(mut self, psi0: TrigPoly, eps0: f64) -> Self {
        self.strict = Some(StrictPair { psi0, eps0 });
        self
    }

    pub fn n(&self) -> usize {
        self.beta.n
    }

    pub fn beta(&self) -> Herm {
        self.beta.into()
    }

    /// `∫_X α^n`; the exact part `dd^c q` contributes nothing.
    pub fn class_mass(&self) -> f64 {
        let fact = if self.n() == 1 { 1.0 } else { 2.0 };
        fact * self.beta().det()
    }

    pub fn q_field(&self, grid: TorusGrid) -> ScalarField {
        self.q.to_field(grid)
    }

    /// Discrete coefficient field `β + hessian_fd(q)`; its trace integrates to
    /// `tr β` exactly, so discrete class masses match the continuum ones.
    pub fn coeff(&self, grid: TorusGrid) -> Result<HermitianField> {
        self.check_grid(grid)?;
        Ok(hessian_fd(&self.q_field(grid)).add_constant(self.beta()))
    }

    /// Exact coefficient at a point.
    pub fn coeff_at(&self, x: &[f64]) -> Herm {
        self.beta().add(self.q.ddc(self.n(), x))
    }

    pub fn check_grid(&self, grid: TorusGrid) -> Result<()> {
        if grid.n() != self.n() {
            return Err(Error::Validation(format!(
                "form has dimension {} but grid has dimension {}",
                self.n(),
                grid.n()
            )));
        }
        Ok(())
    }

    /// Worst violation of `α + dd^c psi0 >= eps0 ω` over the grid (0 if none,
    /// or if no strict pair is declared).
    pub fn strict_violation(&self, grid: TorusGrid) -> Result<f64> {
        let Some(s) = &self.strict else { return Ok(0.0) };
        let h = self.coeff(grid)?.add(&hessian_fd(&s.psi0.to_field(grid)));
        let m = min_eigenvalue(&h);
        Ok(m.values().iter().map(|v| (s.eps0 - v).max(0.0)).fold(0.0, f64::max))
    }

    /// `α + ε ω`.
    pub fn plus_kahler(&self, eps: f64) -> Self {
        let mut out = self.clone();
        out.beta = self.beta().add(Herm::identity(self.n()).scale(eps)).into();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::integrate;

    #[test]
    fn class_mass_ignores_exact_part() {
        let g = TorusGrid::new(1, 64).unwrap();
        let a = AlphaForm::scalar(0.3, TrigPoly::cosine([1, 0, 0, 0], 1.0 / std::f64::consts::PI));
        let tr = a.coeff(g).unwrap().map_scalar(|h| h.trace());
        assert!((integrate(&tr, None).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(a.class_mass(), 0.3);
    }

    #[test]
    fn two_dimensional_mass() {
        let a = AlphaForm::new(Herm::two(1.0, 2.0, num_complex::Complex64::new(0.5, 0.0)), TrigPoly::zero());
        assert!((a.class_mass() - 2.0 * 1.75).abs() < 1e-15);
    }

    #[test]
    fn strict_pair_check() {
        let g = TorusGrid::new(1, 32).unwrap();
        let a = AlphaForm::scalar(1.0, TrigPoly::zero()).with_strict(TrigPoly::zero(), 0.5);
        assert_eq!(a.strict_violation(g).unwrap(), 0.0);
        let b = AlphaForm::scalar(1.0, TrigPoly::zero()).with_strict(TrigPoly::zero(), 1.5);
        assert!((b.strict_violation(g).unwrap() - 0.5).abs() < 1e-15);
    }
}
