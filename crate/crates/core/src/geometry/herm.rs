use num_complex::Complex64;

use super::field::ScalarField;
use super::grid::TorusGrid;

/// Hermitian `n x n` matrix for `n <= 2`: diagonal `(d1, d2)` and the
/// upper off-diagonal entry `off` (the lower one is its conjugate).
/// For `n = 1` only `d1` is meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Herm {
    pub n: usize,
    pub d1: f64,
    pub d2: f64,
    pub off: Complex64,
}

impl Herm {
    pub fn scalar(a: f64) -> Self {
        Self {
            n: 1,
            d1: a,
            d2: 0.0,
            off: Complex64::new(0.0, 0.0),
        }
    }

    pub fn two(d1: f64, d2: f64, off: Complex64) -> Self {
        Self { n: 2, d1, d2, off }
    }

    pub fn zero(n: usize) -> Self {
        Self::identity(n).scale(0.0)
    }

    pub fn identity(n: usize) -> Self {
        match n {
            1 => Self::scalar(1.0),
            _ => Self::two(1.0, 1.0, Complex64::new(0.0, 0.0)),
        }
    }

    pub fn scale(self, s: f64) -> Self {
        Self {
            n: self.n,
            d1: s * self.d1,
            d2: s * self.d2,
            off: self.off * s,
        }
    }

    pub fn add(self, o: Self) -> Self {
        debug_assert_eq!(self.n, o.n);
        Self {
            n: self.n,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            off: self.off + o.off,
        }
    }

    pub fn trace(&self) -> f64 {
        if self.n == 1 {
            self.d1
        } else {
            self.d1 + self.d2
        }
    }

    pub fn det(&self) -> f64 {
        if self.n == 1 {
            self.d1
        } else {
            self.d1 * self.d2 - self.off.norm_sqr()
        }
    }

    /// Smallest eigenvalue, closed form.
    pub fn min_eig(&self) -> f64 {
        if self.n == 1 {
            return self.d1;
        }
        let m = 0.5 * (self.d1 + self.d2);
        let r = (0.25 * (self.d1 - self.d2).powi(2) + self.off.norm_sqr()).sqrt();
        m - r
    }

    pub fn max_eig(&self) -> f64 {
        if self.n == 1 {
            return self.d1;
        }
        let m = 0.5 * (self.d1 + self.d2);
        let r = (0.25 * (self.d1 - self.d2).powi(2) + self.off.norm_sqr()).sqrt();
        m + r
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        self.min_eig().abs().max(self.max_eig().abs())
    }

    /// `sum_jk H_jk zeta_j conj(zeta_k)`.
    pub fn quad_form(&self, zeta: &[Complex64]) -> f64 {
        if self.n == 1 {
            return self.d1 * zeta[0].norm_sqr();
        }
        let cross = self.off * zeta[0] * zeta[1].conj();
        self.d1 * zeta[0].norm_sqr() + self.d2 * zeta[1].norm_sqr() + 2.0 * cross.re
    }

    /// Density of `A ^ B` against Lebesgue measure for `n = 2`
    /// (`tr A tr B - tr AB`); for `n = 1` the product `A B` is meaningless and
    /// this returns `A` scaled by the trace of `B` so that `A ^ 1 = A`.
    pub fn mixed(&self, o: &Self) -> f64 {
        if self.n == 1 {
            return self.d1 * o.d1;
        }
        let tr_ab = self.d1 * o.d1 + self.d2 * o.d2 + 2.0 * (self.off * o.off.conj()).re;
        self.trace() * o.trace() - tr_ab
    }
}

/// Per-node Hermitian coefficient matrix of a real (1,1)-form, in the frame
/// where a diagonal entry `1` is the Lebesgue area form of that complex line.
/// With this frame the top-degree density is `n! det`.
#[derive(Debug, Clone)]
pub struct HermitianField {
    grid: TorusGrid,
    coeff: Vec<Herm>,
    /// Nodes whose stencil touches a pole; their coefficient is not evaluated.
    flagged: Vec<bool>,
}

impl HermitianField {
    pub fn constant(grid: TorusGrid, h: Herm) -> Self {
        assert_eq!(h.n, grid.n());
        Self {
            grid,
            coeff: vec![h; grid.len()],
            flagged: vec![false; grid.len()],
        }
    }

    pub fn from_parts(grid: TorusGrid, coeff: Vec<Herm>, flagged: Vec<bool>) -> Self {
        assert_eq!(coeff.len(), grid.len());
        assert_eq!(flagged.len(), grid.len());
        Self {
            grid,
            coeff,
            flagged,
        }
    }

    #[inline]
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    #[inline]
    pub fn coeff(&self) -> &[Herm] {
        &self.coeff
    }

    #[inline]
    pub fn at(&self, idx: usize) -> Herm {
        self.coeff[idx]
    }

    #[inline]
    pub fn flagged(&self) -> &[bool] {
        &self.flagged
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            coeff: self
                .coeff
                .iter()
                .zip(&other.coeff)
                .map(|(a, b)| a.add(*b))
                .collect(),
            flagged: self
                .flagged
                .iter()
                .zip(&other.flagged)
                .map(|(a, b)| *a || *b)
                .collect(),
        }
    }

    pub fn add_constant(&self, h: Herm) -> Self {
        Self {
            grid: self.grid,
            coeff: self.coeff.iter().map(|a| a.add(h)).collect(),
            flagged: self.flagged.clone(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            coeff: self.coeff.iter().map(|a| a.scale(s)).collect(),
            flagged: self.flagged.clone(),
        }
    }

    pub fn map_scalar(&self, f: impl Fn(&Herm) -> f64) -> ScalarField {
        let mut out =
            ScalarField::from_values_unchecked(self.grid, self.coeff.iter().map(f).collect());
        for (i, &fl) in self.flagged.iter().enumerate() {
            if fl {
                out.values_mut()[i] = 0.0;
            }
        }
        out
    }

    /// Largest deviation from Hermitian symmetry; the storage is Hermitian by
    /// construction, so this checks only that the diagonal is real and finite.
    pub fn is_hermitian(&self) -> bool {
        self.coeff
            .iter()
            .all(|h| h.d1.is_finite() && h.d2.is_finite() && h.off.re.is_finite() && h.off.im.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_small_matrices() {
        let d = Herm::two(1.0, 2.0, Complex64::new(0.0, 0.0));
        assert_eq!(d.min_eig(), 1.0);
        // [[0, i], [-i, 0]] has eigenvalues -1 and 1
        let j = Herm::two(0.0, 0.0, Complex64::new(0.0, 1.0));
        assert!((j.min_eig() + 1.0).abs() < 1e-15);
        assert!((j.max_eig() - 1.0).abs() < 1e-15);
        assert_eq!(Herm::zero(2).min_eig(), 0.0);
    }

    #[test]
    fn mixed_form_reduces_to_twice_det() {
        let a = Herm::two(1.5, 0.7, Complex64::new(0.2, -0.4));
        assert!((a.mixed(&a) - 2.0 * a.det()).abs() < 1e-14);
        let id = Herm::identity(2);
        assert!((a.mixed(&id) - a.trace()).abs() < 1e-14);
    }
}
