use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{Sampler, ScalarField};
use super::grid::TorusGrid;
use super::herm::Herm;

/// One mode `c cos(2π k·x) + s sin(2π k·x)`; `k` is indexed like the grid axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: [i32; 4],
    pub cos: f64,
    pub sin: f64,
}

/// Real trigonometric polynomial on the torus, with exact derivatives.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigPoly {
    pub terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `amp cos(2π k·x)`.
    pub fn cosine(k: [i32; 4], amp: f64) -> Self {
        Self::new(vec![TrigTerm { k, cos: amp, sin: 0.0 }])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.cos == 0.0 && t.sin == 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| TrigTerm { k: t.k, cos: s * t.cos, sin: s * t.sin })
                .collect(),
        )
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::new(terms)
    }

    fn phase(t: &TrigTerm, x: &[f64]) -> f64 {
        2.0 * PI * x.iter().zip(&t.k).map(|(x, &k)| x * k as f64).sum::<f64>()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let (s, c) = Self::phase(t, x).sin_cos();
                t.cos * c + t.sin * s
            })
            .sum()
    }

    pub fn to_field(&self, grid: TorusGrid) -> ScalarField {
        ScalarField::from_fn(grid, |x| self.eval(x))
    }

    /// Exact `dd^c` coefficient at `x`, in the same normalization as
    /// [`hessian_fd`](super::hessian_fd).
    pub fn ddc(&self, n: usize, x: &[f64]) -> Herm {
        let mut h = Herm::zero(n);
        for t in &self.terms {
            let (s, c) = Self::phase(t, x).sin_cos();
            let f = t.cos * c + t.sin * s;
            let kappa1 = Complex64::new(t.k[0] as f64, t.k[1] as f64);
            if n == 1 {
                h = h.add(Herm::scalar(-PI * f * kappa1.norm_sqr()));
            } else {
                let kappa2 = Complex64::new(t.k[2] as f64, t.k[3] as f64);
                let off = kappa1.conj() * kappa2 * (-PI * f);
                h = h.add(Herm::two(
                    -PI * f * kappa1.norm_sqr(),
                    -PI * f * kappa2.norm_sqr(),
                    off,
                ));
            }
        }
        h
    }

    /// Largest `|k|^2` over the modes, and the sum of amplitudes.
    pub fn bounds(&self) -> (f64, f64) {
        let mut k2: f64 = 0.0;
        let mut amp = 0.0;
        for t in &self.terms {
            k2 = k2.max(t.k.iter().map(|&k| (k * k) as f64).sum());
            amp += t.cos.hypot(t.sin);
        }
        (k2, amp)
    }

    /// Each mode multiplied by a real factor depending on its frequency.
    /// Convolution with an even kernel acts this way.
    pub fn filtered(&self, m: impl Fn(&[i32; 4]) -> f64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| {
                    let f = m(&t.k);
                    TrigTerm { k: t.k, cos: f * t.cos, sin: f * t.sin }
                })
                .collect(),
        )
    }
}

impl Sampler for TrigPoly {
    fn sample(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hessian_fd;

    #[test]
    fn ddc_matches_stencil() {
        let p = TrigPoly::new(vec![
            TrigTerm { k: [1, 0, 1, 1], cos: 0.3, sin: -0.2 },
            TrigTerm { k: [0, 1, -1, 0], cos: 0.1, sin: 0.4 },
        ]);
        let g = TorusGrid::new(2, 32).unwrap();
        let fd = hessian_fd(&p.to_field(g));
        for idx in [0, 12345, 99999] {
            let exact = p.ddc(2, &g.point(idx));
            let got = fd.at(idx);
            let err = exact.add(got.scale(-1.0)).norm();
            assert!(err < 5e-2 * exact.norm().max(1.0), "node {idx}: {err}");
        }
    }
}
