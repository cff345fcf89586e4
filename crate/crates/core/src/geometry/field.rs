use serde::{Deserialize, Serialize};

use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Finite stand-in stored at analytically specified pole nodes.
pub const POLE_CLAMP: f64 = -40.0;

/// A logarithmic singularity `coeff * log|z - a|^2` anchored at a grid node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPole {
    pub node: usize,
    pub coeff: f64,
}

/// Anything that can be evaluated at an arbitrary point of the torus.
pub trait Sampler {
    fn sample(&self, x: &[f64]) -> f64;
}

/// Grid-sampled real function, optionally with isolated logarithmic poles.
///
/// At pole nodes `values` holds a finite stand-in; the declared coefficient
/// lets integration and interpolation treat the singular profile exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    values: Vec<f64>,
    pole_mask: Vec<bool>,
    poles: Vec<LogPole>,
}

impl ScalarField {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: TorusGrid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
            pole_mask: vec![false; grid.len()],
            poles: Vec::new(),
        }
    }

    pub fn from_values(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Validation(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite value at node {i}")));
        }
        Ok(Self {
            grid,
            pole_mask: vec![false; grid.len()],
            values,
            poles: Vec::new(),
        })
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self {
            grid,
            pole_mask: vec![false; grid.len()],
            values,
            poles: Vec::new(),
        }
    }

    /// Declares a logarithmic pole. The stored value at the node is kept as the
    /// finite stand-in (callers wanting the default clamp use [`POLE_CLAMP`]).
    pub fn with_pole(mut self, pole: LogPole) -> Self {
        assert!(pole.node < self.grid.len());
        self.pole_mask[pole.node] = true;
        if let Some(p) = self.poles.iter_mut().find(|p| p.node == pole.node) {
            p.coeff += pole.coeff;
        } else {
            self.poles.push(pole);
        }
        self
    }

    /// `coeff * log|z-a|^2` near the node `a` with the clamp stored at `a`.
    pub fn log_distance(grid: TorusGrid, node: usize, coeff: f64) -> Self {
        let a = grid.point(node);
        let mut f = Self::from_fn(grid, |x| {
            let d = grid.displacement(x, &a);
            let r2: f64 = d.iter().map(|v| v * v).sum();
            if r2 == 0.0 {
                POLE_CLAMP
            } else {
                coeff * r2.ln()
            }
        });
        f.values[node] = POLE_CLAMP;
        f.with_pole(LogPole { node, coeff })
    }

    #[inline]
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    #[inline]
    pub fn pole_mask(&self) -> &[bool] {
        &self.pole_mask
    }

    #[inline]
    pub fn poles(&self) -> &[LogPole] {
        &self.poles
    }

    pub fn has_poles(&self) -> bool {
        !self.poles.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Node-wise map of the stored values; pole declarations are kept as they are.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            pole_mask: self.pole_mask.clone(),
            poles: self.poles.clone(),
        }
    }

    /// `self * s + shift`, scaling declared pole coefficients by `s`.
    pub fn affine(&self, s: f64, shift: f64) -> Self {
        let mut out = self.map(|v| s * v + shift);
        for p in &mut out.poles {
            p.coeff *= s;
        }
        out
    }

    /// Node-wise sum; pole declarations of both operands are merged.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid);
        let mut out = Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
            pole_mask: self.pole_mask.clone(),
            poles: self.poles.clone(),
        };
        for &p in &other.poles {
            out = out.with_pole(p);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.affine(-1.0, 0.0))
    }

    pub fn min(&self) -> f64 {
        self.regular_values().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.regular_values().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Values at nodes that are not poles.
    pub fn regular_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(&self.pole_mask)
            .filter(|(_, &p)| !p)
            .map(|(&v, _)| v)
    }

    /// Sup-norm distance over nodes that are regular in both fields.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .filter(|(i, _)| !self.pole_mask[*i] && !other.pole_mask[*i])
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Restriction to the grid with half the resolution (every other node).
    pub fn restrict_to(&self, coarse: TorusGrid) -> Result<Self> {
        if coarse.n() != self.grid.n() || self.grid.nodes() % coarse.nodes() != 0 {
            return Err(Error::Validation("incompatible grids for restriction".into()));
        }
        let ratio = self.grid.nodes() / coarse.nodes();
        Ok(Self::from_values_unchecked(
            coarse,
            (0..coarse.len())
                .map(|i| {
                    let mut c = coarse.coords(i);
                    for v in c.iter_mut() {
                        *v *= ratio;
                    }
                    self.values[self.grid.index(&c)]
                })
                .collect(),
        ))
    }

    pub(crate) fn from_values_unchecked(grid: TorusGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid,
            pole_mask: vec![false; grid.len()],
            values,
            poles: Vec::new(),
        }
    }

    /// Regular part `u - sum c log|z-a|^2` at a node, extrapolated from the axis
    /// neighbours when the node itself is a pole.
    pub(crate) fn regular_part_at(&self, idx: usize) -> f64 {
        if self.pole_mask[idx] {
            let dim = self.grid.real_dim();
            let mut acc = 0.0;
            let mut off = [0isize; 4];
            for axis in 0..dim {
                for s in [-1isize, 1] {
                    off[axis] = s;
                    let j = self.grid.shifted(idx, &off[..dim]);
                    acc += self.regular_part_plain(j);
                    off[axis] = 0;
                }
            }
            acc / (2 * dim) as f64
        } else {
            self.regular_part_plain(idx)
        }
    }

    fn regular_part_plain(&self, idx: usize) -> f64 {
        let x = self.grid.point(idx);
        let mut v = self.values[idx];
        for p in &self.poles {
            if p.node == idx {
                continue;
            }
            let a = self.grid.point(p.node);
            let d = self.grid.displacement(&x, &a);
            let r2: f64 = d.iter().map(|v| v * v).sum();
            v -= p.coeff * r2.ln();
        }
        v
    }

    fn near_pole(&self, base: &[usize; 4]) -> bool {
        let n = self.grid.nodes();
        self.poles.iter().any(|p| {
            let c = self.grid.coords(p.node);
            (0..self.grid.real_dim()).all(|a| {
                let d = (c[a] + n - base[a]) % n;
                d <= 1
            })
        })
    }

    fn log_profile(&self, x: &[f64]) -> f64 {
        self.poles
            .iter()
            .map(|p| {
                let a = self.grid.point(p.node);
                let d = self.grid.displacement(x, &a);
                let r2: f64 = d.iter().map(|v| v * v).sum();
                if r2 == 0.0 {
                    f64::NEG_INFINITY * p.coeff.signum()
                } else {
                    p.coeff * r2.ln()
                }
            })
            .sum()
    }
}

impl Sampler for ScalarField {
    /// Periodic multilinear interpolation. Inside a cell that touches a declared
    /// pole the log profile is added back exactly and only the regular part is
    /// interpolated; exactly at a pole the stored stand-in is returned.
    fn sample(&self, x: &[f64]) -> f64 {
        let g = self.grid;
        let n = g.nodes();
        let dim = g.real_dim();
        let mut base = [0usize; 4];
        let mut frac = [0.0f64; 4];
        for a in 0..dim {
            let s = x[a].rem_euclid(1.0) * n as f64;
            let f = s.floor();
            base[a] = (f as usize) % n;
            frac[a] = s - f;
        }
        let singular = self.has_poles() && self.near_pole(&base);
        if singular {
            let profile = self.log_profile(x);
            if !profile.is_finite() {
                let at = g.index(&base[..dim]);
                return self.values[at];
            }
            let mut acc = 0.0;
            for corner in 0..(1usize << dim) {
                let mut c = base;
                let mut w = 1.0;
                for a in 0..dim {
                    if corner >> a & 1 == 1 {
                        c[a] = (c[a] + 1) % n;
                        w *= frac[a];
                    } else {
                        w *= 1.0 - frac[a];
                    }
                }
                if w != 0.0 {
                    acc += w * self.regular_part_at(g.index(&c[..dim]));
                }
            }
            return acc + profile;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << dim) {
            let mut idx = 0usize;
            let mut w = 1.0;
            for a in (0..dim).rev() {
                let bit = corner >> a & 1;
                let c = if bit == 1 { (base[a] + 1) % n } else { base[a] };
                idx = idx * n + c;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            if w != 0.0 {
                acc += w * self.values[idx];
            }
        }
        acc
    }
}
