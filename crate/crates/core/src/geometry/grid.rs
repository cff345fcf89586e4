use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible number of nodes per real axis.
pub const MIN_NODES: usize = 8;

/// Uniform periodic discretization of the flat torus `C^n / (Z + iZ)^n`.
///
/// Real coordinates are ordered `(x1, y1, x2, y2)` with `z_j = x_j + i y_j`;
/// every axis carries `N` nodes with spacing `h = 1/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    n: usize,
    nodes: usize,
}

impl TorusGrid {
    pub fn new(n: usize, nodes: usize) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::Validation(format!(
                "complex dimension must be 1 or 2, got {n}"
            )));
        }
        if !nodes.is_power_of_two() {
            return Err(Error::Validation(format!(
                "nodes per axis must be a power of two, got {nodes}"
            )));
        }
        if nodes < MIN_NODES {
            return Err(Error::GridTooSmall {
                nodes,
                min: MIN_NODES,
            });
        }
        Ok(Self { n, nodes })
    }

    /// Complex dimension.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Nodes per real axis.
    #[inline]
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Real dimension `2n`.
    #[inline]
    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        1.0 / self.nodes as f64
    }

    /// Total number of nodes, `N^(2n)`.
    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.pow(self.real_dim() as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lebesgue weight of one node; the torus has unit volume.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        1.0 / self.len() as f64
    }

    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.nodes.pow(axis as u32)
    }

    /// Integer coordinates of a flat index; unused axes are zero.
    #[inline]
    pub fn coords(&self, mut idx: usize) -> [usize; 4] {
        let mut c = [0usize; 4];
        for slot in c.iter_mut().take(self.real_dim()) {
            *slot = idx % self.nodes;
            idx /= self.nodes;
        }
        c
    }

    #[inline]
    pub fn index(&self, c: &[usize]) -> usize {
        let mut idx = 0;
        for axis in (0..self.real_dim()).rev() {
            idx = idx * self.nodes + (c[axis] % self.nodes);
        }
        idx
    }

    /// Index of `idx` shifted by an integer offset, wrapping on every axis.
    #[inline]
    pub fn shifted(&self, idx: usize, offset: &[isize]) -> usize {
        let c = self.coords(idx);
        let n = self.nodes as isize;
        let mut out = 0usize;
        for axis in (0..self.real_dim()).rev() {
            let v = (c[axis] as isize + offset[axis]).rem_euclid(n) as usize;
            out = out * self.nodes + v;
        }
        out
    }

    /// Index of the node `delta` steps away along one axis (periodic).
    #[inline]
    pub fn step(&self, idx: usize, axis: usize, delta: isize) -> usize {
        let stride = self.stride(axis);
        let n = self.nodes as isize;
        let c = ((idx / stride) % self.nodes) as isize;
        let target = (c + delta).rem_euclid(n);
        (idx as isize + (target - c) * stride as isize) as usize
    }

    /// Physical coordinates in `[0,1)^(2n)`.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 4] {
        let c = self.coords(idx);
        let h = self.h();
        [c[0] as f64 * h, c[1] as f64 * h, c[2] as f64 * h, c[3] as f64 * h]
    }

    /// Minimal-image displacement `x - y` on the unit torus, component-wise in `[-1/2, 1/2)`.
    #[inline]
    pub fn displacement(&self, x: &[f64], y: &[f64]) -> [f64; 4] {
        let mut d = [0.0; 4];
        for a in 0..self.real_dim() {
            let mut v = x[a] - y[a];
            v -= v.round();
            d[a] = v;
        }
        d
    }

    /// Same grid with twice the resolution.
    pub fn refined(&self) -> Self {
        Self {
            n: self.n,
            nodes: self.nodes * 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_times_nodes_is_one() {
        for &nodes in &[8, 64, 256, 1024] {
            let g = TorusGrid::new(1, nodes).unwrap();
            assert_eq!(g.h() * nodes as f64, 1.0);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            TorusGrid::new(1, 4),
            Err(Error::GridTooSmall { nodes: 4, .. })
        ));
        assert!(TorusGrid::new(3, 16).is_err());
        assert!(TorusGrid::new(1, 48).is_err());
    }

    #[test]
    fn periodic_wrap() {
        let g = TorusGrid::new(2, 8).unwrap();
        let idx = g.index(&[7, 0, 3, 7]);
        let s = g.shifted(idx, &[1, -1, 0, 9]);
        assert_eq!(g.coords(s), [0, 7, 3, 0]);
        for idx in [0, 5, 511, 4095] {
            assert_eq!(g.index(&g.coords(idx)), idx);
        }
    }
}
