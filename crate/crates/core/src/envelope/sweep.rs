//! Colored Gauss-Seidel sweeps over a rectangular lattice.
//!
//! Nodes are split into color classes such that every stencil only reads
//! nodes of other classes. Within a class all updates are independent, so a
//! class is updated in parallel and the result does not depend on the number
//! of threads.

use rayon::prelude::*;

/// Row-major lattice with axis 0 fastest, at most five axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Lattice {
    pub shape: [usize; 5],
    pub dims: usize,
}

impl Lattice {
    pub fn new(shape: &[usize]) -> Self {
        assert!(!shape.is_empty() && shape.len() <= 5);
        let mut s = [1usize; 5];
        s[..shape.len()].copy_from_slice(shape);
        Self { shape: s, dims: shape.len() }
    }

    pub fn len(&self) -> usize {
        self.shape[..self.dims].iter().product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.shape[..axis].iter().product()
    }
}

/// Read access to the values while a color class is being rewritten.
pub(crate) struct Reader {
    ptr: *const f64,
    len: usize,
}

impl Reader {
    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        assert!(i < self.len);
        // SAFETY: in-bounds; nodes read during a color pass are never written
        // in that pass except by the task that reads them (see `colored_sweep`).
        unsafe { *self.ptr.add(i) }
    }
}

struct Writer(*mut f64);
unsafe impl Sync for Writer {}
unsafe impl Send for Writer {}
unsafe impl Sync for Reader {}
unsafe impl Send for Reader {}

/// One sweep over all color classes in order. `update(idx, coords, values)`
/// returns the new value of node `idx` (or `None` to keep it). Returns the
/// largest absolute change.
///
/// The caller guarantees that `update` for a node of class `c` reads only
/// nodes of other classes and the node itself.
pub(crate) fn colored_sweep<C, F>(
    lattice: Lattice,
    values: &mut [f64],
    ncolors: usize,
    color: C,
    update: F,
) -> f64
where
    C: Fn(&[usize; 5]) -> usize + Sync,
    F: Fn(usize, &[usize; 5], &Reader) -> Option<f64> + Sync,
{
    assert_eq!(values.len(), lattice.len());
    let outer = lattice.dims - 1;
    let slab = lattice.stride(outer);
    let mut worst = 0.0f64;
    for c in 0..ncolors {
        let reader = Reader { ptr: values.as_ptr(), len: values.len() };
        let writer = Writer(values.as_mut_ptr());
        let (reader, writer) = (&reader, &writer);
        let change = (0..lattice.shape[outer])
            .into_par_iter()
            .map(|k| {
                let mut coords = [0usize; 5];
                coords[outer] = k;
                let mut local = 0.0f64;
                for idx in k * slab..(k + 1) * slab {
                    if color(&coords) == c {
                        if let Some(new) = update(idx, &coords, reader) {
                            let old = reader.get(idx);
                            local = local.max((new - old).abs());
                            // SAFETY: each node of class `c` belongs to exactly one
                            // slab; no other task reads it during this pass.
                            unsafe { *writer.0.add(idx) = new };
                        }
                    }
                    for a in 0..outer {
                        coords[a] += 1;
                        if coords[a] < lattice.shape[a] {
                            break;
                        }
                        coords[a] = 0;
                    }
                }
                local
            })
            .reduce(|| 0.0, f64::max);
        worst = worst.max(change);
    }
    worst
}

/// Checkerboard class: parity of the coordinate sum.
pub(crate) fn parity(c: &[usize; 5]) -> usize {
    (c[0] + c[1] + c[2] + c[3] + c[4]) & 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_like_sweep_visits_every_node_once() {
        let lat = Lattice::new(&[4, 6]);
        let mut v = vec![0.0; lat.len()];
        let d = colored_sweep(lat, &mut v, 2, parity, |idx, _, r| Some(r.get(idx) + 1.0));
        assert_eq!(d, 1.0);
        assert!(v.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let lat = Lattice::new(&[16, 16]);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let mut v: Vec<f64> = (0..lat.len()).map(|i| ((i * 7919) % 13) as f64).collect();
                for _ in 0..10 {
                    colored_sweep(lat, &mut v, 2, parity, |idx, c, r| {
                        let nb = |dx: isize, dy: isize| {
                            let x = (c[0] as isize + dx).rem_euclid(16) as usize;
                            let y = (c[1] as isize + dy).rem_euclid(16) as usize;
                            r.get(x + 16 * y)
                        };
                        let _ = idx;
                        Some(0.25 * (nb(1, 0) + nb(-1, 0) + nb(0, 1) + nb(0, -1)) - 0.01)
                    });
                }
                v
            })
        };
        assert_eq!(run(1), run(4));
    }
}
