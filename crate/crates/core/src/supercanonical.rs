//! Green functions, klt weights and supercanonical envelopes on a flat
//! one-dimensional torus.
//!
//! Every `λω`-psh function on a curve is `λ ∫ G(·, a) dρ(a)` plus a constant
//! for a probability measure `ρ`. With the constant fixed by the integral
//! constraint, the envelope at a point `z₀` becomes the concave program
//!
//! `max_ρ  λ (Gρ)(z₀) − (1/p) log ∫ exp(p λ Gρ − γ) ω`
//!
//! over the simplex of source weights, solved here by pairwise Frank-Wolfe.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::quadrature::{gauss_legendre_unit, pairwise_sum, polar_square_power};
use crate::geometry::{LogPole, Sampler, ScalarField, TorusGrid, POLE_REFINE_NODES};

const CELL_RULE_ORDER: usize = 8;
const POLE_RULE_ORDER: usize = 24;

/// Periodic 2-D FFT of size `N × N` (axis 0 fastest).
struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        plan.process(data);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for x in 0..n {
            for y in 0..n {
                col[y] = data[x + n * y];
            }
            plan.process(&mut col);
            for y in 0..n {
                data[x + n * y] = col[y];
            }
        }
        if inverse {
            let s = 1.0 / (n * n) as f64;
            data.iter_mut().for_each(|v| *v *= s);
        }
    }

    fn forward_real(&self, v: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.run(&mut d, false);
        d
    }

    /// Circular convolution of `v` with the kernel whose transform is `k_hat`.
    fn convolve(&self, k_hat: &[Complex64], v: &[f64]) -> Vec<f64> {
        let mut d = self.forward_real(v);
        d.iter_mut().zip(k_hat).for_each(|(a, b)| *a *= b);
        self.run(&mut d, true);
        d.into_iter().map(|c| c.re).collect()
    }
}

/// Discrete Green function with source at node 0: `Δ_h G = 4π(δ_h − 1)`,
/// zero mean. Sources elsewhere are translates.
pub struct GreenTable {
    grid: TorusGrid,
    g0: Vec<f64>,
    g0_hat: Vec<Complex64>,
    fft: Fft2,
}

impl GreenTable {
    pub fn new(grid: TorusGrid) -> Result<Self> {
        if grid.n() != 1 {
            return Err(Error::Validation("Green functions are implemented on curves".into()));
        }
        let n = grid.nodes();
        let h2 = grid.h() * grid.h();
        let fft = Fft2::new(n);
        let mut g0_hat = vec![Complex64::new(0.0, 0.0); n * n];
        for k2 in 0..n {
            for k1 in 0..n {
                if k1 == 0 && k2 == 0 {
                    continue;
                }
                let c = |k: usize| (2.0 * PI * k as f64 / n as f64).cos();
                let lambda = (2.0 * c(k1) + 2.0 * c(k2) - 4.0) / h2;
                g0_hat[k1 + n * k2] = Complex64::new(4.0 * PI / (h2 * lambda), 0.0);
            }
        }
        let mut g = g0_hat.clone();
        fft.run(&mut g, true);
        let mut g0: Vec<f64> = g.into_iter().map(|c| c.re).collect();
        // restore exact evenness, G(z) = G(−z)
        let sym: Vec<f64> = (0..n * n)
            .map(|i| {
                let (x, y) = (i % n, i / n);
                let j = (n - x) % n + n * ((n - y) % n);
                0.5 * (g0[i] + g0[j])
            })
            .collect();
        g0.copy_from_slice(&sym);
        let g0_hat = fft.forward_real(&g0);
        Ok(Self { grid, g0, g0_hat, fft })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// `G(z, a)` at nodes.
    #[inline]
    pub fn value(&self, z: usize, a: usize) -> f64 {
        let n = self.grid.nodes();
        let mask = n - 1;
        let dx = (z % n).wrapping_sub(a % n) & mask;
        let dy = (z / n).wrapping_sub(a / n) & mask;
        self.g0[dx + n * dy]
    }

    /// `G(·, a)` as a field with its unit log pole declared; the pole node
    /// keeps the finite lattice value.
    pub fn field(&self, a: usize) -> ScalarField {
        let values = (0..self.grid.len()).map(|z| self.value(z, a)).collect();
        ScalarField::from_values(self.grid, values)
            .expect("finite lattice values")
            .with_pole(LogPole { node: a, coeff: 1.0 })
    }

    /// `Σ_j w_j G(j, a)` for every node `a`.
    pub fn potential(&self, w: &[f64]) -> Vec<f64> {
        self.fft.convolve(&self.g0_hat, w)
    }

    /// `sup |Δ_h G − 4π(δ_h − 1)|`.
    pub fn residual(&self) -> f64 {
        let g = self.grid;
        let h2 = g.h() * g.h();
        (0..g.len())
            .map(|i| {
                let lap = (0..2)
                    .map(|ax| self.g0[g.step(i, ax, 1)] + self.g0[g.step(i, ax, -1)])
                    .sum::<f64>()
                    - 4.0 * self.g0[i];
                let rhs = 4.0 * PI * (if i == 0 { 1.0 / h2 } else { 0.0 } - 1.0);
                (lap / h2 - rhs).abs() * h2
            })
            .fold(0.0, f64::max)
    }
}

/// Convenience wrapper returning `G(·, a)`.
pub fn green_function(grid: TorusGrid, a: usize) -> Result<ScalarField> {
    Ok(GreenTable::new(grid)?.field(a))
}

/// `γ = Σ c_j G(·, a_j) + const`, klt when every `c_j < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KltWeight {
    pub poles: Vec<(usize, f64)>,
    /// Shift the constant so that `∫ e^{−γ} ω = 1`.
    pub normalize: bool,
}

impl KltWeight {
    pub fn zero() -> Self {
        Self { poles: Vec::new(), normalize: false }
    }

    pub fn validate(&self, grid: TorusGrid) -> Result<()> {
        for &(a, c) in &self.poles {
            if a >= grid.len() {
                return Err(Error::Validation(format!("pole node {a} outside the grid")));
            }
            if !c.is_finite() {
                return Err(Error::Validation("non-finite pole coefficient".into()));
            }
            if c >= 1.0 {
                return Err(Error::KltViolation { coeff: c });
            }
        }
        Ok(())
    }

    /// Node weights `ν_j = ∫_{cell j} e^{−γ} ω`, cells around poles integrated
    /// by Gauss rules (polar at the pole itself). Also returns `γ`.
    pub fn measure(&self, table: &GreenTable) -> Result<(ScalarField, Vec<f64>)> {
        let g = table.grid();
        self.validate(g)?;
        let mut gamma = ScalarField::zeros(g);
        for &(a, c) in &self.poles {
            gamma = gamma.add(&table.field(a).affine(c, 0.0));
        }
        let h = g.h();
        let mut nu: Vec<f64> = gamma.values().iter().map(|v| (-v).exp() * h * h).collect();
        let (xs, ws) = gauss_legendre_unit(CELL_RULE_ORDER);
        let r = POLE_REFINE_NODES as isize;
        for &(a, c) in &self.poles {
            let pa = g.point(a);
            for dy in -r..=r {
                for dx in -r..=r {
                    let j = g.shifted(a, &[dx, dy]);
                    let centre = [pa[0] + dx as f64 * h, pa[1] + dy as f64 * h];
                    nu[j] = if dx == 0 && dy == 0 {
                        let reg_at = gamma.regular_part_at(a);
                        polar_square_power(0.5 * h, -c, POLE_RULE_ORDER, |u, v| {
                            let r2 = u * u + v * v;
                            let reg = if r2 == 0.0 {
                                reg_at
                            } else {
                                gamma.sample(&[pa[0] + u, pa[1] + v]) - c * r2.ln()
                            };
                            (-reg).exp()
                        })
                    } else {
                        let mut acc = 0.0;
                        for (xi, wi) in xs.iter().zip(&ws) {
                            for (yi, wj) in xs.iter().zip(&ws) {
                                let p = [centre[0] + (xi - 0.5) * h, centre[1] + (yi - 0.5) * h];
                                acc += wi * wj * (-gamma.sample(&p)).exp();
                            }
                        }
                        acc * h * h
                    };
                }
            }
        }
        if self.normalize {
            let total = pairwise_sum(&nu);
            gamma = gamma.affine(1.0, total.ln());
            nu.iter_mut().for_each(|v| *v /= total);
        }
        Ok((gamma, nu))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupercanonicalProblem {
    pub lambda: f64,
    pub gamma: KltWeight,
    pub p: f64,
    /// Sources on every `source_stride`-th node along each axis.
    pub source_stride: usize,
}

impl SupercanonicalProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Validation(format!("λ = {} must be non-negative", self.lambda)));
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::Validation(format!("p = {} must be at least 1", self.p)));
        }
        if self.source_stride == 0 {
            return Err(Error::Validation("source stride must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub max_iter: usize,
    pub gap_tol: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { max_iter: 500, gap_tol: 1e-7 }
    }
}

/// Precomputed data for one `(λ, γ, p)` on one grid.
pub struct Supercanonical {
    problem: SupercanonicalProblem,
    table: Arc<GreenTable>,
    gamma: ScalarField,
    nu: Vec<f64>,
    sources: Vec<usize>,
    /// `(1/p) log Z_a` with `Z_a = Σ_j ν_j exp(p λ G(j, a))`, per source.
    log_z: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSolution {
    pub node: usize,
    pub value: f64,
    /// Best single-source candidate value at the node.
    pub green_max: f64,
    pub best_source: usize,
    pub duality_gap: f64,
    pub iterations: usize,
    /// `|∫ exp(p φ − γ) ω − 1|` for the optimal competitor.
    pub constraint_residual: f64,
    /// Non-zero source weights `(node, ρ_a)`.
    pub rho: Vec<(usize, f64)>,
}

impl PointSolution {
    pub fn support(&self, threshold: f64) -> usize {
        self.rho.iter().filter(|(_, w)| *w > threshold).count()
    }
}

impl Supercanonical {
    pub fn new(table: Arc<GreenTable>, problem: SupercanonicalProblem) -> Result<Self> {
        problem.validate()?;
        let g = table.grid();
        let (gamma, nu) = problem.gamma.measure(&table)?;
        let n = g.nodes();
        let s = problem.source_stride;
        let sources: Vec<usize> = (0..n)
            .step_by(s)
            .flat_map(|y| (0..n).step_by(s).map(move |x| x + n * y))
            .collect();
        let pl = problem.p * problem.lambda;
        let kernel: Vec<f64> = table.g0.iter().map(|v| (pl * v).exp()).collect();
        let k_hat = table.fft.forward_real(&kernel);
        let z = table.fft.convolve(&k_hat, &nu);
        let log_z = sources.iter().map(|&a| z[a].ln() / problem.p).collect();
        Ok(Self { problem, table, gamma, nu, sources, log_z })
    }

    pub fn problem(&self) -> &SupercanonicalProblem {
        &self.problem
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn gamma(&self) -> &ScalarField {
        &self.gamma
    }

    /// Quadrature weights of `e^{−γ} ω`.
    pub fn measure(&self) -> &[f64] {
        &self.nu
    }

    /// `λ G(z, a) − (1/p) log ∫ exp(p λ G(·, a) − γ) ω` at every node.
    pub fn green_candidate(&self, source_index: usize) -> ScalarField {
        let a = self.sources[source_index];
        let lam = self.problem.lambda;
        let c = self.log_z[source_index];
        let values = (0..self.table.grid().len()).map(|z| lam * self.table.value(z, a) - c).collect();
        ScalarField::from_values(self.table.grid(), values).expect("finite values")
    }

    /// `(1/p) log Σ_j ν_j exp(p λ F_j)` for a potential `F = Gρ`.
    fn log_integral(&self, f: &[f64]) -> f64 {
        let pl = self.problem.p * self.problem.lambda;
        let m = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let terms: Vec<f64> = f.iter().zip(&self.nu).map(|(v, w)| w * (pl * (v - m)).exp()).collect();
        (pairwise_sum(&terms).ln() + pl * m) / self.problem.p
    }

    /// Objective for an arbitrary weight vector over the sources.
    pub fn objective(&self, z0: usize, rho: &[f64]) -> f64 {
        let f = self.potential_of(rho);
        self.problem.lambda * f[z0] - self.log_integral(&f)
    }

    fn potential_of(&self, rho: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.table.grid().len()];
        for (&a, &r) in self.sources.iter().zip(rho) {
            w[a] += r;
        }
        self.table.potential(&w)
    }

    /// Maximizes the objective at node `z0`, starting from the best
    /// single source.
    pub fn solve_at(&self, z0: usize, opts: &OptimizerOptions) -> PointSolution {
        let lam = self.problem.lambda;
        let p = self.problem.p;
        let len = self.table.grid().len();
        if lam == 0.0 {
            let v = -pairwise_sum(&self.nu).ln() / p;
            return PointSolution {
                node: z0,
                value: v,
                green_max: v,
                best_source: 0,
                duality_gap: 0.0,
                iterations: 0,
                constraint_residual: 0.0,
                rho: Vec::new(),
            };
        }
        let cand: Vec<f64> = self
            .sources
            .iter()
            .zip(&self.log_z)
            .map(|(&a, c)| lam * self.table.value(z0, a) - c)
            .collect();
        let (best, green_max) = cand
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let mut rho = vec![0.0; self.sources.len()];
        rho[best] = 1.0;
        let mut f: Vec<f64> = (0..len).map(|z| self.table.value(z, self.sources[best])).collect();
        let mut gap = f64::INFINITY;
        let mut iterations = 0;
        let mut mu = vec![0.0; len];
        for it in 0..opts.max_iter {
            iterations = it;
            // tilted measure μ ∝ ν exp(pλF)
            let m = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for j in 0..len {
                mu[j] = self.nu[j] * (p * lam * (f[j] - m)).exp();
            }
            let total = pairwise_sum(&mu);
            mu.iter_mut().for_each(|v| *v /= total);
            let gm = self.table.potential(&mu);
            // gradient g_a = λ (G(z0, a) − ∫ G(·, a) dμ)
            let grad: Vec<f64> = self
                .sources
                .iter()
                .map(|&a| lam * (self.table.value(z0, a) - gm[a]))
                .collect();
            let mut up = 0;
            let mut down = usize::MAX;
            for i in 0..grad.len() {
                if grad[i] > grad[up] {
                    up = i;
                }
                if rho[i] > 0.0 && (down == usize::MAX || grad[i] < grad[down]) {
                    down = i;
                }
            }
            let mean: f64 = rho.iter().zip(&grad).map(|(r, g)| r * g).sum();
            gap = grad[up] - mean;
            if gap < opts.gap_tol || up == down {
                break;
            }
            let (a_up, a_down) = (self.sources[up], self.sources[down]);
            let d: Vec<f64> = (0..len)
                .map(|z| self.table.value(z, a_up) - self.table.value(z, a_down))
                .collect();
            let s_max = rho[down];
            let s = self.line_search(&f, &d, z0, s_max);
            if s <= 0.0 {
                break;
            }
            rho[up] += s;
            rho[down] -= s;
            if rho[down] < 1e-15 {
                rho[down] = 0.0;
            }
            f.par_iter_mut().zip(&d).for_each(|(v, dv)| *v += s * dv);
        }
        let value = lam * f[z0] - self.log_integral(&f);
        // the optimal competitor is λF − (1/p) log ∫ exp(pλF − γ)
        let shift = self.log_integral(&f);
        let terms: Vec<f64> = f
            .iter()
            .zip(&self.nu)
            .map(|(v, w)| w * (p * (lam * v - shift)).exp())
            .collect();
        let constraint_residual = (pairwise_sum(&terms) - 1.0).abs();
        PointSolution {
            node: z0,
            value,
            green_max,
            best_source: self.sources[best],
            duality_gap: gap,
            iterations,
            constraint_residual,
            rho: rho
                .iter()
                .enumerate()
                .filter(|(_, w)| **w > 0.0)
                .map(|(i, w)| (self.sources[i], *w))
                .collect(),
        }
    }

    /// Maximizes `s ↦ λ(F + sD)(z0) − (1/p) log ∫ exp(pλ(F + sD) − γ)` on
    /// `[0, s_max]` by safeguarded Newton iteration on the derivative.
    fn line_search(&self, f: &[f64], d: &[f64], z0: usize, s_max: f64) -> f64 {
        let lam = self.problem.lambda;
        let pl = self.problem.p * lam;
        let slope = |s: f64| -> (f64, f64) {
            let m = f.iter().zip(d).map(|(a, b)| a + s * b).fold(f64::NEG_INFINITY, f64::max);
            let (mut w0, mut w1, mut w2) = (0.0, 0.0, 0.0);
            for ((a, b), nu) in f.iter().zip(d).zip(&self.nu) {
                let e = nu * (pl * (a + s * b - m)).exp();
                w0 += e;
                w1 += e * b;
                w2 += e * b * b;
            }
            let mean = w1 / w0;
            let var = (w2 / w0 - mean * mean).max(0.0);
            (lam * (d[z0] - mean), -pl * lam * var)
        };
        let (d0, _) = slope(0.0);
        if d0 <= 0.0 {
            return 0.0;
        }
        let (d1, _) = slope(s_max);
        if d1 >= 0.0 {
            return s_max;
        }
        let (mut lo, mut hi) = (0.0, s_max);
        let mut s = 0.5 * s_max;
        for _ in 0..60 {
            let (ds, dds) = slope(s);
            if ds > 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let newton = if dds < 0.0 { s - ds / dds } else { f64::NAN };
            let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - s).abs() <= 1e-15 * s_max.max(1e-300) || hi - lo <= 1e-15 {
                return next;
            }
            s = next;
        }
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EqualityProbe {
    /// `max_z (φ_can(z) − sup_a candidate_a(z))` over the evaluated nodes.
    pub green_gap: f64,
    /// Largest support of an optimal `ρ` (weights above 1e-6).
    pub max_support: usize,
    pub max_duality_gap: f64,
}

pub fn equality_probe(solutions: &[PointSolution]) -> EqualityProbe {
    EqualityProbe {
        green_gap: solutions.iter().map(|s| s.value - s.green_max).fold(0.0, f64::max),
        max_support: solutions.iter().map(|s| s.support(1e-6)).max().unwrap_or(0),
        max_duality_gap: solutions.iter().map(|s| s.duality_gap).fold(0.0, f64::max),
    }
}

/// Evaluates the envelope on every `stride`-th node along each axis.
pub fn supercanonical_envelope(
    solver: &Supercanonical,
    stride: usize,
    opts: &OptimizerOptions,
) -> Vec<PointSolution> {
    let g = solver.table.grid();
    let n = g.nodes();
    (0..n)
        .step_by(stride.max(1))
        .flat_map(|y| (0..n).step_by(stride.max(1)).map(move |x| x + n * y))
        .map(|z| solver.solve_at(z, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::integrate;

    fn table(n: usize) -> Arc<GreenTable> {
        Arc::new(GreenTable::new(TorusGrid::new(1, n).unwrap()).unwrap())
    }

    #[test]
    fn green_function_normalization_and_residual() {
        let t = table(64);
        let g = t.field(0);
        let mean = pairwise_sum(&g.values().to_vec()) * t.grid().cell_volume();
        assert!(mean.abs() < 1e-10, "{mean}");
        assert!(t.residual() < 1e-9, "{}", t.residual());
        assert_eq!(t.value(5 + 64 * 9, 17 + 64 * 3), t.value(17 + 64 * 3, 5 + 64 * 9));
        // shifting both arguments
        assert_eq!(t.value(70, 3), t.value(71, 4));
        let _ = integrate(&g, None).unwrap();
    }

    #[test]
    fn green_function_has_unit_log_slope() {
        let t = table(512);
        let h = t.grid().h();
        let (k1, k2) = (4usize, 32usize);
        let slope = (t.value(k2, 0) - t.value(k1, 0))
            / (((k2 as f64 * h).powi(2)).ln() - ((k1 as f64 * h).powi(2)).ln());
        assert!((slope - 1.0).abs() < 0.03, "{slope}");
    }

    #[test]
    fn klt_measure_matches_closed_form() {
        // ∫ e^{−c G} over the torus versus the node rule on a finer grid
        let t = table(64);
        let w = KltWeight { poles: vec![(0, 0.5)], normalize: false };
        let (_, nu) = w.measure(&t).unwrap();
        let coarse = pairwise_sum(&nu);
        let tf = table(256);
        let (_, nuf) = w.measure(&tf).unwrap();
        let fine = pairwise_sum(&nuf);
        assert!((coarse - fine).abs() / fine < 2e-3, "{coarse} {fine}");
        assert!(matches!(
            KltWeight { poles: vec![(0, 1.2)], normalize: false }.validate(t.grid()),
            Err(Error::KltViolation { .. })
        ));
    }

    #[test]
    fn zero_lambda_is_zero() {
        let s = Supercanonical::new(
            table(32),
            SupercanonicalProblem { lambda: 0.0, gamma: KltWeight::zero(), p: 1.0, source_stride: 2 },
        )
        .unwrap();
        let sol = s.solve_at(7, &OptimizerOptions::default());
        assert_eq!(sol.value, 0.0);
    }

    #[test]
    fn dirac_weights_reproduce_candidates() {
        let s = Supercanonical::new(
            table(32),
            SupercanonicalProblem { lambda: 1.0, gamma: KltWeight { poles: vec![(3 + 32 * 5, 0.5)], normalize: true }, p: 2.0, source_stride: 2 },
        )
        .unwrap();
        for (i, z0) in [(0usize, 0usize), (17, 100), (200, 999)] {
            let mut rho = vec![0.0; s.sources().len()];
            rho[i] = 1.0;
            let c = s.green_candidate(i).value(z0);
            assert!((s.objective(z0, &rho) - c).abs() < 1e-12);
        }
    }

    #[test]
    fn optimum_dominates_candidates_and_is_constraint_active() {
        let s = Supercanonical::new(
            table(32),
            SupercanonicalProblem { lambda: 1.0, gamma: KltWeight::zero(), p: 1.0, source_stride: 2 },
        )
        .unwrap();
        let sol = s.solve_at(0, &OptimizerOptions::default());
        assert!(sol.value >= sol.green_max - 1e-12);
        assert!(sol.constraint_residual < 1e-12);
        assert!(sol.duality_gap < 1e-5, "{sol:?}");
    }
}
