use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{hessian_fd, AlphaForm, Herm, ScalarField, TorusGrid, TrigPoly, TrigTerm};

/// An admissible competitor `ψ = -θ q + s v - shift <= 0`, α-psh both for the
/// exact form and for the grid Hessian.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub psi: TrigPoly,
    pub field: ScalarField,
    pub theta: f64,
    pub s: f64,
    pub s_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateOptions {
    pub max_freq: i32,
    pub terms: usize,
    /// Upper bound of `s / s_max`.
    pub s_fraction: f64,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        Self { max_freq: 2, terms: 4, s_fraction: 0.95 }
    }
}

/// Positivity test points: the grid Hessian at the nodes and the exact
/// Hessian at the nodes of the grid refined once (n = 1) or at the nodes (n = 2).
struct Checks {
    beta: Herm,
    q_disc: Vec<Herm>,
    q_exact: Vec<Herm>,
}

impl Checks {
    fn new(alpha: &AlphaForm, grid: TorusGrid) -> Result<Self> {
        let fine = if grid.n() == 1 { grid.refined() } else { grid };
        Ok(Self {
            beta: alpha.beta(),
            q_disc: hessian_fd(&alpha.q_field(grid)).coeff().to_vec(),
            q_exact: (0..fine.len()).map(|i| alpha.q.ddc(grid.n(), &fine.point(i))).collect(),
        })
    }

    fn v_parts(&self, v: &TrigPoly, grid: TorusGrid) -> (Vec<Herm>, Vec<Herm>) {
        let fine = if grid.n() == 1 { grid.refined() } else { grid };
        (
            hessian_fd(&v.to_field(grid)).coeff().to_vec(),
            (0..fine.len()).map(|i| v.ddc(grid.n(), &fine.point(i))).collect(),
        )
    }

    /// `β + (1-θ) H_q + s H_v ⪰ 0` at every test point.
    fn psd(&self, theta: f64, s: f64, v: Option<&(Vec<Herm>, Vec<Herm>)>) -> bool {
        let ok = |hq: &[Herm], hv: Option<&[Herm]>| {
            hq.iter().enumerate().all(|(i, h)| {
                let mut m = self.beta.add(h.scale(1.0 - theta));
                if let Some(hv) = hv {
                    m = m.add(hv[i].scale(s));
                }
                m.min_eig() >= 0.0
            })
        };
        ok(&self.q_disc, v.map(|p| &p.0[..])) && ok(&self.q_exact, v.map(|p| &p.1[..]))
    }
}

fn bisect(mut lo: f64, mut hi: f64, good: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if good(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Seeded list of `count` admissible competitors for the envelope of `α`.
pub fn candidate_generator(
    alpha: &AlphaForm,
    grid: TorusGrid,
    seed: u64,
    count: usize,
    opts: &CandidateOptions,
) -> Result<Vec<Candidate>> {
    alpha.check_grid(grid)?;
    if alpha.class_mass() <= 0.0 || alpha.beta().min_eig() < 0.0 {
        return Err(Error::Precondition(
            "candidates need β positive semidefinite with positive mass".into(),
        ));
    }
    let checks = Checks::new(alpha, grid)?;
    // smallest θ keeping β + (1-θ) dd^c q psd (θ = 1 always works)
    let theta0 = 1.0 - bisect(0.0, 1.0, |one_minus| checks.psd(1.0 - one_minus, 0.0, None));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.real_dim();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut terms = Vec::with_capacity(opts.terms);
        while terms.len() < opts.terms {
            let mut k = [0i32; 4];
            for kk in k.iter_mut().take(dim) {
                *kk = rng.gen_range(-opts.max_freq..=opts.max_freq);
            }
            if k.iter().all(|&v| v == 0) {
                continue;
            }
            terms.push(TrigTerm { k, cos: rng.gen_range(-1.0..1.0), sin: rng.gen_range(-1.0..1.0) });
        }
        let v = TrigPoly::new(terms);
        let theta = theta0 + (1.0 - theta0) * rng.gen_range(0.05..=1.0);
        let frac = rng.gen_range(0.0..=opts.s_fraction);
        out.push(Candidate::build(alpha, grid, theta, &v, frac, &checks)?);
    }
    Ok(out)
}

impl Candidate {
    fn build(
        alpha: &AlphaForm,
        grid: TorusGrid,
        theta: f64,
        v: &TrigPoly,
        frac: f64,
        checks: &Checks,
    ) -> Result<Self> {
        let parts = checks.v_parts(v, grid);
        let mut hi = 1.0;
        while checks.psd(theta, hi, Some(&parts)) && hi < 1e6 {
            hi *= 2.0;
        }
        let s_max = bisect(0.0, hi, |s| checks.psd(theta, s, Some(&parts)));
        let s = frac * s_max;
        Ok(Self::from_parts(alpha, grid, theta, v, s, s_max))
    }

    /// `-θ q + s v`, shifted so that its largest nodal value is 0.
    pub fn from_parts(alpha: &AlphaForm, grid: TorusGrid, theta: f64, v: &TrigPoly, s: f64, s_max: f64) -> Self {
        let raw = alpha.q.scaled(-theta).plus(&v.scaled(s));
        let shift = raw.to_field(grid).max();
        let psi = raw.plus(&TrigPoly::new(vec![TrigTerm { k: [0; 4], cos: -shift, sin: 0.0 }]));
        let field = psi.to_field(grid).map(|x| x.min(0.0));
        Self { psi, field, theta, s, s_max }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{envelope_obstacle_1d, SolverOptions};
    use crate::geometry::min_eigenvalue;
    use std::f64::consts::PI;

    fn alpha() -> AlphaForm {
        AlphaForm::scalar(0.3, TrigPoly::cosine([1, 0, 0, 0], -1.0 / PI))
    }

    #[test]
    fn seeded_and_admissible() {
        let g = TorusGrid::new(1, 64).unwrap();
        let a = candidate_generator(&alpha(), g, 7, 5, &CandidateOptions::default()).unwrap();
        let b = candidate_generator(&alpha(), g, 7, 5, &CandidateOptions::default()).unwrap();
        let coeff = alpha().coeff(g).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.field, y.field);
            assert!(x.field.max() <= 0.0 && x.field.max() > -1e-12);
            let m = min_eigenvalue(&coeff.add(&hessian_fd(&x.field)));
            assert!(m.min() >= -1e-9, "{}", m.min());
        }
    }

    #[test]
    fn zero_amplitude_without_potential_is_constant() {
        let g = TorusGrid::new(1, 16).unwrap();
        let c = Candidate::from_parts(&alpha(), g, 0.0, &TrigPoly::cosine([1, 1, 0, 0], 1.0), 0.0, 1.0);
        // -0·q + 0·v shifted: identically zero
        assert!(c.field.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn candidates_lie_below_the_envelope() {
        let g = TorusGrid::new(1, 64).unwrap();
        let env = envelope_obstacle_1d(&alpha(), g, &SolverOptions::for_dim(1).with_tol(1e-12)).unwrap();
        for c in candidate_generator(&alpha(), g, 11, 20, &CandidateOptions::default()).unwrap() {
            let excess = c
                .field
                .values()
                .iter()
                .zip(env.phi.values())
                .map(|(p, f)| p - f)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(excess <= 1e-9, "{excess}");
        }
    }
}
