use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::{Sampler, ScalarField};
use super::herm::{Herm, HermitianField};
use super::quadrature::{pairwise_sum, polar_square_log, polar_square_power};
use crate::error::{Error, Result};

/// Half-width, in nodes, of the neighbourhood integrated by the polar rule.
pub const POLE_REFINE_NODES: usize = 4;
const POLE_RULE_ORDER: usize = 24;

/// Discrete `dd^c u`: central second differences of `d^2 u / dz_j dz̄_k`,
/// divided by `pi`, so that in dimension one the coefficient is `Δu / (4π)`.
///
/// Nodes whose stencil touches a pole node are flagged and left at zero.
pub fn hessian_fd(u: &ScalarField) -> HermitianField {
    let g = u.grid();
    let v = u.values();
    let inv = 1.0 / (4.0 * PI * g.h() * g.h());
    let flagged = pole_neighbourhood(u, 1);
    let coeff: Vec<Herm> = (0..g.len())
        .into_par_iter()
        .map(|i| {
            if flagged[i] {
                return Herm::zero(g.n());
            }
            let second = |axis: usize| v[g.step(i, axis, 1)] + v[g.step(i, axis, -1)] - 2.0 * v[i];
            if g.n() == 1 {
                return Herm::scalar(inv * (second(0) + second(1)));
            }
            let mixed = |a: usize, b: usize| {
                let ap = g.step(i, a, 1);
                let am = g.step(i, a, -1);
                (v[g.step(ap, b, 1)] - v[g.step(ap, b, -1)] - v[g.step(am, b, 1)]
                    + v[g.step(am, b, -1)])
                    * 0.25
            };
            let d1 = inv * (second(0) + second(1));
            let d2 = inv * (second(2) + second(3));
            // axes: 0 = x1, 1 = y1, 2 = x2, 3 = y2
            let re = inv * (mixed(0, 2) + mixed(1, 3));
            let im = inv * (mixed(0, 3) - mixed(1, 2));
            Herm::two(d1, d2, Complex64::new(re, im))
        })
        .collect();
    HermitianField::from_parts(g, coeff, flagged)
}

/// Mask of nodes within Chebyshev distance `radius` of a pole.
pub fn pole_neighbourhood(u: &ScalarField, radius: usize) -> Vec<bool> {
    let g = u.grid();
    let mut mask = vec![false; g.len()];
    let dim = g.real_dim();
    let r = radius as isize;
    for p in u.poles() {
        let mut off = [0isize; 4];
        let span = (2 * r + 1).pow(dim as u32);
        for k in 0..span {
            let mut kk = k;
            for slot in off.iter_mut().take(dim) {
                *slot = (kk % (2 * r + 1) as isize) - r;
                kk /= 2 * r + 1;
            }
            mask[g.shifted(p.node, &off[..dim])] = true;
        }
    }
    mask
}

/// Density of the top wedge power against Lebesgue measure, `n! det`.
/// Indefinite nodes keep their signed value.
pub fn ma_density(f: &HermitianField) -> ScalarField {
    let fact = if f.grid().n() == 1 { 1.0 } else { 2.0 };
    f.map_scalar(|h| fact * h.det())
}

pub fn min_eigenvalue(f: &HermitianField) -> ScalarField {
    f.map_scalar(|h| h.min_eig())
}

/// `∫_X u · w dV` with the periodic trapezoidal rule (node average, the torus
/// has unit volume). Declared log poles of `u` are integrated with the polar
/// rule on the surrounding `(2·4+1)^2`-node square.
pub fn integrate(u: &ScalarField, weight: Option<&ScalarField>) -> Result<f64> {
    let g = u.grid();
    if let Some(w) = weight {
        if w.grid() != g {
            return Err(Error::Validation("weight lives on a different grid".into()));
        }
        if w.has_poles() {
            return Err(Error::Validation("weights must be pole-free".into()));
        }
    }
    let wv = |i: usize| weight.map_or(1.0, |w| w.value(i));
    if !u.has_poles() {
        let terms: Vec<f64> = (0..g.len()).map(|i| u.value(i) * wv(i)).collect();
        return Ok(pairwise_sum(&terms) * g.cell_volume());
    }
    let refined = refinement_mask(u)?;
    let terms: Vec<f64> = (0..g.len())
        .map(|i| if refined[i] { 0.0 } else { u.value(i) * wv(i) })
        .collect();
    let mut total = pairwise_sum(&terms) * g.cell_volume();
    let half = (POLE_REFINE_NODES as f64 + 0.5) * g.h();
    for p in u.poles() {
        let a = g.point(p.node);
        let w0 = wv(p.node);
        let reg = |dx: f64, dy: f64| {
            let x = [a[0] + dx, a[1] + dy];
            let r2 = dx * dx + dy * dy;
            if r2 == 0.0 {
                return u.regular_part_at(p.node) * w0;
            }
            let w = weight.map_or(1.0, |w| w.sample(&x));
            let log = p.coeff * r2.ln();
            (u.sample(&x) - log) * w + log * (w - w0)
        };
        total += polar_square_log(half, p.coeff * w0, POLE_RULE_ORDER, reg);
    }
    Ok(total)
}

/// `∫_X exp(u) dV`. A declared pole `c log|z-a|^2` of `u` makes the integrand
/// behave like `|z-a|^(2c)`; this is integrable exactly when `c > -1`.
pub fn integrate_exp(u: &ScalarField) -> Result<f64> {
    let g = u.grid();
    for p in u.poles() {
        if p.coeff <= -1.0 {
            return Err(Error::KltViolation { coeff: -p.coeff });
        }
    }
    if !u.has_poles() {
        let terms: Vec<f64> = u.values().iter().map(|v| v.exp()).collect();
        return Ok(pairwise_sum(&terms) * g.cell_volume());
    }
    let refined = refinement_mask(u)?;
    let terms: Vec<f64> = (0..g.len())
        .map(|i| if refined[i] { 0.0 } else { u.value(i).exp() })
        .collect();
    let mut total = pairwise_sum(&terms) * g.cell_volume();
    let half = (POLE_REFINE_NODES as f64 + 0.5) * g.h();
    for p in u.poles() {
        let a = g.point(p.node);
        let reg = |dx: f64, dy: f64| {
            let r2 = dx * dx + dy * dy;
            if r2 == 0.0 {
                return u.regular_part_at(p.node).exp();
            }
            (u.sample(&[a[0] + dx, a[1] + dy]) - p.coeff * r2.ln()).exp()
        };
        total += polar_square_power(half, p.coeff, POLE_RULE_ORDER, reg);
    }
    Ok(total)
}

fn refinement_mask(u: &ScalarField) -> Result<Vec<bool>> {
    let g = u.grid();
    if g.n() != 1 {
        return Err(Error::Validation(
            "pole-adapted integration is implemented for n = 1".into(),
        ));
    }
    let n = g.nodes();
    for (i, p) in u.poles().iter().enumerate() {
        for q in &u.poles()[i + 1..] {
            let (a, b) = (g.coords(p.node), g.coords(q.node));
            let sep = (0..2)
                .map(|k| {
                    let d = (a[k] + n - b[k]) % n;
                    d.min(n - d)
                })
                .max()
                .unwrap();
            if sep <= 2 * POLE_REFINE_NODES {
                return Err(Error::Validation(format!(
                    "poles at nodes {} and {} are closer than {} nodes",
                    p.node,
                    q.node,
                    2 * POLE_REFINE_NODES + 1
                )));
            }
        }
    }
    Ok(pole_neighbourhood(u, POLE_REFINE_NODES))
}

/// Mass of `dd^c u` inside the square box of half-width `half_nodes` nodes
/// around `center`, computed as the discrete flux through the box boundary.
/// The value stored at an interior pole node never enters.
pub fn ddc_box_mass(u: &ScalarField, center: usize, half_nodes: usize) -> Result<f64> {
    let g = u.grid();
    if g.n() != 1 {
        return Err(Error::Validation("box flux is implemented for n = 1".into()));
    }
    if 2 * half_nodes + 1 >= g.nodes() {
        return Err(Error::Validation("box does not fit in the torus".into()));
    }
    let m = half_nodes as isize;
    let mut flux = Vec::new();
    for k in -m..=m {
        // right and left faces, top and bottom faces: (outside - inside)
        for (inside, outside) in [
            ([m, k], [m + 1, k]),
            ([-m, k], [-m - 1, k]),
            ([k, m], [k, m + 1]),
            ([k, -m], [k, -m - 1]),
        ] {
            let i = g.shifted(center, &inside);
            let o = g.shifted(center, &outside);
            flux.push(u.value(o) - u.value(i));
        }
    }
    Ok(pairwise_sum(&flux) / (4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::trig::{TrigPoly, TrigTerm};
    use crate::geometry::TorusGrid;
    use proptest::prelude::*;

    fn g1(n: usize) -> TorusGrid {
        TorusGrid::new(1, n).unwrap()
    }

    #[test]
    fn zero_field_has_zero_hessian() {
        let g = TorusGrid::new(2, 8).unwrap();
        let h = hessian_fd(&ScalarField::zeros(g));
        assert!(h.coeff().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn cosine_hessian_converges_at_second_order() {
        let mut errs = Vec::new();
        for n in [32, 64, 128] {
            let g = g1(n);
            let u = ScalarField::from_fn(g, |x| (2.0 * PI * x[0]).cos());
            let h = hessian_fd(&u);
            let err = (0..g.len())
                .map(|i| (h.at(i).d1 + PI * (2.0 * PI * g.point(i)[0]).cos()).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[2] < 1e-3);
        for w in errs.windows(2) {
            assert!((w[0] / w[1] - 4.0).abs() < 0.05, "{errs:?}");
        }
    }

    #[test]
    fn log_pole_carries_unit_mass() {
        let g = g1(256);
        let a = g.index(&[128, 128]);
        let u = ScalarField::log_distance(g, a, 1.0);
        let h = hessian_fd(&u);
        assert!(h.flagged()[a] && h.flagged()[g.step(a, 0, 1)]);
        for m in [2, 4, 8] {
            let mass = ddc_box_mass(&u, a, m).unwrap();
            assert!((mass - 1.0).abs() < 2e-2, "box {m}: {mass}");
        }
    }

    #[test]
    fn ma_density_examples() {
        let g = TorusGrid::new(2, 8).unwrap();
        let f = HermitianField::constant(g, Herm::two(2.0, 3.0, Complex64::new(0.0, 0.0)));
        assert!(ma_density(&f).values().iter().all(|&v| v == 12.0));
        let g = g1(8);
        let f = HermitianField::constant(g, Herm::scalar(0.7));
        assert!(ma_density(&f).values().iter().all(|&v| v == 0.7));
    }

    #[test]
    fn min_eigenvalue_examples() {
        let g = TorusGrid::new(2, 8).unwrap();
        let cases = [
            (Herm::two(1.0, 2.0, Complex64::new(0.0, 0.0)), 1.0),
            (Herm::two(0.0, 0.0, Complex64::new(0.0, 1.0)), -1.0),
            (Herm::zero(2), 0.0),
        ];
        for (h, want) in cases {
            let m = min_eigenvalue(&HermitianField::constant(g, h));
            assert!(m.values().iter().all(|&v| (v - want).abs() < 1e-15));
        }
    }

    #[test]
    fn integrate_examples() {
        let g = g1(64);
        assert!((integrate(&ScalarField::constant(g, 1.0), None).unwrap() - 1.0).abs() < 1e-15);
        let c = ScalarField::from_fn(g, |x| (2.0 * PI * x[0]).cos());
        assert!(integrate(&c, None).unwrap().abs() < 1e-12);
    }

    #[test]
    fn klt_pole_integral_matches_closed_form() {
        // ∫ r^{-1} over the unit-area square centred at the pole is 4 asinh(1)
        let oracle = 4.0 * 1f64.asinh();
        for n in [64, 256] {
            let g = g1(n);
            let a = g.index(&[n / 2, n / 2]);
            let minus_gamma = ScalarField::log_distance(g, a, -0.5);
            let v = integrate_exp(&minus_gamma).unwrap();
            assert!((v / oracle - 1.0).abs() < 1e-2, "N={n}: {v} vs {oracle}");
        }
    }

    #[test]
    fn non_integrable_pole_is_rejected() {
        let g = g1(32);
        let u = ScalarField::log_distance(g, 0, -1.2);
        assert!(matches!(integrate_exp(&u), Err(Error::KltViolation { .. })));
    }

    #[test]
    fn log_pole_integral() {
        // ∫ log r^2 over the centred unit square, against a fine product rule
        let g = g1(128);
        let u = ScalarField::log_distance(g, g.index(&[64, 64]), 1.0);
        let (x, w) = crate::geometry::quadrature::gauss_legendre_unit(300);
        let mut q = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            for (yi, wj) in x.iter().zip(&w) {
                q += wi * wj * ((xi * 0.5).powi(2) + (yi * 0.5).powi(2)).ln();
            }
        }
        let v = integrate(&u, None).unwrap();
        assert!((v - q).abs() < 1e-3, "{v} vs {q}");
    }

    fn trig_strategy(dim: usize) -> impl Strategy<Value = TrigPoly> {
        prop::collection::vec(
            (prop::array::uniform4(-2i32..=2), -1.0f64..1.0, -1.0f64..1.0),
            1..4,
        )
        .prop_map(move |v| {
            TrigPoly::new(
                v.into_iter()
                    .map(|(mut k, c, s)| {
                        for kk in k.iter_mut().skip(dim) {
                            *kk = 0;
                        }
                        TrigTerm { k, cos: c, sin: s }
                    })
                    .collect(),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn hessian_is_linear(p in trig_strategy(4), q in trig_strategy(4)) {
            let g = TorusGrid::new(2, 8).unwrap();
            let (u, v) = (p.to_field(g), q.to_field(g));
            let lhs = hessian_fd(&u.add(&v));
            let rhs = hessian_fd(&u).add(&hessian_fd(&v));
            for i in 0..g.len() {
                prop_assert!(lhs.at(i).add(rhs.at(i).scale(-1.0)).norm() < 1e-12);
            }
        }

        #[test]
        fn discrete_stokes(p in trig_strategy(2), n2 in any::<bool>()) {
            let g = if n2 { TorusGrid::new(2, 8).unwrap() } else { g1(32) };
            let tr = hessian_fd(&p.to_field(g)).map_scalar(|h| h.trace());
            prop_assert!(integrate(&tr, None).unwrap().abs() < 1e-10);
        }

        #[test]
        fn psd_density_nonnegative_and_exact(d1 in 0.0f64..3.0, d2 in 0.0f64..3.0, t in 0.0f64..1.0, th in 0.0f64..6.3) {
            let r = t * (d1 * d2).sqrt();
            let h = Herm::two(d1, d2, Complex64::from_polar(r, th));
            let g = TorusGrid::new(2, 8).unwrap();
            let dens = ma_density(&HermitianField::constant(g, h));
            let brute = 2.0 * (d1 * d2 - r * r);
            prop_assert!(dens.value(0) >= -1e-12);
            prop_assert!((dens.value(0) - brute).abs() < 1e-12);
        }

        #[test]
        fn min_eig_below_diagonal(d1 in -3.0f64..3.0, d2 in -3.0f64..3.0, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let h = Herm::two(d1, d2, Complex64::new(re, im));
            prop_assert!(h.min_eig() <= d1 + 1e-12 && h.min_eig() <= d2 + 1e-12);
        }
    }
}
