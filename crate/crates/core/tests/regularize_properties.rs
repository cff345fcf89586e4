use std::f64::consts::PI;

use proptest::prelude::*;
use psh_core::geometry::{AlphaForm, ScalarField, TorusGrid, TrigPoly, TrigTerm};
use psh_core::regularize::{estimate_k, monotone_transform, rho, rho_trig, RegularizationParams, SmoothingKernel};

fn g1() -> TorusGrid {
    TorusGrid::new(1, 32).unwrap()
}

/// `(mean, ψ)` with `mean + dd^c ψ >= 0`: one mode scaled below the bound.
fn psh_pair() -> impl Strategy<Value = (f64, TrigPoly)> {
    (0.2f64..1.5, 0usize..4, 0.0f64..1.0, 0.0f64..6.28).prop_map(|(mean, which, frac, phase)| {
        let k = [[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 0], [2, -1, 0, 0]][which];
        let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
        // |dd^c (c cos)| <= π k2 |c|
        let c = frac * mean / (PI * k2);
        let psi = TrigPoly::new(vec![TrigTerm { k, cos: c * phase.cos(), sin: c * phase.sin() }]);
        (mean, psi)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_is_nondecreasing((mean, psi) in psh_pair(), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let alpha = AlphaForm::scalar(mean, TrigPoly::zero());
        let k = estimate_k(&alpha, g1()).unwrap();
        let params = RegularizationParams::new(k, 1.0, 0.25).unwrap();
        let table = monotone_transform(&psi, &[x, y], &params, &SmoothingKernel::new(1));
        prop_assert!(table.is_monotone(1e-12), "{}", table.max_decrease);
    }

    #[test]
    fn smoothing_only_shrinks_modes((_, psi) in psh_pair(), t in 0.001f64..0.25) {
        let smoothed = rho_trig(&psi, t, &SmoothingKernel::new(1)).unwrap();
        let g = TorusGrid::new(1, 64).unwrap();
        let (raw, smooth) = (psi.to_field(g), smoothed.to_field(g));
        prop_assert!(smooth.min() >= raw.min() - 1e-12 && smooth.max() <= raw.max() + 1e-12);
    }

    #[test]
    fn sampled_and_exact_smoothing_agree((_, psi) in psh_pair(), t in 0.02f64..0.25) {
        let kernel = SmoothingKernel::new(1);
        let g = TorusGrid::new(1, 64).unwrap();
        let sampled = rho(&psi.to_field(g), t, &kernel).unwrap();
        let exact = rho_trig(&psi, t, &kernel).unwrap().to_field(g);
        // bilinear sampling error of a unit-amplitude mode, scaled by its size
        let f = psi.to_field(g);
        prop_assert!(sampled.sup_distance(&exact) <= 5e-2 * (f.max() - f.min()).max(1e-3));
    }
}

#[test]
fn constants_are_fixed_by_smoothing() {
    let kernel = SmoothingKernel::new(1);
    let u = ScalarField::constant(g1(), -0.7);
    for t in [1e-3, 0.05, 0.25] {
        let r = rho(&u, t, &kernel).unwrap();
        assert!(r.values().iter().all(|v| (v + 0.7).abs() < 1e-14));
    }
}
