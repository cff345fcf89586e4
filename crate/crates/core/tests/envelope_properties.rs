use proptest::prelude::*;
use psh_core::envelope::{envelope_disc_average, envelope_obstacle_1d, SolverOptions};
use psh_core::geometry::{hessian_fd, AlphaForm, ScalarField, TorusGrid, TrigPoly, TrigTerm};

const N: usize = 32;

fn grid() -> TorusGrid {
    TorusGrid::new(1, N).unwrap()
}

/// `a = mean + amp·cos(2π k·x + phase)` with `k` small, possibly of mixed sign.
fn alpha_strategy() -> impl Strategy<Value = (f64, TrigPoly)> {
    (0.1f64..1.0, -2.0f64..2.0, 0usize..3, 0.0f64..6.28).prop_map(|(mean, amp, which, phase)| {
        let k = [[1, 0, 0, 0], [0, 1, 0, 0], [1, 1, 0, 0]][which];
        let k2 = 4.0 * std::f64::consts::PI * std::f64::consts::PI * (k[0] * k[0] + k[1] * k[1]) as f64;
        // dd^c (c cos) = -(π |k|^2) c cos in the (1/π)∂∂̄ frame.
        let c = -amp / (k2 / (4.0 * std::f64::consts::PI));
        let q = TrigPoly::new(vec![TrigTerm { k, cos: c * phase.cos(), sin: -c * phase.sin() }]);
        (mean, q)
    })
}

fn opts() -> SolverOptions {
    SolverOptions::for_dim(1).with_tol(1e-10)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn envelope_is_below_obstacle_and_psh((mean, q) in alpha_strategy()) {
        let alpha = AlphaForm::scalar(mean, q);
        let env = envelope_obstacle_1d(&alpha, grid(), &opts()).unwrap();
        prop_assert!(env.phi.max() <= 1e-12);
        let total = hessian_fd(&alpha.q_field(grid()).add(&env.phi));
        for i in 0..grid().len() {
            prop_assert!(mean + total.at(i).trace() >= -1e-6);
        }
    }

    #[test]
    fn envelope_is_positively_homogeneous((mean, q) in alpha_strategy(), s in 0.2f64..3.0) {
        let a = envelope_obstacle_1d(&AlphaForm::scalar(mean, q.clone()), grid(), &opts()).unwrap();
        let b = envelope_obstacle_1d(&AlphaForm::scalar(s * mean, q.scaled(s)), grid(), &opts()).unwrap();
        prop_assert!(a.phi.affine(s, 0.0).sup_distance(&b.phi) < 1e-6 * s.max(1.0));
    }

    #[test]
    fn potential_constant_is_irrelevant((mean, q) in alpha_strategy(), shift in -5.0f64..5.0) {
        let shifted = q.plus(&TrigPoly::new(vec![TrigTerm { k: [0; 4], cos: shift, sin: 0.0 }]));
        let a = envelope_obstacle_1d(&AlphaForm::scalar(mean, q), grid(), &opts()).unwrap();
        let b = envelope_obstacle_1d(&AlphaForm::scalar(mean, shifted), grid(), &opts()).unwrap();
        prop_assert!(a.phi.sup_distance(&b.phi) < 1e-7);
    }

    #[test]
    fn envelope_decreases_with_the_obstacle((mean, q) in alpha_strategy(), drop in 0.0f64..1.0) {
        let alpha = AlphaForm::scalar(mean, q);
        let high = envelope_disc_average(&alpha, &ScalarField::zeros(grid()), &opts()).unwrap();
        let low = envelope_disc_average(&alpha, &ScalarField::constant(grid(), -drop), &opts()).unwrap();
        prop_assert!(high.phi.affine(1.0, -drop).sup_distance(&low.phi) < 1e-7);
    }
}

#[test]
fn kahler_class_envelope_vanishes() {
    let alpha = AlphaForm::scalar(1.0, TrigPoly::zero());
    let env = envelope_obstacle_1d(&alpha, grid(), &opts()).unwrap();
    assert!(env.phi.values().iter().all(|&v| v.abs() < 1e-12));
    assert_eq!(env.contact_fraction(), 1.0);
}

#[test]
fn translated_form_translates_envelope() {
    let q = TrigPoly::cosine([1, 0, 0, 0], -1.0 / std::f64::consts::PI);
    let moved = TrigPoly::new(vec![TrigTerm { k: [1, 0, 0, 0], cos: 0.0, sin: 1.0 / std::f64::consts::PI }]);
    // cos(2π(x - 1/4)) = sin(2πx)
    let a = envelope_obstacle_1d(&AlphaForm::scalar(0.3, q), grid(), &opts()).unwrap();
    let b = envelope_obstacle_1d(&AlphaForm::scalar(0.3, moved.scaled(-1.0)), grid(), &opts()).unwrap();
    let g = grid();
    for i in 0..g.len() {
        let j = g.shifted(i, &[(N / 4) as isize, 0]);
        assert!((a.phi.value(i) - b.phi.value(j)).abs() < 1e-8);
    }
}
