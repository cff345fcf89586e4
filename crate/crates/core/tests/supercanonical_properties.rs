use std::sync::Arc;

use proptest::prelude::*;
use psh_core::geometry::TorusGrid;
use psh_core::supercanonical::{GreenTable, KltWeight, OptimizerOptions, Supercanonical, SupercanonicalProblem};

fn solver(p: f64, poles: Vec<(usize, f64)>) -> Supercanonical {
    let g = TorusGrid::new(1, 32).unwrap();
    let table = Arc::new(GreenTable::new(g).unwrap());
    let gamma = KltWeight { poles, normalize: false };
    Supercanonical::new(table, SupercanonicalProblem { lambda: 1.0, gamma, p, source_stride: 4 }).unwrap()
}

fn simplex(raw: &[f64]) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn objective_is_concave_on_segments(
        a in prop::collection::vec(0.01f64..1.0, 64),
        b in prop::collection::vec(0.01f64..1.0, 64),
        z0 in 0usize..1024,
        s in 0.0f64..1.0,
    ) {
        let sc = solver(1.0, vec![(5 * 32 + 9, 0.5)]);
        let (ra, rb) = (simplex(&a), simplex(&b));
        let mid: Vec<f64> = ra.iter().zip(&rb).map(|(x, y)| (1.0 - s) * x + s * y).collect();
        let lhs = sc.objective(z0, &mid);
        let rhs = (1.0 - s) * sc.objective(z0, &ra) + s * sc.objective(z0, &rb);
        prop_assert!(lhs >= rhs - 1e-10, "{lhs} < {rhs}");
    }

    #[test]
    fn objective_decreases_with_p(a in prop::collection::vec(0.01f64..1.0, 64), z0 in 0usize..1024) {
        let rho = simplex(&a);
        let mut prev = f64::INFINITY;
        for p in [1.0, 2.0, 4.0] {
            let v = solver(p, vec![]).objective(z0, &rho);
            prop_assert!(v <= prev + 1e-9);
            prev = v;
        }
    }
}

#[test]
fn optimum_beats_every_dirac() {
    let sc = solver(1.0, vec![(5 * 32 + 9, 0.5)]);
    let z0 = 17 * 32 + 3;
    let sol = sc.solve_at(z0, &OptimizerOptions::default());
    let m = sc.sources().len();
    for j in 0..m {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        assert!(sol.value >= sc.objective(z0, &e) - 1e-9);
    }
}
