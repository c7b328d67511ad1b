//! Homotopy solver checked against independent optimization routes.

mod support;

use nalgebra::DVector;
use srckit::solver::{
    solve_constrained, solve_lasso, verify_kkt, SolverOptions, SparseProblem, SparseSolution,
};

#[test]
fn homotopy_matches_coordinate_descent_on_random_instances() {
    // Small random problems across the lambda ladder; the coordinate-descent
    // oracle is run to a 1e-12 duality gap.
    let mut checked = 0;
    for seed in 0..25u64 {
        let m = 5 + (seed as usize * 7) % 16; // 5..=20
        let n = m + (seed as usize * 11) % (41 - m); // m..=40
        let dict = support::random_unit_dictionary(m, n, seed);
        let y = support::random_unit_vector(m, seed + 1000);
        for &lambda in &[1e-1, 1e-2, 1e-3] {
            let problem = SparseProblem::new(dict.clone(), y.clone(), lambda).unwrap();
            let solution = solve_lasso(&problem, &SolverOptions::default()).unwrap();
            let oracle = support::lasso_coordinate_descent(&dict, &y, lambda, 1e-12);
            let oracle_objective = support::lasso_objective(&dict, &y, lambda, &oracle);
            assert!(
                (solution.objective - oracle_objective).abs() <= 1e-8,
                "seed {seed} lambda {lambda}: homotopy {:.12e} vs oracle {:.12e}",
                solution.objective,
                oracle_objective
            );
            let report = verify_kkt(&problem, &solution, 1e-6);
            assert!(report.passed, "seed {seed} lambda {lambda}: {report:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 75);
}

#[test]
fn path_points_are_global_optima() {
    // Solving at several lambdas samples points of one homotopy path; each
    // must be the global optimum for its lambda (within the oracle gap).
    let mut instances = 0;
    for seed in 100..200u64 {
        let m = 4 + (seed as usize) % 17;
        let n = m + (seed as usize * 3) % (41 - m);
        let dict = support::random_unit_dictionary(m, n, seed);
        let y = support::random_unit_vector(m, seed + 5000);
        let lambda_max = dict.tr_mul(&y).amax();
        for frac in [0.3, 0.05, 0.01] {
            let lambda = frac * lambda_max;
            let problem = SparseProblem::new(dict.clone(), y.clone(), lambda).unwrap();
            let solution = solve_lasso(&problem, &SolverOptions::default()).unwrap();
            let oracle = support::lasso_coordinate_descent(&dict, &y, lambda, 1e-12);
            let oracle_objective = support::lasso_objective(&dict, &y, lambda, &oracle);
            assert!(
                solution.objective <= oracle_objective + 1e-8,
                "seed {seed} frac {frac}: {:.14e} > {:.14e}",
                solution.objective,
                oracle_objective
            );
        }
        instances += 1;
    }
    assert_eq!(instances, 100);
}

#[test]
fn constrained_recovers_planted_two_sparse_vector() {
    // Incoherent consistent system with a planted 2-sparse solution; the
    // enumeration oracle confirms the representation is unique before the
    // recovery claim is asserted.
    for seed in 0..10u64 {
        let dict = support::random_unit_dictionary(10, 20, 777 + seed);
        let i = (3 + seed as usize) % 20;
        let j = (11 + 2 * seed as usize) % 20;
        let (i, j) = (i.min(j), i.max(j));
        if i == j {
            continue;
        }
        let ci = 1.0 + 0.1 * seed as f64;
        let cj = -0.7;
        let y = dict.column(i) * ci + dict.column(j) * cj;
        let y = DVector::from(y);

        let reps = support::two_sparse_representations(&dict, &y, 1e-9);
        assert_eq!(reps.len(), 1, "seed {seed}: representation not unique");
        assert_eq!((reps[0].0, reps[0].1), (i, j));

        let problem = SparseProblem::new(dict.clone(), y.clone(), 0.0).unwrap();
        let solution = solve_constrained(&problem, &SolverOptions::default()).unwrap();
        for k in 0..20 {
            let expected = if k == i {
                ci
            } else if k == j {
                cj
            } else {
                0.0
            };
            assert!(
                (solution.coefficients[k] - expected).abs() <= 1e-6,
                "seed {seed} coefficient {k}: {} vs {expected}",
                solution.coefficients[k]
            );
        }
    }
}

#[test]
fn kkt_certifies_oracle_solutions_too() {
    // The verifier is symmetric: it must also pass solutions produced by the
    // independent route.
    let dict = support::random_unit_dictionary(8, 16, 4242);
    let y = support::random_unit_vector(8, 17);
    let lambda = 5e-3;
    let alpha = support::lasso_coordinate_descent(&dict, &y, lambda, 1e-14);
    let active: Vec<usize> = (0..16).filter(|&k| alpha[k] != 0.0).collect();
    let residual = (&y - &dict * &alpha).norm();
    let objective = support::lasso_objective(&dict, &y, lambda, &alpha);
    let problem = SparseProblem::new(dict, y, lambda).unwrap();
    let solution = SparseSolution {
        coefficients: alpha,
        active_set: active,
        iterations: 0,
        objective,
        residual_norm: residual,
        lambda,
    };
    let report = verify_kkt(&problem, &solution, 1e-6);
    assert!(report.passed, "{report:?}");
}
