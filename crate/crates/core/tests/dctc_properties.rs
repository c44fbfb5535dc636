use dctc_superpose::dctc::{
    consistency_residual, ctc_map, fixed_point, fixed_point_with, output_state, superoperator_matrix, Policy,
    SolverOptions,
};
use dctc_superpose::linalg::{max_entry_norm, validate, CMatrix, Candidate};
use dctc_superpose::random::{random_density, random_state, random_unitary, rng};
use dctc_superpose::superpose::two_state;
use dctc_superpose::{DensityMatrix, Error, StateVector, UnitaryMatrix};
use num_complex::Complex64;

mod common;
use common::{oracle_map, power_iteration};

#[test]
fn map_output_is_a_density_matrix() {
    let mut r = rng(100);
    for k in 0..500 {
        let (da, db) = (2 + k % 2, 2 + (k / 2) % 2);
        let u = random_unitary(&mut r, da * db);
        let rho = random_density(&mut r, da);
        let sigma = random_density(&mut r, db);
        let out = ctc_map(&u, &rho, &sigma).unwrap();
        let report = validate(Candidate::Density(out.entries()));
        assert!(report.is_valid(), "{:?}", report.failures().collect::<Vec<_>>());
        assert!(max_entry_norm(&(out.entries() - oracle_map(u.entries(), rho.entries(), sigma.entries()))) < 1e-12);
    }
}

#[test]
fn map_is_linear_in_sigma() {
    let mut r = rng(101);
    for _ in 0..50 {
        let u = random_unitary(&mut r, 6);
        let rho = random_density(&mut r, 2);
        let (s1, s2) = (random_density(&mut r, 3), random_density(&mut r, 3));
        let p = 0.3;
        let mix =
            DensityMatrix::new(s1.entries() * Complex64::new(p, 0.0) + s2.entries() * Complex64::new(1.0 - p, 0.0))
                .unwrap();
        let lhs = ctc_map(&u, &rho, &mix).unwrap().into_inner();
        let rhs = ctc_map(&u, &rho, &s1).unwrap().into_inner() * Complex64::new(p, 0.0)
            + ctc_map(&u, &rho, &s2).unwrap().into_inner() * Complex64::new(1.0 - p, 0.0);
        assert!(max_entry_norm(&(lhs - rhs)) < 1e-12);
    }
}

#[test]
fn superoperator_reproduces_map_on_random_inputs() {
    let mut r = rng(102);
    for _ in 0..50 {
        let u = random_unitary(&mut r, 6);
        let rho = random_density(&mut r, 3);
        let sigma = random_density(&mut r, 2);
        let l = superoperator_matrix(&u, &rho).unwrap();
        let vec_sigma = nalgebra::DVector::from_iterator(4, sigma.entries().iter().copied());
        let mapped = l * vec_sigma;
        let direct = ctc_map(&u, &rho, &sigma).unwrap();
        let reshaped = CMatrix::from_column_slice(2, 2, mapped.as_slice());
        assert!(max_entry_norm(&(reshaped - direct.entries())) < 1e-12);
    }
}

#[test]
fn spectral_solution_agrees_with_power_iteration() {
    let mut r = rng(103);
    let mut compared = 0;
    let mut tried = 0;
    while compared < 100 {
        tried += 1;
        assert!(tried < 400, "power iteration failed too often");
        let (da, db) = (2 + tried % 2, 2 + (tried / 2) % 2);
        let u = random_unitary(&mut r, da * db);
        let rho = random_density(&mut r, da);
        let Some(oracle) = power_iteration(u.entries(), rho.entries(), db, 20_000) else { continue };
        let solved = fixed_point(&u, &rho, Policy::RequireUnique).unwrap();
        assert!(max_entry_norm(&(solved.fixed_point.entries() - &oracle)) < 1e-6);
        assert!(solved.residual <= 1e-8);
        compared += 1;
    }
}

#[test]
fn swap_returns_cr_state() {
    let mut r = rng(104);
    for k in 0..50 {
        let d = 2 + k % 3;
        let rho = random_density(&mut r, d);
        let res = fixed_point(&UnitaryMatrix::swap(d, d), &rho, Policy::RequireUnique).unwrap();
        assert!(max_entry_norm(&(res.fixed_point.entries() - rho.entries())) < 1e-10);
        let out = output_state(&UnitaryMatrix::swap(d, d), &rho, &res.fixed_point).unwrap();
        assert!(max_entry_norm(&(out.entries() - rho.entries())) < 1e-10);
    }
}

#[test]
fn example_distinguisher_fixed_point_matches_oracle() {
    let u = UnitaryMatrix::new(two_state::distinguisher()).unwrap();
    let minus = two_state::state_set().states()[1].projector();
    let oracle = power_iteration(u.entries(), minus.entries(), 2, 20_000).unwrap();
    let solved = fixed_point(&u, &minus, Policy::RequireUnique).unwrap();
    assert!(max_entry_norm(&(solved.fixed_point.entries() - &oracle)) < 1e-10);
    assert!((solved.fixed_point.entries()[(1, 1)].re - 1.0).abs() < 1e-10);
}

#[test]
fn max_entropy_solution_is_consistent_and_no_less_mixed_than_random_fixed_points() {
    // CR qubit in |1⟩ selects a swap on a qutrit loop; |0⟩ would leave it alone.
    let u = UnitaryMatrix::permutation(&[0, 1, 2, 4, 3, 5]).unwrap();
    let rho = StateVector::basis(2, 0).projector();
    let res = fixed_point(&u, &rho, Policy::MaxEntropy).unwrap();
    assert_eq!(res.fixed_space_dim, 9);
    assert!(consistency_residual(&u, &rho, &res.fixed_point).unwrap() < 1e-8);
    assert!((res.fixed_point.entropy() - 3f64.ln()).abs() < 1e-8);

    let mut r = rng(105);
    for _ in 0..20 {
        let other = random_density(&mut r, 3);
        assert!(consistency_residual(&u, &rho, &other).unwrap() < 1e-12);
        assert!(other.entropy() <= res.fixed_point.entropy() + 1e-10);
    }
}

#[test]
fn non_unique_is_reported_with_dimension() {
    let mut r = rng(106);
    let rho = random_state(&mut r, 3).projector();
    match fixed_point(&UnitaryMatrix::identity(6), &rho, Policy::RequireUnique) {
        Err(Error::NonUniqueFixedPoint { dim }) => assert_eq!(dim, 4),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let mut r = rng(107);
    let u = random_unitary(&mut r, 6);
    let rho = random_density(&mut r, 4);
    assert!(matches!(fixed_point(&u, &rho, Policy::RequireUnique), Err(Error::Dimension(_))));
    let opts = SolverOptions::default();
    assert!(fixed_point_with(&u, &random_density(&mut r, 5), Policy::MaxEntropy, &opts).is_err());
}
