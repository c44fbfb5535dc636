//! The fixed-point solver on a few hand-picked circuits.

use std::f64::consts::FRAC_1_SQRT_2;

use dctc_superpose::dctc::{self, consistency_residual};
use dctc_superpose::linalg::CVector;
use dctc_superpose::random::{random_density, random_unitary, rng};
use dctc_superpose::superpose::two_state;
use dctc_superpose::{fixed_point, Error, Policy, StateVector, UnitaryMatrix};
use num_complex::Complex64;

fn main() -> dctc_superpose::Result<()> {
    let plus = StateVector::new(CVector::from_vec(vec![Complex64::new(FRAC_1_SQRT_2, 0.0); 2]))?;
    let minus = StateVector::new(CVector::from_vec(vec![
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::new(-FRAC_1_SQRT_2, 0.0),
    ]))?;

    // SWAP sends the CR state straight into the loop.
    let swap = UnitaryMatrix::swap(2, 2);
    let r = fixed_point(&swap, &plus.projector(), Policy::RequireUnique)?;
    println!("SWAP, |+><+|:\n{}", r.fixed_point.entries());

    // The two-state distinguisher fed |->.
    let u = UnitaryMatrix::new(two_state::distinguisher())?;
    let r = fixed_point(&u, &minus.projector(), Policy::RequireUnique)?;
    println!("distinguisher, |-><-|:\n{}residual {:.1e}", r.fixed_point.entries(), r.residual);

    // Identity leaves every loop state consistent.
    let id = UnitaryMatrix::identity(4);
    match fixed_point(&id, &plus.projector(), Policy::RequireUnique) {
        Err(Error::NonUniqueFixedPoint { dim }) => println!("identity: fixed space has dimension {dim}"),
        other => println!("identity: unexpected {other:?}"),
    }

    // A generic random circuit has a unique solution.
    let mut g = rng(11);
    let u = random_unitary(&mut g, 6);
    let rho = random_density(&mut g, 2);
    let r = dctc::fixed_point(&u, &rho, Policy::RequireUnique)?;
    println!(
        "random 2x3 circuit: entropy {:.6}, residual {:.1e}",
        r.fixed_point.entropy(),
        consistency_residual(&u, &rho, &r.fixed_point)?
    );
    Ok(())
}
