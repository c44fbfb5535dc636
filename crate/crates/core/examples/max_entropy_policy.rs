//! Selecting among many consistent loop states by maximum entropy.

use dctc_superpose::dctc::{fixed_point, Policy};
use dctc_superpose::{StateVector, UnitaryMatrix};

fn main() -> dctc_superpose::Result<()> {
    // Qutrit CR, qubit CTC. The permutation swaps the CTC bit only when the
    // CR register holds |1>, so with CR in |0> the loop is left untouched.
    let u = UnitaryMatrix::permutation(&[0, 1, 3, 2, 4, 5])?;
    let rho_cr = StateVector::basis(3, 0).projector();

    let r = fixed_point(&u, &rho_cr, Policy::MaxEntropy)?;
    println!("fixed space dimension {}", r.fixed_space_dim);
    println!("selected state:\n{}", r.fixed_point.entries());
    println!("entropy {:.12} nats", r.fixed_point.entropy());

    let id = UnitaryMatrix::identity(9);
    let r = fixed_point(&id, &StateVector::basis(3, 2).projector(), Policy::MaxEntropy)?;
    println!("identity on 3x3: eigenvalues {:?}", r.fixed_point.eigenvalues());
    Ok(())
}
