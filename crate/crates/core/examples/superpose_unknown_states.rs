//! Superposing two unknown qutrit states with complex weights, then checking
//! the ancilla against the target for every pair.

use dctc_superpose::random::{random_complex, random_state_set, rng};
use dctc_superpose::superpose::{build_u_prime, gamma, run_protocol_with};
use dctc_superpose::{build_distinguisher, Error, SuperpositionSpec};

fn main() -> dctc_superpose::Result<()> {
    let mut g = rng(5);
    let set = random_state_set(&mut g, 3);
    let spec = SuperpositionSpec::new(random_complex(&mut g), random_complex(&mut g))?;
    let bundle = build_distinguisher(&set, 0)?;

    let u_prime = build_u_prime(&set, &spec, bundle.uks())?;
    println!("U' is {0}x{0}, unitarity residual {1:.1e}", u_prime.dim(), u_prime.unitarity_residual());

    for m in 0..set.len() {
        for n in 0..set.len() {
            match run_protocol_with(&bundle, m, n, &spec) {
                Ok(r) => println!(
                    "({m}, {n}): gamma {:.6}, fidelity {:.14}, impurity {:.1e}",
                    gamma(&set, m, n, &spec)?,
                    r.fidelity,
                    r.ancilla_impurity
                ),
                Err(e @ Error::DegenerateSuperposition { .. }) => println!("({m}, {n}): {e}"),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}
