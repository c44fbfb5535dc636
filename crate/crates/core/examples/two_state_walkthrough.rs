//! The smallest complete run: discriminate {|0⟩, |−⟩} and superpose them.
//!
//! ```text
//! cargo run --example two_state_walkthrough
//! ```

use std::f64::consts::FRAC_1_SQRT_2;

use dctc_superpose::superpose::{self, two_state};
use dctc_superpose::{build_distinguisher, distinguish, SuperpositionSpec};
use num_complex::Complex64;

fn main() -> dctc_superpose::Result<()> {
    let set = two_state::state_set();
    let bundle = build_distinguisher(&set, 0)?;

    println!("U_0 =\n{}", bundle.uks()[0].entries());
    println!("U_1 =\n{}", bundle.uks()[1].entries());

    for (j, psi) in set.states().iter().enumerate() {
        let d = distinguish(&bundle, psi)?;
        println!("input ψ_{j} -> decoded {} (residual {:.1e})", d.decoded, d.residual);
    }

    let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let spec = SuperpositionSpec::new(a, a)?;
    for m in 0..2 {
        for n in 0..2 {
            let r = superpose::run_protocol_with(&bundle, m, n, &spec)?;
            let amps: Vec<String> = r.ancilla_state.amplitudes().iter().map(|z| format!("{:.6}", z)).collect();
            println!("(m, n) = ({m}, {n}): ancilla [{}], fidelity {:.12}", amps.join(", "), r.fidelity);
        }
    }
    Ok(())
}
