//! Perfect discrimination of random non-orthogonal sets of growing size.
//!
//! ```text
//! cargo run --example distinguish_states -- 6
//! ```

use dctc_superpose::random::{random_state_set, rng};
use dctc_superpose::{build_distinguisher, distinguish};

fn main() -> dctc_superpose::Result<()> {
    let max_n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let mut r = rng(2024);
    for n in 2..=max_n {
        let set = random_state_set(&mut r, n);
        let bundle = build_distinguisher(&set, 0)?;
        let cond = bundle.condition_report();
        let mut decoded = Vec::with_capacity(n);
        let mut worst_residual = 0.0_f64;
        for psi in set.states() {
            let d = distinguish(&bundle, psi)?;
            decoded.push(d.decoded);
            worst_residual = worst_residual.max(d.residual);
        }
        println!(
            "N = {n}: decoded {decoded:?}, min_jk |<j|U_k psi_j>| = {:.4}, worst residual {worst_residual:.1e}",
            cond.min_overlap
        );
    }
    Ok(())
}
