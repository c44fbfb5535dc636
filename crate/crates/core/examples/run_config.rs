//! Running a TOML configuration through the same code path as the `dctc`
//! binary and printing the report.
//!
//! ```text
//! cargo run --example run_config -- crates/core/examples/configs/qutrit_set.toml
//! ```

use std::path::PathBuf;

use dctc_superpose::cli::{cmd_distinguish, cmd_superpose, render, RunConfig};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/two_state.toml")));
    let config = match RunConfig::load(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let outcome = if config.spec.is_some() { cmd_superpose(&config) } else { cmd_distinguish(&config) };
    print!("{}", render(&outcome.report, false, None));
    std::process::exit(outcome.exit.code());
}
