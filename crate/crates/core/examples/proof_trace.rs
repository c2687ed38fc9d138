//! Replay the constructive controllability proof on a concrete chain and
//! print the residual of every intermediate identity.
//!
//! ```text
//! cargo run --example proof_trace -- [spec-file]
//! ```

use chainctl::chain::ChainSpec;
use chainctl::io::read_spec;
use chainctl::lie::{proof_trace, Convention};

fn main() -> chainctl::Result<()> {
    let spec = match std::env::args().nth(1) {
        Some(path) => read_spec(path)?,
        None => ChainSpec::with_default_switch(vec![0.7, 1.3, 0.9, 1.6, 1.1], vec![0.2, -0.4, 1.1, 0.3, -0.8, 0.5], 3)?,
    };
    let trace = proof_trace(&spec)?;
    println!(
        "{:?} with k = {}, {} identities{}",
        trace.theorem,
        trace.k,
        trace.checks.len(),
        if trace.reflected {
            ", traced on the mirrored chain"
        } else {
            ""
        }
    );
    for check in &trace.checks {
        let mark = match check.convention {
            Convention::Literal => "",
            Convention::Amended(_) => " *",
        };
        println!("  {:<28} {:.2e}{mark}", check.name, check.residual);
    }
    println!("recovered x_k, y_k for k = {:?}", trace.recovered);
    println!("max residual {:.2e}; * marks amended forms", trace.max_residual());
    Ok(())
}
