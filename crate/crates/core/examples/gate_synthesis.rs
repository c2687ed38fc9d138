//! Synthesize switching sequences for the six two-qubit targets on a uniform
//! four-level Heisenberg chain driven at its first link.
//!
//! ```text
//! cargo run --release --example gate_synthesis -- [restarts] [seed]
//! ```

use std::time::Instant;

use chainctl::chain::heisenberg_default;
use chainctl::synth::{build_target, synthesize, GateName, SynthesisOptions};

fn main() -> chainctl::Result<()> {
    let mut args = std::env::args().skip(1);
    let restarts = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(2024);

    let spec = heisenberg_default(vec![1.0; 3], 1)?;
    let mut opts = SynthesisOptions::new(20, restarts, seed);
    opts.target_error = 1e-4;

    println!(
        "{:<6} {:>12} {:>10} {:>9} {:>8}",
        "gate", "error", "duration", "restarts", "seconds"
    );
    for gate in GateName::ALL {
        let start = Instant::now();
        let res = synthesize(&spec, &build_target(gate), &opts)?;
        println!(
            "{:<6} {:>12.4e} {:>10.4} {:>9} {:>8.2}",
            gate.as_str(),
            res.error,
            res.sequence.total_time(),
            res.restarts_used,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
