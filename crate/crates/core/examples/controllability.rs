//! Lie-closure dimension of a chain against the two sufficient conditions.
//!
//! ```text
//! cargo run --example controllability -- [spec-file]
//! ```

use chainctl::chain::heisenberg_default;
use chainctl::io::read_spec;
use chainctl::lie::{chain_closure, thm1_check, thm2_check, CLOSURE_TOL};

fn main() -> chainctl::Result<()> {
    let specs = match std::env::args().nth(1) {
        Some(path) => vec![read_spec(path)?],
        None => (1..=3)
            .map(|r| heisenberg_default(vec![1.0; 3], r))
            .collect::<Result<_, _>>()?,
    };
    for spec in specs {
        let basis = chain_closure(&spec, CLOSURE_TOL)?;
        let verdict = |r: Result<String, _>| r.unwrap_or_else(|e: chainctl::lie::ConditionFailure| format!("no: {e}"));
        println!(
            "N = {}, r = {}: dim = {:>2} / {:>2}  thm1 {}  thm2 {}",
            spec.n(),
            spec.actuator(),
            basis.dimension(),
            spec.n() * spec.n() - 1,
            verdict(thm1_check(&spec).map(|_| "yes".into())),
            verdict(thm2_check(&spec).map(|k| format!("yes (k = {k})"))),
        );
    }
    Ok(())
}
