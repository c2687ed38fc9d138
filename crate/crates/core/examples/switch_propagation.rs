//! Bang-bang evolution of a population initially on the first site.
//!
//! `U(t) = U1(t_1) U2(t_2) … UK(t_K)` applies its rightmost factor to a state
//! first, so the state after the first `j` segments in time comes from the
//! last `j` slots of the sequence.
//!
//! ```text
//! cargo run --example switch_propagation
//! ```

use chainctl::chain::heisenberg_default;
use chainctl::propagator::{evolve_density, DensityOp, SwitchPropagator, SwitchSequence};

fn main() -> chainctl::Result<()> {
    let spec = heisenberg_default(vec![1.0; 3], 1)?;
    let prop = SwitchPropagator::for_chain(&spec)?;
    let rho0 = DensityOp::pure_basis(spec.n(), 1)?;

    // Even length, so slot K runs under the switch-on Hamiltonian.
    let pattern = [0.8, 0.4, 1.2, 0.3, 0.9, 0.6];
    let k = pattern.len();
    println!("{:>8}  populations |1⟩..|4⟩", "segments");
    for j in 1..=k {
        let seq = SwitchSequence::new(pattern[k - j..].to_vec())?;
        // An odd-length suffix starts on an even slot; pad so parity is kept.
        let seq = if j % 2 == 1 {
            SwitchSequence::new([0.0].iter().chain(seq.durations()).copied().collect())?
        } else {
            seq
        };
        let u = prop.propagate(&seq);
        let rho = evolve_density(&rho0, &u)?;
        let pops: Vec<String> = (0..spec.n())
            .map(|i| format!("{:.4}", rho.matrix()[(i, i)].re))
            .collect();
        println!(
            "{j:>8}  {}   (unitarity defect {:.1e})",
            pops.join(" "),
            u.unitarity_defect()
        );
    }
    Ok(())
}
