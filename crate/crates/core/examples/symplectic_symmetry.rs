//! A mirror-symmetric chain with a centred actuator stays inside a proper
//! subalgebra; breaking the mirror restores su(N).
//!
//! ```text
//! cargo run --example symplectic_symmetry
//! ```

use chainctl::chain::heisenberg_default;
use chainctl::lie::{chain_closure, CLOSURE_TOL};

fn main() -> chainctl::Result<()> {
    for n in [4usize, 6, 8] {
        let r = n / 2;
        let symmetric = heisenberg_default(vec![1.0; n - 1], r)?;
        let mut d = vec![1.0; n - 1];
        d[0] = 1.3;
        let broken = heisenberg_default(d, r)?;
        let full = n * n - 1;
        let sym_dim = chain_closure(&symmetric, CLOSURE_TOL)?.dimension();
        let brk_dim = chain_closure(&broken, CLOSURE_TOL)?.dimension();
        // sp(N/2) has dimension (N/2)(N+1).
        println!(
            "N = {n}, r = {r}: mirror-symmetric {sym_dim:>3}, perturbed {brk_dim:>3}, su(N) {full:>3}, sp(N/2) {}",
            (n / 2) * (n + 1)
        );
    }
    Ok(())
}
