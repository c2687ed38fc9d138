//! Check the bundled published sequences and replay them on the uniform
//! four-level chain.
//!
//! ```text
//! cargo run --example table1_dataset
//! ```

use chainctl::chain::heisenberg_default;
use chainctl::table1::Table1Dataset;

fn main() -> chainctl::Result<()> {
    let data = Table1Dataset::bundled()?;
    let report = data.validate();
    for c in &report.columns {
        println!("{:<5} Σt_k = {:.4} (published {:.4})", c.gate, c.sum, c.duration);
    }
    println!(
        "largest published error {:.5e} ({})",
        report.max_error, report.max_error_gate
    );

    let spec = heisenberg_default(vec![1.0; 3], 1)?;
    println!("\nreplay: published error vs ‖T−U‖²/4N and 1−|Tr T†U|/N");
    for row in data.replay(&spec)? {
        println!(
            "{:<5} {:.4e}  {:.4e}  {:.4e}",
            row.gate, row.published_error, row.off_first_half_frobenius_sq, row.off_first
        );
    }
    Ok(())
}
