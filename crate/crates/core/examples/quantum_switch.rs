//! A supermap with coherently controlled order: SOC2 without a fixed order.
//!
//! Run with `cargo run --example quantum_switch --features quantum-switch`.

use soclab::predicates::{is_soc2, is_soc2_oracle};
use soclab::supermap::quantum_switch;
use soclab::{Process, SystemDims, Tolerance};

fn main() -> soclab::Result<()> {
    let tol = Tolerance::default();
    let w = quantum_switch(2)?;
    println!(
        "switch: SOC2 {}, oracle {}",
        is_soc2(&w, tol)?.holds,
        is_soc2_oracle(&w, tol)?.holds
    );
    let q = SystemDims::of(&[2]);
    let fa = Process::random_causal_channel(&q, &q, None, 1)?;
    let fb = Process::random_causal_channel(&q, &q, None, 2)?;
    let out = w.insert(&fa, &fb)?;
    println!(
        "switched (fa, fb): causal {} ({:.1e}) on {} -> {}",
        out.causal.holds,
        out.causal.residual,
        out.process.in_sys(),
        out.process.out_sys()
    );
    Ok(())
}
