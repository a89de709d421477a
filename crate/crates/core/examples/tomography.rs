//! A channel is determined by what it does to causal states.
//!
//! Run with `cargo run --example tomography`.

use soclab::predicates::{causal_state_family, reconstruct_from_causal_states};
use soclab::{Process, SystemDims};

fn main() -> soclab::Result<()> {
    let (i, o) = (SystemDims::of(&[2]), SystemDims::of(&[3]));
    println!(
        "{} causal probe states on a qubit",
        causal_state_family(&i).len()
    );
    for seed in 0..5 {
        let phi = Process::random_causal_channel(&i, &o, None, seed)?;
        let rebuilt = reconstruct_from_causal_states(|rho| phi.apply_to_state(rho), &i, &o)?;
        println!(
            "seed {seed}: reconstruction error {:.2e}",
            rebuilt.distance(&phi)?
        );
    }
    Ok(())
}
