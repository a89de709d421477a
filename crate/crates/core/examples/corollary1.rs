//! SOC2 supermaps send strongly non-signalling channels to causal processes.
//!
//! Run with `cargo run --release --example corollary1`.

use soclab::supermap::{
    fixed_order_a_then_b, fixed_order_b_then_a, mix, verify_corollary1, HarnessConfig, SharedState,
    SlotDims,
};

fn main() -> soclab::Result<()> {
    let ab = fixed_order_a_then_b(SlotDims::uniform(2))?;
    let ba = fixed_order_b_then_a(SlotDims::uniform(2))?;
    let w = mix(&[(0.25, ab), (0.75, ba)])?;
    for shared in [
        SharedState::Product,
        SharedState::MaxEntangled,
        SharedState::Random,
    ] {
        let cfg = HarnessConfig {
            trials: 50,
            seed: 9,
            shared,
            ..Default::default()
        };
        let r = verify_corollary1(&w, &cfg)?;
        println!(
            "{shared:?} share: {} of {} outputs non-causal, max residual {:.2e}",
            r.failures(),
            r.trials.len(),
            r.max_residual()
        );
    }
    Ok(())
}
