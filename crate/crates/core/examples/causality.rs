//! Which processes are causal: discarding the output is discarding the input.
//!
//! Run with `cargo run --example causality`.

use soclab::predicates::{cp_verdict, is_causal};
use soclab::{Process, SystemDims, Tolerance};

fn main() -> soclab::Result<()> {
    let q = SystemDims::of(&[2]);
    let qt = SystemDims::of(&[3]);
    let tol = Tolerance::default();

    let cases = [
        ("identity", Process::identity(&q)),
        ("discard", Process::discard(&qt)),
        (
            "random channel 2 -> 3",
            Process::random_causal_channel(&q, &qt, None, 7)?,
        ),
        (
            "random unitary",
            Process::random_causal_channel(&qt, &qt, Some(1), 8)?,
        ),
        ("cup as a state", Process::cup(&q)),
        ("cap as an effect", Process::cap(&q)),
    ];
    println!(
        "{:<24} {:>8} {:>12} {:>5}",
        "process", "causal", "residual", "CP"
    );
    for (name, p) in &cases {
        let v = is_causal(p, tol);
        println!(
            "{name:<24} {:>8} {:>12.3e} {:>5}",
            v.holds,
            v.residual,
            cp_verdict(p, tol).holds
        );
    }
    Ok(())
}
