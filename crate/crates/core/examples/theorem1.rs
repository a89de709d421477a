//! SOC2 supermaps stay causal when the slot contents carry ancillas.
//!
//! Prints one JSON line per trial. Run with
//! `cargo run --release --example theorem1 -- [trials] [seed]`.

use soclab::supermap::{
    fixed_order_a_then_b, fixed_order_b_then_a, mix, verify_theorem1, HarnessConfig, SlotDims,
};

fn main() -> soclab::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let cfg = HarnessConfig {
        trials,
        seed,
        ..Default::default()
    };

    let ab = fixed_order_a_then_b(SlotDims::uniform(2))?;
    let ba = fixed_order_b_then_a(SlotDims::uniform(2))?;
    let cases = [
        ("A then B", ab.clone()),
        ("affine mix", mix(&[(1.3, ab.clone()), (-0.3, ba)])?),
        ("corrupted", ab.corrupted(0.25)?),
    ];
    for (name, w) in cases {
        let report = verify_theorem1(&w, &cfg)?;
        if name == "A then B" {
            for t in report.trials.iter().take(3) {
                println!("{}", serde_json::to_string(t).expect("serialisable"));
            }
        }
        println!(
            "{name}: premise {}, {} of {} trials non-causal, max residual {:.2e}",
            if report.premise.holds {
                "holds"
            } else {
                "fails"
            },
            report.failures(),
            report.trials.len(),
            report.max_residual()
        );
    }
    Ok(())
}
