//! Two-slot supermaps: fixed orders, mixtures, and what breaks SOC2.
//!
//! Run with `cargo run --example bipartite_supermaps`.

use soclab::predicates::{is_causal, is_soc2, is_soc2_oracle};
use soclab::supermap::{fixed_order_a_then_b, fixed_order_b_then_a, mix, SlotDims, SlotDressing};
use soclab::{compose_seq, BipartiteSupermap, Process, SystemDims, Tolerance};

fn show(name: &str, w: &BipartiteSupermap, tol: Tolerance) -> soclab::Result<()> {
    let c = is_soc2(w, tol)?;
    let o = is_soc2_oracle(w, tol)?;
    let cp = w.body().is_cp(tol);
    println!(
        "{name:<22} SOC2 {:<5} oracle {:<5} CP {:<5} residual {:.2e}",
        c.holds, o.holds, cp, c.residual
    );
    Ok(())
}

fn main() -> soclab::Result<()> {
    let tol = Tolerance::default();
    let q = SystemDims::of(&[2]);
    let ab = fixed_order_a_then_b(SlotDims::uniform(2))?;
    let ba = fixed_order_b_then_a(SlotDims::uniform(2))?;

    show("A then B", &ab, tol)?;
    show("B then A", &ba, tol)?;
    show(
        "convex 50/50",
        &mix(&[(0.5, ab.clone()), (0.5, ba.clone())])?,
        tol,
    )?;
    show(
        "affine 1.5/-0.5",
        &mix(&[(1.5, ab.clone()), (-0.5, ba.clone())])?,
        tol,
    )?;
    show(
        "dressed A then B",
        &SlotDressing::random(&ab, 4)?.apply(&ab)?,
        tol,
    )?;
    show("corrupted A then B", &ab.corrupted(0.25)?, tol)?;

    // inserting into A-then-B composes the slot contents in order
    let fa = Process::random_causal_channel(&q, &q, None, 1)?;
    let fb = Process::random_causal_channel(&q, &q, None, 2)?;
    let out = ab.insert(&fa, &fb)?;
    println!(
        "\nA then B with (fa, fb) equals fb after fa: {:.1e}",
        out.process.distance(&compose_seq(&fa, &fb)?)?
    );

    // a swap across both slots routes A2 back into B1: a loop
    let swap = ab.insert_composite(&Process::swap(&q, &q), tol)?;
    println!(
        "swap across both slots: causal {}, output is {} times the identity",
        is_causal(&swap.process, tol).holds,
        swap.process.choi()[(0, 0)].re
    );
    Ok(())
}
