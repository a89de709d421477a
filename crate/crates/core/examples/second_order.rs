//! One-hole supermaps: which ones send every causal process to a causal one.
//!
//! Run with `cargo run --example second_order`.

use soclab::predicates::{is_soc, is_soc_oracle, HoleSplit};
use soclab::supermap::{conjugation_supermap, insert_hole};
use soclab::tensor::kron;
use soclab::{ComplexMatrix, Process, SystemDims, Tolerance};

fn main() -> soclab::Result<()> {
    let q = SystemDims::of(&[2]);
    let qq = SystemDims::of(&[2, 2]);
    let tol = Tolerance::default();
    let split = HoleSplit::new(1, 1);

    let pre = Process::random_causal_channel(&q, &q, None, 1)?;
    let post = Process::random_causal_channel(&q, &q, None, 2)?;
    let sandwich = conjugation_supermap(&pre, &post)?;
    // sends Φ to Tr(choi Φ) times the identity: a closed loop through the hole
    let cup_loop = Process::new(
        qq.clone(),
        qq,
        kron(&ComplexMatrix::identity(4), Process::identity(&q).choi())?,
    )?;

    for (name, w) in [
        ("pre/post sandwich", &sandwich),
        ("loop through the hole", &cup_loop),
    ] {
        let closed = is_soc(w, split, tol)?;
        let oracle = is_soc_oracle(w, split, tol)?;
        println!(
            "{name}: closed form {} ({:.2e}), oracle {} ({:.2e})",
            closed.holds, closed.residual, oracle.holds, oracle.residual
        );
        if let Some(why) = closed.witness {
            println!("  {why}");
        }
        let phi = Process::random_causal_channel(&q, &q, None, 3)?;
        let out = insert_hole(w, split, &phi)?;
        println!(
            "  discarding the output of W(phi) gives trace {:.3}",
            out.choi().trace().re / 2.0
        );
    }
    Ok(())
}
