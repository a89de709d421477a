//! Non-signalling checks on bipartite channels.
//!
//! Run with `cargo run --example nonsignalling`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use soclab::predicates::{
    is_nonsignalling_a_to_b, is_nonsignalling_b_to_a, make_strongly_nonsignalling, Bipartition,
};
use soclab::{compose_par, Process, SystemDims, Tolerance};

fn report(name: &str, p: &Process, tol: Tolerance) -> soclab::Result<()> {
    let split = Bipartition::new(1, 1);
    let ab = is_nonsignalling_a_to_b(p, split, tol)?;
    let ba = is_nonsignalling_b_to_a(p, split, tol)?;
    println!(
        "{name:<28} A->B blocked {:<5} ({:.1e})  B->A blocked {:<5} ({:.1e})",
        ab.holds, ab.residual, ba.holds, ba.residual
    );
    Ok(())
}

fn main() -> soclab::Result<()> {
    let tol = Tolerance::default();
    let q = SystemDims::of(&[2]);
    let qq = SystemDims::of(&[2, 2]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let local = compose_par(
        &Process::random_causal_channel_with(&q, &q, None, &mut rng)?,
        &Process::random_causal_channel_with(&q, &q, None, &mut rng)?,
    );
    report("product of local channels", &local, tol)?;
    report("swap", &Process::swap(&q, &q), tol)?;

    // Alice and Bob act on halves of a shared entangled state
    let psi_a = Process::random_causal_channel_with(&qq, &q, None, &mut rng)?;
    let psi_b = Process::random_causal_channel_with(&qq, &q, None, &mut rng)?;
    let rho = Process::random_state(&qq, 4, &mut rng)?;
    let (f, _) = make_strongly_nonsignalling(&psi_a, &psi_b, &rho, tol)?;
    report("shared-state channel", &f, tol)?;
    Ok(())
}
