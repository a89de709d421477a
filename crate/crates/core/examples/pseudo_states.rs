//! Affine combinations of product channels through a shared pseudo-state.
//!
//! Run with `cargo run --release --example pseudo_states`.

use soclab::affine::{
    decompose_nonsignalling, pseudo_state, random_product_span, realize_affine, AffineCombination,
};
use soclab::predicates::{
    is_causal, is_nonsignalling_a_to_b, is_nonsignalling_b_to_a, make_strongly_nonsignalling,
    Bipartition,
};
use soclab::supermap::{fixed_order_a_then_b, SlotDims};
use soclab::{Process, SystemDims, Tolerance};

fn main() -> soclab::Result<()> {
    let tol = Tolerance::default();
    let q = SystemDims::of(&[2]);
    let qq = SystemDims::of(&[2, 2]);

    let r = pseudo_state(&[1.5, -0.5])?;
    println!(
        "pseudo-state [1.5, -0.5]: trace {}, positive {}",
        r.matrix().trace().re,
        r.process().is_cp(tol)
    );

    let chan = |seed| Process::random_causal_channel(&q, &q, None, seed);
    let comb = AffineCombination::new(vec![(1.5, chan(1)?, chan(2)?), (-0.5, chan(3)?, chan(4)?)])?;
    let g = realize_affine(&comb)?;
    let split = Bipartition::new(1, 1);
    println!(
        "realised channel: matches the weighted sum to {:.1e}; causal {}, no signalling either way {}; CP {}",
        g.distance(&comb.direct_sum()?)?,
        is_causal(&g, tol).holds,
        is_nonsignalling_a_to_b(&g, split, tol)?.holds && is_nonsignalling_b_to_a(&g, split, tol)?.holds,
        g.is_cp(tol)
    );
    let w = fixed_order_a_then_b(SlotDims::uniform(2))?;
    println!(
        "inserted into A then B: causal residual {:.1e}",
        w.insert_composite(&g, tol)?.causal.residual
    );

    // decompose a shared-state channel over random product channels
    let psi_a = Process::random_causal_channel(&qq, &q, None, 5)?;
    let psi_b = Process::random_causal_channel(&qq, &q, None, 6)?;
    let cup = Process::cup(&q);
    let bell = Process::state(&qq, cup.choi().scale_real(0.5))?;
    let (f, _) = make_strongly_nonsignalling(&psi_a, &psi_b, &bell, tol)?;
    let span = random_product_span((&q, &q), (&q, &q), 300, 11)?;
    let d = decompose_nonsignalling(&f, &span)?;
    let negative = d.coeffs.iter().filter(|c| **c < 0.0).count();
    println!(
        "decomposition: residual {:.1e}, rank {} of {}, {negative} negative weights",
        d.residual, d.rank, d.expected_rank
    );
    let back = realize_affine(&AffineCombination::from_span(&d.coeffs, &span)?)?;
    println!(
        "round trip through the pseudo-state wiring: {:.1e}",
        back.distance(&f)?
    );
    Ok(())
}
