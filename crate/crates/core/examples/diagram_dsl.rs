//! Compile the diagram files in `diagrams/` and compare against the
//! process API.
//!
//! Run with `cargo run --example diagram_dsl`.

use std::path::Path;

use soclab::dsl::{compile, parse};
use soclab::io::read_process;
use soclab::{compose_seq, Process, SystemDims};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("diagrams");
    let q = SystemDims::of(&[2]);

    let yank = compile(&std::fs::read_to_string(dir.join("yanking.diag"))?, &dir)?;
    println!(
        "yanking.diag vs identity: {:.1e}",
        yank.distance(&Process::identity(&q))?
    );

    let disc = compile(
        &std::fs::read_to_string(dir.join("discard_product.diag"))?,
        &dir,
    )?;
    println!(
        "discard_product.diag vs discard on 2*3: {:.1e}",
        disc.distance(&Process::discard(&SystemDims::of(&[2, 3])))?
    );

    let slide = compile(&std::fs::read_to_string(dir.join("sliding.diag"))?, &dir)?;
    let damp = read_process(&dir.join("boxes/amplitude_damping.json"))?;
    println!(
        "sliding.diag vs bent box: {:.1e}",
        slide.distance(&damp.bend())?
    );

    let lp = compile(&std::fs::read_to_string(dir.join("loop.diag"))?, &dir)?;
    println!("loop.diag evaluates to {}", lp.scalar().expect("closed").re);

    let cap_cup = compile("system A = 2; cap[A] ; cup[A]", &dir)?;
    println!(
        "cap then cup: {} -> {}, equal to the API result: {}",
        cap_cup.in_sys(),
        cap_cup.out_sys(),
        cap_cup == compose_seq(&Process::cap(&q), &Process::cup(&q))?
    );

    for bad in ["f ; ; g", "system A = 2; system B = 3; id[A] ; id[B]", "g"] {
        let err = parse(bad)
            .map_err(|e| e.to_string())
            .and_then(|_| compile(bad, &dir).map(|_| ()).map_err(|e| e.to_string()));
        println!("{bad:?}: {}", err.err().unwrap_or_default());
    }
    Ok(())
}
