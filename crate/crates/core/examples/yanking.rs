//! Cups, caps and discarding satisfy the structural identities.
//!
//! Run with `cargo run --example yanking`.

use soclab::{compose_par, compose_seq, Process, SystemDims};

fn main() -> soclab::Result<()> {
    for d in [2, 3, 4] {
        let a = SystemDims::of(&[d]);
        let id = Process::identity(&a);
        let (cup, cap) = (Process::cup(&a), Process::cap(&a));

        let left = compose_seq(&compose_par(&id, &cup), &compose_par(&cap, &id))?;
        let right = compose_seq(&compose_par(&cup, &id), &compose_par(&id, &cap))?;
        let swapped = compose_seq(&cup, &Process::swap(&a, &a))?;
        let loop_value = compose_seq(&cup, &cap)?.scalar().expect("closed diagram");

        let b = SystemDims::of(&[d + 1]);
        let joint = Process::discard(&a.concat(&b));
        let split = compose_par(&Process::discard(&a), &Process::discard(&b));

        println!("d = {d}");
        println!("  snake (left)            {:.1e}", left.distance(&id)?);
        println!("  snake (right)           {:.1e}", right.distance(&id)?);
        println!("  swap after cup          {:.1e}", swapped.distance(&cup)?);
        println!("  discard A*B vs A, B     {:.1e}", joint.distance(&split)?);
        println!("  loop value              {}", loop_value.re);
    }
    Ok(())
}
