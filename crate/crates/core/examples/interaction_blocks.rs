//! Cut per-user click histories into fixed-size blocks and keep users with
//! enough of them.

use echo_audit::blocks::{blocks_by_user, filter_eligible};
use echo_audit::logmodel::{InteractionKind, InteractionRecord};

fn main() -> echo_audit::Result<()> {
    let mut clicks = Vec::new();
    for (user, n) in [("heavy", 23), ("light", 7)] {
        for t in 0..n {
            let item = format!("i{}", t % 5);
            clicks.push(InteractionRecord::transaction(InteractionKind::Click, t, format!("pv{t}"), user, item, 1.0));
        }
    }
    let blocks = blocks_by_user(&clicks, InteractionKind::Click, 5, None)?;
    for (user, bs) in &blocks {
        // the trailing partial block is dropped
        println!("{user}: {} blocks", bs.len());
        for b in bs {
            println!("  #{} {:?} span {:?}", b.index, b.item_ids, b.span);
        }
    }
    println!("eligible with >= 3 blocks: {:?}", filter_eligible(&blocks, 3)?);
    Ok(())
}
