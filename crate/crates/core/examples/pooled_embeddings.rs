//! Load an item embedding table and average-pool blocks into user vectors.

use echo_audit::blocks::build_blocks;
use echo_audit::embed::{block_embedding, load_embedding_table, MissingPolicy};
use echo_audit::logmodel::{InteractionKind, InteractionRecord};

const TABLE: &str = "i1\t1.0\t0.0\t0.0\ni2\t0.0\t1.0\t0.0\ni3\t0.0\t0.0\t1.0\n";

fn main() -> echo_audit::Result<()> {
    let table = load_embedding_table(TABLE.as_bytes())?;
    println!("{} items of dimension {}", table.len(), table.dim());

    let items = ["i1", "i2", "i2", "i3", "unknown"];
    let events: Vec<InteractionRecord> = items
        .iter()
        .enumerate()
        .map(|(t, i)| InteractionRecord::transaction(InteractionKind::Click, t as i64, "pv", "u", *i, 1.0))
        .collect();
    let block = &build_blocks(&events, 5)?[0];

    match block_embedding(block, &table, MissingPolicy::Error) {
        Ok(_) => unreachable!("the block holds an unknown item"),
        Err(e) => println!("strict: {e}"),
    }
    let pooled = block_embedding(block, &table, MissingPolicy::Skip)?;
    println!("skipping unknown items: {:?}", pooled.vector);
    Ok(())
}
