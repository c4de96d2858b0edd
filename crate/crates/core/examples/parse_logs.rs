//! Parse a browse log in CSV and a click log in JSON lines, then group the
//! browse rows into page views.

use echo_audit::logmodel::{group_page_views, parse_log, InteractionKind, LogFormat, ParseOptions};

const BROWSE: &str = "\
timestamp,pv_id,user_id,item_id,position,clicked
100,pv1,alice,i1,0,false
100,pv1,alice,i2,1,true
160,pv2,alice,i3,0,false
160,pv2,alice,i4,1,false
130,pv3,bob,i2,0,false
130,pv3,bob,i5,1,1
";

const CLICKS: &str = r#"{"timestamp": 101, "pv_id": "pv1", "user_id": "alice", "item_id": "i2", "price": 12.5}
{"timestamp": 131, "pv_id": "pv3", "user_id": "bob", "item_id": "i5", "price": 3.0}
{"timestamp": "not a time", "pv_id": "pv3", "user_id": "bob", "item_id": "i5", "price": 3.0}
"#;

fn main() -> echo_audit::Result<()> {
    let browse = parse_log(InteractionKind::Browse, BROWSE.as_bytes(), LogFormat::Csv, ParseOptions::default())?;
    println!("browse: {} rows", browse.records.len());

    // lenient parsing skips the malformed third row instead of failing
    let clicks = parse_log(InteractionKind::Click, CLICKS.as_bytes(), LogFormat::Jsonl, ParseOptions { lenient: true })?;
    println!("click: {} rows, {} skipped", clicks.records.len(), clicks.skipped);

    for (user, views) in group_page_views(&browse.records)? {
        for v in views {
            let items: Vec<&str> = v.items.iter().map(|i| i.item_id.as_str()).collect();
            println!("{user} {} at {}: {items:?} clicked={}", v.pv_id, v.start_time, v.is_clicked());
        }
    }
    Ok(())
}
