//! Generate a small synthetic population and write it to a directory.
//!
//! `cargo run --release --example synth_population -- out/`

use std::path::PathBuf;

use echo_audit::synth::{generate, write_output, Intent, SynthConfig};

fn main() -> echo_audit::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "synth-out".into()));
    let cfg = SynthConfig {
        n_users: 40,
        n_days: 30,
        master_seed: 11,
        ..SynthConfig::default()
    };
    let out = generate(&cfg)?;
    let followers = out.ground_truth.users.iter().filter(|u| u.intent == Intent::Follower).count();
    println!(
        "{} users ({followers} designed followers): {} browse, {} click, {} purchase rows",
        cfg.n_users,
        out.browse.len(),
        out.click.len(),
        out.purchase.len()
    );
    write_output(&out, &dir)?;
    println!("written to {}", dir.display());
    Ok(())
}
