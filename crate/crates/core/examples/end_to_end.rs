//! Synthetic logs with reinforcement and narrowing on followers, analysed
//! end to end; writes the report to `end-to-end-report/`.

use std::path::Path;

use echo_audit::pipeline::{analyze, Inputs, RunConfig};
use echo_audit::render::{render_markdown, write_report};
use echo_audit::synth::{generate, SynthConfig};

fn main() -> echo_audit::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let out = generate(&SynthConfig {
        reinforcement_rate: 0.3,
        narrowing_rate: 0.5,
        master_seed: 1,
        ..SynthConfig::default()
    })?;
    let inputs = Inputs {
        browse: out.browse,
        click: out.click,
        purchase: out.purchase,
        embeddings: out.embeddings,
    };
    let cfg = RunConfig { seed: 42, ..RunConfig::default() };
    let dir = Path::new("end-to-end-report");
    let report = analyze(&inputs, &cfg, |partial| write_report(partial, dir))?;
    println!("{}", render_markdown(&report));
    Ok(())
}
