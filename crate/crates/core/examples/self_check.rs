//! Runs every self-check suite with a configuration read from JSON, the same
//! path `alphacoh verify all --config ...` takes.

use alpha_coherence::config::RunConfig;
use alpha_coherence::verify::run_suite;
use alpha_coherence::Result;

fn main() -> Result<()> {
    let cfg = RunConfig::from_json(r#"{"n_max": 50, "quadrature": {"L": 6, "h": 0.05}}"#)?;
    let checks = run_suite("all", &cfg)?;
    for c in &checks {
        println!("{} {:<14} {:<50} {:.3e}", if c.pass { "PASS" } else { "FAIL" }, c.suite, c.name, c.delta);
    }
    println!("{} of {} passed", checks.iter().filter(|c| c.pass).count(), checks.len());
    Ok(())
}
