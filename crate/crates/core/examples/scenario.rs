//! Run a bundled scenario through the library API and print its summary.

use dirichlet_lab::scenario::{bundled, parse_scenario, run};

fn main() -> dirichlet_lab::Result<()> {
    let text = bundled("cantor-alpha0.3").expect("bundled scenario");
    let scenario = parse_scenario(text, &["set.depth=12".into()])?;
    let dir = std::env::temp_dir().join("dirlab-example");
    let report = run(scenario, &[], Some(&dir))?;
    print!("{}", report.summary());
    for p in &report.written {
        println!("wrote {}", p.display());
    }
    Ok(())
}
