//! Chains as JSON files: export, reload, certify the gauge condition and probe
//! projectivity on the reloaded chain.

use mpsh::models::{depolarizing_model, ghz_model, DepolarizingParams};
use mpsh::mps::{default_probes, gauge_check, projectivity_probe, EvalOptions, MpsChain};

fn main() -> mpsh::Result<()> {
    let dir = std::env::temp_dir();
    let opts = EvalOptions::default();
    let models = [
        ("ghz", ghz_model().chain),
        ("depolarizing", depolarizing_model(DepolarizingParams::new(0.3)?).chain),
    ];
    for (name, chain) in models {
        let path = dir.join(format!("mpsh_{name}.json"));
        std::fs::write(&path, chain.to_json()?)?;
        let reloaded = MpsChain::from_json(&std::fs::read_to_string(&path)?)?;
        assert_eq!(reloaded, chain);

        let gauge = gauge_check(&reloaded);
        let probe = projectivity_probe(&reloaded, &[1, 2, 3], &default_probes(reloaded.d()), &opts)?;
        println!(
            "{name} ({}): gauge violation {:.1e}, verdict {:?}, max violation per n {:?}",
            path.display(),
            gauge.max_violation,
            probe.verdict,
            probe.max_violation
        );
    }
    Ok(())
}
