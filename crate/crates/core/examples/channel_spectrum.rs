//! Spectral classification of transfer channels: the GHZ channel has a
//! degenerate eigenvalue 1, the depolarizing channel is mixing with a unique
//! fixed point, and its iterates converge to the limiting channel.

use mpsh::channel::{limit_channel, spectral_classification, UNIT_CIRCLE_TOL};
use mpsh::models::{depolarizing_channel, ghz_model, DepolarizingParams};
use mpsh::mps::transfer_channel;

fn main() -> mpsh::Result<()> {
    let ghz = transfer_channel(&ghz_model().chain, 1)?;
    let depol = depolarizing_channel(DepolarizingParams::new(0.3)?);
    for (label, phi) in [("ghz", &ghz), ("depolarizing p = 0.3", &depol)] {
        let r = spectral_classification(phi, UNIT_CIRCLE_TOL)?;
        let spectrum: Vec<String> = r.eigenvalues.iter().map(|z| format!("{:.4}", z.re)).collect();
        println!(
            "{label}: spectrum [{}], unit multiplicity {}, ergodic {}, mixing {}, gap {:.4}",
            spectrum.join(", "),
            r.unit_multiplicity,
            r.ergodic,
            r.mixing,
            r.spectral_gap
        );
        if let Some(rho) = &r.fixed_point {
            println!("  fixed point:{:.6}", rho.matrix());
        }
    }

    let star = limit_channel(&depol)?;
    for n in [1, 5, 10, 20, 40] {
        println!("max |Phi^{n} - Phi*| = {:.3e}", depol.power(n).max_abs_diff(&star));
    }
    Ok(())
}
