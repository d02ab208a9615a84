//! Markov-Dobrushin certificates: the exact depolarizing kappa against the
//! sphere-search lower bound, and the resulting convergence trace of a
//! random translation-invariant channel.

use mpsh::channel::{
    convergence_trace, fixed_point, md_constant, mixing_rate, DensityMatrix, KappaMethod,
};
use mpsh::models::{depolarizing_channel, random_gauge_chain, DepolarizingParams, Layout};
use mpsh::mps::transfer_channel;

fn main() -> mpsh::Result<()> {
    println!("   p   Tr kappa (exact)  Tr kappa (search)  theta");
    for p in [0.1, 0.3, 0.5, 0.7, 0.75] {
        let phi = depolarizing_channel(DepolarizingParams::new(p)?);
        let exact = md_constant(&phi, KappaMethod::ClosedFormDepolarizing { p })?;
        let search = md_constant(&phi, KappaMethod::SphereSearch { grid: 500, refinements: 6 })?;
        println!(
            "{p:5.2}  {:16.12}  {:17.12}  {}",
            exact.kappa_trace,
            search.kappa_trace,
            mixing_rate(&exact)?
        );
    }

    let chain = random_gauge_chain(4, 2, Layout::TranslationInvariant, 3)?;
    let phi = transfer_channel(&chain, 1)?;
    let report = md_constant(&phi, KappaMethod::SphereSearch { grid: 2000, refinements: 10 })?;
    let theta = mixing_rate(&report)?;
    println!("\nrandom d = 4, D = 2 chain: Tr kappa = {:.6}, theta = {theta:.6}", report.kappa_trace);
    let rho_star = fixed_point(&phi)?;
    let rows = convergence_trace(&phi, &DensityMatrix::basis_state(2, 0), &rho_star, theta, 12)?;
    println!("  n   ||Phi^n(rho) - rho*||_TV   2 e^(-n theta)");
    for row in rows {
        println!("{:3}   {:24.3e}   {:14.3e}", row.n, row.tv_distance, row.bound);
    }
    Ok(())
}
