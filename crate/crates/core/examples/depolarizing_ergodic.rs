//! The depolarizing chain at p = 0.3: finite-volume states, the ergodic
//! thermodynamic limit and the gap that shows the chain is not projective.
//!
//! Run with `cargo run --example depolarizing_ergodic -- 0.3`.

use mpsh::linalg::matrix_unit;
use mpsh::models::{depolarizing_closed_form, depolarizing_model, DepolarizingParams};
use mpsh::mps::{ergodic_limit, finite_expectation, normalization, Caps, EvalOptions, LocalObservable};

fn main() -> mpsh::Result<()> {
    let p: f64 = std::env::args().nth(1).map_or(Ok(0.3), |s| s.parse()).expect("p must be a number");
    let bundle = depolarizing_model(DepolarizingParams::new(p)?);
    let opts = EvalOptions::default();

    for n in 1..=4 {
        let norm = normalization(&bundle.chain, n, &opts)?;
        println!("N({n}) = {:.12}", norm.real(opts.tol)?);
    }

    let x = LocalObservable::at_site(1, matrix_unit(4, 0, 0));
    let limit = ergodic_limit(&bundle.chain, &x, &opts)?;
    println!("phi(|0><0|)     = {:.12}  (closed form 1 - p = {:.12})", limit.re, 1.0 - p);
    for n in 1..=6 {
        let eval = finite_expectation(&bundle.chain, &x, n, &opts)?;
        println!(
            "phi_{n}(|0><0|)   = {:.12}  gap to limit {:.3e}",
            eval.value.re,
            (eval.value - limit).norm()
        );
    }

    let pair = LocalObservable::product(1, &[matrix_unit(4, 0, 0), matrix_unit(4, 0, 0)])?;
    let closed = depolarizing_closed_form(&pair, p, &Caps::default())?;
    let ergodic = ergodic_limit(&bundle.chain, &pair, &opts)?;
    println!("phi(|0><0| x |0><0|): closed form {:.12}, ergodic {:.12}", closed.re, ergodic.re);
    Ok(())
}
