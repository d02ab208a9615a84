//! The GHZ chain is projective: every finite-volume state already equals the
//! thermodynamic limit, which averages the two constant configurations.

use mpsh::linalg::{matrix_unit, pauli};
use mpsh::models::ghz_model;
use mpsh::mps::{
    finite_expectation, projective_consistency_check, projective_limit, state_vector, Caps, EvalOptions,
    LocalObservable,
};

fn main() -> mpsh::Result<()> {
    let bundle = ghz_model();
    let opts = EvalOptions::default();

    let psi = state_vector(&bundle.chain, 3, &Caps::default())?;
    println!("|psi_3> nonzero amplitudes:");
    for (k, a) in psi.amplitudes().iter().enumerate() {
        if a.norm() > 0.0 {
            println!("  {k:03b}: {a}");
        }
    }

    let check = projective_consistency_check(&bundle.chain, 1)?;
    println!("consistency violation: {:.1e}", check.max_violation);

    let z = LocalObservable::at_site(2, pauli::z());
    let zz = LocalObservable::product(1, &[pauli::z(), pauli::z()])?;
    let flip = LocalObservable::product(1, &[matrix_unit(2, 0, 1), matrix_unit(2, 0, 1)])?;
    for (label, x) in [("Z@2", &z), ("ZZ@1", &zz), ("|00><11|", &flip)] {
        let limit = projective_limit(&bundle.chain, x, &opts)?;
        let closed = bundle.closed_form(x, &opts.caps).expect("GHZ has a closed form")?;
        print!("{label:>9}: limit {:+.3}  closed form {:+.3}  finite", limit.re, closed.re);
        for n in x.last()..x.last() + 3 {
            print!(" {:+.3}", finite_expectation(&bundle.chain, x, n, &opts)?.value.re);
        }
        println!();
    }
    Ok(())
}
