//! Brute-force state vectors against transfer channels on a random chain with
//! independent sites, plus the trace factorization identity.

use mpsh::linalg::{ComplexMatrix, C64};
use mpsh::models::{random_gauge_chain, Layout};
use mpsh::mps::{finite_expectation, normalization, trace_product_identity, EvalOptions, LocalObservable};

fn main() -> mpsh::Result<()> {
    let (d, bond, n) = (3, 3, 4);
    let chain = random_gauge_chain(d, bond, Layout::Sites(n + 1), 42)?;
    let opts = EvalOptions::default();

    let norm = normalization(&chain, n, &opts)?;
    println!("N({n}) = {:.12} (brute-force residual {:.1e})", norm.value.re, norm.residual.unwrap_or(0.0));

    for first in 1..=n - 1 {
        let m = ComplexMatrix::from_fn(d * d, d * d, |i, j| C64::new((i + 2 * j) as f64 % 5.0 - 2.0, 0.0));
        let x = LocalObservable::new(first, first + 1, m)?;
        let eval = finite_expectation(&chain, &x, n, &opts)?;
        println!(
            "window [{first}, {}]: transfer {:.10}, brute force {:.10}",
            first + 1,
            eval.transfer,
            eval.brute_force.expect("fits under the caps")
        );
    }

    let check = trace_product_identity(&chain, &[0, 2, 1, 1], &[1, 0])?;
    println!("trace identity: lhs {:.6}, rhs {:.6}, residual {:.1e}", check.lhs, check.rhs, check.residual);
    Ok(())
}
