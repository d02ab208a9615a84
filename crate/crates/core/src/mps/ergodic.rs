use crate::channel::{fixed_point, spectral_classification, UNIT_CIRCLE_TOL};
use crate::linalg::{self, C64};
use crate::{Error, Result};

use super::heisenberg::{lift_observable, transfer_channel};
use super::{EvalOptions, LocalObservable, MpsChain};

/// Thermodynamic limit of a translation-invariant chain whose transfer
/// channel is mixing:
/// `phi(X) = sum_{ab} rho*_{ab} Tr(X^(|a><b|))` with `rho*` the unique
/// invariant state of the transfer channel.
///
/// The limit state is shift invariant, so `X` is evaluated as if its window
/// started at site 1.
pub fn ergodic_limit(chain: &MpsChain, x: &LocalObservable, opts: &EvalOptions) -> Result<C64> {
    if !chain.is_translation_invariant() {
        return Err(Error::InvalidChain(
            "the ergodic limit needs a translation-invariant chain".into(),
        ));
    }
    x.check_dim(chain.d())?;
    let phi = transfer_channel(chain, 1)?;
    let tp = phi.trace_preservation_violation();
    if tp > opts.tol {
        return Err(Error::NotTracePreserving(tp));
    }
    let report = spectral_classification(&phi, UNIT_CIRCLE_TOL)?;
    if !report.ergodic {
        return Err(Error::NotErgodic(Box::new(report)));
    }
    if !report.mixing {
        return Err(Error::NotMixing(Box::new(report)));
    }
    let rho = match report.fixed_point {
        Some(rho) => rho,
        None => fixed_point(&phi)?,
    };

    let lifted = lift_observable(chain, &x.shifted_to(1)?, &opts.caps)?;
    let dim = chain.bond_dim();
    let mut total = C64::new(0.0, 0.0);
    for a in 0..dim {
        for b in 0..dim {
            let weight = rho.matrix()[(a, b)];
            if weight != C64::new(0.0, 0.0) {
                total += weight * lifted.apply(&linalg::matrix_unit(dim, a, b))?.trace();
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Convention, KrausFamily};
    use crate::linalg::{diag, identity, matrix_unit, pauli, ComplexMatrix};
    use crate::mps::finite_expectation;

    fn depolarizing(p: f64) -> MpsChain {
        let a = (p / 3.0).sqrt();
        MpsChain::translation_invariant(
            KrausFamily::new(
                vec![
                    identity(2).scale((1.0 - p).sqrt()),
                    pauli::x().scale(a),
                    pauli::y().scale(a),
                    pauli::z().scale(a),
                ],
                Convention::Heisenberg,
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn depolarizing_marginal() {
        let x = LocalObservable::at_site(1, matrix_unit(4, 0, 0));
        let v = ergodic_limit(&depolarizing(0.3), &x, &EvalOptions::default()).unwrap();
        assert!((v - C64::new(0.7, 0.0)).norm() < 1e-12);
        let shifted = LocalObservable::at_site(5, matrix_unit(4, 0, 0));
        let w = ergodic_limit(&depolarizing(0.3), &shifted, &EvalOptions::default()).unwrap();
        assert!((v - w).norm() < 1e-14);
    }

    #[test]
    fn identity_has_unit_limit() {
        let x = LocalObservable::identity(1, 2, 4).unwrap();
        let v = ergodic_limit(&depolarizing(0.4), &x, &EvalOptions::default()).unwrap();
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn finite_volume_approaches_the_limit() {
        let chain = depolarizing(0.3);
        let x = LocalObservable::at_site(1, matrix_unit(4, 1, 1));
        let limit = ergodic_limit(&chain, &x, &EvalOptions::default()).unwrap();
        // deviation decays like the second transfer eigenvalue 1 - 4p/3
        for n in 3..=12 {
            let finite = finite_expectation(&chain, &x, n, &EvalOptions::default()).unwrap();
            assert!((finite.value - limit).norm() <= 2.0 * 0.6f64.powi(n as i32 - 1));
        }
    }

    #[test]
    fn rejects_non_ergodic_and_non_gauge_chains() {
        let ghz = MpsChain::translation_invariant(
            KrausFamily::new(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])], Convention::Heisenberg).unwrap(),
        )
        .unwrap();
        let x = LocalObservable::at_site(1, pauli::z());
        assert!(matches!(
            ergodic_limit(&ghz, &x, &EvalOptions::default()),
            Err(Error::NotErgodic(_))
        ));

        let scaled = MpsChain::translation_invariant(
            KrausFamily::new(vec![identity(2).scale(2.0)], Convention::Heisenberg).unwrap(),
        )
        .unwrap();
        let y = LocalObservable::at_site(1, ComplexMatrix::identity(1, 1));
        assert!(matches!(
            ergodic_limit(&scaled, &y, &EvalOptions::default()),
            Err(Error::NotTracePreserving(_))
        ));
    }

    #[test]
    fn periodic_chain_is_not_mixing() {
        let flip = MpsChain::translation_invariant(
            KrausFamily::new(
                vec![
                    ComplexMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0].map(|v| C64::new(v, 0.0))),
                    ComplexMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0].map(|v| C64::new(v, 0.0))),
                ],
                Convention::Heisenberg,
            )
            .unwrap(),
        )
        .unwrap();
        let x = LocalObservable::at_site(1, pauli::z());
        assert!(matches!(
            ergodic_limit(&flip, &x, &EvalOptions::default()),
            Err(Error::NotMixing(_))
        ));
    }
}
