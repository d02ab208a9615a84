use serde::Serialize;

use crate::linalg::{self, C64};
use crate::{Error, Result};

use super::{DensityMatrix, SuperOperator};

/// Eigenvalues within this distance of the unit circle (or of 1) count as
/// peripheral (or as fixed).
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;

/// An eigenvalue farther than this from 1 means there is no fixed point.
const FIXED_POINT_SEARCH_TOL: f64 = 1e-6;

/// Validation tolerance for the normalized fixed point.
const FIXED_POINT_STATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    /// Full spectrum, descending modulus.
    #[serde(with = "crate::serde_matrix::scalar_list")]
    pub eigenvalues: Vec<C64>,
    /// `1 - |lambda_2|`
    pub spectral_gap: f64,
    /// Multiplicity of the eigenvalue 1.
    pub unit_multiplicity: usize,
    pub ergodic: bool,
    pub mixing: bool,
    pub fixed_point: Option<DensityMatrix>,
}

/// Classifies a trace-preserving channel by its spectrum: ergodic iff the
/// eigenvalue 1 is simple, mixing iff in addition nothing else touches the
/// unit circle.
pub fn spectral_classification(phi: &SuperOperator, tol: f64) -> Result<SpectralReport> {
    let eigenvalues = linalg::eigenvalues(phi.matrix())?;
    let unit_multiplicity = eigenvalues
        .iter()
        .filter(|z| (*z - C64::new(1.0, 0.0)).norm() <= tol)
        .count();
    let peripheral = eigenvalues.iter().filter(|z| z.norm() >= 1.0 - tol).count();
    let ergodic = unit_multiplicity == 1;
    let mixing = ergodic && peripheral == 1;
    let spectral_gap = 1.0 - eigenvalues.get(1).map_or(0.0, |z| z.norm());
    let fixed_point = if ergodic { fixed_point(phi).ok() } else { None };
    Ok(SpectralReport {
        eigenvalues,
        spectral_gap,
        unit_multiplicity,
        ergodic,
        mixing,
        fixed_point,
    })
}

/// The unique state with `phi(rho) = rho`, read off the kernel of
/// `phi - id`.
pub fn fixed_point(phi: &SuperOperator) -> Result<DensityMatrix> {
    let one = C64::new(1.0, 0.0);
    let eigenvalues = linalg::eigenvalues(phi.matrix())?;
    let distance = eigenvalues
        .iter()
        .map(|z| (*z - one).norm())
        .fold(f64::INFINITY, f64::min);
    if distance > FIXED_POINT_SEARCH_TOL {
        return Err(Error::NoUnitEigenvalue {
            distance,
            tol: FIXED_POINT_SEARCH_TOL,
        });
    }
    let multiplicity = eigenvalues
        .iter()
        .filter(|z| (*z - one).norm() <= UNIT_CIRCLE_TOL)
        .count();
    if multiplicity > 1 {
        return Err(Error::DegenerateFixedPoint(multiplicity));
    }

    let n = phi.dim() * phi.dim();
    let shifted = phi.matrix() - linalg::identity(n);
    let svd = shifted
        .try_svd(false, true, f64::EPSILON, 10_000)
        .ok_or(Error::NoConvergence)?;
    let v_t = svd.v_t.ok_or(Error::NoConvergence)?;
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("nonempty spectrum");
    let kernel = v_t.row(k).adjoint();
    let rho = linalg::unvec_col(&kernel, phi.dim());
    DensityMatrix::from_unnormalized(&rho, FIXED_POINT_STATE_TOL)
}

/// `M -> Tr(M) rho*`, the limit of `phi^n` for a mixing channel.
pub fn limit_channel(phi: &SuperOperator) -> Result<SuperOperator> {
    let report = spectral_classification(phi, UNIT_CIRCLE_TOL)?;
    if !report.ergodic {
        return Err(Error::NotErgodic(Box::new(report)));
    }
    if !report.mixing {
        return Err(Error::NotMixing(Box::new(report)));
    }
    let rho = match &report.fixed_point {
        Some(rho) => rho.clone(),
        None => fixed_point(phi)?,
    };
    Ok(SuperOperator::replacement(rho.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Convention, KrausFamily};
    use crate::linalg::{c, diag, identity, pauli, ComplexMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn depolarizing(p: f64) -> SuperOperator {
        let a = (p / 3.0).sqrt();
        SuperOperator::from_kraus(
            &KrausFamily::new(
                vec![
                    identity(2).scale((1.0 - p).sqrt()),
                    pauli::x().scale(a),
                    pauli::y().scale(a),
                    pauli::z().scale(a),
                ],
                Convention::Schrodinger,
            )
            .unwrap(),
        )
    }

    /// Random CPTP map: Kraus operators are blocks of an isometry.
    fn random_channel(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> SuperOperator {
        let g = ComplexMatrix::from_fn(dim * rank, dim, |_, _| {
            c(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        let q = g.qr().q();
        let ops = (0..rank).map(|k| q.rows(k * dim, dim).into_owned()).collect();
        SuperOperator::from_kraus(&KrausFamily::new(ops, Convention::Schrodinger).unwrap())
    }

    #[test]
    fn depolarizing_fixed_point_is_maximally_mixed() {
        for p in [0.05, 0.3, 0.75, 1.0] {
            let rho = fixed_point(&depolarizing(p)).unwrap();
            assert!(linalg::max_abs_diff(rho.matrix(), &identity(2).scale(0.5)) < 1e-12, "p={p}");
        }
    }

    #[test]
    fn identity_channel_has_degenerate_fixed_space() {
        assert!(matches!(
            fixed_point(&SuperOperator::identity(2)),
            Err(Error::DegenerateFixedPoint(4))
        ));
        let r = spectral_classification(&SuperOperator::identity(2), UNIT_CIRCLE_TOL).unwrap();
        assert!(!r.ergodic && !r.mixing);
    }

    #[test]
    fn missing_unit_eigenvalue() {
        let shrink = SuperOperator::identity(2).scale(0.5);
        assert!(matches!(fixed_point(&shrink), Err(Error::NoUnitEigenvalue { .. })));
    }

    #[test]
    fn random_channel_fixed_point_matches_power_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let phi = random_channel(&mut rng, 3, 3);
            let rho = fixed_point(&phi).unwrap();
            let resid = phi.apply(rho.matrix()).unwrap() - rho.matrix();
            assert!(linalg::tv_norm(&resid).unwrap() <= 1e-9);

            let mut iterate = identity(3).scale(1.0 / 3.0);
            for _ in 0..2000 {
                iterate = phi.apply(&iterate).unwrap();
            }
            assert!(linalg::max_abs_diff(&iterate, rho.matrix()) < 1e-9);
        }
    }

    #[test]
    fn depolarizing_spectrum() {
        let r = spectral_classification(&depolarizing(0.3), UNIT_CIRCLE_TOL).unwrap();
        let expected = [1.0, 0.6, 0.6, 0.6];
        for (z, e) in r.eigenvalues.iter().zip(expected) {
            assert!((z - c(e, 0.)).norm() < 1e-12);
        }
        assert!(r.ergodic && r.mixing);
        assert!((r.spectral_gap - 0.4).abs() < 1e-12);
        assert!(r.fixed_point.is_some());
    }

    #[test]
    fn ghz_channel_is_not_ergodic() {
        let k = KrausFamily::new(vec![diag(&[1., 0.]), diag(&[0., 1.])], Convention::Heisenberg).unwrap();
        let r = spectral_classification(&SuperOperator::from_kraus(&k), UNIT_CIRCLE_TOL).unwrap();
        let expected = [1.0, 1.0, 0.0, 0.0];
        for (z, e) in r.eigenvalues.iter().zip(expected) {
            assert!((z - c(e, 0.)).norm() < 1e-12);
        }
        assert_eq!(r.unit_multiplicity, 2);
        assert!(!r.ergodic);
    }

    #[test]
    fn periodic_channel_is_ergodic_but_not_mixing() {
        // sigma_x conjugation composed with dephasing: eigenvalues {1, -1, 0, 0}
        let flip = KrausFamily::new(
            vec![pauli::x() * diag(&[1., 0.]), pauli::x() * diag(&[0., 1.])],
            Convention::Schrodinger,
        )
        .unwrap();
        let r = spectral_classification(&SuperOperator::from_kraus(&flip), UNIT_CIRCLE_TOL).unwrap();
        assert!(r.ergodic);
        assert!(!r.mixing);
        assert!(matches!(
            limit_channel(&SuperOperator::from_kraus(&flip)),
            Err(Error::NotMixing(_))
        ));
    }

    #[test]
    fn limit_channel_of_depolarizing() {
        let omega = limit_channel(&depolarizing(0.3)).unwrap();
        let expected = SuperOperator::from_fn(2, |m| identity(2).scale(0.5) * m.trace());
        assert!(omega.max_abs_diff(&expected) < 1e-12);
        // idempotent on replacement channels
        let again = limit_channel(&omega).unwrap();
        assert!(again.max_abs_diff(&omega) < 1e-12);
    }

    #[test]
    fn powers_converge_to_limit() {
        let p = 0.5;
        let phi = depolarizing(p);
        let theta = -(1.0f64 - 4.0 * p / 3.0).ln();
        let n = (20.0 / theta).ceil() as usize;
        let limit = limit_channel(&phi).unwrap();
        assert!(phi.power(n).max_abs_diff(&limit) <= 1e-8);
    }

    #[test]
    fn not_ergodic_limit_carries_report() {
        match limit_channel(&SuperOperator::identity(2)) {
            Err(Error::NotErgodic(report)) => assert_eq!(report.unit_multiplicity, 4),
            other => panic!("unexpected {other:?}"),
        }
    }
}
