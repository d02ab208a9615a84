use serde::Serialize;

use crate::channel::SuperOperator;
use crate::linalg::{self, ComplexMatrix, C64};
use crate::{Error, Result};

use super::state::{check_cap, power, site_products};
use super::{state_vector, EvalOptions, LocalObservable, MpsChain};

/// Below this the chain has (numerically) no weight at the requested length.
const DEGENERATE_NORMALIZATION: f64 = 1e-14;

/// `Phi_k(M) = sum_i A_i^{[k]†} M A_i^{[k]}`
pub fn transfer_channel(chain: &MpsChain, k: usize) -> Result<SuperOperator> {
    let family = chain.site(k)?;
    let dim = family.dim();
    let mut matrix = ComplexMatrix::zeros(dim * dim, dim * dim);
    for a in family.operators() {
        matrix += linalg::kron(&a.transpose(), &a.adjoint());
    }
    SuperOperator::from_matrix(dim, matrix)
}

/// `Phi_to ∘ ... ∘ Phi_from`; the identity when `from > to`.
pub fn transfer_product(chain: &MpsChain, from: usize, to: usize) -> Result<SuperOperator> {
    if from > to {
        return Ok(SuperOperator::identity(chain.bond_dim()));
    }
    if chain.is_translation_invariant() {
        return Ok(transfer_channel(chain, 1)?.power(to - from + 1));
    }
    let mut acc = transfer_channel(chain, from)?;
    for k in from + 1..=to {
        acc = transfer_channel(chain, k)?.compose(&acc)?;
    }
    Ok(acc)
}

/// `X^(M) = sum <i|X|j> A_{i_n}^† ... A_{i_m}^† M A_{j_m} ... A_{j_n}` for
/// `X` on `[m, n]`.
pub fn lift_observable(chain: &MpsChain, x: &LocalObservable, caps: &super::Caps) -> Result<SuperOperator> {
    x.check_dim(chain.d())?;
    check_cap(
        "observable entries",
        power(chain.d(), 2 * x.width()),
        caps.observable_entries,
    )?;
    let products = site_products(chain, x.first(), x.last())?;
    let dim = chain.bond_dim();
    let xm = x.matrix();
    let mut matrix = ComplexMatrix::zeros(dim * dim, dim * dim);
    for (j, pj) in products.iter().enumerate() {
        let mut left = ComplexMatrix::zeros(dim, dim);
        let mut any = false;
        for (i, pi) in products.iter().enumerate() {
            let coeff = xm[(i, j)];
            if coeff != C64::new(0.0, 0.0) {
                left += pi.adjoint() * coeff;
                any = true;
            }
        }
        if any {
            matrix += linalg::kron(&pj.transpose(), &left);
        }
    }
    SuperOperator::from_matrix(dim, matrix)
}

/// A quantity computed by the transfer-channel route and, when the state
/// vector fits under the caps, by brute force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    #[serde(with = "crate::serde_matrix::scalar")]
    pub value: C64,
    #[serde(with = "crate::serde_matrix::scalar")]
    pub transfer: C64,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "optional_scalar")]
    pub brute_force: Option<C64>,
    /// `|transfer - brute_force|`
    pub residual: Option<f64>,
}

fn optional_scalar<S: serde::Serializer>(z: &Option<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match z {
        Some(z) => crate::serde_matrix::scalar::serialize(z, s),
        None => s.serialize_none(),
    }
}

impl Evaluation {
    fn combine(transfer: C64, brute_force: Option<C64>, tol: f64) -> Result<Self> {
        let residual = brute_force.map(|b| (b - transfer).norm());
        if let Some(r) = residual {
            if r > tol * transfer.norm().max(1.0) {
                return Err(Error::MethodDisagreement(r));
            }
        }
        Ok(Evaluation {
            value: transfer,
            transfer,
            brute_force,
            residual,
        })
    }

    /// The value as a real number, failing if the imaginary part exceeds
    /// `tol` (relative to the magnitude when that is above 1).
    pub fn real(&self, tol: f64) -> Result<f64> {
        if self.value.im.abs() > tol * self.value.re.abs().max(1.0) {
            return Err(Error::NotReal(self.value.im));
        }
        Ok(self.value.re)
    }
}

/// `N(n) = sum |Tr(A_{i_1} ... A_{i_n})|^2 = Tr(Phi_n ∘ ... ∘ Phi_1)`.
pub fn normalization(chain: &MpsChain, n: usize, opts: &EvalOptions) -> Result<Evaluation> {
    if n == 0 {
        return Err(Error::InvalidChain("normalization needs n >= 1".into()));
    }
    let transfer = transfer_product(chain, 1, n)?.trace();
    let brute = if power(chain.d(), n) <= opts.caps.amplitudes {
        Some(C64::new(state_vector(chain, n, &opts.caps)?.norm_sqr(), 0.0))
    } else {
        None
    };
    let eval = Evaluation::combine(transfer, brute, opts.tol)?;
    if eval.value.re < DEGENERATE_NORMALIZATION {
        return Err(Error::DegenerateNormalization(eval.value.re));
    }
    Ok(eval)
}

/// `phi_n(X) = <Psi_{n+1}| X ⊗ I |Psi_{n+1}> / N(n+1)` for `X` supported in
/// `[1, n]`.
///
/// The transfer route evaluates
/// `Tr(Phi_{n+1} ∘ ... ∘ Phi_{last+1} ∘ X^ ∘ Phi_{first-1} ∘ ... ∘ Phi_1)`.
pub fn finite_expectation(
    chain: &MpsChain,
    x: &LocalObservable,
    n: usize,
    opts: &EvalOptions,
) -> Result<Evaluation> {
    if x.last() > n {
        return Err(Error::InvalidObservable(format!(
            "window [{}, {}] does not fit in {n} sites",
            x.first(),
            x.last()
        )));
    }
    x.check_dim(chain.d())?;
    let total = n + 1;
    chain.ensure_sites(total)?;

    let lifted = lift_observable(chain, x, &opts.caps)?;
    let before = transfer_product(chain, 1, x.first() - 1)?;
    let after = transfer_product(chain, x.last() + 1, total)?;
    let numerator = after.compose(&lifted)?.compose(&before)?.trace();
    let norm = transfer_product(chain, 1, total)?.trace();
    if norm.re < DEGENERATE_NORMALIZATION {
        return Err(Error::DegenerateNormalization(norm.re));
    }
    let transfer = numerator / norm;

    let brute = if power(chain.d(), total) <= opts.caps.amplitudes {
        let psi = state_vector(chain, total, &opts.caps)?;
        Some(psi.sandwich(x.first(), x.width(), x.matrix()) / psi.norm_sqr())
    } else {
        None
    };
    Evaluation::combine(transfer, brute, opts.tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Convention, KrausFamily};
    use crate::linalg::{c, diag, identity, matrix_unit, pauli};
    use crate::mps::Caps;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn ghz() -> MpsChain {
        MpsChain::translation_invariant(
            KrausFamily::new(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])], Convention::Heisenberg).unwrap(),
        )
        .unwrap()
    }

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

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
    }

    /// Per-site chain of arbitrary (not gauge-fixed) Gaussian tensors.
    fn random_chain(d: usize, bond: usize, sites: usize, seed: u64) -> MpsChain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let families = (0..sites)
            .map(|_| {
                let ops = (0..d).map(|_| random_matrix(bond, &mut rng).scale(0.5)).collect();
                KrausFamily::new(ops, Convention::Heisenberg).unwrap()
            })
            .collect();
        MpsChain::per_site(families).unwrap()
    }

    #[test]
    fn ghz_transfer_is_diagonal_projection() {
        let phi = transfer_channel(&ghz(), 1).unwrap();
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(3.0, 0.0), c(4.0, -1.0)]);
        let out = phi.apply(&m).unwrap();
        let expected = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(4.0, -1.0)]);
        assert!(linalg::max_abs_diff(&out, &expected) < 1e-15);
    }

    #[test]
    fn gauge_condition_makes_transfer_trace_preserving() {
        // sum A A^† = I is the dual statement of Phi being trace preserving.
        let phi = transfer_channel(&depolarizing(0.3), 1).unwrap();
        assert!(phi.trace_preservation_violation() < 1e-15);
    }

    #[test]
    fn normalization_examples() {
        let opts = EvalOptions::default();
        let n2 = normalization(&depolarizing(0.3), 2, &opts).unwrap();
        assert!((n2.real(1e-12).unwrap() - 2.08).abs() < 1e-12);
        assert!(n2.residual.unwrap() < 1e-12);
        for n in 1..6 {
            let g = normalization(&ghz(), n, &opts).unwrap();
            assert!((g.value.re - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn normalization_paths_agree_on_random_chains() {
        for seed in 0..10 {
            let chain = random_chain(3, 3, 5, seed);
            let eval = normalization(&chain, 5, &EvalOptions::default()).unwrap();
            let b = eval.brute_force.unwrap();
            assert!((b - eval.transfer).norm() <= 1e-10 * b.norm().max(1.0));
        }
    }

    #[test]
    fn degenerate_normalization_is_reported() {
        let zero = MpsChain::translation_invariant(
            KrausFamily::new(vec![ComplexMatrix::zeros(2, 2)], Convention::Heisenberg).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            normalization(&zero, 2, &EvalOptions::default()),
            Err(Error::DegenerateNormalization(_))
        ));
    }

    #[test]
    fn depolarizing_phi_one() {
        let x = LocalObservable::at_site(1, matrix_unit(4, 0, 0));
        let e = finite_expectation(&depolarizing(0.3), &x, 1, &EvalOptions::default()).unwrap();
        assert!((e.real(1e-12).unwrap() - 0.49 / 0.52).abs() < 1e-12);
        assert!(e.residual.unwrap() < 1e-12);
    }

    #[test]
    fn identity_observable_has_unit_expectation() {
        let chain = random_chain(2, 3, 6, 7);
        for (first, last) in [(1, 1), (2, 4), (1, 5)] {
            let x = LocalObservable::identity(first, last, 2).unwrap();
            let e = finite_expectation(&chain, &x, 5, &EvalOptions::default()).unwrap();
            assert!((e.value - C64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn ghz_sigma_z_vanishes() {
        let x = LocalObservable::at_site(1, pauli::z());
        for n in 1..6 {
            let e = finite_expectation(&ghz(), &x, n, &EvalOptions::default()).unwrap();
            assert!(e.value.norm() < 1e-15);
            assert_eq!(e.brute_force.unwrap(), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn identity_lift_is_transfer_composition() {
        let chain = random_chain(2, 2, 4, 3);
        let x = LocalObservable::identity(2, 4, 2).unwrap();
        let lifted = lift_observable(&chain, &x, &Caps::default()).unwrap();
        let composed = transfer_product(&chain, 2, 4).unwrap();
        assert!(lifted.max_abs_diff(&composed) < 1e-12);
    }

    #[test]
    fn lift_of_tensor_product_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let chain = random_chain(2, 2, 4, 5);
        let x = LocalObservable::new(1, 2, random_matrix(4, &mut rng)).unwrap();
        let y = LocalObservable::new(3, 3, random_matrix(2, &mut rng)).unwrap();
        let caps = Caps::default();
        let xy = lift_observable(&chain, &x.tensor(&y).unwrap(), &caps).unwrap();
        // the earlier window acts first
        let composed = lift_observable(&chain, &y, &caps)
            .unwrap()
            .compose(&lift_observable(&chain, &x, &caps).unwrap())
            .unwrap();
        assert!(xy.max_abs_diff(&composed) < 1e-10);
    }

    #[test]
    fn lift_matches_index_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let chain = random_chain(2, 2, 2, 9);
        let x = LocalObservable::new(1, 2, random_matrix(4, &mut rng)).unwrap();
        let m = random_matrix(2, &mut rng);
        let lifted = lift_observable(&chain, &x, &Caps::default()).unwrap().apply(&m).unwrap();
        let a = |k: usize, i: usize| chain.site(k).unwrap().operators()[i].clone();
        let mut oracle = ComplexMatrix::zeros(2, 2);
        for i1 in 0..2 {
            for i2 in 0..2 {
                for j1 in 0..2 {
                    for j2 in 0..2 {
                        let coeff = x.matrix()[(2 * i1 + i2, 2 * j1 + j2)];
                        oracle += (a(2, i2).adjoint() * a(1, i1).adjoint() * &m * a(1, j1) * a(2, j2)) * coeff;
                    }
                }
            }
        }
        assert!(linalg::max_abs_diff(&lifted, &oracle) < 1e-12);
    }

    #[test]
    fn interior_window_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let chain = random_chain(3, 2, 6, 21);
        let x = LocalObservable::new(2, 3, random_matrix(9, &mut rng)).unwrap();
        let e = finite_expectation(&chain, &x, 4, &EvalOptions::default()).unwrap();
        assert!(e.residual.unwrap() < 1e-10);
    }

    #[test]
    fn window_must_fit() {
        let x = LocalObservable::new(1, 3, identity(8)).unwrap();
        assert!(matches!(
            finite_expectation(&ghz(), &x, 2, &EvalOptions::default()),
            Err(Error::InvalidObservable(_))
        ));
    }

    #[test]
    fn brute_force_is_skipped_above_the_cap() {
        let x = LocalObservable::at_site(1, pauli::z());
        let opts = EvalOptions {
            caps: Caps {
                amplitudes: 4,
                observable_entries: 16,
            },
            ..Default::default()
        };
        let e = finite_expectation(&ghz(), &x, 4, &opts).unwrap();
        assert!(e.brute_force.is_none() && e.residual.is_none());
    }
}
