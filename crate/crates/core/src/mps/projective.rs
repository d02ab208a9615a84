use serde::Serialize;

use crate::linalg::{self, ComplexMatrix, C64};
use crate::{Error, Result};

use super::heisenberg::{lift_observable, transfer_channel, transfer_product};
use super::{ergodic_limit, finite_expectation, EvalOptions, LocalObservable, MpsChain};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaugeReport {
    /// `max |sum_i A_i A_i^† - I|` for each stored site.
    pub per_site: Vec<f64>,
    pub max_violation: f64,
}

/// Gauge-condition violation of every stored site family (one entry for a
/// translation-invariant chain).
pub fn gauge_check(chain: &MpsChain) -> GaugeReport {
    let per_site: Vec<f64> = match chain.sites() {
        super::Sites::TranslationInvariant(f) => vec![f.gauge_violation()],
        super::Sites::PerSite(fs) => fs.iter().map(|f| f.gauge_violation()).collect(),
    };
    let max_violation = per_site.iter().copied().fold(0.0, f64::max);
    GaugeReport {
        per_site,
        max_violation,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    /// Site `n`; the identity couples it to site `n + 1`.
    pub site: usize,
    /// `max |sum_j (A_i A_j)^† ⊗ A_i A_j - A_i^† ⊗ A_i|` per index `i`.
    pub per_index: Vec<f64>,
    pub max_violation: f64,
}

/// Operator identity that makes the finite-volume states projective,
/// evaluated between sites `n` and `n + 1`.
pub fn projective_consistency_check(chain: &MpsChain, n: usize) -> Result<ConsistencyReport> {
    let here = chain.site(n)?.operators();
    let next = chain.site(n + 1)?.operators();
    let per_index: Vec<f64> = here
        .iter()
        .map(|ai| {
            let target = linalg::kron(&ai.adjoint(), ai);
            let sum = next.iter().fold(ComplexMatrix::zeros(target.nrows(), target.ncols()), |acc, aj| {
                let prod = ai * aj;
                acc + linalg::kron(&prod.adjoint(), &prod)
            });
            linalg::max_abs_diff(&sum, &target)
        })
        .collect();
    let max_violation = per_index.iter().copied().fold(0.0, f64::max);
    Ok(ConsistencyReport {
        site: n,
        per_index,
        max_violation,
    })
}

/// Largest consistency violation over the site pairs `(n, n+1)` for
/// `n = 1..=last` (a single pair for a translation-invariant chain).
fn consistency_violation(chain: &MpsChain, last: usize) -> Result<f64> {
    let upto = if chain.is_translation_invariant() { 1 } else { last.max(1) };
    (1..=upto).try_fold(0.0f64, |worst, n| {
        Ok(worst.max(projective_consistency_check(chain, n)?.max_violation))
    })
}

/// `phi(X) = Tr(Phi_{N+1} ∘ X^) / Tr(Phi_1)` for `X` on `[1, N]`, valid when
/// the chain satisfies the consistency identity. Windows starting later are
/// preceded by the transfer channels of the sites in front of them.
pub fn projective_limit(chain: &MpsChain, x: &LocalObservable, opts: &EvalOptions) -> Result<C64> {
    x.check_dim(chain.d())?;
    let violation = consistency_violation(chain, x.last())?;
    if violation > opts.tol {
        return Err(Error::NotProjective(violation));
    }
    let lifted = lift_observable(chain, x, &opts.caps)?;
    let before = transfer_product(chain, 1, x.first() - 1)?;
    let after = transfer_channel(chain, x.last() + 1)?;
    let numerator = after.compose(&lifted)?.compose(&before)?.trace();
    let denominator = transfer_channel(chain, 1)?.trace();
    if denominator.norm() < 1e-14 {
        return Err(Error::DegenerateNormalization(denominator.norm()));
    }
    Ok(numerator / denominator)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceIdentityCheck {
    #[serde(with = "crate::serde_matrix::scalar")]
    pub lhs: C64,
    #[serde(with = "crate::serde_matrix::scalar")]
    pub rhs: C64,
    pub residual: f64,
}

/// Both sides of the trace factorization
/// `conj(Tr(A_{i_1}...A_{i_{n+k}})) Tr(A_{j_1}...A_{j_n} A_{i_{n+1}}...A_{i_{n+k}})
///  = Tr[(P_i^† ⊗ P_j)(Q_i^† ⊗ Q_i)]`
/// with `P` the products over sites `1..=n` and `Q_i` the product over
/// `n+1..=n+k`. The tail of the second tuple is shared with `i`, so only its
/// head `j_head` (length `n`) is supplied.
pub fn trace_product_identity(chain: &MpsChain, i: &[usize], j_head: &[usize]) -> Result<TraceIdentityCheck> {
    let n = j_head.len();
    if n == 0 || i.len() < n {
        return Err(Error::InvalidChain(format!(
            "need 1 <= n <= n + k, got n = {n} and n + k = {}",
            i.len()
        )));
    }
    let op = |k: usize, idx: usize| -> Result<&ComplexMatrix> {
        chain.site(k)?.operators().get(idx).ok_or_else(|| {
            Error::InvalidChain(format!("basis index {idx} at site {k} exceeds d = {}", chain.d()))
        })
    };
    let id = linalg::identity(chain.bond_dim());
    let product = |indices: &[usize], offset: usize| -> Result<ComplexMatrix> {
        indices
            .iter()
            .enumerate()
            .try_fold(id.clone(), |acc, (s, &idx)| Ok(acc * op(offset + s + 1, idx)?))
    };
    let p_i = product(&i[..n], 0)?;
    let q_i = product(&i[n..], n)?;
    let p_j = product(j_head, 0)?;

    let lhs = (&p_i * &q_i).trace().conj() * (&p_j * &q_i).trace();
    let rhs = (linalg::kron(&p_i.adjoint(), &p_j) * linalg::kron(&q_i.adjoint(), &q_i)).trace();
    Ok(TraceIdentityCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Projective,
    NonProjective,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub label: String,
    pub window: [usize; 2],
    /// `phi_n(X)` for each `n` in the probed range.
    #[serde(with = "crate::serde_matrix::scalar_list")]
    pub values: Vec<C64>,
    /// `|phi_{n+1}(X) - phi_n(X)|` for each `n` in the probed range.
    pub violations: Vec<f64>,
    /// Thermodynamic limit, when one is available for this chain.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "optional_scalar")]
    pub limit: Option<C64>,
    /// `|phi_{n_min}(X) - phi(X)|`
    pub limit_gap: Option<f64>,
}

fn optional_scalar<S: serde::Serializer>(z: &Option<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match z {
        Some(z) => crate::serde_matrix::scalar::serialize(z, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectivityReport {
    pub n_range: Vec<usize>,
    /// Largest `|phi_{n+1}(X) - phi_n(X)|` over the probe set, per `n`.
    pub max_violation: Vec<f64>,
    pub threshold: f64,
    pub verdict: Verdict,
    /// `"ergodic"` or `"projective"`: how the probe limits were computed.
    pub limit_method: Option<&'static str>,
    pub probes: Vec<ProbeRecord>,
}

impl ProjectivityReport {
    pub fn probe(&self, label: &str) -> Option<&ProbeRecord> {
        self.probes.iter().find(|p| p.label == label)
    }
}

/// Matrix units `E_kl` and generalized Gell-Mann matrices at site 1.
pub fn default_probes(d: usize) -> Vec<(String, LocalObservable)> {
    let mut probes = Vec::with_capacity(2 * d * d);
    for k in 0..d {
        for l in 0..d {
            probes.push((
                format!("E_{k}{l}@1"),
                LocalObservable::at_site(1, linalg::matrix_unit(d, k, l)),
            ));
        }
    }
    for (m, g) in linalg::gell_mann(d).into_iter().enumerate() {
        probes.push((format!("gell_mann_{m}@1"), LocalObservable::at_site(1, g)));
    }
    probes
}

/// Compares `phi_{n+1}` with `phi_n` on every probe for each `n` in
/// `n_range`. The verdict is `non_projective` when any difference exceeds
/// `100 * tol`.
pub fn projectivity_probe(
    chain: &MpsChain,
    n_range: &[usize],
    probes: &[(String, LocalObservable)],
    opts: &EvalOptions,
) -> Result<ProjectivityReport> {
    let threshold = 100.0 * opts.tol;
    let mut max_violation = vec![0.0f64; n_range.len()];
    let mut records = Vec::with_capacity(probes.len());
    let mut limit_method = None;

    for (label, x) in probes {
        let mut values = Vec::with_capacity(n_range.len());
        let mut violations = Vec::with_capacity(n_range.len());
        for (slot, &n) in n_range.iter().enumerate() {
            let now = finite_expectation(chain, x, n, opts)?.value;
            let next = finite_expectation(chain, x, n + 1, opts)?.value;
            let v = (next - now).norm();
            max_violation[slot] = max_violation[slot].max(v);
            values.push(now);
            violations.push(v);
        }

        let limit = match ergodic_limit(chain, x, opts) {
            Ok(v) => {
                limit_method = Some("ergodic");
                Some(v)
            }
            Err(_) => match projective_limit(chain, x, opts) {
                Ok(v) => {
                    limit_method = Some("projective");
                    Some(v)
                }
                Err(_) => None,
            },
        };
        let limit_gap = limit.zip(values.first().copied()).map(|(l, v)| (v - l).norm());
        records.push(ProbeRecord {
            label: label.clone(),
            window: [x.first(), x.last()],
            values,
            violations,
            limit,
            limit_gap,
        });
    }

    let verdict = if max_violation.iter().any(|&v| v > threshold) {
        Verdict::NonProjective
    } else {
        Verdict::Projective
    };
    Ok(ProjectivityReport {
        n_range: n_range.to_vec(),
        max_violation,
        threshold,
        verdict,
        limit_method,
        probes: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Convention, KrausFamily};
    use crate::linalg::{c, diag, identity, matrix_unit, pauli};
    use rand::{Rng, SeedableRng};
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

    fn random_chain(d: usize, bond: usize, sites: usize, seed: u64) -> MpsChain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let families = (0..sites)
            .map(|_| {
                let ops = (0..d)
                    .map(|_| {
                        ComplexMatrix::from_fn(bond, bond, |_, _| {
                            c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
                        })
                    })
                    .collect();
                KrausFamily::new(ops, Convention::Heisenberg).unwrap()
            })
            .collect();
        MpsChain::per_site(families).unwrap()
    }

    #[test]
    fn gauge_examples() {
        assert_eq!(gauge_check(&ghz()).max_violation, 0.0);
        assert!(gauge_check(&depolarizing(0.3)).max_violation < 1e-15);
        let doubled = MpsChain::translation_invariant(
            KrausFamily::new(vec![identity(2), identity(2)], Convention::Heisenberg).unwrap(),
        )
        .unwrap();
        assert_eq!(gauge_check(&doubled).max_violation, 1.0);
    }

    #[test]
    fn consistency_examples() {
        let g = projective_consistency_check(&ghz(), 3).unwrap();
        assert_eq!(g.per_index, vec![0.0, 0.0]);
        let dep = projective_consistency_check(&depolarizing(0.3), 1).unwrap();
        assert!(dep.max_violation > 0.1);
    }

    #[test]
    fn rotated_projector_families_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = ComplexMatrix::from_fn(3, 3, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let u = g.qr().q();
        let p = |entries: &[f64]| &u * diag(entries) * u.adjoint();
        let family = vec![p(&[1.0, 0.0, 0.0]), p(&[0.0, 1.0, 1.0])];
        let chain = MpsChain::translation_invariant(KrausFamily::new(family, Convention::Heisenberg).unwrap()).unwrap();
        assert!(projective_consistency_check(&chain, 1).unwrap().max_violation < 1e-14);
    }

    #[test]
    fn ghz_projective_limit_examples() {
        let opts = EvalOptions::default();
        let zz = LocalObservable::product(1, &[pauli::z(), pauli::z()]).unwrap();
        assert!((projective_limit(&ghz(), &zz, &opts).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
        let id = LocalObservable::identity(1, 3, 2).unwrap();
        assert!((projective_limit(&ghz(), &id, &opts).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
        let e00 = LocalObservable::at_site(2, matrix_unit(2, 0, 0));
        assert!((projective_limit(&ghz(), &e00, &opts).unwrap() - C64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn projective_limit_refuses_inconsistent_chains() {
        let x = LocalObservable::at_site(1, matrix_unit(4, 0, 0));
        assert!(matches!(
            projective_limit(&depolarizing(0.3), &x, &EvalOptions::default()),
            Err(Error::NotProjective(_))
        ));
    }

    #[test]
    fn trace_identity_on_ghz_and_random_chains() {
        let g = trace_product_identity(&ghz(), &[1, 1, 1, 1], &[1, 1]).unwrap();
        assert_eq!((g.lhs, g.rhs), (C64::new(1.0, 0.0), C64::new(1.0, 0.0)));

        let chain = random_chain(3, 3, 4, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let i: Vec<usize> = (0..4).map(|_| rng.random_range(0..3)).collect();
            let j: Vec<usize> = (0..2).map(|_| rng.random_range(0..3)).collect();
            let r = trace_product_identity(&chain, &i, &j).unwrap();
            assert!(r.residual <= 1e-12 * r.lhs.norm().max(1.0));
        }
    }

    #[test]
    fn trace_identity_without_boundary_block() {
        let chain = random_chain(2, 2, 2, 4);
        let r = trace_product_identity(&chain, &[0, 1], &[1, 1]).unwrap();
        let a = |k: usize, i: usize| chain.site(k).unwrap().operators()[i].clone();
        let direct = (a(1, 0) * a(2, 1)).trace().conj() * (a(1, 1) * a(2, 1)).trace();
        assert!((r.lhs - direct).norm() < 1e-13);
        assert!(r.residual < 1e-13);
    }

    #[test]
    fn ghz_probe_is_projective() {
        let report = projectivity_probe(&ghz(), &[1, 2, 3, 4, 5], &default_probes(2), &EvalOptions::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Projective);
        assert!(report.max_violation.iter().all(|&v| v <= 1e-12));
        assert_eq!(report.limit_method, Some("projective"));
    }

    #[test]
    fn depolarizing_probe_is_not_projective() {
        let report = projectivity_probe(&depolarizing(0.3), &[1, 2], &default_probes(4), &EvalOptions::default()).unwrap();
        assert_eq!(report.verdict, Verdict::NonProjective);
        assert!(report.max_violation.iter().all(|&v| v > 0.0));
        let e00 = report.probe("E_00@1").unwrap();
        assert!((e00.limit_gap.unwrap() - (0.49 / 0.52 - 0.7)).abs() < 1e-12);
        assert_eq!(report.limit_method, Some("ergodic"));
    }

    #[test]
    fn identity_probe_never_moves() {
        let probes = vec![("I".to_string(), LocalObservable::identity(1, 1, 4).unwrap())];
        let report = projectivity_probe(&depolarizing(0.3), &[1, 2, 3], &probes, &EvalOptions::default()).unwrap();
        assert!(report.max_violation.iter().all(|&v| v < 1e-14));
        assert_eq!(report.verdict, Verdict::Projective);
    }
}
