use serde::{Deserialize, Serialize};

use crate::linalg::{self, ComplexMatrix};
use crate::{Error, Result};

/// Which sandwich a Kraus family realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `M -> sum_i A_i M A_i^†`
    Schrodinger,
    /// `M -> sum_i A_i^† M A_i`, the transfer-channel form used by MPS sites.
    #[default]
    Heisenberg,
}

/// An ordered, nonempty list of `D x D` operators plus the sandwich
/// convention they are meant for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct KrausFamily {
    dim: usize,
    operators: Vec<ComplexMatrix>,
    convention: Convention,
}

#[derive(Serialize, Deserialize)]
struct RawFamily {
    dim: usize,
    #[serde(default)]
    convention: Convention,
    #[serde(with = "crate::serde_matrix::list")]
    operators: Vec<ComplexMatrix>,
}

impl TryFrom<RawFamily> for KrausFamily {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        let family = KrausFamily::new(raw.operators, raw.convention)?;
        if family.dim != raw.dim {
            return Err(Error::DimensionMismatch {
                expected: raw.dim,
                found: family.dim,
            });
        }
        Ok(family)
    }
}

impl From<KrausFamily> for RawFamily {
    fn from(k: KrausFamily) -> Self {
        RawFamily {
            dim: k.dim,
            convention: k.convention,
            operators: k.operators,
        }
    }
}

impl KrausFamily {
    pub fn new(operators: Vec<ComplexMatrix>, convention: Convention) -> Result<Self> {
        let first = operators.first().ok_or(Error::EmptyFamily)?;
        let dim = linalg::ensure_square(first)?;
        for op in &operators {
            let n = linalg::ensure_square(op)?;
            if n != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: n,
                });
            }
            linalg::ensure_finite(op)?;
        }
        Ok(KrausFamily {
            dim,
            operators,
            convention,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    /// `max |sum_i A_i^† A_i - I|`
    pub fn completeness_violation(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, a| acc + a.adjoint() * a);
        linalg::max_abs_diff(&sum, &linalg::identity(self.dim))
    }

    /// `max |sum_i A_i A_i^† - I|`
    pub fn gauge_violation(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, a| acc + a * a.adjoint());
        linalg::max_abs_diff(&sum, &linalg::identity(self.dim))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelCheck {
    pub holds: bool,
    pub violation: f64,
}

impl ChannelCheck {
    fn new(violation: f64, tol: f64) -> Self {
        ChannelCheck {
            holds: violation <= tol,
            violation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CptpReport {
    /// Violation is `max(0, -lambda_min(Choi))`.
    pub completely_positive: ChannelCheck,
    pub trace_preserving: ChannelCheck,
}

impl CptpReport {
    pub fn holds(&self) -> bool {
        self.completely_positive.holds && self.trace_preserving.holds
    }
}

/// Checks the map the family realizes. For the Schrödinger convention trace
/// preservation is `sum A^† A = I`; for the Heisenberg convention the roles of
/// `A` and `A^†` swap.
pub fn is_cptp(k: &KrausFamily, tol: f64) -> CptpReport {
    let choi = k.to_superoperator().choi();
    let cp_violation = match linalg::min_eigenvalue(&choi) {
        Ok(min) => (-min).max(0.0),
        Err(_) => f64::INFINITY,
    };
    let tp_violation = match k.convention {
        Convention::Schrodinger => k.completeness_violation(),
        Convention::Heisenberg => k.gauge_violation(),
    };
    CptpReport {
        completely_positive: ChannelCheck::new(cp_violation, tol),
        trace_preserving: ChannelCheck::new(tp_violation, tol),
    }
}

/// Unitality of the realized map: `sum A A^† = I` (Schrödinger) or
/// `sum A^† A = I` (Heisenberg).
pub fn is_unital(k: &KrausFamily, tol: f64) -> ChannelCheck {
    let violation = match k.convention {
        Convention::Schrodinger => k.gauge_violation(),
        Convention::Heisenberg => k.completeness_violation(),
    };
    ChannelCheck::new(violation, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, identity, pauli};

    fn depolarizing(p: f64) -> Vec<ComplexMatrix> {
        let a = (p / 3.0).sqrt();
        vec![
            identity(2).scale((1.0 - p).sqrt()),
            pauli::x().scale(a),
            pauli::y().scale(a),
            pauli::z().scale(a),
        ]
    }

    #[test]
    fn depolarizing_is_cptp_and_unital() {
        for p in [0.0, 0.1, 0.3, 0.75, 1.0] {
            for conv in [Convention::Schrodinger, Convention::Heisenberg] {
                let k = KrausFamily::new(depolarizing(p), conv).unwrap();
                assert!(is_cptp(&k, 1e-10).holds(), "p={p}");
                assert!(is_unital(&k, 1e-10).holds, "p={p}");
            }
        }
    }

    #[test]
    fn ghz_family_satisfies_gauge() {
        let k = KrausFamily::new(vec![diag(&[1., 0.]), diag(&[0., 1.])], Convention::Schrodinger).unwrap();
        assert!(is_unital(&k, 1e-12).holds);
        assert_eq!(k.gauge_violation(), 0.0);
    }

    #[test]
    fn scaled_identity_fails_tp_by_three() {
        let k = KrausFamily::new(vec![identity(2).scale(2.0)], Convention::Schrodinger).unwrap();
        let r = is_cptp(&k, 1e-10);
        assert!(r.completely_positive.holds);
        assert!(!r.trace_preserving.holds);
        assert!((r.trace_preserving.violation - 3.0).abs() < 1e-14);
    }

    #[test]
    fn conventions_swap_tp_and_unital_conditions() {
        let a0 = crate::linalg::matrix_unit(2, 0, 0);
        let a1 = crate::linalg::matrix_unit(2, 0, 1);
        // sum A^†A = I, sum A A^† = 2|0><0|
        let s = KrausFamily::new(vec![a0.clone(), a1.clone()], Convention::Schrodinger).unwrap();
        assert!(is_cptp(&s, 1e-12).trace_preserving.holds);
        assert!(!is_unital(&s, 1e-12).holds);
        let h = s.with_convention(Convention::Heisenberg);
        assert!(!is_cptp(&h, 1e-12).trace_preserving.holds);
        assert!(is_unital(&h, 1e-12).holds);
    }

    #[test]
    fn rejects_mixed_dimensions() {
        assert!(matches!(
            KrausFamily::new(vec![identity(2), identity(3)], Convention::Heisenberg),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
        assert!(matches!(
            KrausFamily::new(vec![], Convention::Heisenberg),
            Err(Error::EmptyFamily)
        ));
    }

    #[test]
    fn json_roundtrip_and_dim_check() {
        let k = KrausFamily::new(depolarizing(0.3), Convention::Heisenberg).unwrap();
        let json = serde_json::to_string(&k).unwrap();
        let back: KrausFamily = serde_json::from_str(&json).unwrap();
        assert_eq!(back, k);
        let bad = json.replacen("\"dim\":2", "\"dim\":3", 1);
        assert!(serde_json::from_str::<KrausFamily>(&bad).is_err());
    }
}
