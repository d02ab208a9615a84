use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Serialize, Serializer};

use crate::linalg::{self, ComplexMatrix, C64};
use crate::{Error, Result};

/// Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        linalg::ensure_square(&m)?;
        linalg::ensure_finite(&m)?;
        let dev = linalg::hermitian_deviation(&m);
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = linalg::min_eigenvalue(&m)?;
        if min < -tol {
            return Err(Error::InvalidDensity(format!("eigenvalue {min:.3e}")));
        }
        Ok(DensityMatrix(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(linalg::identity(dim).scale(1.0 / dim as f64))
    }

    /// `|psi><psi| / <psi|psi>`
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm2 = v.norm_squared();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::InvalidDensity("zero or non-finite vector".into()));
        }
        Ok(DensityMatrix((&v * v.adjoint()).unscale(norm2)))
    }

    /// `|k><k|`
    pub fn basis_state(dim: usize, k: usize) -> Self {
        DensityMatrix(linalg::matrix_unit(dim, k, k))
    }

    /// `G G^† / Tr(G G^†)` for a complex Gaussian `G` (full-rank almost surely).
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        DensityMatrix(linalg::real_part(&m.unscale(tr)))
    }

    /// Normalizes the trace of a Hermitian-within-tolerance matrix that is
    /// only known up to a complex scale (an eigenvector, say), then validates.
    pub fn from_unnormalized(m: &ComplexMatrix, tol: f64) -> Result<Self> {
        let tr = m.trace();
        if tr.norm() < f64::EPSILON {
            return Err(Error::InvalidDensity("zero trace".into()));
        }
        let scaled = m.map(|z| z / tr);
        let herm = linalg::real_part(&scaled);
        let tr = herm.trace().re;
        DensityMatrix::new(herm.unscale(tr), tol)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_matrix::serialize(&self.0, s)
    }
}
