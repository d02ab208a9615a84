use crate::linalg::{self, ComplexMatrix, C64};
use crate::{Error, Result};

use super::{Convention, KrausFamily};

/// Linear map on `M_D`, stored as the `D^2 x D^2` matrix acting on
/// column-stacked vectorizations.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl SuperOperator {
    pub fn from_matrix(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        let n = linalg::ensure_square(&matrix)?;
        if n != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: n,
            });
        }
        Ok(SuperOperator { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        SuperOperator {
            dim,
            matrix: linalg::identity(dim * dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        SuperOperator {
            dim,
            matrix: ComplexMatrix::zeros(dim * dim, dim * dim),
        }
    }

    /// Tabulates `f` on the matrix units.
    pub fn from_fn(dim: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let n = dim * dim;
        let mut matrix = ComplexMatrix::zeros(n, n);
        for l in 0..dim {
            for k in 0..dim {
                let image = linalg::vec_col(&f(&linalg::matrix_unit(dim, k, l)));
                matrix.set_column(k + l * dim, &image);
            }
        }
        SuperOperator { dim, matrix }
    }

    /// `M -> left * M * right`
    pub fn sandwich(left: &ComplexMatrix, right: &ComplexMatrix) -> Self {
        let dim = left.nrows();
        SuperOperator {
            dim,
            matrix: linalg::kron(&right.transpose(), left),
        }
    }

    pub fn from_kraus(k: &KrausFamily) -> Self {
        let dim = k.dim();
        let mut matrix = ComplexMatrix::zeros(dim * dim, dim * dim);
        for a in k.operators() {
            matrix += match k.convention() {
                // A M A^†  ->  conj(A) ⊗ A
                Convention::Schrodinger => linalg::kron(&a.conjugate(), a),
                // A^† M A  ->  A^T ⊗ A^†
                Convention::Heisenberg => linalg::kron(&a.transpose(), &a.adjoint()),
            };
        }
        SuperOperator { dim, matrix }
    }

    /// `M -> Tr(M) * rho`
    pub fn replacement(rho: &ComplexMatrix) -> Self {
        let dim = rho.nrows();
        let v = linalg::vec_col(rho);
        let ones = linalg::vec_col(&linalg::identity(dim));
        SuperOperator {
            dim,
            matrix: v * ones.transpose(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.nrows().max(m.ncols()),
            });
        }
        Ok(linalg::unvec_col(&(&self.matrix * linalg::vec_col(m)), self.dim))
    }

    /// `self ∘ inner`: `inner` acts first.
    pub fn compose(&self, inner: &SuperOperator) -> Result<SuperOperator> {
        if self.dim != inner.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: inner.dim,
            });
        }
        Ok(SuperOperator {
            dim: self.dim,
            matrix: &self.matrix * &inner.matrix,
        })
    }

    pub fn power(&self, n: usize) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            matrix: self.matrix.pow(n as u32),
        }
    }

    pub fn scale(&self, s: f64) -> SuperOperator {
        SuperOperator {
            dim: self.dim,
            matrix: self.matrix.scale(s),
        }
    }

    /// `sum_{k,l} <e_k| Phi(|e_k><e_l|) |e_l>`, read off as the trace of the
    /// vectorized matrix.
    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Same quantity as [`SuperOperator::trace`], evaluated from the defining
    /// double sum over matrix units.
    pub fn trace_by_matrix_units(&self) -> C64 {
        let mut total = C64::new(0.0, 0.0);
        for k in 0..self.dim {
            for l in 0..self.dim {
                let image = self
                    .apply(&linalg::matrix_unit(self.dim, k, l))
                    .expect("matrix unit has the right shape");
                total += image[(k, l)];
            }
        }
        total
    }

    /// `sum_{k,l} |k><l| ⊗ Phi(|k><l|)`; PSD iff the map is completely positive.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut choi = ComplexMatrix::zeros(d * d, d * d);
        for k in 0..d {
            for l in 0..d {
                let unit = linalg::matrix_unit(d, k, l);
                let image = self.apply(&unit).expect("matrix unit has the right shape");
                choi += linalg::kron(&unit, &image);
            }
        }
        choi
    }

    /// `max_{k,l} |Tr Phi(|k><l|) - delta_kl|`
    pub fn trace_preservation_violation(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for k in 0..d {
            for l in 0..d {
                let image = self
                    .apply(&linalg::matrix_unit(d, k, l))
                    .expect("matrix unit has the right shape");
                let target = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((image.trace() - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &SuperOperator) -> f64 {
        linalg::max_abs_diff(&self.matrix, &other.matrix)
    }
}

impl KrausFamily {
    pub fn to_superoperator(&self) -> SuperOperator {
        SuperOperator::from_kraus(self)
    }
}
