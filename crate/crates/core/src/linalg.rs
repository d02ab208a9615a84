//! Dense complex linear algebra shared by the channel and MPS layers.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Everything here is small
//! (at most a few thousand on a side) so no sparse storage is used.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::{Error, Result};

pub type ComplexMatrix = DMatrix<C64>;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// `|i><j|` in dimension `n` (0-based indices).
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

pub fn diag(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (k, &v) in values.iter().enumerate() {
        m[(k, k)] = C64::new(v, 0.0);
    }
    m
}

pub mod pauli {
    use super::{c, ComplexMatrix};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }
}

/// Generalized Gell-Mann matrices: `n^2 - 1` traceless Hermitian matrices
/// spanning the traceless part of `M_n`. For `n = 2` these are the Paulis.
pub fn gell_mann(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in (j + 1)..n {
            let mut sym = ComplexMatrix::zeros(n, n);
            sym[(j, k)] = c(1., 0.);
            sym[(k, j)] = c(1., 0.);
            out.push(sym);
            let mut asym = ComplexMatrix::zeros(n, n);
            asym[(j, k)] = c(0., -1.);
            asym[(k, j)] = c(0., 1.);
            out.push(asym);
        }
    }
    for l in 1..n {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut d = ComplexMatrix::zeros(n, n);
        for m in 0..l {
            d[(m, m)] = c(scale, 0.);
        }
        d[(l, l)] = c(-(l as f64) * scale, 0.);
        out.push(d);
    }
    out
}

pub fn ensure_square(a: &ComplexMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub fn ensure_finite(a: &ComplexMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Largest entry modulus.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Standard Kronecker product; the left factor indexes the slow block.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Plain diagonal sum.
pub fn trace(a: &ComplexMatrix) -> Result<C64> {
    ensure_square(a)?;
    Ok(a.trace())
}

/// Traces out every site after the first `keep` ones.
///
/// `dims` lists the local dimension of each site, first site slowest, so
/// `x` must be `prod(dims)` on a side. The result acts on the first `keep`
/// sites and satisfies `X_head ⊗ X_tail -> X_head * Tr(X_tail)`.
pub fn partial_trace_tail(x: &ComplexMatrix, keep: usize, dims: &[usize]) -> Result<ComplexMatrix> {
    let n = ensure_square(x)?;
    if keep > dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            found: keep,
        });
    }
    let total: usize = dims.iter().product();
    if total != n {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: n,
        });
    }
    let head: usize = dims[..keep].iter().product();
    let tail: usize = dims[keep..].iter().product();
    Ok(ComplexMatrix::from_fn(head, head, |a, b| {
        (0..tail).map(|t| x[(a * tail + t, b * tail + t)]).sum()
    }))
}

pub fn hermitian_deviation(h: &ComplexMatrix) -> f64 {
    max_abs_diff(h, &h.adjoint())
}

/// `(m + m^†) / 2`
pub fn real_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `(m - m^†) / 2i`
pub fn imag_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m - m.adjoint()) * C64::new(0.0, -0.5)
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Sorted descending.
    pub values: Vec<f64>,
    /// Column `k` belongs to `values[k]`.
    pub vectors: ComplexMatrix,
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending.
pub fn eig_hermitian(h: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    let n = ensure_square(h)?;
    ensure_finite(h)?;
    let scale = max_abs(h).max(1.0);
    let dev = hermitian_deviation(h);
    if dev > tol * scale {
        return Err(Error::NotHermitian(dev));
    }
    if n == 0 {
        return Ok(HermitianEigen {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let sym = real_part(h);
    let eig = SymmetricEigen::try_new(sym, EIG_EPS, EIG_MAX_ITER).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok(HermitianEigen { values, vectors })
}

#[derive(Debug, Clone)]
pub struct Eigen {
    /// Sorted by descending modulus.
    pub values: Vec<C64>,
    /// Unit-norm eigenvector columns matching `values`.
    pub vectors: ComplexMatrix,
}

/// Eigenvalues of a general square matrix, descending modulus.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    if n == 0 {
        return Ok(vec![]);
    }
    let schur = Schur::try_new(m.clone(), EIG_EPS, EIG_MAX_ITER).ok_or(Error::NoConvergence)?;
    let (_, t) = schur.unpack();
    let mut values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    sort_by_modulus(&mut values);
    Ok(values)
}

fn sort_by_modulus(values: &mut [C64]) {
    values.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)));
}

/// Eigenpairs of a general square matrix via complex Schur form and
/// triangular back-substitution. Eigenvalues sorted by descending modulus.
pub fn eig_general(m: &ComplexMatrix) -> Result<Eigen> {
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    if n == 0 {
        return Ok(Eigen {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let schur = Schur::try_new(m.clone(), EIG_EPS, EIG_MAX_ITER).ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let small = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);

    let mut pairs: Vec<(C64, DVector<C64>)> = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = DVector::<C64>::zeros(n);
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: C64 = ((i + 1)..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            y[i] = -s / denom;
        }
        let mut v = &q * y;
        let norm = v.norm();
        if norm > 0.0 {
            v.unscale_mut(norm);
        }
        pairs.push((lambda, v));
    }
    pairs.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()).then(b.0.re.total_cmp(&a.0.re)));
    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, col| pairs[col].1[r]);
    Ok(Eigen { values, vectors })
}

#[derive(Debug, Clone)]
pub struct HermitianDecomposition {
    pub positive_part: ComplexMatrix,
    pub negative_part: ComplexMatrix,
}

/// Spectral split `h = h+ - h-` with `h+ h- = 0`.
pub fn positive_negative_parts(h: &ComplexMatrix, tol: f64) -> Result<HermitianDecomposition> {
    let n = ensure_square(h)?;
    let eig = eig_hermitian(h, tol)?;
    let mut positive_part = ComplexMatrix::zeros(n, n);
    let mut negative_part = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        let proj = v * v.adjoint();
        if lambda > 0.0 {
            positive_part += proj.scale(lambda);
        } else if lambda < 0.0 {
            negative_part += proj.scale(-lambda);
        }
    }
    Ok(HermitianDecomposition {
        positive_part,
        negative_part,
    })
}

/// `Tr(Re(m)+ + Re(m)-) + Tr(Im(m)+ + Im(m)-)`.
pub fn tv_norm(m: &ComplexMatrix) -> Result<f64> {
    ensure_square(m)?;
    let abs_sum = |h: ComplexMatrix| -> Result<f64> {
        Ok(eig_hermitian(&h, f64::INFINITY)?
            .values
            .iter()
            .map(|v| v.abs())
            .sum())
    };
    Ok(abs_sum(real_part(m))? + abs_sum(imag_part(m))?)
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    let eig = eig_hermitian(&real_part(h), f64::INFINITY)?;
    Ok(eig.values.last().copied().unwrap_or(0.0))
}

/// Column-stacking vectorization: entry `(k, l)` lands at `k + l * rows`.
pub fn vec_col(m: &ComplexMatrix) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvec_col(v: &DVector<C64>, rows: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(rows, v.len() / rows, v.as_slice())
}
