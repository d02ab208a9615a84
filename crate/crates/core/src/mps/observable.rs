use serde::{Deserialize, Serialize};

use crate::linalg::{self, ComplexMatrix};
use crate::{Error, Result};

/// A dense observable supported on the 1-based site window `[first, last]`.
/// Multi-indices are ordered with the first site slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawObservable", into = "RawObservable")]
pub struct LocalObservable {
    first: usize,
    last: usize,
    matrix: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawObservable {
    window: [usize; 2],
    #[serde(with = "crate::serde_matrix")]
    matrix: ComplexMatrix,
}

impl TryFrom<RawObservable> for LocalObservable {
    type Error = Error;

    fn try_from(raw: RawObservable) -> Result<Self> {
        LocalObservable::new(raw.window[0], raw.window[1], raw.matrix)
    }
}

impl From<LocalObservable> for RawObservable {
    fn from(x: LocalObservable) -> Self {
        RawObservable {
            window: [x.first, x.last],
            matrix: x.matrix,
        }
    }
}

impl LocalObservable {
    pub fn new(first: usize, last: usize, matrix: ComplexMatrix) -> Result<Self> {
        if first == 0 || last < first {
            return Err(Error::InvalidObservable(format!(
                "window [{first}, {last}] is empty or not 1-based"
            )));
        }
        linalg::ensure_square(&matrix)?;
        linalg::ensure_finite(&matrix)?;
        Ok(LocalObservable { first, last, matrix })
    }

    /// Single-site observable.
    ///
    /// # Panics
    /// If `site` is 0 or `matrix` is not square.
    pub fn at_site(site: usize, matrix: ComplexMatrix) -> Self {
        LocalObservable::new(site, site, matrix).expect("valid single-site observable")
    }

    pub fn identity(first: usize, last: usize, d: usize) -> Result<Self> {
        let len = last.saturating_sub(first) + 1;
        LocalObservable::new(first, last, linalg::identity(d.pow(len as u32)))
    }

    /// `X_1 ⊗ X_2 ⊗ ... ` placed on consecutive sites starting at `first`.
    pub fn product(first: usize, factors: &[ComplexMatrix]) -> Result<Self> {
        let (head, tail) = factors
            .split_first()
            .ok_or_else(|| Error::InvalidObservable("empty product".into()))?;
        let matrix = tail.iter().fold(head.clone(), |acc, f| linalg::kron(&acc, f));
        LocalObservable::new(first, first + factors.len() - 1, matrix)
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn last(&self) -> usize {
        self.last
    }

    /// Number of sites in the window.
    pub fn width(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        LocalObservable {
            first: self.first,
            last: self.last,
            matrix: self.matrix.adjoint(),
        }
    }

    /// Same operator moved to start at `first`.
    pub fn shifted_to(&self, first: usize) -> Result<Self> {
        LocalObservable::new(first, first + self.width() - 1, self.matrix.clone())
    }

    /// `self ⊗ other` when `other` starts right after `self`.
    pub fn tensor(&self, other: &LocalObservable) -> Result<Self> {
        if other.first != self.last + 1 {
            return Err(Error::InvalidObservable(format!(
                "windows [{}, {}] and [{}, {}] are not adjacent",
                self.first, self.last, other.first, other.last
            )));
        }
        LocalObservable::new(self.first, other.last, linalg::kron(&self.matrix, &other.matrix))
    }

    /// Checks that the matrix has side `d^width`.
    pub fn check_dim(&self, d: usize) -> Result<()> {
        let expected = (d as u128).checked_pow(self.width() as u32);
        if expected != Some(self.matrix.nrows() as u128) {
            return Err(Error::InvalidObservable(format!(
                "matrix side {} does not match d^{} with d = {d}",
                self.matrix.nrows(),
                self.width()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_unit, pauli};

    #[test]
    fn product_and_dims() {
        let x = LocalObservable::product(2, &[pauli::z(), pauli::x(), pauli::z()]).unwrap();
        assert_eq!((x.first(), x.last(), x.width()), (2, 4, 3));
        assert!(x.check_dim(2).is_ok());
        assert!(x.check_dim(3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let x = LocalObservable::at_site(1, matrix_unit(4, 0, 0));
        let text = serde_json::to_string(&x).unwrap();
        assert!(text.starts_with("{\"window\":[1,1]"));
        let back: LocalObservable = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<LocalObservable>(&text.replace("[1,1]", "[0,1]")).is_err());
    }

    #[test]
    fn tensor_requires_adjacency() {
        let a = LocalObservable::at_site(1, pauli::z());
        let b = LocalObservable::at_site(3, pauli::z());
        assert!(a.tensor(&b).is_err());
        let c = a.tensor(&b.shifted_to(2).unwrap()).unwrap();
        assert_eq!(c.width(), 2);
    }
}
