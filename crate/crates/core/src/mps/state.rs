use crate::linalg::{self, ComplexMatrix, C64};
use crate::{tolerance, Error, Result};

use super::MpsChain;

/// Size limits that keep brute-force evaluation from blowing up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest `d^n` for which a state vector is built.
    pub amplitudes: usize,
    /// Largest `d^(2N)` for an observable on `N` sites.
    pub observable_entries: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            amplitudes: 1 << 16,
            observable_entries: 1 << 16,
        }
    }
}

impl Caps {
    pub fn uniform(cap: usize) -> Self {
        Caps {
            amplitudes: cap,
            observable_entries: cap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub caps: Caps,
    /// Agreement and consistency tolerance.
    pub tol: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            caps: Caps::default(),
            tol: tolerance::default_tol(),
        }
    }
}

/// `d^n`, saturating instead of overflowing.
pub(crate) fn power(d: usize, n: usize) -> usize {
    (d as u128)
        .checked_pow(n as u32)
        .map_or(usize::MAX, |v| v.min(usize::MAX as u128) as usize)
}

pub(crate) fn check_cap(what: &'static str, required: usize, cap: usize) -> Result<()> {
    if required > cap {
        return Err(Error::CapExceeded { what, required, cap });
    }
    Ok(())
}

/// Every product `A_{i_first}^{[first]} ... A_{i_last}^{[last]}`, indexed by
/// the multi-index with `i_first` slowest.
pub(crate) fn site_products(chain: &MpsChain, first: usize, last: usize) -> Result<Vec<ComplexMatrix>> {
    let mut products = vec![linalg::identity(chain.bond_dim())];
    for k in first..=last {
        let ops = chain.site(k)?.operators();
        products = products
            .iter()
            .flat_map(|p| ops.iter().map(move |a| p * a))
            .collect();
    }
    Ok(products)
}

/// Unnormalized amplitudes `Tr(A_{i_1} ... A_{i_n})` of the `n`-site state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    d: usize,
    sites: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Amplitude at a 0-based multi-index.
    pub fn amplitude(&self, indices: &[usize]) -> Result<C64> {
        if indices.len() != self.sites || indices.iter().any(|&i| i >= self.d) {
            return Err(Error::InvalidChain(format!(
                "multi-index {indices:?} does not address a {}-site state with d = {}",
                self.sites, self.d
            )));
        }
        let flat = indices.iter().fold(0, |acc, &i| acc * self.d + i);
        Ok(self.amplitudes[flat])
    }

    /// `<psi|psi>`
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<psi| I_{[1,first)} ⊗ X ⊗ I |psi>` for `x` on sites `first..first+w-1`
    /// given as a `d^w x d^w` matrix.
    pub(crate) fn sandwich(&self, first: usize, w: usize, x: &ComplexMatrix) -> C64 {
        let block = x.nrows();
        let after = power(self.d, self.sites + 1 - first - w);
        let before = power(self.d, first - 1);
        let mut total = C64::new(0.0, 0.0);
        for pre in 0..before {
            for post in 0..after {
                let at = |mid: usize| self.amplitudes[(pre * block + mid) * after + post];
                for a in 0..block {
                    let left = at(a).conj();
                    if left == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for b in 0..block {
                        total += left * x[(a, b)] * at(b);
                    }
                }
            }
        }
        total
    }
}

pub fn state_vector(chain: &MpsChain, n: usize, caps: &Caps) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::InvalidChain("a state needs at least one site".into()));
    }
    check_cap("state amplitudes", power(chain.d(), n), caps.amplitudes)?;
    let amplitudes = site_products(chain, 1, n)?
        .iter()
        .map(|p| p.trace())
        .collect();
    Ok(StateVector {
        d: chain.d(),
        sites: n,
        amplitudes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Convention, KrausFamily};
    use crate::linalg::{diag, identity};

    fn ghz() -> MpsChain {
        MpsChain::translation_invariant(
            KrausFamily::new(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])], Convention::Heisenberg).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn ghz_amplitudes() {
        let psi = state_vector(&ghz(), 3, &Caps::default()).unwrap();
        for (k, a) in psi.amplitudes().iter().enumerate() {
            let expected = if k == 0 || k == 7 { 1.0 } else { 0.0 };
            assert_eq!(*a, C64::new(expected, 0.0), "index {k}");
        }
        assert_eq!(psi.amplitude(&[1, 1, 1]).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(psi.amplitude(&[1, 0, 1]).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn identity_family_amplitudes_equal_bond_dim() {
        let chain = MpsChain::translation_invariant(
            KrausFamily::new(vec![identity(3)], Convention::Heisenberg).unwrap(),
        )
        .unwrap();
        let psi = state_vector(&chain, 4, &Caps::default()).unwrap();
        assert_eq!(psi.amplitudes(), &[C64::new(3.0, 0.0)]);
    }

    #[test]
    fn cap_is_enforced() {
        let err = state_vector(&ghz(), 17, &Caps::default()).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { required: 131072, .. }));
        assert!(state_vector(&ghz(), 4, &Caps::uniform(8)).is_err());
    }
}
