//! Process-wide default tolerance.
//!
//! Functions that take an explicit tolerance never read this value; it only
//! seeds `Default` impls and the CLI when `--tol`/`MPSH_TOL` are absent.

use std::sync::atomic::{AtomicU64, Ordering};

/// Absolute tolerance for equality and PSD checks when none is given.
pub const DEFAULT_TOL: f64 = 1e-10;

static GLOBAL_TOL: AtomicU64 = AtomicU64::new(0x3DDB_7CDF_D9D7_BDBB); // 1e-10

pub fn default_tol() -> f64 {
    f64::from_bits(GLOBAL_TOL.load(Ordering::Relaxed))
}

/// Overrides the default tolerance. Non-positive or non-finite values are
/// ignored and `false` is returned.
pub fn set_default_tol(tol: f64) -> bool {
    if !(tol.is_finite() && tol > 0.0) {
        return false;
    }
    GLOBAL_TOL.store(tol.to_bits(), Ordering::Relaxed);
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_bits_encode_default() {
        assert_eq!(f64::from_bits(0x3DDB_7CDF_D9D7_BDBB), DEFAULT_TOL);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(!set_default_tol(0.0));
        assert!(!set_default_tol(f64::NAN));
        assert!(!set_default_tol(-1.0));
    }
}
