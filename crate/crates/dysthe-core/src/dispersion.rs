//! The dispersion relation of the linearized flow.
//!
//! Each spatial mode `n` oscillates at the integer frequency
//!
//! ```text
//! P(n) = n^3 - 2 n^2 + 8 n
//! ```
//!
//! under the linear propagator, so the characteristic curve in space-time
//! frequency coordinates is `tau = P(n)`. `P` is strictly increasing on the
//! integers (its derivative `3n^2 - 4n + 8` has negative discriminant), so
//! distinct modes never share a frequency.
//!
//! All arithmetic runs in `i128` and reports overflow instead of wrapping.

use crate::error::{CoreError, Result};

/// P(n) = n^3 - 2n^2 + 8n in exact integer arithmetic.
pub fn dispersion(n: i64) -> Result<i64> {
    let v = dispersion_i128(n as i128)?;
    i64::try_from(v).map_err(|_| CoreError::Overflow {
        context: format!("dispersion({n}) does not fit in i64"),
    })
}

/// P(n) over i128, for the resonance counters that combine several values.
pub fn dispersion_i128(n: i128) -> Result<i128> {
    let sq = n.checked_mul(n).ok_or_else(|| overflow(n))?;
    let cube = sq.checked_mul(n).ok_or_else(|| overflow(n))?;
    cube.checked_sub(2 * sq)
        .and_then(|v| v.checked_add(8 * n))
        .ok_or_else(|| overflow(n))
}

fn overflow(n: i128) -> CoreError {
    CoreError::Overflow {
        context: format!("dispersion({n})"),
    }
}

/// Gap identity for two-mode interactions:
/// `P(n1+n2) - P(n1) - P(n2) = n1 n2 (3(n1+n2) - 4)`.
///
/// Both sides are evaluated independently and must agree exactly; the common
/// value is returned.
pub fn resonance_identity(n1: i64, n2: i64) -> Result<i128> {
    let (a, b) = (n1 as i128, n2 as i128);
    let lhs = dispersion_i128(a + b)? - dispersion_i128(a)? - dispersion_i128(b)?;
    let rhs = a
        .checked_mul(b)
        .and_then(|v| v.checked_mul(3 * (a + b) - 4))
        .ok_or_else(|| CoreError::Overflow {
            context: format!("resonance_identity({n1}, {n2})"),
        })?;
    assert_eq!(lhs, rhs, "dispersion gap identity must hold exactly");
    Ok(lhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(dispersion(0).unwrap(), 0);
        assert_eq!(dispersion(1).unwrap(), 7);
        assert_eq!(dispersion(-2).unwrap(), -32);
        assert_eq!(dispersion(2).unwrap(), 16);
        assert_eq!(dispersion(16).unwrap(), 3712);
    }

    #[test]
    fn strictly_increasing_locally() {
        for n in -100..100 {
            assert!(dispersion(n).unwrap() < dispersion(n + 1).unwrap());
        }
    }

    #[test]
    fn gap_identity_examples() {
        assert_eq!(resonance_identity(1, -1).unwrap(), 4);
        assert_eq!(resonance_identity(2, 3).unwrap(), 66);
        assert_eq!(resonance_identity(0, 5).unwrap(), 0);
    }

    #[test]
    fn overflow_reported() {
        assert!(dispersion(i64::MAX).is_err());
        // 2e6 cubed is ~8e18, still within i64.
        assert!(dispersion(2_000_000).is_ok());
        assert!(dispersion(3_000_000).is_err());
    }
}
