//! Sparse spectral representation of periodic fields on `[0, 2pi]`.
//!
//! A field is stored as its nonzero Fourier coefficients,
//! `u(x) = sum_n uhat(n) e^{inx}`, with no `1/2pi` in the synthesis sum.
//! Under this convention `||u||_{L^2[0,2pi]}^2 = 2pi * sum |uhat(n)|^2`.
//!
//! Products are exact convolutions (bandlimits add), so cubic expressions
//! never alias. The linear propagator multiplies mode `n` by `e^{iP(n)t}`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dispersion::dispersion;
use crate::error::{CoreError, Result};

const ZERO_DROP: f64 = 0.0;

/// Fourier multiplier applied mode-wise.
#[derive(Debug, Clone)]
pub enum Multiplier {
    /// d/dx: multiply mode n by `i n`.
    Dx,
    /// |d/dx|: multiply mode n by `|n|`.
    AbsDx,
    /// Arbitrary mode -> factor table; every mode present in the field
    /// must have an entry.
    Custom(BTreeMap<i64, Complex64>),
}

/// Finitely supported spatial Fourier series.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpectralField {
    coeffs: BTreeMap<i64, Complex64>,
}

impl SpectralField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_modes(modes: &[(i64, Complex64)]) -> Self {
        let mut f = Self::new();
        for &(n, c) in modes {
            f.add(n, c);
        }
        f
    }

    /// Unit coefficient at a single mode.
    pub fn delta(n: i64) -> Self {
        Self::from_modes(&[(n, Complex64::new(1.0, 0.0))])
    }

    pub fn get(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn set(&mut self, n: i64, c: Complex64) {
        if c.norm_sqr() == ZERO_DROP {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, c);
        }
    }

    pub fn add(&mut self, n: i64, c: Complex64) {
        let v = self.get(n) + c;
        self.set(n, v);
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    pub fn mode_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest |n| carrying a nonzero coefficient; 0 for the zero field.
    pub fn bandlimit(&self) -> i64 {
        self.coeffs.keys().map(|n| n.abs()).max().unwrap_or(0)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::new();
        for (n, c) in self.modes() {
            out.add(n, c * factor);
        }
        out
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, c) in other.modes() {
            out.add(n, c);
        }
        out
    }

    /// sum |uhat(n)|^2.
    pub fn l2_sum(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// Pointwise product, computed as an exact convolution of coefficients.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (n1, c1) in self.modes() {
            for (n2, c2) in other.modes() {
                out.add(n1 + n2, c1 * c2);
            }
        }
        out
    }

    /// Complex conjugate of the field: `uhat*(n) = conj(uhat(-n))`.
    pub fn conjugate(&self) -> Self {
        let mut out = Self::new();
        for (n, c) in self.modes() {
            out.add(-n, c.conj());
        }
        out
    }

    /// Removes the spatial mean (the n = 0 coefficient). Idempotent.
    pub fn project_zero_mean(&self) -> Self {
        let mut out = self.clone();
        out.coeffs.remove(&0);
        out
    }

    /// Applies a Fourier multiplier mode-wise.
    pub fn apply_multiplier(&self, m: &Multiplier) -> Result<Self> {
        let mut out = Self::new();
        for (n, c) in self.modes() {
            let factor = match m {
                Multiplier::Dx => Complex64::new(0.0, n as f64),
                Multiplier::AbsDx => Complex64::new(n.abs() as f64, 0.0),
                Multiplier::Custom(table) => {
                    *table.get(&n).ok_or(CoreError::MissingMode { mode: n })?
                }
            };
            out.add(n, c * factor);
        }
        Ok(out)
    }

    /// Linear flow for time `t`: mode `n` picks up the phase `e^{iP(n)t}`.
    pub fn propagate(&self, t: f64) -> Result<Self> {
        let mut out = Self::new();
        for (n, c) in self.modes() {
            let p = dispersion(n)?;
            out.add(n, c * Complex64::from_polar(1.0, p as f64 * t));
        }
        Ok(out)
    }

    /// Values on the uniform grid `x_k = 2 pi k / m`, `k = 0..m`.
    ///
    /// Exact sampling of the series; `m >= 2*bandlimit + 1` is required so
    /// the samples determine the coefficients.
    pub fn synthesize(&self, m: usize) -> Result<Vec<Complex64>> {
        let required = 2 * self.bandlimit() as usize + 1;
        if m < required {
            return Err(CoreError::GridTooSmall {
                axis: "spatial",
                required,
                got: m,
            });
        }
        let step = 2.0 * std::f64::consts::PI / m as f64;
        let mut values = vec![Complex64::default(); m];
        for (n, c) in self.modes() {
            for (k, v) in values.iter_mut().enumerate() {
                *v += c * Complex64::from_polar(1.0, n as f64 * step * k as f64);
            }
        }
        Ok(values)
    }

    /// Recovers coefficients with |n| <= bandlimit from grid samples.
    ///
    /// Inverse of [`synthesize`](Self::synthesize) when the grid resolves the
    /// band: `m >= 2*bandlimit + 1`.
    pub fn analyze(values: &[Complex64], bandlimit: i64) -> Result<Self> {
        let m = values.len();
        let required = 2 * bandlimit as usize + 1;
        if m < required {
            return Err(CoreError::GridTooSmall {
                axis: "spatial",
                required,
                got: m,
            });
        }
        let step = 2.0 * std::f64::consts::PI / m as f64;
        let mut out = Self::new();
        for n in -bandlimit..=bandlimit {
            let mut acc = Complex64::default();
            for (k, v) in values.iter().enumerate() {
                acc += v * Complex64::from_polar(1.0, -(n as f64) * step * k as f64);
            }
            out.set(n, acc / m as f64);
        }
        Ok(out)
    }

    /// Truncation to |n| <= limit.
    pub fn truncate(&self, limit: i64) -> Self {
        let mut out = Self::new();
        for (n, c) in self.modes() {
            if n.abs() <= limit {
                out.add(n, c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn delta_synthesis_matches_fourth_roots() {
        // Mode n=1 on a 4-point grid walks the unit circle.
        let f = SpectralField::delta(1);
        let v = f.synthesize(4).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let expect = [Complex64::new(1.0, 0.0), i, -Complex64::new(1.0, 0.0), -i];
        for (a, b) in v.iter().zip(expect.iter()) {
            assert!(close(*a, *b, 1e-14));
        }
    }

    #[test]
    fn analyze_round_trip() {
        let f = SpectralField::from_modes(&[
            (-3, Complex64::new(0.5, -1.0)),
            (0, Complex64::new(2.0, 0.25)),
            (2, Complex64::new(-1.5, 0.3)),
        ]);
        let v = f.synthesize(9).unwrap();
        let g = SpectralField::analyze(&v, 3).unwrap();
        for n in -3..=3 {
            assert!(close(f.get(n), g.get(n), 1e-12));
        }
    }

    #[test]
    fn grid_too_small_names_requirement() {
        let f = SpectralField::delta(5);
        match f.synthesize(10) {
            Err(CoreError::GridTooSmall { required, got, .. }) => {
                assert_eq!(required, 11);
                assert_eq!(got, 10);
            }
            other => panic!("expected grid error, got {other:?}"),
        }
    }

    #[test]
    fn conjugate_reflects_modes() {
        let f = SpectralField::from_modes(&[(2, Complex64::new(1.0, 3.0))]);
        let g = f.conjugate();
        assert!(close(g.get(-2), Complex64::new(1.0, -3.0), 0.0));
        assert!(g.get(2).norm() == 0.0);
    }

    #[test]
    fn projection_kills_mean_and_is_idempotent() {
        let f = SpectralField::from_modes(&[
            (0, Complex64::new(4.0, 1.0)),
            (1, Complex64::new(0.0, 2.0)),
        ]);
        let p = f.project_zero_mean();
        assert_eq!(p.get(0), Complex64::default());
        assert_eq!(p, p.project_zero_mean());
    }

    #[test]
    fn custom_multiplier_requires_every_mode() {
        let f = SpectralField::delta(3);
        let mut table = BTreeMap::new();
        table.insert(1, Complex64::new(1.0, 0.0));
        match f.apply_multiplier(&Multiplier::Custom(table)) {
            Err(CoreError::MissingMode { mode }) => assert_eq!(mode, 3),
            other => panic!("expected missing-mode error, got {other:?}"),
        }
    }

    #[test]
    fn propagator_is_a_phase() {
        let f = SpectralField::delta(1);
        let g = f.propagate(0.3).unwrap();
        // P(1) = 7
        assert!(close(
            g.get(1),
            Complex64::from_polar(1.0, 7.0 * 0.3),
            1e-14
        ));
    }
}
