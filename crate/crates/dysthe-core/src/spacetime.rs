//! Space-time Fourier series on the torus `[0,2pi]_x x [0,2pi]_t`.
//!
//! `f(x,t) = sum_{n,tau} fhat(n,tau) e^{i(nx + tau t)}` with integer temporal
//! frequencies throughout (the setting is time-periodic; there are no
//! continuous-tau integrals anywhere).
//!
//! The distance of a frequency pair from the characteristic curve
//! `tau = P(n)` is measured by the modulation weight
//! `sigma(n,tau) = <tau - P(n)>`, `<x> = sqrt(1+x^2)`, so `sigma >= 1` and
//! `sigma = 1` exactly on the curve.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dispersion::dispersion;
use crate::error::Result;
use crate::field::SpectralField;

/// `<x> = (1 + x^2)^{1/2}`.
pub fn japanese_bracket(x: f64) -> f64 {
    x.hypot(1.0)
}

/// Modulation weight `sigma(n, tau) = <tau - P(n)>`.
pub fn modulation_weight(n: i64, tau: i64) -> Result<f64> {
    let p = dispersion(n)?;
    Ok(japanese_bracket((tau - p) as f64))
}

/// Finitely supported space-time Fourier series.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpaceTimeField {
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

impl SpaceTimeField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_modes(modes: &[(i64, i64, Complex64)]) -> Self {
        let mut f = Self::new();
        for &(n, tau, c) in modes {
            f.add(n, tau, c);
        }
        f
    }

    /// Unit coefficient at a single space-time frequency.
    pub fn delta(n: i64, tau: i64) -> Self {
        Self::from_modes(&[(n, tau, Complex64::new(1.0, 0.0))])
    }

    /// Embeds a spatial field on the characteristic curve: the coefficient of
    /// mode `n` is placed at `tau = P(n)`. This is the space-time transform of
    /// the freely evolved solution `e^{itL} u0`.
    pub fn on_curve(u0: &SpectralField) -> Result<Self> {
        let mut f = Self::new();
        for (n, c) in u0.modes() {
            f.add(n, dispersion(n)?, c);
        }
        Ok(f)
    }

    pub fn get(&self, n: i64, tau: i64) -> Complex64 {
        self.coeffs.get(&(n, tau)).copied().unwrap_or_default()
    }

    pub fn add(&mut self, n: i64, tau: i64, c: Complex64) {
        let entry = self.coeffs.entry((n, tau)).or_default();
        *entry += c;
        if entry.norm_sqr() == 0.0 {
            self.coeffs.remove(&(n, tau));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&(n, tau), &c)| (n, tau, c))
    }

    pub fn mode_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest |n| present; 0 for the zero field.
    pub fn space_bandlimit(&self) -> i64 {
        self.coeffs.keys().map(|(n, _)| n.abs()).max().unwrap_or(0)
    }

    /// Largest |tau| present; 0 for the zero field.
    pub fn tau_bound(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|(_, tau)| tau.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self::new();
        for (n, tau, c) in self.modes() {
            out.add(n, tau, c * factor);
        }
        out
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, tau, c) in other.modes() {
            out.add(n, tau, c);
        }
        out
    }

    /// sum |fhat|^2.
    pub fn l2_sum(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// Pointwise product via exact 2-d convolution.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (n1, t1, c1) in self.modes() {
            for (n2, t2, c2) in other.modes() {
                out.add(n1 + n2, t1 + t2, c1 * c2);
            }
        }
        out
    }

    /// Complex conjugate: coefficient at `(n,tau)` becomes
    /// `conj(fhat(-n,-tau))`.
    pub fn conjugate(&self) -> Self {
        let mut out = Self::new();
        for (n, tau, c) in self.modes() {
            out.add(-n, -tau, c.conj());
        }
        out
    }

    /// Removes every coefficient with spatial mode n = 0 (the mean-zero
    /// projection applied slice-wise in time).
    pub fn project_zero_mean(&self) -> Self {
        let mut out = Self::new();
        for (n, tau, c) in self.modes() {
            if n != 0 {
                out.add(n, tau, c);
            }
        }
        out
    }

    /// The spatial field at a fixed time: `uhat(n) = sum_tau fhat(n,tau) e^{i tau t}`.
    pub fn time_slice(&self, t: f64) -> SpectralField {
        let mut out = SpectralField::new();
        for (n, tau, c) in self.modes() {
            out.add(n, c * Complex64::from_polar(1.0, tau as f64 * t));
        }
        out
    }
}
