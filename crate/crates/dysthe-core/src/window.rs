//! Smooth time localization.
//!
//! The cutoff is the standard mollifier ratio
//!
//! ```text
//! eta(x) = psi(2 - |x|) / (psi(2 - |x|) + psi(|x| - 1)),   psi(y) = e^{-1/y} (y > 0), else 0,
//! ```
//!
//! which is C-infinity, equal to 1 on `[-1, 1]`, supported in `[-2, 2]`, and
//! valued in `[0, 1]`. A `TimeWindow` with scale `T <= 1` evaluates
//! `eta(t/T)`; since the support `[-2T, 2T]` stays inside one period
//! `(-pi, pi]`, the rescaled cutoff is also a well-defined function on the
//! time circle, and multiplying a space-time field by it is convolution with
//! its temporal Fourier coefficients.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{CoreError, Result};
use crate::spacetime::SpaceTimeField;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
/// Sample count for the coefficient transform; the cutoff is Gevrey-regular,
/// so aliasing at this resolution is far below the truncation floor.
const WINDOW_SAMPLES: usize = 1 << 16;
/// Coefficients below this fraction of the largest one are dropped.
const WINDOW_TRUNCATION: f64 = 1e-13;

fn psi(y: f64) -> f64 {
    if y > 0.0 {
        (-y.recip()).exp()
    } else {
        0.0
    }
}

/// The bump profile: 1 on `[-1, 1]`, 0 outside `(-2, 2)`, smooth throughout.
pub fn bump(x: f64) -> f64 {
    let rise = psi(2.0 - x.abs());
    if rise == 0.0 {
        return 0.0;
    }
    rise / (rise + psi(x.abs() - 1.0))
}

/// A rescaled cutoff `t -> eta(t/T)` with its temporal Fourier coefficients.
#[derive(Debug, Clone)]
pub struct TimeWindow {
    scale: f64,
    coefficients: Vec<(i64, f64)>,
}

impl TimeWindow {
    /// Builds the window and its coefficient table. Requires `0 < T <= 1` so
    /// the support fits inside a single time period.
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(CoreError::InvalidInput(format!(
                "window scale must lie in (0, 1], got {scale}"
            )));
        }
        let coefficients = compute_coefficients(scale);
        Ok(Self {
            scale,
            coefficients,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `eta(t / T)`.
    pub fn eval(&self, t: f64) -> f64 {
        bump(t / self.scale)
    }

    /// Temporal Fourier coefficients `(tau, eta_hat(tau))`, ascending in tau,
    /// truncated at relative magnitude 1e-13. The window is real and even, so
    /// the coefficients are real and symmetric.
    pub fn coefficients(&self) -> &[(i64, f64)] {
        &self.coefficients
    }

    /// Multiplies `f` by the window in time: convolution of the temporal
    /// frequencies with the coefficient table.
    pub fn apply(&self, f: &SpaceTimeField) -> SpaceTimeField {
        let mut out = SpaceTimeField::new();
        for (n, tau, c) in f.modes() {
            for &(d, w) in &self.coefficients {
                out.add(n, tau + d, c * w);
            }
        }
        out
    }
}

fn compute_coefficients(scale: f64) -> Vec<(i64, f64)> {
    let m = WINDOW_SAMPLES;
    let mut samples: Vec<Complex64> = (0..m)
        .map(|j| {
            let mut t = TWO_PI * j as f64 / m as f64;
            if t > std::f64::consts::PI {
                t -= TWO_PI;
            }
            Complex64::new(bump(t / scale), 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut samples);

    let peak = samples.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = peak * WINDOW_TRUNCATION;
    let mut kept: Vec<(i64, f64)> = samples
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > floor)
        .map(|(k, c)| {
            let tau = if k <= m / 2 {
                k as i64
            } else {
                k as i64 - m as i64
            };
            debug_assert!(c.im.abs() <= 1e-9 * peak.max(1.0));
            (tau, c.re / m as f64)
        })
        .collect();
    kept.sort_unstable_by_key(|&(tau, _)| tau);
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_plateau_and_support() {
        for x in [0.0, 0.5, -1.0, 1.0] {
            assert_eq!(bump(x), 1.0);
        }
        for x in [2.0, -2.0, 3.5] {
            assert_eq!(bump(x), 0.0);
        }
        let v = bump(1.5);
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(bump(1.5), bump(-1.5));
        // monotone decay on the shoulder
        assert!(bump(1.2) > bump(1.4));
        assert!(bump(1.6) > bump(1.9));
    }

    #[test]
    fn window_rejects_bad_scales() {
        assert!(TimeWindow::new(0.0).is_err());
        assert!(TimeWindow::new(-0.5).is_err());
        assert!(TimeWindow::new(1.5).is_err());
        assert!(TimeWindow::new(1.0).is_ok());
    }

    #[test]
    fn coefficients_invert_to_plateau_values() {
        for scale in [1.0, 0.5, 0.125] {
            let w = TimeWindow::new(scale).unwrap();
            // Fourier inversion at t = 0 (plateau) and at a support gap.
            let at_zero: f64 = w.coefficients().iter().map(|&(_, c)| c).sum();
            assert!((at_zero - 1.0).abs() < 1e-9, "scale {scale}: sum {at_zero}");
            let t = 3.0; // outside the support [-2T, 2T] for T <= 1
            let at_t: f64 = w
                .coefficients()
                .iter()
                .map(|&(d, c)| c * (d as f64 * t).cos())
                .sum();
            assert!(at_t.abs() < 1e-9, "scale {scale}: gap value {at_t}");
        }
    }

    #[test]
    fn coefficients_are_even_in_tau() {
        let w = TimeWindow::new(0.5).unwrap();
        let coeffs = w.coefficients();
        assert!(!coeffs.is_empty());
        for &(d, c) in coeffs {
            let mirrored = coeffs
                .iter()
                .find(|&&(e, _)| e == -d)
                .map(|&(_, v)| v)
                .expect("mirror coefficient present");
            assert!((c - mirrored).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_shifts_temporal_frequencies() {
        let w = TimeWindow::new(0.5).unwrap();
        let f = SpaceTimeField::delta(2, 16);
        let g = w.apply(&f);
        // every output mode keeps n = 2 and copies one window coefficient
        let zero_coeff = w
            .coefficients()
            .iter()
            .find(|&&(d, _)| d == 0)
            .map(|&(_, v)| v)
            .unwrap();
        assert!((g.get(2, 16).re - zero_coeff).abs() < 1e-12);
        for (n, _, _) in g.modes() {
            assert_eq!(n, 2);
        }
        // windowing a constant-in-time profile preserves the l2 mass of eta
        let mass: f64 = w.coefficients().iter().map(|&(_, c)| c * c).sum();
        assert!((g.l2_sum() - mass).abs() < 1e-10);
    }
}
