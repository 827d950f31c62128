//! Sobolev, space-time Lebesgue, and Bourgain-space norms.
//!
//! With `sigma(n,tau) = <tau - P(n)>` the three weighted families are
//!
//! ```text
//! ||f||_{X^{s,b}} = || <n>^s sigma^b fhat ||_{l^2_{n,tau}}
//! ||f||_{Y^{s,b}} = || <n>^s sum_tau sigma^b |fhat| ||_{l^2_n}
//! ||f||_{Z^{s,b}} = ||f||_{X^{s,b}} + ||f||_{Y^{s,b-1/2}}
//! ```
//!
//! (the intersection norm is realized as the sum of its two pieces). The
//! `L^p` norms integrate over the full torus `[0,2pi]^2`; for even `p` the
//! equi-weight grid quadrature is exact as soon as each axis resolves the
//! degree of `|f|^p` as a trigonometric polynomial, i.e. `M >= p*limit + 1`
//! points for a field bandlimited at `limit` on that axis.
//!
//! Accumulations use compensated (Neumaier) summation so parallel callers
//! get run-to-run identical results.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::dispersion::dispersion;
use crate::error::{CoreError, Result};
use crate::field::SpectralField;
use crate::spacetime::{japanese_bracket, SpaceTimeField};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
/// Largest allowed quadrature grid (points per full 2-d grid).
const GRID_CELL_LIMIT: usize = 1 << 27;

/// Compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `(sum_n <n>^{2s} |uhat(n)|^2)^{1/2}`.
pub fn sobolev_norm(u: &SpectralField, s: f64) -> f64 {
    let mut acc = NeumaierSum::default();
    for (n, c) in u.modes() {
        acc.add(japanese_bracket(n as f64).powf(2.0 * s) * c.norm_sqr());
    }
    acc.value().sqrt()
}

fn sigma(n: i64, tau: i64) -> Result<f64> {
    let p = dispersion(n)?;
    Ok(japanese_bracket((tau - p) as f64))
}

/// `l^2_{n,tau}` norm with weights `<n>^s sigma^b`.
pub fn xsb_norm(f: &SpaceTimeField, s: f64, b: f64) -> Result<f64> {
    let mut acc = NeumaierSum::default();
    for (n, tau, c) in f.modes() {
        let w = japanese_bracket(n as f64).powf(s) * sigma(n, tau)?.powf(b);
        acc.add((w * c.norm()).powi(2));
    }
    Ok(acc.value().sqrt())
}

/// `l^1` in tau inside `l^2` in n, with the same weights.
pub fn ysb_norm(f: &SpaceTimeField, s: f64, b: f64) -> Result<f64> {
    use std::collections::BTreeMap;
    let mut per_mode: BTreeMap<i64, NeumaierSum> = BTreeMap::new();
    for (n, tau, c) in f.modes() {
        per_mode
            .entry(n)
            .or_default()
            .add(sigma(n, tau)?.powf(b) * c.norm());
    }
    let mut acc = NeumaierSum::default();
    for (n, inner) in per_mode {
        acc.add((japanese_bracket(n as f64).powf(s) * inner.value()).powi(2));
    }
    Ok(acc.value().sqrt())
}

/// Intersection-space norm: `X^{s,b} + Y^{s,b-1/2}`.
pub fn zsb_norm(f: &SpaceTimeField, s: f64, b: f64) -> Result<f64> {
    Ok(xsb_norm(f, s, b)? + ysb_norm(f, s, b - 0.5)?)
}

/// Restriction of `f` to the dyadic modulation shell
/// `2^{j-1} < sigma <= 2^j` (shell 0 is `sigma <= 1`, i.e. the curve).
pub fn dyadic_piece(f: &SpaceTimeField, j: u32) -> Result<SpaceTimeField> {
    let lo = if j == 0 { 0.0 } else { 2f64.powi(j as i32 - 1) };
    let hi = 2f64.powi(j as i32);
    let mut out = SpaceTimeField::new();
    for (n, tau, c) in f.modes() {
        let s = sigma(n, tau)?;
        if s > lo && s <= hi {
            out.add(n, tau, c);
        }
    }
    Ok(out)
}

/// The dyadic shells present in `f`, ascending.
pub fn dyadic_levels(f: &SpaceTimeField) -> Result<Vec<u32>> {
    use std::collections::BTreeSet;
    let mut levels = BTreeSet::new();
    for (n, tau, _) in f.modes() {
        let s = sigma(n, tau)?;
        // shell index: smallest j with sigma <= 2^j
        let j = if s <= 1.0 { 0 } else { s.log2().ceil() as u32 };
        levels.insert(j);
    }
    Ok(levels.into_iter().collect())
}

/// `(integral |f|^p over the torus)^{1/p}` for even `p`, by exact-degree
/// equi-weight quadrature.
///
/// Pass `grid = Some((mx, mt))` to force sizes (rejected when too small for
/// exactness); `None` auto-sizes to the minimum `p*limit + 1` per axis.
pub fn lp_norm(f: &SpaceTimeField, p: u32, grid: Option<(usize, usize)>) -> Result<f64> {
    if p < 2 || p % 2 != 0 {
        return Err(CoreError::InvalidInput(format!(
            "lp_norm needs even p >= 2, got {p}"
        )));
    }
    if f.is_empty() {
        return Ok(0.0);
    }
    if p == 2 {
        // Parseval: ||f||_{L^2}^2 = 4 pi^2 sum |fhat|^2.
        let mut acc = NeumaierSum::default();
        for (_, _, c) in f.modes() {
            acc.add(c.norm_sqr());
        }
        return Ok(TWO_PI * acc.value().sqrt());
    }

    let required_x = p as usize * f.space_bandlimit() as usize + 1;
    let required_t = p as usize * f.tau_bound() as usize + 1;
    let (mx, mt) = match grid {
        Some((mx, mt)) => {
            if mx < required_x {
                return Err(CoreError::GridTooSmall {
                    axis: "spatial",
                    required: required_x,
                    got: mx,
                });
            }
            if mt < required_t {
                return Err(CoreError::GridTooSmall {
                    axis: "temporal",
                    required: required_t,
                    got: mt,
                });
            }
            (mx, mt)
        }
        None => (required_x, required_t),
    };
    if mx.saturating_mul(mt) > GRID_CELL_LIMIT {
        return Err(CoreError::InvalidInput(format!(
            "quadrature grid {mx} x {mt} exceeds the {GRID_CELL_LIMIT}-cell cap"
        )));
    }

    // Synthesize on the grid by zero-embedding the coefficients and running
    // unnormalized inverse FFTs along each axis.
    let mut data = vec![Complex64::default(); mx * mt];
    for (n, tau, c) in f.modes() {
        let ix = (n.rem_euclid(mx as i64)) as usize;
        let it = (tau.rem_euclid(mt as i64)) as usize;
        data[it * mx + ix] += c;
    }

    let mut planner = FftPlanner::new();
    let fft_x = planner.plan_fft_inverse(mx);
    let fft_t = planner.plan_fft_inverse(mt);

    for row in data.chunks_exact_mut(mx) {
        fft_x.process(row);
    }
    // Columns: transpose, transform, no need to transpose back for |.|^p.
    let mut cols = vec![Complex64::default(); mx * mt];
    for it in 0..mt {
        for ix in 0..mx {
            cols[ix * mt + it] = data[it * mx + ix];
        }
    }
    for col in cols.chunks_exact_mut(mt) {
        fft_t.process(col);
    }

    let half = (p / 2) as i32;
    let mut acc = NeumaierSum::default();
    for v in &cols {
        acc.add(v.norm_sqr().powi(half));
    }
    let mean = acc.value() / (mx * mt) as f64;
    Ok((mean * TWO_PI * TWO_PI).powf(1.0 / p as f64))
}

/// Upper bound for `(sum_{m in Z} <m>^{-1-2 delta})^{1/2}`: partial sum plus
/// an integral tail estimate. This is the constant in the `Y` from `X`
/// embedding obtained by Cauchy-Schwarz in tau.
pub fn embedding_constant_upper(delta: f64) -> f64 {
    assert!(delta > 0.0, "embedding constant needs delta > 0");
    let cutoff = 200_000u64;
    let mut acc = NeumaierSum::default();
    acc.add(1.0); // m = 0
    for m in 1..=cutoff {
        acc.add(2.0 * japanese_bracket(m as f64).powf(-1.0 - 2.0 * delta));
    }
    // <x> >= x, so the tail is below 2 * integral_cutoff^inf x^{-1-2d} dx.
    let tail = (cutoff as f64).powf(-2.0 * delta) / delta;
    (acc.value() + tail).sqrt()
}
