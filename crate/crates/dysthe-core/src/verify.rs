//! Empirical checks of the space-time estimates: the exact sixth-power
//! identity for evolved data, Strichartz-type ratio sweeps, the dyadic
//! bilinear bound, the bilinear product estimates in the weighted spaces,
//! and the time-localized trilinear estimate.
//!
//! The asymptotic statements come with unspecified constants, so each check
//! reports ratios `lhs / rhs` and their trend across a size sweep; the exact
//! identity is checked to roundoff. Every sweep derives per-trial seeds from
//! the master seed by counter, so reports are reproducible bit-for-bit
//! regardless of thread count.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::dispersion;
use crate::error::{CoreError, Result};
use crate::field::SpectralField;
use crate::norms::{dyadic_piece, lp_norm, sobolev_norm, xsb_norm, zsb_norm, NeumaierSum};
use crate::random::{
    dyadic_test_field, spacetime_field, spatial_field, trial_seed, RandomFieldSpec,
};
use crate::spacetime::SpaceTimeField;
use crate::window::TimeWindow;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Outcome of a ratio sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub estimate_id: String,
    /// Non-degenerate samples contributing to the statistics.
    pub samples: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    /// `(size parameter, max ratio at that size)` per sweep entry.
    pub trend: Vec<(f64, f64)>,
    pub seed: u64,
}

fn build_report(
    estimate_id: &str,
    seed: u64,
    per_size: Vec<(f64, Vec<f64>)>,
) -> Result<RatioReport> {
    let mut trend = Vec::with_capacity(per_size.len());
    let mut acc = NeumaierSum::default();
    let mut max_ratio = 0.0f64;
    let mut samples = 0usize;
    for (size, ratios) in per_size {
        if ratios.is_empty() {
            return Err(CoreError::InvalidInput(format!(
                "{estimate_id}: every sample at size {size} was degenerate"
            )));
        }
        let local = ratios.iter().copied().fold(0.0f64, f64::max);
        trend.push((size, local));
        max_ratio = max_ratio.max(local);
        samples += ratios.len();
        for r in ratios {
            acc.add(r);
        }
    }
    if samples == 0 {
        return Err(CoreError::InvalidInput(format!(
            "{estimate_id}: no samples"
        )));
    }
    Ok(RatioReport {
        estimate_id: estimate_id.to_string(),
        samples,
        max_ratio,
        mean_ratio: acc.value() / samples as f64,
        trend,
        seed,
    })
}

/// Runs `trials` independent samples at each size; `make` returns `None` to
/// skip a degenerate sample. Trials run in parallel with counter-derived
/// seeds, so the outcome is schedule-independent.
fn sweep_report<F>(
    estimate_id: &str,
    seed: u64,
    trials: usize,
    sizes: &[i64],
    make: F,
) -> Result<RatioReport>
where
    F: Fn(i64, u64) -> Result<Option<f64>> + Sync,
{
    if trials == 0 {
        return Err(CoreError::InvalidInput("trials must be positive".into()));
    }
    let mut per_size = Vec::with_capacity(sizes.len());
    for (si, &size) in sizes.iter().enumerate() {
        let ratios: Vec<Option<f64>> = (0..trials)
            .into_par_iter()
            .map(|tr| make(size, trial_seed(seed, (si * trials + tr) as u64)))
            .collect::<Result<_>>()?;
        per_size.push((size as f64, ratios.into_iter().flatten().collect()));
    }
    build_report(estimate_id, seed, per_size)
}

/// Both sides of the sixth-power identity for evolved data, with their
/// relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L6Report {
    /// Function-side value of `||u||_{L^6}^6`: spatial grid quadrature with
    /// the time integral carried out exactly in coefficient space.
    pub lhs: f64,
    /// Fourier-side value: squared moduli of the triple-product sums,
    /// bucketed by total mode and total frequency.
    pub rhs: f64,
    pub relerr: f64,
}

/// Checks the identity on `u0` truncated to `|n| <= bandlimit`.
pub fn l6_plancherel_check(u0: &SpectralField, bandlimit: i64) -> Result<L6Report> {
    let u = u0.truncate(bandlimit);
    if u.is_empty() {
        return Ok(L6Report {
            lhs: 0.0,
            rhs: 0.0,
            relerr: 0.0,
        });
    }
    let modes: Vec<(i64, Complex64)> = u.modes().collect();
    let freqs: Vec<i64> = modes
        .iter()
        .map(|&(n, _)| dispersion(n))
        .collect::<Result<_>>()?;
    let k = modes.len();

    // Fourier side: bucket triple products by (total mode, total frequency).
    let mut buckets: BTreeMap<(i64, i64), Complex64> = BTreeMap::new();
    // Function side reuses the triples grouped by total frequency alone.
    let mut by_freq: BTreeMap<i64, Vec<(usize, usize, usize)>> = BTreeMap::new();
    for i1 in 0..k {
        for i2 in 0..k {
            for i3 in 0..k {
                let n = modes[i1].0 + modes[i2].0 + modes[i3].0;
                let j = freqs[i1] + freqs[i2] + freqs[i3];
                *buckets.entry((n, j)).or_default() += modes[i1].1 * modes[i2].1 * modes[i3].1;
                by_freq.entry(j).or_default().push((i1, i2, i3));
            }
        }
    }
    let mut rhs_acc = NeumaierSum::default();
    for v in buckets.values() {
        rhs_acc.add(v.norm_sqr());
    }
    let rhs = TWO_PI * TWO_PI * rhs_acc.value();

    // Function side: the evolved cube at fixed x is a trigonometric
    // polynomial in t, so its time integral is the squared-coefficient sum;
    // the x integral is exact equal-weight quadrature on 6*bandlimit + 1
    // points.
    let mx = 6 * u.bandlimit() as usize + 1;
    let step = TWO_PI / mx as f64;
    let mut lhs_acc = NeumaierSum::default();
    let mut weighted = vec![Complex64::default(); k];
    for gx in 0..mx {
        let x = step * gx as f64;
        for (slot, &(n, c)) in weighted.iter_mut().zip(modes.iter()) {
            *slot = c * Complex64::from_polar(1.0, n as f64 * x);
        }
        let mut t_integral = NeumaierSum::default();
        for triples in by_freq.values() {
            let mut coeff = Complex64::default();
            for &(i1, i2, i3) in triples {
                coeff += weighted[i1] * weighted[i2] * weighted[i3];
            }
            t_integral.add(coeff.norm_sqr());
        }
        lhs_acc.add(t_integral.value());
    }
    let lhs = step * TWO_PI * lhs_acc.value();

    Ok(L6Report {
        lhs,
        rhs,
        relerr: (lhs - rhs).abs() / rhs,
    })
}

fn evolved_lp(u0: &SpectralField, p: u32) -> Result<f64> {
    lp_norm(&SpaceTimeField::on_curve(u0)?, p, None)
}

/// Ratio sweep `||evolved u||_{L^6} / ||u0||_{H^eps}` over bandlimits.
pub fn strichartz_l6_report(
    spec: &RandomFieldSpec,
    eps: f64,
    trials: usize,
    bandlimits: &[i64],
) -> Result<RatioReport> {
    if eps <= 0.0 {
        return Err(CoreError::InvalidInput(format!(
            "regularity margin must be positive, got {eps}"
        )));
    }
    sweep_report(
        "strichartz-l6",
        spec.seed,
        trials,
        bandlimits,
        |nl, seed| {
            let u0 = spatial_field(&RandomFieldSpec {
                bandlimit: nl,
                seed,
                ..*spec
            });
            let denom = sobolev_norm(&u0, eps);
            if denom == 0.0 {
                return Ok(None);
            }
            Ok(Some(evolved_lp(&u0, 6)? / denom))
        },
    )
}

/// Ratio sweep `||evolved u||_{L^r} / ||u0||_{H^{1/4 - 3/(2r) + eps}}`.
pub fn lr_strichartz_report(
    spec: &RandomFieldSpec,
    r: u32,
    eps: f64,
    trials: usize,
    bandlimits: &[i64],
) -> Result<RatioReport> {
    if r < 6 || r % 2 != 0 {
        return Err(CoreError::InvalidInput(format!(
            "exponent must be even and at least 6, got {r}"
        )));
    }
    if eps <= 0.0 {
        return Err(CoreError::InvalidInput(format!(
            "regularity margin must be positive, got {eps}"
        )));
    }
    let s = 0.25 - 1.5 / r as f64 + eps;
    let id = format!("strichartz-l{r}");
    sweep_report(&id, spec.seed, trials, bandlimits, |nl, seed| {
        let u0 = spatial_field(&RandomFieldSpec {
            bandlimit: nl,
            seed,
            ..*spec
        });
        let denom = sobolev_norm(&u0, s);
        if denom == 0.0 {
            return Ok(None);
        }
        Ok(Some(evolved_lp(&u0, r)? / denom))
    })
}

/// Ratio sweep `||f||_{L^4} / ||f||_{X^{0,1/3}}` over bandlimits at the
/// spec's modulation spread.
pub fn l4_ratio_report(
    spec: &RandomFieldSpec,
    trials: usize,
    bandlimits: &[i64],
) -> Result<RatioReport> {
    sweep_report("l4-x013", spec.seed, trials, bandlimits, |nl, seed| {
        let f = spacetime_field(&RandomFieldSpec {
            bandlimit: nl,
            seed,
            ..*spec
        })?;
        l4_sample(&f)
    })
}

/// Same ratio swept over modulation spreads at a fixed bandlimit.
pub fn l4_spread_report(
    spec: &RandomFieldSpec,
    trials: usize,
    spreads: &[i64],
) -> Result<RatioReport> {
    sweep_report("l4-x013-spread", spec.seed, trials, spreads, |sp, seed| {
        let f = spacetime_field(&RandomFieldSpec {
            spread: sp,
            seed,
            ..*spec
        })?;
        l4_sample(&f)
    })
}

fn l4_sample(f: &SpaceTimeField) -> Result<Option<f64>> {
    let denom = xsb_norm(f, 0.0, 1.0 / 3.0)?;
    if denom == 0.0 {
        return Ok(None);
    }
    Ok(Some(lp_norm(f, 4, None)? / denom))
}

/// One dyadic bilinear sample: `lhs = ||f_j f_{j+k}||_{L^2}` against the
/// bound `2^{2j/3 + k/6} ||f_j||_{L^2} ||f_{j+k}||_{L^2}`. `None` when either
/// shell is empty.
pub fn dyadic_bilinear_check(
    f: &SpaceTimeField,
    j: u32,
    k: u32,
) -> Result<Option<(f64, f64, f64)>> {
    let fj = dyadic_piece(f, j)?;
    let fk = dyadic_piece(f, j + k)?;
    if fj.is_empty() || fk.is_empty() {
        return Ok(None);
    }
    let lhs = lp_norm(&fj.multiply(&fk), 2, None)?;
    let bound = 2f64.powf(2.0 * j as f64 / 3.0 + k as f64 / 6.0)
        * lp_norm(&fj, 2, None)?
        * lp_norm(&fk, 2, None)?;
    Ok(Some((lhs, bound, lhs / bound)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicRow {
    pub field_index: usize,
    pub j: u32,
    pub k: u32,
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicSweep {
    pub rows: Vec<DyadicRow>,
    pub max_ratio: f64,
    /// Max ratio aggregated over fields and `j` for each shell gap `k`.
    pub per_gap_max: Vec<(u32, f64)>,
    pub seed: u64,
}

/// Sweeps `(j, k)` in `{0..=j_max} x {0..=k_max}` over seeded shell-populated
/// fields.
pub fn dyadic_bilinear_sweep(
    n_fields: usize,
    j_max: u32,
    k_max: u32,
    bandlimit: i64,
    per_level: usize,
    seed: u64,
) -> Result<DyadicSweep> {
    let mut rows = Vec::new();
    for idx in 0..n_fields {
        let f = dyadic_test_field(
            bandlimit,
            j_max + k_max,
            per_level,
            trial_seed(seed, idx as u64),
        )?;
        for j in 0..=j_max {
            for k in 0..=k_max {
                if let Some((lhs, bound, ratio)) = dyadic_bilinear_check(&f, j, k)? {
                    rows.push(DyadicRow {
                        field_index: idx,
                        j,
                        k,
                        lhs,
                        bound,
                        ratio,
                    });
                }
            }
        }
    }
    if rows.is_empty() {
        return Err(CoreError::InvalidInput(
            "dyadic sweep produced no populated shell pairs".into(),
        ));
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0f64, f64::max);
    let per_gap_max = (0..=k_max)
        .map(|k| {
            let m = rows
                .iter()
                .filter(|r| r.k == k)
                .map(|r| r.ratio)
                .fold(0.0f64, f64::max);
            (k, m)
        })
        .collect();
    Ok(DyadicSweep {
        rows,
        max_ratio,
        per_gap_max,
        seed,
    })
}

/// Right-hand-side combination used by a bilinear product check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BilinearVariant {
    /// Zero-mean factors, product measured in `Z^{s,-1/2}`; two-term bound.
    Projected,
    /// Plain factors, product in `Z^{s,-1/2}`; two extra `X^{s,0}` terms
    /// cover the mean modes.
    Unprojected,
    /// Product in `X^{s,0}` against `X^{s,1/3}` of each factor (`s >= 0`).
    ProductX,
    /// Product in `Z^{s-1,1/2}` against `Z^{s,1/2}` of each factor.
    ProductZ,
}

impl BilinearVariant {
    pub fn id(self) -> &'static str {
        match self {
            BilinearVariant::Projected => "bilinear-projected",
            BilinearVariant::Unprojected => "bilinear-unprojected",
            BilinearVariant::ProductX => "bilinear-x0",
            BilinearVariant::ProductZ => "bilinear-z-high",
        }
    }

    fn min_s(self) -> f64 {
        match self {
            BilinearVariant::ProductX => 0.0,
            _ => 0.5,
        }
    }
}

/// One bilinear sample `(lhs, rhs, ratio)`; `None` when the bound side
/// vanishes.
pub fn bilinear_z_check(
    u1: &SpaceTimeField,
    u2: &SpaceTimeField,
    s: f64,
    variant: BilinearVariant,
) -> Result<Option<(f64, f64, f64)>> {
    if s < variant.min_s() {
        return Err(CoreError::InvalidInput(format!(
            "{} needs s >= {}, got {s}",
            variant.id(),
            variant.min_s()
        )));
    }
    let third = 1.0 / 3.0;
    let (lhs, rhs) = match variant {
        BilinearVariant::Projected => {
            let product = u1.project_zero_mean().multiply(&u2.project_zero_mean());
            let lhs = zsb_norm(&product, s, -0.5)?;
            let rhs = zsb_norm(u1, s - 1.0, 0.5)? * zsb_norm(u2, s - 1.0, third)?
                + zsb_norm(u1, s - 1.0, third)? * zsb_norm(u2, s - 1.0, 0.5)?;
            (lhs, rhs)
        }
        BilinearVariant::Unprojected => {
            let lhs = zsb_norm(&u1.multiply(u2), s, -0.5)?;
            let rhs = zsb_norm(u1, s - 1.0, 0.5)? * zsb_norm(u2, s - 1.0, third)?
                + zsb_norm(u1, s - 1.0, third)? * zsb_norm(u2, s - 1.0, 0.5)?
                + zsb_norm(u1, s - 1.0, 0.5)? * xsb_norm(u2, s, 0.0)?
                + xsb_norm(u1, s, 0.0)? * zsb_norm(u2, s - 1.0, 0.5)?;
            (lhs, rhs)
        }
        BilinearVariant::ProductX => {
            let lhs = xsb_norm(&u1.multiply(u2), s, 0.0)?;
            let rhs = xsb_norm(u1, s, third)? * xsb_norm(u2, s, third)?;
            (lhs, rhs)
        }
        BilinearVariant::ProductZ => {
            let lhs = zsb_norm(&u1.multiply(u2), s - 1.0, 0.5)?;
            let rhs = zsb_norm(u1, s, 0.5)? * zsb_norm(u2, s, 0.5)?;
            (lhs, rhs)
        }
    };
    if rhs == 0.0 {
        return Ok(None);
    }
    Ok(Some((lhs, rhs, lhs / rhs)))
}

/// Ratio sweep of a bilinear variant over bandlimits, with independent
/// random factor pairs.
pub fn bilinear_z_report(
    spec: &RandomFieldSpec,
    s: f64,
    variant: BilinearVariant,
    trials: usize,
    bandlimits: &[i64],
) -> Result<RatioReport> {
    sweep_report(variant.id(), spec.seed, trials, bandlimits, |nl, seed| {
        let u1 = spacetime_field(&RandomFieldSpec {
            bandlimit: nl,
            seed: trial_seed(seed, 1),
            ..*spec
        })?;
        let u2 = spacetime_field(&RandomFieldSpec {
            bandlimit: nl,
            seed: trial_seed(seed, 2),
            ..*spec
        })?;
        Ok(bilinear_z_check(&u1, &u2, s, variant)?.map(|(_, _, r)| r))
    })
}

/// One trilinear sample: the time-localized cubic product measured in the
/// weighted spaces against `T^{1/6} ||u||^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrilinearRatios {
    /// `X^{s,-1/2}` size of the localized cubic product.
    pub lhs_x: f64,
    /// Full combined-space size (`X^{s,-1/2}` plus `Y^{s,-1}`).
    pub lhs_z: f64,
    /// `T^{1/6} ||u||_{Z^{s,1/2}}^3`.
    pub rhs: f64,
    pub x_ratio: f64,
    pub z_ratio: f64,
}

/// `None` when `u` vanishes.
pub fn trilinear_check(
    u: &SpaceTimeField,
    s: f64,
    window: &TimeWindow,
) -> Result<Option<TrilinearRatios>> {
    let rhs = window.scale().powf(1.0 / 6.0) * zsb_norm(u, s, 0.5)?.powi(3);
    if rhs == 0.0 {
        return Ok(None);
    }
    let localized = window.apply(&u.multiply(u).multiply(&u.conjugate()));
    let lhs_x = xsb_norm(&localized, s, -0.5)?;
    let lhs_z = zsb_norm(&localized, s, -0.5)?;
    Ok(Some(TrilinearRatios {
        lhs_x,
        lhs_z,
        rhs,
        x_ratio: lhs_x / rhs,
        z_ratio: lhs_z / rhs,
    }))
}

/// Sweeps the window scale on fields held fixed across scales; the trend
/// records the max combined-space ratio per scale.
pub fn trilinear_report(
    spec: &RandomFieldSpec,
    s: f64,
    scales: &[f64],
    trials: usize,
) -> Result<RatioReport> {
    if trials == 0 {
        return Err(CoreError::InvalidInput("trials must be positive".into()));
    }
    let fields: Vec<SpaceTimeField> = (0..trials)
        .map(|tr| {
            spacetime_field(&RandomFieldSpec {
                seed: trial_seed(spec.seed, tr as u64),
                ..*spec
            })
        })
        .collect::<Result<_>>()?;
    let mut per_size = Vec::with_capacity(scales.len());
    for &scale in scales {
        let window = TimeWindow::new(scale)?;
        let ratios: Vec<Option<f64>> = fields
            .par_iter()
            .map(|f| Ok(trilinear_check(f, s, &window)?.map(|r| r.z_ratio)))
            .collect::<Result<_>>()?;
        per_size.push((scale, ratios.into_iter().flatten().collect()));
    }
    build_report("trilinear-z", spec.seed, per_size)
}
