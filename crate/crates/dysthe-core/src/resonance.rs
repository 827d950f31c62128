//! Counting integer solutions of the cubic resonance equation.
//!
//! For a bandlimit `N` and targets `(n, j)`, the count `r` is the number of
//! ordered pairs `(n1, n2)` with `|n1|, |n2| <= N` satisfying
//!
//! ```text
//! P(n1) + P(n2) + P(n - n1 - n2) = j,        P(n) = n^3 - 2n^2 + 8n.
//! ```
//!
//! Two independent routes are implemented. The brute-force route scans the
//! `(2N+1)^2` candidate pairs. The divisor route substitutes
//! `p = n1 + n2`, `q = n1 n2` and uses the exact factorization
//!
//! ```text
//! (3c p + 9 q + c^2)(3 p - 4) = l,   c = 4 - 3n,   l = 9k - 4c^2,   k = P(n) - j,
//! ```
//!
//! so each admissible `(p, q)` comes from a factor pair `(a, b)` of `l` with
//! `b = 3p - 4` (hence `b = 2 mod 3`, never zero). A candidate pair is kept
//! when `q` is integral and `X^2 - pX + q` has integer roots within the
//! bandlimit. Multiplicity is therefore controlled by the divisor count of
//! `l`, which is the mechanism behind the sub-polynomial growth of the
//! largest bucket.
//!
//! All intermediates are `i128`; `l` fits comfortably for any query whose
//! dispersion values fit (`|l| <= 9(|P(n)| + |j|) + 4c^2`).

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::dispersion::dispersion_i128;
use crate::error::{CoreError, Result};

pub const SUP_SCAN_LIMIT: i64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResonanceQuery {
    pub bandlimit: i64,
    pub total_mode: i64,
    pub total_frequency: i64,
}

impl ResonanceQuery {
    pub fn new(bandlimit: i64, total_mode: i64, total_frequency: i64) -> Result<Self> {
        if bandlimit < 1 {
            return Err(CoreError::InvalidInput(format!(
                "bandlimit must be >= 1, got {bandlimit}"
            )));
        }
        Ok(Self {
            bandlimit,
            total_mode,
            total_frequency,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    Brute,
    Divisor,
}

impl CountMethod {
    pub fn name(&self) -> &'static str {
        match self {
            CountMethod::Brute => "brute",
            CountMethod::Divisor => "divisor",
        }
    }
}

/// Solution set for one query; `count` always equals `solutions.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResonanceResult {
    pub solutions: Vec<(i64, i64)>,
    pub method: CountMethod,
}

impl ResonanceResult {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }
}

/// Substitution state for one admitted candidate of the divisor route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorizationState {
    /// n1 + n2
    pub p: i64,
    /// n1 * n2
    pub q: i64,
    /// P(n) - j
    pub k: i128,
    /// 9k - 4(4-3n)^2
    pub l: i128,
}

impl FactorizationState {
    /// The defining identity `(3c p + 9 q + c^2)(3 p - 4) = l` with `c = 4 - 3n`.
    pub fn identity_holds(&self, total_mode: i64) -> bool {
        let c = 4 - 3 * total_mode as i128;
        let a = 3 * c * self.p as i128 + 9 * self.q as i128 + c * c;
        a * (3 * self.p as i128 - 4) == self.l
    }
}

fn triple_frequency(n1: i64, n2: i64, total_mode: i64) -> Result<i128> {
    let n3 = total_mode as i128 - n1 as i128 - n2 as i128;
    Ok(dispersion_i128(n1 as i128)? + dispersion_i128(n2 as i128)? + dispersion_i128(n3)?)
}

/// Exhaustive scan over ordered pairs. O(N^2) exact-integer work.
pub fn count_bruteforce(query: &ResonanceQuery) -> Result<ResonanceResult> {
    let n = query.bandlimit;
    let mut solutions = Vec::new();
    for n1 in -n..=n {
        for n2 in -n..=n {
            if triple_frequency(n1, n2, query.total_mode)? == query.total_frequency as i128 {
                solutions.push((n1, n2));
            }
        }
    }
    Ok(ResonanceResult {
        solutions,
        method: CountMethod::Brute,
    })
}

fn isqrt_i128(v: i128) -> i128 {
    debug_assert!(v >= 0);
    if v < 2 {
        return v;
    }
    let mut x = (v as f64).sqrt() as i128 + 2;
    while x * x > v {
        x -= 1;
    }
    x
}

/// Ordered pairs whose elementary symmetric functions are `(p, q)`, both
/// roots within the bandlimit.
fn pairs_from_pq(p: i64, q: i64, bandlimit: i64, out: &mut BTreeSet<(i64, i64)>) {
    let disc = p as i128 * p as i128 - 4 * q as i128;
    if disc < 0 {
        return;
    }
    let r = isqrt_i128(disc);
    if r * r != disc || (p as i128 + r) % 2 != 0 {
        return;
    }
    let x1 = (p as i128 + r) / 2;
    let x2 = (p as i128 - r) / 2;
    if x1.abs() <= bandlimit as i128 && x2.abs() <= bandlimit as i128 {
        out.insert((x1 as i64, x2 as i64));
        out.insert((x2 as i64, x1 as i64));
    }
}

/// Number of positive divisors of |l| by trial division.
pub fn divisor_count(l: i128) -> Result<u64> {
    if l == 0 {
        return Err(CoreError::InvalidInput(
            "divisor count is undefined for 0".into(),
        ));
    }
    let target = l.unsigned_abs();
    let mut count = 0u64;
    let mut d = 1u128;
    while d * d <= target {
        if target % d == 0 {
            count += if d * d == target { 1 } else { 2 };
        }
        d += 1;
    }
    Ok(count)
}

/// Factor-pair route. Agrees with [`count_bruteforce`] exactly, including the
/// listed solution set; the admitted `(p, q)` candidates are bounded by twice
/// the divisor count of `l`.
pub fn count_divisor(query: &ResonanceQuery) -> Result<ResonanceResult> {
    let states = divisor_candidates(query)?;
    let mut set = BTreeSet::new();
    for st in &states {
        pairs_from_pq(st.p, st.q, query.bandlimit, &mut set);
    }
    Ok(ResonanceResult {
        solutions: set.into_iter().collect(),
        method: CountMethod::Divisor,
    })
}

/// The `(p, q)` candidates the factor-pair enumeration admits (before root
/// extraction). Exposed so the divisor-count bound is testable directly.
pub fn divisor_candidates(query: &ResonanceQuery) -> Result<Vec<FactorizationState>> {
    let n = query.total_mode as i128;
    let big_n = query.bandlimit;
    let c = 4 - 3 * n;
    let k = dispersion_i128(n)? - query.total_frequency as i128;
    let l = 9i128
        .checked_mul(k)
        .and_then(|v| v.checked_sub(4 * c * c))
        .ok_or_else(|| CoreError::Overflow {
            context: format!(
                "factorization constant for n={}, j={}",
                n, query.total_frequency
            ),
        })?;

    let mut states = Vec::new();
    let mut push = |p: i128, q: i128| {
        if p.abs() <= 2 * big_n as i128 && q.abs() <= (big_n as i128) * (big_n as i128) {
            let st = FactorizationState {
                p: p as i64,
                q: q as i64,
                k,
                l,
            };
            debug_assert!(st.identity_holds(query.total_mode));
            states.push(st);
        }
    };

    if l == 0 {
        // b = 3p - 4 is 2 mod 3 and never zero, so l = 0 forces the other
        // factor to vanish: 3cp + 9q + c^2 = 0. Scan p directly.
        for p in -2 * big_n as i128..=2 * big_n as i128 {
            let num = -(3 * c * p + c * c);
            if num % 9 == 0 {
                push(p, num / 9);
            }
        }
    } else {
        let target = l.unsigned_abs();
        let mut d = 1u128;
        while d * d <= target {
            if target % d == 0 {
                for b in [
                    d as i128,
                    -(d as i128),
                    (target / d) as i128,
                    -((target / d) as i128),
                ] {
                    if (b + 4) % 3 != 0 {
                        continue;
                    }
                    let p = (b + 4) / 3;
                    let a = l / b;
                    let num = a - 3 * c * p - c * c;
                    if num % 9 == 0 {
                        push(p, num / 9);
                    }
                }
            }
            d += 1;
        }
    }
    states.sort_by_key(|s| (s.p, s.q));
    states.dedup();
    Ok(states)
}

/// Outcome of a full triple scan: the largest bucket multiplicity and every
/// `(n, j)` attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupScan {
    pub max_count: usize,
    pub witnesses: Vec<(i64, i64)>,
}

/// Scans all triples `(n1,n2,n3)` with entries bounded by `N`, bucketing the
/// ordered pairs `(n1,n2)` by `(n1+n2+n3, P(n1)+P(n2)+P(n3))`, and returns
/// the largest bucket.
///
/// Work is `O(N^3)` split by total mode so memory stays `O(N^2)`.
pub fn sup_scan(bandlimit: i64) -> Result<SupScan> {
    if bandlimit < 0 {
        return Err(CoreError::InvalidInput("bandlimit must be >= 0".into()));
    }
    if bandlimit > SUP_SCAN_LIMIT {
        return Err(CoreError::ScanTooLarge {
            max: SUP_SCAN_LIMIT,
            requested: bandlimit,
        });
    }
    let n = bandlimit;
    let p_table: Vec<i128> = (-3 * n..=3 * n)
        .map(|v| dispersion_i128(v as i128))
        .collect::<Result<_>>()?;
    let p_of = |v: i64| p_table[(v + 3 * n) as usize];

    // One slice per total mode; each slice sorts its frequency list and
    // finds the longest run.
    let slice_count = (6 * n + 1) as usize;
    let slices: Vec<(usize, Vec<i64>)> = (0..slice_count)
        .into_par_iter()
        .map(|offset| {
            let total = offset as i64 - 3 * n;
            let mut freqs: Vec<i128> = Vec::new();
            for n1 in -n..=n {
                for n2 in -n..=n {
                    let n3 = total - n1 - n2;
                    if n3.abs() <= n {
                        freqs.push(p_of(n1) + p_of(n2) + p_of(n3));
                    }
                }
            }
            freqs.sort_unstable();
            let mut best = 0usize;
            let mut best_js: Vec<i64> = Vec::new();
            let mut i = 0;
            while i < freqs.len() {
                let mut end = i + 1;
                while end < freqs.len() && freqs[end] == freqs[i] {
                    end += 1;
                }
                let run = end - i;
                if run > best {
                    best = run;
                    best_js.clear();
                    best_js.push(freqs[i] as i64);
                } else if run == best && best > 0 {
                    best_js.push(freqs[i] as i64);
                }
                i = end;
            }
            (best, best_js)
        })
        .collect();

    let mut max_count = 0usize;
    let mut witnesses = Vec::new();
    for (offset, (best, js)) in slices.iter().enumerate() {
        let total = offset as i64 - 3 * n;
        if *best > max_count {
            max_count = *best;
            witnesses.clear();
        }
        if *best == max_count && max_count > 0 {
            witnesses.extend(js.iter().map(|&j| (total, j)));
        }
    }
    Ok(SupScan {
        max_count,
        witnesses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRow {
    pub bandlimit: i64,
    pub sup_count: usize,
    /// log2 of the ratio to the previous row's count; None on the first row.
    pub log2_ratio: Option<f64>,
}

/// Runs [`sup_scan`] per bandlimit and reports successive log2 ratios, the
/// empirical proxy for the sub-polynomial growth exponent.
pub fn growth_report(bandlimits: &[i64]) -> Result<Vec<GrowthRow>> {
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(bandlimits.len());
    for &n in bandlimits {
        let scan = sup_scan(n)?;
        let log2_ratio = rows
            .last()
            .map(|prev| (scan.max_count as f64 / prev.sup_count as f64).log2());
        rows.push(GrowthRow {
            bandlimit: n,
            sup_count: scan.max_count,
            log2_ratio,
        });
    }
    Ok(rows)
}

/// Largest bucket multiplicity over the far regime `|n| >= N^2, |j| >= N^6`,
/// with the third mode scanned over `[-extent, extent]` (the first two stay
/// within the bandlimit). Used to stress the claim that far buckets hold at
/// most three pairs.
pub fn far_regime_max_count(bandlimit: i64, extent: i64) -> Result<usize> {
    use std::collections::HashMap;
    let n = bandlimit;
    let n2_floor = (n as i128) * (n as i128);
    let j_floor = n2_floor * n2_floor * n2_floor;
    let mut buckets: HashMap<(i64, i128), u32> = HashMap::new();
    for n3 in -extent..=extent {
        let p3 = dispersion_i128(n3 as i128)?;
        for n1 in -n..=n {
            let p1 = dispersion_i128(n1 as i128)?;
            for n2 in -n..=n {
                let total = n1 + n2 + n3;
                if (total as i128).abs() < n2_floor {
                    continue;
                }
                let j = p1 + dispersion_i128(n2 as i128)? + p3;
                if j.abs() < j_floor {
                    continue;
                }
                *buckets.entry((total, j)).or_default() += 1;
            }
        }
    }
    Ok(buckets.values().copied().max().unwrap_or(0) as usize)
}
