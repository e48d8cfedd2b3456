//! Exact integer machinery for cubic resonances.
//!
//! For `n = n₁ − n₂ + n₃` the resonance function factors as
//!
//! ```text
//! μ = n² − (n₁² − n₂² + n₃²) = 2(n₂ − n₁)(n₂ − n₃)
//! ```
//!
//! so for `μ ≠ 0` every triple with resonance level `μ` is recovered from a
//! factorization `μ/2 = d·e` plus one free index. [`enumerate_s_mu`] walks those
//! factorizations instead of scanning `ℤ³`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResonanceTriple {
    pub n1: i64,
    pub n2: i64,
    pub n3: i64,
}

impl ResonanceTriple {
    pub fn new(n1: i64, n2: i64, n3: i64) -> Self {
        Self { n1, n2, n3 }
    }

    /// `n = n₁ − n₂ + n₃`.
    pub fn output(&self) -> Result<i64> {
        self.n1
            .checked_sub(self.n2)
            .and_then(|x| x.checked_add(self.n3))
            .ok_or(Error::Overflow("output frequency"))
    }

    pub fn mu(&self) -> Result<i64> {
        resonance_mu(self.n1, self.n2, self.n3)
    }

    pub fn is_non_resonant_pairing(&self) -> bool {
        self.n2 != self.n1 && self.n2 != self.n3
    }
}

/// `2(n₂ − n₁)(n₂ − n₃)`, in checked arithmetic.
pub fn resonance_mu_factored(n1: i64, n2: i64, n3: i64) -> Result<i64> {
    let overflow = Error::Overflow("factored resonance");
    let a = n2.checked_sub(n1).ok_or(Error::Overflow("factored resonance"))?;
    let b = n2.checked_sub(n3).ok_or(Error::Overflow("factored resonance"))?;
    a.checked_mul(b).and_then(|p| p.checked_mul(2)).ok_or(overflow)
}

/// `n² − (n₁² − n₂² + n₃²)` with `n = n₁ − n₂ + n₃`, in checked arithmetic.
pub fn resonance_mu_expanded(n1: i64, n2: i64, n3: i64) -> Result<i64> {
    let sq = |x: i64| x.checked_mul(x).ok_or(Error::Overflow("expanded resonance"));
    let n = ResonanceTriple::new(n1, n2, n3).output()?;
    let inner = sq(n1)?
        .checked_sub(sq(n2)?)
        .and_then(|x| x.checked_add(sq(n3).ok()?))
        .ok_or(Error::Overflow("expanded resonance"))?;
    sq(n)?.checked_sub(inner).ok_or(Error::Overflow("expanded resonance"))
}

/// Resonance level `μ`; both closed forms are evaluated and must agree.
pub fn resonance_mu(n1: i64, n2: i64, n3: i64) -> Result<i64> {
    let factored = resonance_mu_factored(n1, n2, n3)?;
    let expanded = resonance_mu_expanded(n1, n2, n3)?;
    assert_eq!(factored, expanded, "resonance identity violated at ({n1}, {n2}, {n3})");
    Ok(factored)
}

fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if m % p == 0 {
            let mut k = 0;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            factors.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    factors
}

fn divisors_from(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, k) in factors {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..k {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Positive divisors of `m ≥ 1`, ascending.
pub fn divisors(m: u64) -> Vec<u64> {
    divisors_from(&factorize(m))
}

/// Number of positive divisors `d(m)`.
pub fn divisor_count(m: i64) -> Result<u64> {
    if m <= 0 {
        return Err(Error::invalid(format!("divisor count needs m >= 1, got {m}")));
    }
    Ok(factorize(m as u64).iter().map(|&(_, k)| k as u64 + 1).product())
}

/// Smallest-prime-factor table for fast repeated factorization up to `limit`.
struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Self { spf }
    }

    fn divisors(&self, mut m: usize) -> Vec<u64> {
        let mut factors: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut k = 0;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            factors.push((p as u64, k));
        }
        divisors_from(&factors)
    }
}

/// Allowed magnitudes `lo ≤ |n| ≤ hi` for one index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRange {
    pub lo: u64,
    pub hi: u64,
}

impl IndexRange {
    /// Dyadic block `|n| ∈ (N/2, N]`.
    pub fn dyadic(n: u64) -> Self {
        Self { lo: n / 2 + 1, hi: n }
    }

    /// `|n| ≤ bound`.
    pub fn boxed(bound: u64) -> Self {
        Self { lo: 0, hi: bound }
    }

    pub fn contains(&self, n: i64) -> bool {
        (self.lo..=self.hi).contains(&n.unsigned_abs())
    }

    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        let hi = self.hi as i64;
        (-hi..=hi).filter(move |&n| self.contains(n))
    }

    pub fn len(&self) -> usize {
        if self.lo > self.hi {
            0
        } else if self.lo == 0 {
            2 * self.hi as usize + 1
        } else {
            2 * (self.hi - self.lo + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleBounds {
    pub n1: IndexRange,
    pub n2: IndexRange,
    pub n3: IndexRange,
}

impl TripleBounds {
    pub fn new(n1: IndexRange, n2: IndexRange, n3: IndexRange) -> Self {
        Self { n1, n2, n3 }
    }

    pub fn uniform(range: IndexRange) -> Self {
        Self::new(range, range, range)
    }

    fn contains(&self, t: &ResonanceTriple) -> bool {
        self.n1.contains(t.n1) && self.n2.contains(t.n2) && self.n3.contains(t.n3)
    }
}

/// Signed divisors `±d` of `half = μ/2`, each paired with the cofactor `half/d`.
fn signed_factorizations(half: i64, positive: &[u64]) -> impl Iterator<Item = (i64, i64)> + '_ {
    positive.iter().flat_map(move |&d| {
        let d = d as i64;
        [(d, half / d), (-d, -(half / d))]
    })
}

/// Case `|n₂| ≤ |n₃|`: fix `n₂`, let `d = n₂ − n₁` run over divisors of `μ/2`,
/// then `n₁ = n₂ − d`, `n₃ = n₂ − μ/(2d)`.
fn walk_fixing_n2(
    half: i64,
    divs: &[u64],
    bounds: &TripleBounds,
    mut visit: impl FnMut(ResonanceTriple),
) {
    for n2 in bounds.n2.values() {
        for (d, e) in signed_factorizations(half, divs) {
            let t = ResonanceTriple::new(n2 - d, n2, n2 - e);
            if bounds.contains(&t) {
                visit(t);
            }
        }
    }
}

/// Case `|n₃| ≤ |n₂|`: fix `n₃`, let `d = n₂ − n₃` run over divisors of `μ/2`,
/// then `n₂ = d + n₃`, `n₁ = d + n₃ − μ/(2d)`.
fn walk_fixing_n3(
    half: i64,
    divs: &[u64],
    bounds: &TripleBounds,
    mut visit: impl FnMut(ResonanceTriple),
) {
    for n3 in bounds.n3.values() {
        for (d, e) in signed_factorizations(half, divs) {
            let t = ResonanceTriple::new(d + n3 - e, d + n3, n3);
            if bounds.contains(&t) {
                visit(t);
            }
        }
    }
}

/// `μ/2` when `μ` is a nonzero even integer; otherwise `S_μ` is empty.
fn half_level(mu: i64) -> Option<i64> {
    (mu != 0 && mu % 2 == 0).then_some(mu / 2)
}

/// `S_μ = {(n₁, n₂, n₃) in bounds : n₂ ∉ {n₁, n₃}, 2(n₂ − n₁)(n₂ − n₃) = μ}`,
/// sorted. Both cases of the walk are run and merged.
pub fn enumerate_s_mu(mu: i64, bounds: &TripleBounds) -> Result<Vec<ResonanceTriple>> {
    let Some(half) = half_level(mu) else {
        return Ok(Vec::new());
    };
    let divs = divisors(half.unsigned_abs());
    let mut found = BTreeSet::new();
    walk_fixing_n2(half, &divs, bounds, |t| {
        if t.n2.abs() <= t.n3.abs() {
            found.insert(t);
        }
    });
    walk_fixing_n3(half, &divs, bounds, |t| {
        if t.n3.abs() <= t.n2.abs() {
            found.insert(t);
        }
    });
    for t in &found {
        debug_assert_eq!(t.mu()?, mu);
    }
    Ok(found.into_iter().collect())
}

fn count_with(half: i64, divs: &[u64], bounds: &TripleBounds) -> usize {
    let mut count = 0;
    if bounds.n2.len() <= bounds.n3.len() {
        walk_fixing_n2(half, divs, bounds, |_| count += 1);
    } else {
        walk_fixing_n3(half, divs, bounds, |_| count += 1);
    }
    count
}

/// `#S_μ` without materializing the set; fixes whichever of `n₂`, `n₃` has
/// the smaller range.
pub fn count_s_mu(mu: i64, bounds: &TripleBounds) -> usize {
    match half_level(mu) {
        Some(half) => count_with(half, &divisors(half.unsigned_abs()), bounds),
        None => 0,
    }
}

/// Brute-force `S_μ` by scanning every triple in the bounds.
pub fn scan_s_mu(mu: i64, bounds: &TripleBounds) -> Vec<ResonanceTriple> {
    let mut out = Vec::new();
    for n1 in bounds.n1.values() {
        for n2 in bounds.n2.values() {
            for n3 in bounds.n3.values() {
                let t = ResonanceTriple::new(n1, n2, n3);
                if t.is_non_resonant_pairing() && 2 * (n2 - n1) * (n2 - n3) == mu {
                    out.push(t);
                }
            }
        }
    }
    out.sort();
    out
}

/// Largest `|μ|` attainable inside the bounds.
pub fn max_abs_mu(bounds: &TripleBounds) -> u64 {
    2 * (bounds.n2.hi + bounds.n1.hi) * (bounds.n2.hi + bounds.n3.hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    #[serde(rename = "N1")]
    pub n1: u64,
    #[serde(rename = "N3")]
    pub n3: u64,
    pub mu_argmax: i64,
    pub count_max: usize,
    /// `count_max / N3`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    #[serde(rename = "N3")]
    pub n3: u64,
    pub exponent: f64,
    pub r_squared: f64,
}

/// Numerical evidence (not a proof) for `max_μ #S_μ ≲ (N¹)^{0+} N³`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingReport {
    pub nmax: u64,
    pub epsilon: f64,
    pub rows: Vec<CountRow>,
    pub fits: Vec<ExponentFit>,
    pub max_exponent: f64,
    pub within_epsilon: bool,
}

/// Small-block sizes `N³` used by the report.
pub const REPORT_SMALL_BLOCKS: [u64; 3] = [2, 4, 8];

/// Maximum of `#S_μ` over `μ` for the configuration with the two large
/// indices in block `N¹` and one of `n₂`, `n₃` in block `N³`. Returns
/// `(μ_argmax, count)`; ties resolve to the smallest `μ`.
fn max_count(big: u64, small: u64, sieve: &Sieve) -> (i64, usize) {
    let big_r = IndexRange::dyadic(big);
    let small_r = IndexRange::dyadic(small);
    let configs = [
        TripleBounds::new(big_r, small_r, big_r),
        TripleBounds::new(big_r, big_r, small_r),
    ];
    let limit = configs.iter().map(max_abs_mu).max().unwrap_or(0) as i64;
    let mut best = (0i64, 0usize);
    let mut mu = -limit;
    while mu <= limit {
        if let Some(half) = half_level(mu) {
            let divs = sieve.divisors(half.unsigned_abs() as usize);
            for bounds in &configs {
                let c = count_with(half, &divs, bounds);
                if c > best.1 {
                    best = (mu, c);
                }
            }
        }
        mu += 2;
    }
    best
}

/// Max-over-`μ` counts on dyadic blocks `N¹ = 4, 8, …, nmax` for each
/// `N³ ∈ REPORT_SMALL_BLOCKS` (with `N³ < N¹`), and the least-squares growth
/// exponent of `max_μ #S_μ / N³` in `N¹`.
pub fn counting_bound_report(nmax: u64, epsilon: f64) -> Result<CountingReport> {
    if nmax < 4 {
        return Err(Error::invalid(format!("nmax must be >= 4, got {nmax}")));
    }
    let mut bigs = Vec::new();
    let mut b = 4u64;
    while b <= nmax {
        bigs.push(b);
        b *= 2;
    }
    let top = *bigs.last().expect("nmax >= 4");
    let sieve = Sieve::new((4 * top * top) as usize + 1);

    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &small in &REPORT_SMALL_BLOCKS {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &big in bigs.iter().filter(|&&big| big > small) {
            let (mu_argmax, count_max) = max_count(big, small, &sieve);
            let ratio = count_max as f64 / small as f64;
            rows.push(CountRow {
                n1: big,
                n3: small,
                mu_argmax,
                count_max,
                ratio,
            });
            xs.push((big as f64).ln());
            ys.push(ratio.ln());
        }
        if let Some(fit) = stats::least_squares(&xs, &ys) {
            fits.push(ExponentFit {
                n3: small,
                exponent: fit.slope,
                r_squared: fit.r_squared,
            });
        }
    }
    let max_exponent = fits.iter().map(|f| f.exponent).fold(f64::NEG_INFINITY, f64::max);
    Ok(CountingReport {
        nmax,
        epsilon,
        rows,
        fits,
        max_exponent,
        within_epsilon: max_exponent < epsilon,
    })
}
