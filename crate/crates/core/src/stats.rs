//! Summary statistics over paired profit samples: quantiles of the relative
//! difference, the relative L2 distance between two profit samples, the
//! fraction of paths on which the reference policy wins, and histogram
//! binning for the emitted CSV data.

use crate::error::{Error, Result};
use crate::sim::ComparisonSamples;

/// Default bin count for profit histograms.
pub const PROFIT_HIST_BINS: usize = 40;
/// Default bin count for profit-difference histograms.
pub const DIFF_HIST_BINS: usize = 30;

/// Quantile with linear interpolation between order statistics at rank
/// `level * (n - 1) + 1` (1-based).
pub fn quantile(xs: &[f64], level: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("quantile"));
    }
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::OutOfDomain { what: "level", value: level });
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = level * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let frac = h - lo as f64;
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

/// Relative L2 distance `sqrt(mean((a - b)^2)) / sqrt(mean(a^2))` over the
/// empirical measure. Errors when the reference norm is zero.
pub fn relative_l2(reference: &[f64], other: &[f64]) -> Result<f64> {
    if reference.is_empty() || reference.len() != other.len() {
        return Err(Error::invalid(
            "samples",
            "need equal-length non-empty sample vectors",
        ));
    }
    let n = reference.len() as f64;
    let diff_sq: f64 = reference
        .iter()
        .zip(other)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    let ref_sq: f64 = reference.iter().map(|a| a * a).sum::<f64>() / n;
    if ref_sq <= 0.0 {
        return Err(Error::ZeroReferenceNorm);
    }
    Ok((diff_sq / ref_sq).sqrt())
}

/// Summary of a paired comparison. Quantiles are of the per-pair relative
/// difference `1 - P_B / P_A`, where A is the reference policy; negative
/// values mean B outperformed A on that path.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonStats {
    pub n: usize,
    /// Mean of the absolute differences `P_A - P_B`.
    pub mean_diff: f64,
    pub q05: f64,
    pub median: f64,
    pub q95: f64,
    pub rel_l2: f64,
    /// Fraction of pairs with `P_A > P_B` (strict).
    pub frac_a_better: f64,
    /// Pairs with a zero reference profit, excluded from the relative columns.
    pub excluded_pairs: usize,
}

/// Computes every [`ComparisonStats`] field from paired samples.
pub fn summarise(samples: &ComparisonSamples) -> Result<ComparisonStats> {
    let n = samples.n();
    if n < 2 || samples.profits_b.len() != n {
        return Err(Error::invalid(
            "samples",
            "need at least 2 pairs of equal length",
        ));
    }
    let a = &samples.profits_a;
    let b = &samples.profits_b;

    let mean_diff = a.iter().zip(b).map(|(x, y)| x - y).sum::<f64>() / n as f64;
    let frac_a_better = a.iter().zip(b).filter(|(x, y)| x > y).count() as f64 / n as f64;

    let rel_diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .filter(|(x, _)| **x != 0.0)
        .map(|(x, y)| 1.0 - y / x)
        .collect();
    let excluded_pairs = n - rel_diffs.len();
    if rel_diffs.is_empty() {
        return Err(Error::invalid(
            "samples",
            "all reference profits are zero; relative statistics undefined",
        ));
    }

    Ok(ComparisonStats {
        n,
        mean_diff,
        q05: quantile(&rel_diffs, 0.05)?,
        median: quantile(&rel_diffs, 0.5)?,
        q95: quantile(&rel_diffs, 0.95)?,
        rel_l2: relative_l2(a, b)?,
        frac_a_better,
        excluded_pairs,
    })
}

/// Equal-width histogram spanning `[min, max]` of the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` edges; `edges[0] = min`, `edges[bins] = max`.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn histogram(xs: &[f64], bins: usize) -> Result<Histogram> {
    if xs.is_empty() {
        return Err(Error::EmptyInput("histogram"));
    }
    if bins < 1 {
        return Err(Error::invalid("bins", "must be >= 1"));
    }
    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in xs {
        let idx = if width > 0.0 {
            (((x - min) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    let edges = (0..=bins)
        .map(|i| {
            if i == bins {
                max
            } else {
                min + width * i as f64
            }
        })
        .collect();
    Ok(Histogram { edges, counts })
}
