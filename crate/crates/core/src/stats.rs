//! Descriptive statistics: eight-number summary, population skewness and
//! kurtosis, and fixed-width histogram binning.
//!
//! Conventions match the usual dataframe `describe()`: sample SD uses the
//! n−1 denominator, quantiles use linear interpolation between order
//! statistics (type 7: h = (n−1)p), and kurtosis is the plain Pearson
//! moment ratio m₄/m₂² (3 for a normal), not excess.

use serde::Serialize;

use crate::error::{Error, Result};

/// Eight-number summary of a sample.
#[derive(Debug, Clone, Serialize)]
pub struct DescriptiveSummary {
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// One fixed-width histogram bin; `count` is the number of samples in
/// [lower, upper), with the top bin closed on the right.
#[derive(Debug, Clone, Serialize)]
pub struct HistogramBin {
    #[serde(rename = "bin_lower")]
    pub lower: f64,
    #[serde(rename = "bin_upper")]
    pub upper: f64,
    pub count: usize,
}

fn check_finite(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::domain("empty input"));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("input contains a non-finite value"));
    }
    Ok(())
}

/// Summarize a sample. A single observation is allowed; its sd is defined
/// as 0 so degenerate cohorts still summarize.
pub fn describe(xs: &[f64]) -> Result<DescriptiveSummary> {
    check_finite(xs)?;
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = if n == 1 {
        0.0
    } else {
        let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
        (ss / (n - 1) as f64).sqrt()
    };
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(DescriptiveSummary {
        count: n,
        mean,
        sd,
        min: sorted[0],
        q25: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q75: quantile_sorted(&sorted, 0.75),
        max: sorted[n - 1],
    })
}

/// Type-7 quantile of an already sorted slice.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[n - 1]
    }
}

fn central_moments(xs: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (mean, m2 / n, m3 / n, m4 / n)
}

/// Population skewness m₃ / m₂^{3/2}. Needs n ≥ 3 and positive variance.
pub fn skewness(xs: &[f64]) -> Result<f64> {
    check_finite(xs)?;
    if xs.len() < 3 {
        return Err(Error::domain("skewness needs at least 3 observations"));
    }
    let (_, m2, m3, _) = central_moments(xs);
    if m2 <= 0.0 {
        return Err(Error::domain("skewness undefined for zero variance"));
    }
    Ok(m3 / m2.powf(1.5))
}

/// Pearson (non-excess) kurtosis m₄ / m₂². Needs n ≥ 3 and positive variance.
pub fn kurtosis(xs: &[f64]) -> Result<f64> {
    check_finite(xs)?;
    if xs.len() < 3 {
        return Err(Error::domain("kurtosis needs at least 3 observations"));
    }
    let (_, m2, _, m4) = central_moments(xs);
    if m2 <= 0.0 {
        return Err(Error::domain("kurtosis undefined for zero variance"));
    }
    Ok(m4 / (m2 * m2))
}

/// Bin a sample into `bins` equal-width bins spanning [min, max].
///
/// Every sample lands in exactly one bin (the maximum goes in the last),
/// so counts always sum to the sample size. A constant sample degenerates
/// to zero-width bins with all mass in the first.
pub fn histogram(xs: &[f64], bins: usize) -> Result<Vec<HistogramBin>> {
    check_finite(xs)?;
    if bins == 0 {
        return Err(Error::domain("histogram needs at least one bin"));
    }
    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in xs {
        let idx = if width > 0.0 {
            (((x - min) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lower: min + i as f64 * width,
            upper: if i + 1 == bins {
                max
            } else {
                min + (i + 1) as f64 * width
            },
            count,
        })
        .collect())
}
