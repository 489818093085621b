//! Wilcoxon signed-rank test, two-sided.
//!
//! Zero differences are dropped, absolute differences ranked with average
//! ranks for ties, and `W+` (the rank sum of positive differences) tested
//! against its null distribution, in which every rank independently carries
//! either sign. For small samples that distribution is computed exactly by
//! dynamic programming over the actual (possibly tied) ranks. For large
//! samples a normal approximation is used, refined by a second-order
//! Edgeworth expansion with continuity correction; its cumulants are taken
//! from the actual ranks, which gives the tie correction for free.

use serde::Serialize;
use statrs::function::erf::erfc;

use super::MetricError;

/// Samples at or below this size use the exact distribution under `Auto`.
pub const EXACT_MAX_N: usize = 25;
pub const MIN_N: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WilcoxonMethod {
    #[default]
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilcoxonResult {
    /// Non-zero differences used.
    pub n: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub p_value: f64,
    /// `Exact` or `Normal`, never `Auto`.
    pub method: WilcoxonMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

/// Average ranks (1-based) of `values`.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Exact two-sided p-value of observing `w_plus` given the ranks.
pub(crate) fn exact_p(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut dist = vec![0.0f64; max + 1];
    dist[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            let p = dist[s] * 0.5;
            dist[s] = p;
            dist[s + r] += p;
        }
        reach += r;
    }
    let t = (2.0 * w_plus).round() as usize;
    let lower: f64 = dist[..=t].iter().sum();
    let upper: f64 = dist[t..].iter().sum();
    (2.0 * lower.min(upper)).min(1.0)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Returns (p, z).
pub(crate) fn approx_p(ranks: &[f64], w_plus: f64) -> (f64, f64) {
    let mean: f64 = ranks.iter().sum::<f64>() / 2.0;
    let var: f64 = ranks.iter().map(|r| r * r).sum::<f64>() / 4.0;
    let k4: f64 = -ranks.iter().map(|r| r.powi(4)).sum::<f64>() / 8.0;
    let k6: f64 = ranks.iter().map(|r| r.powi(6)).sum::<f64>() / 4.0;
    // half the lattice spacing of W+
    let step = ranks.iter().map(|r| (2.0 * r).round() as usize).fold(0, gcd) as f64 / 2.0;
    let sd = var.sqrt();
    let z = ((w_plus - mean).abs() - step / 2.0) / sd;
    if z <= 0.0 {
        return (1.0, 0.0);
    }
    let g4 = k4 / (var * var);
    let g6 = k6 / (var * var * var);
    let he3 = z.powi(3) - 3.0 * z;
    let he5 = z.powi(5) - 10.0 * z.powi(3) + 15.0 * z;
    let he7 = z.powi(7) - 21.0 * z.powi(5) + 105.0 * z.powi(3) - 105.0 * z;
    let sf = 0.5 * erfc(z / std::f64::consts::SQRT_2);
    let pdf = (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let tail = sf + pdf * (g4 / 24.0 * he3 + g6 / 720.0 * he5 + g4 * g4 / 1152.0 * he7);
    ((2.0 * tail).clamp(0.0, 1.0), z * (w_plus - mean).signum())
}

/// Paired two-sided signed-rank test of `a` against `b`.
///
/// ```
/// use lrtk::metrics::{wilcoxon_signed_rank, WilcoxonMethod};
/// let a = [1.83, 0.50, 1.62, 2.48, 1.68, 1.88, 1.55, 3.06, 1.30];
/// let b = [0.878, 0.647, 0.598, 2.05, 1.06, 1.29, 1.06, 3.14, 1.29];
/// let r = wilcoxon_signed_rank(&a, &b, WilcoxonMethod::Auto).unwrap();
/// assert_eq!(r.statistic, 5.0);
/// assert!((r.p_value - 0.0390625).abs() < 1e-12);
/// ```
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], method: WilcoxonMethod) -> Result<WilcoxonResult, MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::Length {
            hyps: a.len(),
            refs: b.len(),
        });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(MetricError::Degenerate);
    }
    if diffs.len() < MIN_N {
        return Err(MetricError::TooFew {
            min: MIN_N,
            got: diffs.len(),
        });
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = ranks
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| r)
        .sum();
    let total: f64 = ranks.iter().sum();
    let w_minus = total - w_plus;
    let n = diffs.len();
    let method = match method {
        WilcoxonMethod::Auto if n <= EXACT_MAX_N => WilcoxonMethod::Exact,
        WilcoxonMethod::Auto => WilcoxonMethod::Normal,
        m => m,
    };
    let (p_value, z) = match method {
        WilcoxonMethod::Exact => (exact_p(&ranks, w_plus), None),
        _ => {
            let (p, z) = approx_p(&ranks, w_plus);
            (p, Some(z))
        }
    };
    Ok(WilcoxonResult {
        n,
        w_plus,
        w_minus,
        statistic: w_plus.min(w_minus),
        p_value,
        method,
        z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), [3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn degenerate_and_short_inputs() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(
            wilcoxon_signed_rank(&a, &a, WilcoxonMethod::Auto),
            Err(MetricError::Degenerate)
        );
        assert!(matches!(
            wilcoxon_signed_rank(&a, &a[..5], WilcoxonMethod::Auto),
            Err(MetricError::Length { .. })
        ));
        let b = [0.0, 0.0, 0.0, 4.0, 5.0, 6.0];
        assert_eq!(
            wilcoxon_signed_rank(&a, &b, WilcoxonMethod::Auto),
            Err(MetricError::TooFew { min: 6, got: 3 })
        );
    }

    #[test]
    fn all_positive_small_sample() {
        let a: Vec<f64> = (1..=8).map(f64::from).collect();
        let b = vec![0.0; 8];
        let r = wilcoxon_signed_rank(&a, &b, WilcoxonMethod::Exact).unwrap();
        assert_eq!(r.w_plus, 36.0);
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 2.0 / 256.0).abs() < 1e-15);
    }

    #[test]
    fn auto_switches_to_approximation() {
        let a: Vec<f64> = (1..=30).map(|i| f64::from(i) * 1.1).collect();
        let b: Vec<f64> = (1..=30)
            .map(|i| f64::from(i) + if i % 3 == 0 { 2.0 } else { 0.0 })
            .collect();
        let r = wilcoxon_signed_rank(&a, &b, WilcoxonMethod::Auto).unwrap();
        assert_eq!(r.method, WilcoxonMethod::Normal);
        let exact = wilcoxon_signed_rank(&a, &b, WilcoxonMethod::Exact).unwrap();
        assert!((r.p_value - exact.p_value).abs() < 1e-3);
    }
}
