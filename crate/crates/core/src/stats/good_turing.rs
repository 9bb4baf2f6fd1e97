//! Simple Good-Turing estimation.
//!
//! Counts of counts `N_r` are averaged over the gaps between observed
//! frequencies (`Z_r = 2 N_r / (r_next - r_prev)`), a straight line is fitted
//! to `(log r, log Z_r)` and the smoothed count `r* = (r+1) S(r+1) / S(r)`
//! replaces the raw Turing estimate `(r+1) N_{r+1} / N_r` from the first `r`
//! where the two are statistically indistinguishable onwards.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// 1.96: the p < 0.05 switch criterion.
const CONFIDENCE: f64 = 1.96;

#[derive(Clone, Debug, PartialEq)]
pub struct GoodTuring {
    /// One probability per input count, in input order.
    pub probs: Vec<f64>,
    /// Mass reserved for unseen events, before scaling to the corpus size.
    pub p0: f64,
    /// `(intercept, slope)` of the log-log fit; `None` after the add-one fallback.
    pub fit: Option<(f64, f64)>,
}

impl GoodTuring {
    pub fn used_fallback(&self) -> bool {
        self.fit.is_none()
    }
}

/// Smooth independent event counts.
///
/// `total_n` is the corpus size. When it exceeds the sum of `counts`, every
/// probability is scaled by `sum / total_n` so the events share only the part
/// of the corpus they cover. Zero counts share the unseen mass evenly.
pub fn good_turing_probability(counts: &[u64], total_n: u64) -> Result<GoodTuring> {
    if total_n == 0 {
        return Err(Error::Estimator("corpus size must be positive".into()));
    }
    let observed: u64 = counts.iter().sum();
    if observed == 0 {
        return Err(Error::Estimator(
            "Good-Turing needs at least one non-zero count".into(),
        ));
    }
    let mass = (observed as f64 / total_n as f64).min(1.0);
    let unseen = counts.iter().filter(|&&c| c == 0).count();

    let mut count_of_counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &c in counts.iter().filter(|&&c| c > 0) {
        *count_of_counts.entry(c).or_insert(0) += 1;
    }
    if count_of_counts.len() == 1 {
        log::warn!("only one distinct count; falling back to add-one smoothing");
        let denom = (observed + counts.len() as u64) as f64;
        let probs = counts
            .iter()
            .map(|&c| (c + 1) as f64 / denom * mass)
            .collect();
        return Ok(GoodTuring {
            probs,
            p0: unseen as f64 / denom,
            fit: None,
        });
    }

    let rs: Vec<u64> = count_of_counts.keys().copied().collect();
    let ns: Vec<f64> = count_of_counts.values().map(|&n| n as f64).collect();
    let (intercept, slope) = fit_log_log(&rs, &ns);
    if slope > -1.0 {
        log::warn!("Good-Turing slope {slope:.3} > -1; estimates may be unreliable");
    }
    let smoothed = |r: f64| (intercept + slope * r.ln()).exp();

    let mut r_star = BTreeMap::new();
    let mut switched = false;
    for (j, &r) in rs.iter().enumerate() {
        let rf = r as f64;
        let lgt = (rf + 1.0) * smoothed(rf + 1.0) / smoothed(rf);
        let next = count_of_counts.get(&(r + 1)).map(|&n| n as f64);
        let estimate = match next {
            Some(next) if !switched => {
                let n = ns[j];
                let turing = (rf + 1.0) * next / n;
                let spread =
                    CONFIDENCE * ((rf + 1.0).powi(2) * next / n.powi(2) * (1.0 + next / n)).sqrt();
                if (turing - lgt).abs() > spread {
                    turing
                } else {
                    switched = true;
                    lgt
                }
            }
            _ => {
                switched = true;
                lgt
            }
        };
        r_star.insert(r, estimate);
    }
    let n_prime: f64 = rs.iter().zip(&ns).map(|(r, n)| n * r_star[r]).sum();

    let mut p0 = count_of_counts.get(&1).copied().unwrap_or(0) as f64 / observed as f64;
    if p0 == 0.0 && unseen > 0 {
        // no singletons observed; take N_1 from the fitted line instead
        p0 = smoothed(1.0) / observed as f64;
    }
    let p0 = p0.min(1.0 - f64::EPSILON);

    let probs = counts
        .iter()
        .map(|&c| {
            if c == 0 {
                p0 * mass / unseen as f64
            } else {
                (1.0 - p0) * r_star[&c] / n_prime * mass
            }
        })
        .collect();
    Ok(GoodTuring {
        probs,
        p0,
        fit: Some((intercept, slope)),
    })
}

/// Least-squares line through `(ln r, ln Z_r)`.
fn fit_log_log(rs: &[u64], ns: &[f64]) -> (f64, f64) {
    let k = rs.len();
    let mut xs = Vec::with_capacity(k);
    let mut ys = Vec::with_capacity(k);
    for j in 0..k {
        let prev = if j == 0 { 0.0 } else { rs[j - 1] as f64 };
        let r = rs[j] as f64;
        let next = if j + 1 < k {
            rs[j + 1] as f64
        } else {
            2.0 * r - prev
        };
        xs.push(r.ln());
        ys.push((2.0 * ns[j] / (next - prev)).ln());
    }
    let mx = xs.iter().sum::<f64>() / k as f64;
    let my = ys.iter().sum::<f64>() / k as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}
