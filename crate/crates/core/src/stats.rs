//! Small statistical helpers shared by the estimators and the validation
//! suite.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Binomial proportion and its standard error.
pub fn proportion(successes: usize, trials: usize) -> (f64, f64) {
    let p = successes as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

/// Two-sided standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
}

/// Ratio `Σ num / Σ den` of per-batch sums with a delta-method standard
/// error from the batch-to-batch scatter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub value: f64,
    pub stderr: f64,
}

pub fn batch_ratio(num: &[f64], den: &[f64]) -> Result<RatioEstimate> {
    let b = num.len();
    if b < 2 || den.len() != b {
        return Err(Error::InsufficientSampling("ratio estimate needs at least two batches".into()));
    }
    let den_mean = mean(den);
    if den_mean <= 0.0 {
        return Err(Error::InsufficientSampling("denominator event never observed".into()));
    }
    let value = mean(num) / den_mean;
    let resid: Vec<f64> = num.iter().zip(den).map(|(n, d)| (n - value * d) / den_mean).collect();
    let var = resid.iter().map(|r| r * r).sum::<f64>() / (b as f64 - 1.0);
    Ok(RatioEstimate { value, stderr: (var / b as f64).sqrt() })
}

/// Two-sample chi-square homogeneity test on count histograms; cells empty
/// in both samples are dropped. Returns the p-value.
pub fn chi_square_two_sample(a: &[usize], b: &[usize]) -> f64 {
    let na: f64 = a.iter().sum::<usize>() as f64;
    let nb: f64 = b.iter().sum::<usize>() as f64;
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut stat = 0.0;
    let mut cells = 0;
    for i in 0..a.len().max(b.len()) {
        let x = *a.get(i).unwrap_or(&0) as f64;
        let y = *b.get(i).unwrap_or(&0) as f64;
        if x + y == 0.0 {
            continue;
        }
        stat += (ka * x - kb * y).powi(2) / (x + y);
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

/// Chi-square goodness of fit of counts against expected probabilities.
/// Cells with expected count below 5 are pooled into their neighbour.
pub fn chi_square_gof(counts: &[usize], probs: &[f64]) -> f64 {
    let n: f64 = counts.iter().sum::<usize>() as f64;
    let mut stat = 0.0;
    let mut cells = 0;
    let (mut obs_acc, mut exp_acc) = (0.0, 0.0);
    for (i, &p) in probs.iter().enumerate() {
        obs_acc += *counts.get(i).unwrap_or(&0) as f64;
        exp_acc += p * n;
        if exp_acc >= 5.0 {
            stat += (obs_acc - exp_acc).powi(2) / exp_acc;
            cells += 1;
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    let rest_obs = obs_acc + counts.iter().skip(probs.len()).sum::<usize>() as f64;
    if exp_acc > 0.0 || rest_obs > 0.0 {
        let e = exp_acc.max(1e-300);
        stat += (rest_obs - e).powi(2) / e;
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let en = ((na * nb) as f64 / (na + nb) as f64).sqrt();
    (d, kolmogorov_survival((en + 0.12 + 0.11 / en) * d))
}

fn kolmogorov_survival(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * (k as f64 * x).powi(2)).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Weighted least-squares line `y = a + b x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_stderr: f64,
    pub residuals: Vec<f64>,
}

pub fn weighted_line_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<LineFit> {
    if x.len() < 2 {
        return Err(Error::InsufficientData("a line fit needs at least two points".into()));
    }
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - xm).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("line fit needs distinct abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| b * (a - xm) * (c - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, c)| c - intercept - slope * a).collect();
    Ok(LineFit { intercept, slope, slope_stderr: (1.0 / sxx).sqrt(), residuals })
}
