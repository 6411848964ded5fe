//! Small statistics toolkit for the Monte Carlo estimators.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Neumaier-compensated running sum; result does not depend on how the
/// summands were produced, only on their order.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = NeumaierSum::default();
    for x in xs {
        s.add(x);
    }
    s.value()
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub dt: f64,
}

impl Estimate {
    /// Sample mean and standard error of the mean.
    pub fn from_samples(xs: &[f64], dt: f64) -> Estimate {
        let n = xs.len();
        if n == 0 {
            return Estimate { estimate: f64::NAN, stderr: f64::NAN, n, dt };
        }
        let mean = neumaier_sum(xs.iter().copied()) / n as f64;
        let var = if n > 1 { neumaier_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (n - 1) as f64 } else { 0.0 };
        Estimate { estimate: mean, stderr: (var / n as f64).sqrt(), n, dt }
    }

    /// Binomial proportion with its plug-in standard error.
    pub fn proportion(successes: usize, n: usize, dt: f64) -> Estimate {
        let p = successes as f64 / n as f64;
        Estimate { estimate: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), n, dt }
    }

    /// `|estimate - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.estimate - target).abs() / self.stderr
    }

    pub fn successes(&self) -> usize {
        (self.estimate * self.n as f64).round() as usize
    }
}

pub fn write_estimates_csv<W: std::io::Write>(mut w: W, rows: &[Estimate]) -> std::io::Result<()> {
    writeln!(w, "estimate,stderr,N,dt")?;
    for e in rows {
        writeln!(w, "{:e},{:e},{},{:e}", e.estimate, e.stderr, e.n, e.dt)?;
    }
    Ok(())
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Exact two-sided Clopper-Pearson interval at confidence `level`.
pub fn clopper_pearson(successes: usize, n: usize, level: f64) -> Result<(f64, f64)> {
    if n == 0 || successes > n {
        return Err(Error::InvalidParameter(format!("need 0 <= successes <= n, n > 0; got {successes}/{n}")));
    }
    let tail = (1.0 - level) / 2.0;
    let (k, nf) = (successes as f64, n as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        Beta::new(k, nf - k + 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?.inverse_cdf(tail)
    };
    let hi = if successes == n {
        1.0
    } else {
        Beta::new(k + 1.0, nf - k).map_err(|e| Error::InvalidParameter(e.to_string()))?.inverse_cdf(1.0 - tail)
    };
    Ok((lo, hi))
}

/// Kolmogorov-Smirnov statistic of `samples` against `cdf`; sorts in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Two-sample KS statistic; sorts both inputs.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic p-value `P(sqrt(n_eff) D > observed)` from the Kolmogorov distribution.
pub fn ks_pvalue(d: f64, n_eff: f64) -> f64 {
    let l = (n_eff.sqrt() + 0.12 + 0.11 / n_eff.sqrt()) * d;
    if l < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * l * l).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
