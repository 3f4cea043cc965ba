use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("confidence must be in (0, 1), got {0}")]
    BadConfidence(f64),
    #[error("sample {0} is not a positive finite time")]
    BadSample(f64),
    #[error("ratio denominator must be positive, got {0}")]
    NonPositiveDenominator(f64),
}

/// Mean and confidence-interval half-width of a set of timings, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub ci_half_width: f64,
    pub n: usize,
}

impl Summary {
    pub fn new(mean: f64, ci_half_width: f64) -> Self {
        Summary {
            mean,
            ci_half_width,
            n: 0,
        }
    }

    /// `0.933s ± 0.002`
    pub fn cell_text(&self) -> String {
        format!("{:.3}s ± {:.3}", self.mean, self.ci_half_width)
    }
}

/// Student-t interval on the mean at `confidence` (0.99 for the tables),
/// using the Bessel-corrected sample standard deviation.
pub fn summarize(samples: &[f64], confidence: f64) -> Result<Summary, StatsError> {
    let n = samples.len();
    if n < 2 {
        return Err(StatsError::TooFewSamples(n));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(StatsError::BadConfidence(confidence));
    }
    if let Some(&bad) = samples.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(StatsError::BadSample(bad));
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let t = t_quantile(confidence, n - 1);
    Ok(Summary {
        mean,
        ci_half_width: t * var.sqrt() / nf.sqrt(),
        n,
    })
}

/// Two-sided critical value: the `1 - (1 - confidence) / 2` quantile of
/// Student's t with `df` degrees of freedom.
pub fn t_quantile(confidence: f64, df: usize) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1");
    dist.inverse_cdf(1.0 - (1.0 - confidence) / 2.0)
}

/// Ratio of two summaries' means, with a propagated half-width. A
/// reference cell (a row divided by itself) has no half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioCell {
    pub value: f64,
    pub ci_half_width: Option<f64>,
}

impl RatioCell {
    pub fn reference() -> Self {
        RatioCell {
            value: 1.0,
            ci_half_width: None,
        }
    }

    pub fn is_reference(&self) -> bool {
        self.ci_half_width.is_none()
    }

    /// `2.189× ± 0.009`, or `1.000×` for a reference cell.
    pub fn cell_text(&self) -> String {
        match self.ci_half_width {
            Some(ci) => format!("{:.3}× ± {:.3}", self.value, ci),
            None => format!("{:.3}×", self.value),
        }
    }
}

/// `num.mean / den.mean`. The half-width adds the relative half-widths in
/// quadrature. Dividing a summary by itself gives a reference cell.
pub fn ratio(num: &Summary, den: &Summary) -> Result<RatioCell, StatsError> {
    if den.mean.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(StatsError::NonPositiveDenominator(den.mean));
    }
    if num == den {
        return Ok(RatioCell::reference());
    }
    let value = num.mean / den.mean;
    let rel = |s: &Summary| {
        if s.mean > 0.0 {
            s.ci_half_width / s.mean
        } else {
            0.0
        }
    };
    let ci = value * (rel(num).powi(2) + rel(den).powi(2)).sqrt();
    Ok(RatioCell {
        value,
        ci_half_width: Some(ci),
    })
}
