use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Errors at or below this are roundoff; a sweep made only of them is degenerate.
pub const ZERO_ERROR: f64 = 1e-10;

/// Minimum `r^2` for a fit to count as asymptotic.
pub const MIN_R_SQUARED: f64 = 0.98;

/// Least-squares fit of `log e = log C + p log h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub rate: f64,
    pub coefficient: f64,
    pub r_squared: f64,
}

pub fn fit_power_law(h: &[f64], e: &[f64]) -> Result<PowerLawFit> {
    if h.len() != e.len() || h.len() < 3 {
        return domain(format!("a rate fit needs at least 3 (h, error) pairs, got {}", h.len()));
    }
    if let Some(bad) = e.iter().chain(h).find(|v| !(**v > 0.0 && v.is_finite())) {
        return domain(format!("a rate fit needs positive finite data, got {bad}"));
    }
    let n = h.len() as f64;
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let rate = sxy / sxx;
    let intercept = my - rate * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(PowerLawFit {
        rate,
        coefficient: intercept.exp(),
        r_squared,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitStatus {
    Fitted,
    /// `r^2` below [`MIN_R_SQUARED`].
    Preasymptotic,
    /// Every error is at roundoff level; no rate is fitted.
    DegenerateZeroError,
}

/// Errors of an `M`-sweep and the fitted rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub m_values: Vec<usize>,
    /// Descending with increasing `M`.
    pub h_values: Vec<f64>,
    pub errors: Vec<f64>,
    /// NaN when degenerate.
    pub fitted_rate: f64,
    pub fitted_coefficient: f64,
    pub r_squared: f64,
    pub expected_rate: Option<f64>,
    pub status: FitStatus,
    pub warnings: Vec<String>,
    /// Reference self-difference at `dt/2` and `2 M_ref`, when validated.
    #[serde(default)]
    pub reference_self_difference: Option<f64>,
}

impl ConvergenceRecord {
    pub fn from_errors(m_values: Vec<usize>, errors: Vec<f64>, expected_rate: Option<f64>) -> Result<Self> {
        let h_values: Vec<f64> = m_values.iter().map(|&m| std::f64::consts::PI / m as f64).collect();
        let mut warnings = Vec::new();
        for (w, m) in errors.windows(2).zip(m_values.windows(2)) {
            if w[1] > 1.1 * w[0] && w[1] > ZERO_ERROR {
                warnings.push(format!(
                    "error grows from {:.3e} (M = {}) to {:.3e} (M = {}) beyond the 10% allowance",
                    w[0], m[0], w[1], m[1]
                ));
            }
        }
        let (fit, status) = if errors.iter().all(|e| e.abs() <= ZERO_ERROR) {
            warnings.push("degenerate: zero error".into());
            (
                PowerLawFit {
                    rate: f64::NAN,
                    coefficient: f64::NAN,
                    r_squared: f64::NAN,
                },
                FitStatus::DegenerateZeroError,
            )
        } else {
            let fit = fit_power_law(&h_values, &errors)?;
            let status = if fit.r_squared >= MIN_R_SQUARED {
                FitStatus::Fitted
            } else {
                warnings.push(format!("preasymptotic: r^2 = {:.4}", fit.r_squared));
                FitStatus::Preasymptotic
            };
            (fit, status)
        };
        Ok(Self {
            m_values,
            h_values,
            errors,
            fitted_rate: fit.rate,
            fitted_coefficient: fit.coefficient,
            r_squared: fit.r_squared,
            expected_rate,
            status,
            warnings,
            reference_self_difference: None,
        })
    }

    pub fn is_degenerate(&self) -> bool {
        self.status == FitStatus::DegenerateZeroError
    }

    /// `fitted_rate - expected_rate`, if both exist.
    pub fn rate_deviation(&self) -> Option<f64> {
        self.expected_rate
            .filter(|_| !self.is_degenerate())
            .map(|p| self.fitted_rate - p)
    }

    /// Columns `M, h, error`.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["M", "h", "error"])?;
        for ((m, h), e) in self.m_values.iter().zip(&self.h_values).zip(&self.errors) {
            out.serialize((m, h, e))?;
        }
        out.flush()?;
        Ok(())
    }

    /// `{fitted_rate, fitted_coefficient, r_squared, expected_rate, status, warnings}`.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "fitted_rate": finite_or_null(self.fitted_rate),
            "fitted_coefficient": finite_or_null(self.fitted_coefficient),
            "r_squared": finite_or_null(self.r_squared),
            "expected_rate": self.expected_rate,
            "status": self.status,
            "warnings": self.warnings,
            "reference_self_difference": self.reference_self_difference,
        })
    }
}

fn finite_or_null(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let h: Vec<f64> = [0.4, 0.2, 0.1, 0.05].to_vec();
        let e: Vec<f64> = h.iter().map(|h| 3.0 * h.powf(1.7)).collect();
        let f = fit_power_law(&h, &e).unwrap();
        assert!((f.rate - 1.7).abs() < 1e-12);
        assert!((f.coefficient - 3.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_short_or_nonpositive_data() {
        assert!(fit_power_law(&[0.1, 0.2], &[1.0, 2.0]).is_err());
        assert!(fit_power_law(&[0.1, 0.2, 0.3], &[1.0, 0.0, 2.0]).is_err());
    }

    #[test]
    fn degenerate_and_preasymptotic_flags() {
        let r = ConvergenceRecord::from_errors(vec![8, 16, 32], vec![1e-15, 0.0, 3e-14], Some(1.0)).unwrap();
        assert!(r.is_degenerate());
        assert!(r.warnings.iter().any(|w| w == "degenerate: zero error"));
        assert!(r.rate_deviation().is_none());
        let r = ConvergenceRecord::from_errors(vec![8, 16, 32, 64], vec![1.0, 0.1, 0.5, 0.01], None).unwrap();
        assert_eq!(r.status, FitStatus::Preasymptotic);
        assert!(r.warnings.iter().any(|w| w.contains("10%")));
        let s = r.summary();
        assert!(s["fitted_rate"].is_number());
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }
}
