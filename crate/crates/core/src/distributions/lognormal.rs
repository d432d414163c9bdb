use serde::{Deserialize, Serialize};
use statrs::function::erf;

use super::PriceDistribution;
use crate::error::{Error, Result};

/// Log-normal spot price: `ln λ_s ~ N(mu_log, sigma_log²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LogNormalRaw")]
pub struct LogNormalPrice {
    pub mu_log: f64,
    pub sigma_log: f64,
}

#[derive(Deserialize)]
struct LogNormalRaw {
    mu_log: f64,
    sigma_log: f64,
}

impl TryFrom<LogNormalRaw> for LogNormalPrice {
    type Error = Error;
    fn try_from(raw: LogNormalRaw) -> Result<Self> {
        LogNormalPrice::new(raw.mu_log, raw.sigma_log)
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erf::erfc(-z / std::f64::consts::SQRT_2)
}

fn std_normal_quantile(p: f64) -> f64 {
    let z = -std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p);
    // one Newton step polishes erfc_inv to full precision
    let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if pdf > 0.0 {
        z - (std_normal_cdf(z) - p) / pdf
    } else {
        z
    }
}

impl LogNormalPrice {
    pub fn new(mu_log: f64, sigma_log: f64) -> Result<Self> {
        if !mu_log.is_finite() {
            return Err(Error::NonFinite("mu_log"));
        }
        if !(sigma_log.is_finite() && sigma_log > 0.0) {
            return Err(Error::invalid(format!(
                "log-normal needs sigma_log > 0, got {sigma_log}"
            )));
        }
        Ok(Self { mu_log, sigma_log })
    }

    /// Same `sigma_log`, location shifted so that the mean equals `mean`.
    pub fn with_mean(&self, mean: f64) -> Result<Self> {
        Self::new(
            mean.ln() - 0.5 * self.sigma_log * self.sigma_log,
            self.sigma_log,
        )
    }

    fn z(&self, y: f64) -> f64 {
        (y.ln() - self.mu_log) / self.sigma_log
    }
}

impl PriceDistribution for LogNormalPrice {
    fn density(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let z = self.z(y);
        (-0.5 * z * z).exp() / (y * self.sigma_log * (2.0 * std::f64::consts::PI).sqrt())
    }

    fn cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            0.0
        } else {
            std_normal_cdf(self.z(y))
        }
    }

    fn mean(&self) -> f64 {
        (self.mu_log + 0.5 * self.sigma_log * self.sigma_log).exp()
    }

    fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        (self.mu_log + self.sigma_log * std_normal_quantile(p)).exp()
    }

    // λ·G(λ) − ∫₀^λ y g(y) dy, with the partial first moment in closed form
    fn partial_integral(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        let z = self.z(lambda);
        lambda * std_normal_cdf(z) - self.mean() * std_normal_cdf(z - self.sigma_log)
    }
}
