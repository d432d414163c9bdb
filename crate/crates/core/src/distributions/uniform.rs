use serde::{Deserialize, Serialize};

use super::{DemandDistribution, PriceDistribution};
use crate::error::{Error, Result};

/// Demand uniform on `[d_min, d_max]`.
///
/// `d_min == d_max` is accepted and describes a point mass (perfect
/// information about demand).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UniformDemandRaw")]
pub struct UniformDemand {
    pub d_min: f64,
    pub d_max: f64,
}

#[derive(Deserialize)]
struct UniformDemandRaw {
    d_min: f64,
    d_max: f64,
}

impl TryFrom<UniformDemandRaw> for UniformDemand {
    type Error = Error;
    fn try_from(raw: UniformDemandRaw) -> Result<Self> {
        UniformDemand::new(raw.d_min, raw.d_max)
    }
}

impl UniformDemand {
    pub fn new(d_min: f64, d_max: f64) -> Result<Self> {
        if !(d_min.is_finite() && d_max.is_finite()) {
            return Err(Error::NonFinite("uniform demand bounds"));
        }
        if d_min < 0.0 || d_max < d_min {
            return Err(Error::invalid(format!(
                "uniform demand needs 0 <= d_min <= d_max, got [{d_min}, {d_max}]"
            )));
        }
        Ok(Self { d_min, d_max })
    }

    pub fn width(&self) -> f64 {
        self.d_max - self.d_min
    }

    pub fn is_point_mass(&self) -> bool {
        self.d_max == self.d_min
    }

    /// Standard deviation `(d_max - d_min) / (2√3)`.
    pub fn std_dev(&self) -> f64 {
        self.width() / (2.0 * 3f64.sqrt())
    }
}

impl DemandDistribution for UniformDemand {
    fn density(&self, x: f64) -> f64 {
        if self.is_point_mass() {
            if x == self.d_min {
                f64::INFINITY
            } else {
                0.0
            }
        } else if x >= self.d_min && x <= self.d_max {
            1.0 / self.width()
        } else {
            0.0
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x < self.d_min {
            0.0
        } else if x >= self.d_max {
            1.0
        } else {
            (x - self.d_min) / self.width()
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.d_min, self.d_max)
    }

    fn mean(&self) -> f64 {
        0.5 * (self.d_min + self.d_max)
    }

    fn quantile(&self, p: f64) -> f64 {
        self.d_min + self.width() * p.clamp(0.0, 1.0)
    }

    fn upper_partial_mean(&self, t: f64) -> f64 {
        if self.is_point_mass() {
            return if t <= self.d_min { self.d_min } else { 0.0 };
        }
        let t = t.clamp(self.d_min, self.d_max);
        (self.d_max - t) * (self.d_max + t) / (2.0 * self.width())
    }
}

/// Spot price uniform on `[0, s_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UniformPriceRaw")]
pub struct UniformPrice {
    pub s_max: f64,
}

#[derive(Deserialize)]
struct UniformPriceRaw {
    s_max: f64,
}

impl TryFrom<UniformPriceRaw> for UniformPrice {
    type Error = Error;
    fn try_from(raw: UniformPriceRaw) -> Result<Self> {
        UniformPrice::new(raw.s_max)
    }
}

impl UniformPrice {
    pub fn new(s_max: f64) -> Result<Self> {
        if !(s_max.is_finite() && s_max > 0.0) {
            return Err(Error::invalid(format!(
                "uniform price needs s_max > 0, got {s_max}"
            )));
        }
        Ok(Self { s_max })
    }
}

impl PriceDistribution for UniformPrice {
    fn density(&self, y: f64) -> f64 {
        if (0.0..=self.s_max).contains(&y) {
            1.0 / self.s_max
        } else {
            0.0
        }
    }

    fn cdf(&self, y: f64) -> f64 {
        (y / self.s_max).clamp(0.0, 1.0)
    }

    fn mean(&self) -> f64 {
        0.5 * self.s_max
    }

    fn quantile(&self, p: f64) -> f64 {
        self.s_max * p.clamp(0.0, 1.0)
    }

    fn partial_integral(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            0.0
        } else if lambda <= self.s_max {
            lambda * lambda / (2.0 * self.s_max)
        } else {
            lambda - 0.5 * self.s_max
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.s_max]
    }
}
