use serde::{Deserialize, Serialize};

use super::{DemandDistribution, PriceDistribution};
use crate::error::{Error, Result};

/// Piecewise-linear CDF through the sorted distinct samples, rising from 0
/// at the smallest sample to 1 at the largest. Equivalent to a uniform
/// kernel inside each gap between neighbouring samples.
#[derive(Debug, Clone, PartialEq)]
struct Polyline {
    knots: Vec<f64>,
    heights: Vec<f64>,
}

impl Polyline {
    fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("empirical sample"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut knots = Vec::new();
        let mut heights = Vec::new();
        for (i, &x) in sorted.iter().enumerate() {
            // keep the last occurrence of each value: height = (#≤x − 1)/(n − 1)
            if i + 1 < n && sorted[i + 1] == x {
                continue;
            }
            knots.push(x);
            heights.push(if knots.len() == 1 {
                0.0
            } else {
                i as f64 / (n - 1) as f64
            });
        }
        if knots.len() < 2 {
            return Err(Error::invalid(
                "empirical distribution needs at least two distinct samples",
            ));
        }
        Ok(Self { knots, heights })
    }

    fn lo(&self) -> f64 {
        self.knots[0]
    }

    fn hi(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    fn segment(&self, x: f64) -> usize {
        // index i with knots[i] <= x < knots[i+1]
        self.knots
            .partition_point(|k| *k <= x)
            .saturating_sub(1)
            .min(self.knots.len() - 2)
    }

    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.knots.len() - 1).map(move |i| {
            (
                self.knots[i],
                self.knots[i + 1],
                self.heights[i + 1] - self.heights[i],
            )
        })
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo() {
            return 0.0;
        }
        if x >= self.hi() {
            return 1.0;
        }
        let i = self.segment(x);
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        self.heights[i] + (self.heights[i + 1] - self.heights[i]) * (x - a) / (b - a)
    }

    fn density(&self, x: f64) -> f64 {
        if x < self.lo() || x > self.hi() {
            return 0.0;
        }
        let i = self.segment(x);
        (self.heights[i + 1] - self.heights[i]) / (self.knots[i + 1] - self.knots[i])
    }

    fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return self.lo();
        }
        if p >= 1.0 {
            return self.hi();
        }
        let i = self
            .heights
            .partition_point(|h| *h < p)
            .clamp(1, self.knots.len() - 1);
        let (h0, h1) = (self.heights[i - 1], self.heights[i]);
        let (a, b) = (self.knots[i - 1], self.knots[i]);
        a + (b - a) * (p - h0) / (h1 - h0)
    }

    fn mean(&self) -> f64 {
        self.segments().map(|(a, b, m)| m * 0.5 * (a + b)).sum()
    }

    fn upper_partial_mean(&self, t: f64) -> f64 {
        self.segments()
            .filter(|(_, b, _)| *b > t)
            .map(|(a, b, m)| {
                let lo = a.max(t);
                m * (b - lo) / (b - a) * 0.5 * (lo + b)
            })
            .sum()
    }

    // exact integral of a piecewise-linear function
    fn integral_to(&self, lambda: f64) -> f64 {
        let mut acc = 0.0;
        for (i, (a, b, _)) in self.segments().enumerate() {
            if a >= lambda {
                break;
            }
            let end = b.min(lambda);
            acc += (end - a) * 0.5 * (self.heights[i] + self.cdf(end));
        }
        if lambda > self.hi() {
            acc += lambda - self.hi();
        }
        acc
    }
}

/// Demand law estimated from observed samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SamplesRaw", into = "SamplesRaw")]
pub struct EmpiricalDemand {
    samples: Vec<f64>,
    cdf: Polyline,
}

/// Spot-price law estimated from observed (non-negative) prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SamplesRaw", into = "SamplesRaw")]
pub struct EmpiricalPrice {
    samples: Vec<f64>,
    cdf: Polyline,
}

#[derive(Serialize, Deserialize)]
struct SamplesRaw {
    samples: Vec<f64>,
}

impl TryFrom<SamplesRaw> for EmpiricalDemand {
    type Error = Error;
    fn try_from(raw: SamplesRaw) -> Result<Self> {
        EmpiricalDemand::new(raw.samples)
    }
}

impl From<EmpiricalDemand> for SamplesRaw {
    fn from(d: EmpiricalDemand) -> Self {
        SamplesRaw { samples: d.samples }
    }
}

impl TryFrom<SamplesRaw> for EmpiricalPrice {
    type Error = Error;
    fn try_from(raw: SamplesRaw) -> Result<Self> {
        EmpiricalPrice::new(raw.samples)
    }
}

impl From<EmpiricalPrice> for SamplesRaw {
    fn from(d: EmpiricalPrice) -> Self {
        SamplesRaw { samples: d.samples }
    }
}

impl EmpiricalDemand {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|x| *x < 0.0) {
            return Err(Error::invalid("demand samples must be non-negative"));
        }
        let cdf = Polyline::from_samples(&samples)?;
        Ok(Self { samples, cdf })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

impl EmpiricalPrice {
    /// Negative prices must be removed by the caller beforehand.
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|x| *x < 0.0) {
            return Err(Error::invalid(
                "price samples must be non-negative; drop negative LMPs first",
            ));
        }
        let cdf = Polyline::from_samples(&samples)?;
        Ok(Self { samples, cdf })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub(crate) fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|x| x * factor).collect())
    }
}

impl DemandDistribution for EmpiricalDemand {
    fn density(&self, x: f64) -> f64 {
        self.cdf.density(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        self.cdf.cdf(x)
    }
    fn support(&self) -> (f64, f64) {
        (self.cdf.lo(), self.cdf.hi())
    }
    fn mean(&self) -> f64 {
        self.cdf.mean()
    }
    fn quantile(&self, p: f64) -> f64 {
        self.cdf.quantile(p)
    }
    fn upper_partial_mean(&self, t: f64) -> f64 {
        self.cdf.upper_partial_mean(t)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.cdf.knots.clone()
    }
}

impl PriceDistribution for EmpiricalPrice {
    fn density(&self, y: f64) -> f64 {
        self.cdf.density(y)
    }
    fn cdf(&self, y: f64) -> f64 {
        self.cdf.cdf(y)
    }
    fn mean(&self) -> f64 {
        self.cdf.mean()
    }
    fn quantile(&self, p: f64) -> f64 {
        self.cdf.quantile(p)
    }
    fn partial_integral(&self, lambda: f64) -> f64 {
        self.cdf.integral_to(lambda)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.cdf.knots.clone()
    }
}
