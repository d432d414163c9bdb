use serde::{Deserialize, Serialize};

use super::DemandDistribution;
use crate::error::{Error, Result};

/// Truncated linear-exponential demand density
/// `f(x) = a (x − d_min) e^{−c x}` on `[d_min, d_max]`, with CDF
/// `F(x) = (a/c²)(c d_min − c x − 1) e^{−c x} + γ`.
///
/// `a` and `γ` are tied to `c` by `F(d_min) = 0` and `F(d_max) = 1`.
/// Internally everything is evaluated in the shifted variable
/// `y = x − d_min`, which avoids cancellation when `c·d_min` is large.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LinExpRaw", into = "LinExpRaw")]
pub struct LinExpDemand {
    pub a: f64,
    pub c: f64,
    pub gamma: f64,
    pub d_min: f64,
    pub d_max: f64,
    // a·e^{−c d_min}: density prefactor in the shifted variable
    scale: f64,
}

#[derive(Serialize, Deserialize)]
struct LinExpRaw {
    c: f64,
    d_min: f64,
    d_max: f64,
    // derived; recomputed from (c, d_min, d_max) when read back
    #[serde(default)]
    a: Option<f64>,
    #[serde(default)]
    gamma: Option<f64>,
}

impl TryFrom<LinExpRaw> for LinExpDemand {
    type Error = Error;
    fn try_from(raw: LinExpRaw) -> Result<Self> {
        LinExpDemand::new(raw.c, raw.d_min, raw.d_max)
    }
}

impl From<LinExpDemand> for LinExpRaw {
    fn from(d: LinExpDemand) -> Self {
        LinExpRaw {
            c: d.c,
            d_min: d.d_min,
            d_max: d.d_max,
            a: Some(d.a),
            gamma: Some(d.gamma),
        }
    }
}

/// `∫₀^z t^k e^{−t} dt` for small integer `k`.
pub(crate) fn lower_gamma_int(k: u32, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    let k_fact: f64 = (1..=k).map(f64::from).product();
    if z < 2.0 {
        // k! e^{−z} Σ_{j>k} z^j / j!
        let mut term: f64 = (1..=k + 1).map(|j| z / f64::from(j)).product();
        let mut sum = 0.0;
        let mut j = k + 1;
        while term > 1e-18 * sum || sum == 0.0 {
            sum += term;
            j += 1;
            term *= z / f64::from(j);
        }
        k_fact * (-z).exp() * sum
    } else {
        let mut term = 1.0;
        let mut head = 1.0;
        for j in 1..=k {
            term *= z / f64::from(j);
            head += term;
        }
        k_fact * (1.0 - (-z).exp() * head)
    }
}

fn validate(c: f64, d_min: f64, d_max: f64) -> Result<()> {
    if !(c.is_finite() && d_min.is_finite() && d_max.is_finite()) {
        return Err(Error::NonFinite("linexp parameters"));
    }
    if c <= 0.0 {
        return Err(Error::invalid(format!(
            "linexp decay c must be > 0, got {c}"
        )));
    }
    if d_min < 0.0 || d_min >= d_max {
        return Err(Error::invalid(format!(
            "linexp needs 0 <= d_min < d_max, got [{d_min}, {d_max}]"
        )));
    }
    Ok(())
}

/// Solves the two CDF boundary constraints for `(a, γ)` given the decay `c`:
/// `a = c² / (e^{−c d_min} − (1 + c(d_max − d_min)) e^{−c d_max})` and
/// `γ = (a / c²) e^{−c d_min}`.
pub fn solve_linexp_params(c: f64, d_min: f64, d_max: f64) -> Result<(f64, f64)> {
    validate(c, d_min, d_max)?;
    // the denominator equals e^{−c d_min}·γ₁(c·width), positive for c > 0
    let g1 = lower_gamma_int(1, c * (d_max - d_min));
    assert!(g1 > 0.0, "linexp normaliser must be positive");
    let a = c * c * (c * d_min).exp() / g1;
    let gamma = 1.0 / g1;
    Ok((a, gamma))
}

impl LinExpDemand {
    pub fn new(c: f64, d_min: f64, d_max: f64) -> Result<Self> {
        let (a, gamma) = solve_linexp_params(c, d_min, d_max)?;
        let scale = c * c / lower_gamma_int(1, c * (d_max - d_min));
        Ok(Self {
            a,
            c,
            gamma,
            d_min,
            d_max,
            scale,
        })
    }

    /// The CDF exactly as written in its closed form, without the shifted
    /// evaluation. Used to check the boundary constraints.
    pub fn cdf_literal(&self, x: f64) -> f64 {
        let c = self.c;
        self.a / (c * c) * (c * self.d_min - c * x - 1.0) * (-c * x).exp() + self.gamma
    }

    fn shifted(&self, x: f64) -> f64 {
        (x - self.d_min).clamp(0.0, self.d_max - self.d_min)
    }
}

impl DemandDistribution for LinExpDemand {
    fn density(&self, x: f64) -> f64 {
        if x < self.d_min || x > self.d_max {
            return 0.0;
        }
        let y = x - self.d_min;
        self.scale * y * (-self.c * y).exp()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.d_min {
            return 0.0;
        }
        if x >= self.d_max {
            return 1.0;
        }
        let c = self.c;
        (self.scale / (c * c) * lower_gamma_int(1, c * self.shifted(x))).min(1.0)
    }

    fn support(&self) -> (f64, f64) {
        (self.d_min, self.d_max)
    }

    fn mean(&self) -> f64 {
        self.upper_partial_mean(self.d_min)
    }

    // ∫_t^{d_max} x f(x) dx = scale·∫ (y + d_min)·y e^{−c y} dy
    fn upper_partial_mean(&self, t: f64) -> f64 {
        let c = self.c;
        let w = self.d_max - self.d_min;
        let y = self.shifted(t);
        let second = (lower_gamma_int(2, c * w) - lower_gamma_int(2, c * y)) / (c * c * c);
        let first = (lower_gamma_int(1, c * w) - lower_gamma_int(1, c * y)) / (c * c);
        self.scale * (second + self.d_min * first)
    }
}
