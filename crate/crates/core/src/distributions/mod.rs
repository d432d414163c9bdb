//! Demand and spot-price laws together with the integral functionals the
//! closed-form optima consume: quantiles, tail expectations, CVaR and the
//! partial price integral `∫₀^λ G(y) dy`.
//!
//! Units: demand in MWh, prices in USD/MWh.

mod empirical;
mod linexp;
mod lognormal;
mod uniform;

pub use empirical::{EmpiricalDemand, EmpiricalPrice};
pub use linexp::{solve_linexp_params, LinExpDemand};
pub use lognormal::LogNormalPrice;
pub use uniform::{UniformDemand, UniformPrice};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::solve::invert_monotone;

/// Relative bracket width used when a quantile has to be found by bisection.
pub const QUANTILE_REL_WIDTH: f64 = 1e-10;
/// Tail mass ignored when an upper integration limit is infinite.
pub const UNBOUNDED_TAIL: f64 = 1e-9;

/// Law `F` of the aggregate demand `d`.
pub trait DemandDistribution {
    fn density(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    /// `(d_min, d_max)`; `d_max` may be `f64::INFINITY`.
    fn support(&self) -> (f64, f64);
    fn mean(&self) -> f64;

    /// Inverse CDF. The default bisects the CDF over the support.
    fn quantile(&self, p: f64) -> f64 {
        let (lo, hi) = self.support();
        if p <= 0.0 {
            return lo;
        }
        let hi = if hi.is_finite() {
            hi
        } else {
            expand_upper(|x| self.cdf(x), lo, p)
        };
        if p >= 1.0 {
            return hi;
        }
        invert_monotone(|x| self.cdf(x), p, lo, hi, QUANTILE_REL_WIDTH)
    }

    /// `∫_t^∞ x f(x) dx` for `t` already clamped into the support.
    /// The default integrates the density numerically.
    fn upper_partial_mean(&self, t: f64) -> f64 {
        let (_, hi) = self.support();
        let upper = if hi.is_finite() {
            hi
        } else {
            self.quantile(1.0 - UNBOUNDED_TAIL)
        };
        let tol = quadrature::DEFAULT_TOL * self.mean().abs().max(1.0);
        quadrature::integrate_pieces(|x| x * self.density(x), t, upper, &self.breakpoints(), tol)
    }

    /// Points where the density is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Law `G` of the wholesale spot price `λ_s`, supported on `[0, ∞)`.
pub trait PriceDistribution {
    fn density(&self, y: f64) -> f64;
    fn cdf(&self, y: f64) -> f64;
    fn mean(&self) -> f64;
    fn quantile(&self, p: f64) -> f64;

    /// `∫₀^λ G(y) dy`; the default integrates the CDF numerically.
    fn partial_integral(&self, lambda: f64) -> f64 {
        quadrature::integrate_pieces(
            |y| self.cdf(y),
            0.0,
            lambda,
            &self.breakpoints(),
            quadrature::DEFAULT_TOL,
        )
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

fn expand_upper<F: Fn(f64) -> f64>(cdf: F, lo: f64, p: f64) -> f64 {
    let mut hi = lo.abs().max(1.0) * 2.0;
    while cdf(hi) < p && hi < f64::MAX / 4.0 {
        hi *= 2.0;
    }
    hi
}

/// `∫_t^∞ x f(x) dx`; `t` below `d_min` is clamped to `d_min`.
pub fn tail_expectation(dist: &(impl DemandDistribution + ?Sized), t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::NonFinite("tail threshold"));
    }
    let (lo, hi) = dist.support();
    if t >= hi {
        return Ok(0.0);
    }
    Ok(dist.upper_partial_mean(t.max(lo)))
}

/// `E[d | d ≥ F⁻¹(level)]`, the conditional value-at-risk of demand.
pub fn cvar(dist: &(impl DemandDistribution + ?Sized), level: f64) -> Result<f64> {
    if !level.is_finite() {
        return Err(Error::NonFinite("cvar level"));
    }
    if level >= 1.0 {
        return Err(Error::DegenerateTail(level));
    }
    if level < 0.0 {
        return Err(Error::invalid(format!("cvar level {level} is negative")));
    }
    let t = dist.quantile(level);
    Ok(tail_expectation(dist, t)? / (1.0 - level))
}

/// `∫₀^λ G(y) dy` in USD/MWh.
pub fn price_partial_integral(
    dist: &(impl PriceDistribution + ?Sized),
    lambda: f64,
) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite("partial integral limit"));
    }
    if lambda < 0.0 {
        return Err(Error::invalid(format!(
            "partial integral limit {lambda} is negative"
        )));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(dist.partial_integral(lambda))
}

/// Serializable demand law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DemandModel {
    Uniform(UniformDemand),
    #[serde(rename = "linexp")]
    LinExp(LinExpDemand),
    Empirical(EmpiricalDemand),
}

impl DemandModel {
    pub fn as_uniform(&self) -> Option<&UniformDemand> {
        match self {
            DemandModel::Uniform(u) => Some(u),
            _ => None,
        }
    }

    fn inner(&self) -> &dyn DemandDistribution {
        match self {
            DemandModel::Uniform(d) => d,
            DemandModel::LinExp(d) => d,
            DemandModel::Empirical(d) => d,
        }
    }
}

impl From<UniformDemand> for DemandModel {
    fn from(d: UniformDemand) -> Self {
        DemandModel::Uniform(d)
    }
}

impl From<LinExpDemand> for DemandModel {
    fn from(d: LinExpDemand) -> Self {
        DemandModel::LinExp(d)
    }
}

impl From<EmpiricalDemand> for DemandModel {
    fn from(d: EmpiricalDemand) -> Self {
        DemandModel::Empirical(d)
    }
}

impl DemandDistribution for DemandModel {
    fn density(&self, x: f64) -> f64 {
        self.inner().density(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        self.inner().cdf(x)
    }
    fn support(&self) -> (f64, f64) {
        self.inner().support()
    }
    fn mean(&self) -> f64 {
        self.inner().mean()
    }
    fn quantile(&self, p: f64) -> f64 {
        self.inner().quantile(p)
    }
    fn upper_partial_mean(&self, t: f64) -> f64 {
        self.inner().upper_partial_mean(t)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner().breakpoints()
    }
}

/// Serializable spot-price law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriceModel {
    Uniform(UniformPrice),
    #[serde(rename = "lognormal")]
    LogNormal(LogNormalPrice),
    Empirical(EmpiricalPrice),
}

impl PriceModel {
    fn inner(&self) -> &dyn PriceDistribution {
        match self {
            PriceModel::Uniform(p) => p,
            PriceModel::LogNormal(p) => p,
            PriceModel::Empirical(p) => p,
        }
    }

    /// The same family rescaled so that `E[λ_s] = mean`.
    pub fn with_mean(&self, mean: f64) -> Result<PriceModel> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(Error::invalid(format!("target mean spot price {mean}")));
        }
        Ok(match self {
            PriceModel::Uniform(_) => PriceModel::Uniform(UniformPrice::new(2.0 * mean)?),
            PriceModel::LogNormal(p) => PriceModel::LogNormal(p.with_mean(mean)?),
            PriceModel::Empirical(p) => PriceModel::Empirical(p.scaled(mean / p.mean())?),
        })
    }
}

impl From<UniformPrice> for PriceModel {
    fn from(p: UniformPrice) -> Self {
        PriceModel::Uniform(p)
    }
}

impl From<LogNormalPrice> for PriceModel {
    fn from(p: LogNormalPrice) -> Self {
        PriceModel::LogNormal(p)
    }
}

impl From<EmpiricalPrice> for PriceModel {
    fn from(p: EmpiricalPrice) -> Self {
        PriceModel::Empirical(p)
    }
}

impl PriceDistribution for PriceModel {
    fn density(&self, y: f64) -> f64 {
        self.inner().density(y)
    }
    fn cdf(&self, y: f64) -> f64 {
        self.inner().cdf(y)
    }
    fn mean(&self) -> f64 {
        self.inner().mean()
    }
    fn quantile(&self, p: f64) -> f64 {
        self.inner().quantile(p)
    }
    fn partial_integral(&self, lambda: f64) -> f64 {
        self.inner().partial_integral(lambda)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner().breakpoints()
    }
}
