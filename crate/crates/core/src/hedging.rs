//! Closed-form optimal decisions and expected profits for the forward
//! contract, the call option and demand response, plus the CVaR and
//! dispersion reformulations of those optima.
//!
//! Spot price and demand are independent throughout. All prices are in
//! USD/MWh, volumes in MWh and rewards in USD.

use serde::{Deserialize, Serialize};

use crate::distributions::{
    DemandDistribution, DemandModel, PriceDistribution, PriceModel, UniformDemand,
};
use crate::error::{Error, Result};

/// Market environment seen by every optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    /// Retail tariff `λ_f`.
    pub lambda_f: f64,
    pub demand: DemandModel,
    pub price: PriceModel,
}

impl MarketParams {
    pub fn new(
        lambda_f: f64,
        demand: impl Into<DemandModel>,
        price: impl Into<PriceModel>,
    ) -> Result<Self> {
        if !(lambda_f.is_finite() && lambda_f >= 0.0) {
            return Err(Error::invalid(format!(
                "tariff must be >= 0, got {lambda_f}"
            )));
        }
        Ok(Self {
            lambda_f,
            demand: demand.into(),
            price: price.into(),
        })
    }

    pub fn mean_spot(&self) -> f64 {
        self.price.mean()
    }

    pub fn mean_demand(&self) -> f64 {
        self.demand.mean()
    }

    /// `E[λ_s] − λ_f`, the expected loss per unit served at spot.
    pub fn spot_margin(&self) -> f64 {
        self.mean_spot() - self.lambda_f
    }

    fn tail(&self, t: f64) -> f64 {
        let (lo, hi) = self.demand.support();
        if t >= hi {
            0.0
        } else {
            self.demand.upper_partial_mean(t.max(lo))
        }
    }
}

/// Forward contract at locked-in price `λ̄_F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwardTerms {
    pub price: f64,
}

/// Call option with strike `λ̄_C` and per-unit premium `P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CallTerms {
    pub strike: f64,
    pub premium: f64,
}

/// Demand response with linear shift `h(r) = α·r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrTerms {
    /// MWh of demand reduction per USD of reward.
    pub alpha_elastic: f64,
}

impl ForwardTerms {
    pub fn new(price: f64) -> Result<Self> {
        non_negative("forward price", price)?;
        Ok(Self { price })
    }
}

impl CallTerms {
    pub fn new(strike: f64, premium: f64) -> Result<Self> {
        non_negative("call strike", strike)?;
        non_negative("call premium", premium)?;
        Ok(Self { strike, premium })
    }
}

impl DrTerms {
    pub fn new(alpha_elastic: f64) -> Result<Self> {
        if !(alpha_elastic.is_finite() && alpha_elastic > 0.0) {
            return Err(Error::invalid(format!(
                "elasticity must be > 0, got {alpha_elastic}"
            )));
        }
        Ok(Self { alpha_elastic })
    }

    pub fn shift(&self, reward: f64) -> f64 {
        self.alpha_elastic * reward
    }
}

fn non_negative(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be >= 0, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instrument {
    Forward(ForwardTerms),
    Call(CallTerms),
    DemandResponse(DrTerms),
}

impl Instrument {
    pub fn name(&self) -> &'static str {
        match self {
            Instrument::Forward(_) => "forward",
            Instrument::Call(_) => "call",
            Instrument::DemandResponse(_) => "demand_response",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HedgeKind {
    None,
    Forward,
    Call,
    DemandResponse,
}

/// Optimal decision for one instrument: a volume in MWh for forward and
/// call, a reward in USD for demand response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HedgeDecision {
    pub kind: HedgeKind,
    pub decision: f64,
    pub expected_profit: f64,
}

impl HedgeDecision {
    fn none(params: &MarketParams) -> Self {
        Self {
            kind: HedgeKind::None,
            decision: 0.0,
            expected_profit: base_profit(params),
        }
    }
}

/// Unhedged expected profit `(λ_f − E[λ_s])·E[d]`.
pub fn base_profit(params: &MarketParams) -> f64 {
    (params.lambda_f - params.mean_spot()) * params.mean_demand()
}

/// Buys `F⁻¹(1 − λ̄_F/E[λ_s])` forward when the locked price is below the
/// expected spot price; otherwise stays unhedged.
pub fn optimal_forward(params: &MarketParams, terms: &ForwardTerms) -> HedgeDecision {
    let spot = params.mean_spot();
    if spot <= terms.price {
        return HedgeDecision::none(params);
    }
    let q = params.demand.quantile(1.0 - terms.price / spot);
    HedgeDecision {
        kind: HedgeKind::Forward,
        decision: q,
        expected_profit: params.lambda_f * params.mean_demand() - spot * params.tail(q),
    }
}

/// Expected cost per exercised call unit, `E[min(λ̄_C, λ_s)] = λ̄_C − ∫₀^{λ̄_C} G`,
/// and the per-unit option value `K = E[λ_s] − λ̄_C + ∫₀^{λ̄_C} G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CallEconomics {
    pub partial_integral: f64,
    pub exercise_cost: f64,
    pub option_value: f64,
}

pub fn call_economics(params: &MarketParams, terms: &CallTerms) -> CallEconomics {
    let partial_integral = if terms.strike > 0.0 {
        params.price.partial_integral(terms.strike)
    } else {
        0.0
    };
    let exercise_cost = terms.strike - partial_integral;
    CallEconomics {
        partial_integral,
        exercise_cost,
        option_value: params.mean_spot() - exercise_cost,
    }
}

/// Buys `F⁻¹(1 − P/K)` calls when the premium is below the option value `K`.
pub fn optimal_call(params: &MarketParams, terms: &CallTerms) -> HedgeDecision {
    let econ = call_economics(params, terms);
    if econ.option_value <= terms.premium {
        return HedgeDecision::none(params);
    }
    let q = params
        .demand
        .quantile(1.0 - terms.premium / econ.option_value);
    HedgeDecision {
        kind: HedgeKind::Call,
        decision: q,
        expected_profit: (params.lambda_f - econ.exercise_cost) * params.mean_demand()
            - econ.option_value * params.tail(q),
    }
}

/// Optimal demand-response reward. Requires `E[λ_s] > λ_f`; pays nothing
/// unless the elasticity clears `1/α < E[λ_s] − λ_f`.
pub fn optimal_dr(params: &MarketParams, terms: &DrTerms) -> HedgeDecision {
    let margin = params.spot_margin();
    if margin <= 0.0 {
        return HedgeDecision::none(params);
    }
    let inv_alpha = 1.0 / terms.alpha_elastic;
    if inv_alpha >= margin {
        return HedgeDecision {
            kind: HedgeKind::DemandResponse,
            decision: 0.0,
            expected_profit: -margin * params.mean_demand(),
        };
    }
    let shift = params.demand.quantile(1.0 - inv_alpha / margin);
    HedgeDecision {
        kind: HedgeKind::DemandResponse,
        decision: shift * inv_alpha,
        expected_profit: -margin * params.tail(shift),
    }
}

pub fn optimal(params: &MarketParams, instrument: &Instrument) -> HedgeDecision {
    match instrument {
        Instrument::Forward(t) => optimal_forward(params, t),
        Instrument::Call(t) => optimal_call(params, t),
        Instrument::DemandResponse(t) => optimal_dr(params, t),
    }
}

/// CVaR confidence levels at which each optimum can be rewritten; `None`
/// when the instrument is not profitable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvarLevels {
    pub forward: Option<f64>,
    pub call: Option<f64>,
    pub demand_response: Option<f64>,
}

/// Tail level at which the optimal profit is written through CVaR; `None`
/// when the instrument is not profitable.
pub fn cvar_level(params: &MarketParams, instrument: &Instrument) -> Option<f64> {
    let level = match instrument {
        Instrument::Forward(t) => 1.0 - t.price / params.mean_spot(),
        Instrument::Call(t) => 1.0 - t.premium / call_economics(params, t).option_value,
        Instrument::DemandResponse(t) => {
            let margin = params.spot_margin();
            if margin <= 0.0 {
                return None;
            }
            1.0 - 1.0 / (t.alpha_elastic * margin)
        }
    };
    (level > 0.0 && level < 1.0).then_some(level)
}

pub fn cvar_levels(
    params: &MarketParams,
    forward: &ForwardTerms,
    call: &CallTerms,
    dr: &DrTerms,
) -> CvarLevels {
    CvarLevels {
        forward: cvar_level(params, &Instrument::Forward(*forward)),
        call: cvar_level(params, &Instrument::Call(*call)),
        demand_response: cvar_level(params, &Instrument::DemandResponse(*dr)),
    }
}

/// Optimal profit written through the conditional tail expectation of demand.
pub fn profit_via_cvar(params: &MarketParams, instrument: &Instrument) -> Result<f64> {
    let level = cvar_level(params, instrument).ok_or(Error::LevelAbsent(instrument.name()))?;
    let tail = crate::distributions::cvar(&params.demand, level)?;
    let mean_d = params.mean_demand();
    Ok(match instrument {
        Instrument::Forward(t) => params.lambda_f * mean_d - t.price * tail,
        Instrument::Call(t) => {
            let econ = call_economics(params, t);
            (params.lambda_f - econ.exercise_cost) * mean_d - t.premium * tail
        }
        Instrument::DemandResponse(t) => -tail / t.alpha_elastic,
    })
}

/// Optimal profit for uniform demand written as an affine function of the
/// demand standard deviation `σ = (d_max − d_min)/(2√3)`.
pub fn profit_via_dispersion(params: &MarketParams, instrument: &Instrument) -> Result<f64> {
    let uniform: &UniformDemand = params
        .demand
        .as_uniform()
        .ok_or(Error::NotUniform("dispersion form"))?;
    let level = cvar_level(params, instrument).ok_or(Error::LevelAbsent(instrument.name()))?;
    let sigma = uniform.std_dev();
    let spread = 3f64.sqrt() * (1.0 - level * level) * sigma;
    let mean_d = uniform.mean();
    Ok(match instrument {
        Instrument::Forward(t) => {
            params.lambda_f * mean_d - t.price * uniform.d_min - params.mean_spot() * spread
        }
        Instrument::Call(t) => {
            let econ = call_economics(params, t);
            (params.lambda_f - econ.exercise_cost) * mean_d
                - t.premium * uniform.d_min
                - econ.option_value * spread
        }
        Instrument::DemandResponse(t) => {
            -uniform.d_min / t.alpha_elastic - params.spot_margin() * spread
        }
    })
}

/// Coefficient of `σ` in [`profit_via_dispersion`] with `d_min` held fixed:
/// `−√3·c·(1 − level²)` where `c` is `E[λ_s]`, `K` or `E[λ_s] − λ_f`.
pub fn dispersion_slope(params: &MarketParams, instrument: &Instrument) -> Result<f64> {
    let level = cvar_level(params, instrument).ok_or(Error::LevelAbsent(instrument.name()))?;
    let scale = match instrument {
        Instrument::Forward(_) => params.mean_spot(),
        Instrument::Call(t) => call_economics(params, t).option_value,
        Instrument::DemandResponse(_) => params.spot_margin(),
    };
    Ok(-3f64.sqrt() * scale * (1.0 - level * level))
}

/// Decision and profit when demand `d` is known in advance and the
/// instrument is used: volume `d` for forward/call, reward `d/α` for DR.
pub fn perfect_info(d: f64, params: &MarketParams, instrument: &Instrument) -> Result<(f64, f64)> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::invalid(format!(
            "known demand must be >= 0, got {d}"
        )));
    }
    Ok(match instrument {
        Instrument::Forward(t) => (d, (params.lambda_f - t.price) * d),
        Instrument::Call(t) => {
            let econ = call_economics(params, t);
            (d, (params.lambda_f - econ.exercise_cost - t.premium) * d)
        }
        Instrument::DemandResponse(t) => (d / t.alpha_elastic, -d / t.alpha_elastic),
    })
}
