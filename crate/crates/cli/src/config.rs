//! Run configuration: a TOML file with one block per model component.
//!
//! Every price carries a `unit` tag (`usd_per_mwh` or `usd_per_kwh`) and is
//! converted to USD/MWh on load. Demand quantities are in MWh.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use hedge_core::boundaries::Scenario;
use hedge_core::distributions::{
    DemandModel, EmpiricalDemand, EmpiricalPrice, LinExpDemand, LogNormalPrice, PriceModel,
    UniformDemand, UniformPrice,
};
use hedge_core::hedging::{CallTerms, DrTerms, ForwardTerms, Instrument, MarketParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceUnit {
    UsdPerMwh,
    UsdPerKwh,
}

impl PriceUnit {
    fn to_mwh(self) -> f64 {
        match self {
            PriceUnit::UsdPerMwh => 1.0,
            PriceUnit::UsdPerKwh => 1000.0,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Monte Carlo draws used by `optimize --validate`.
    pub mc_samples: Option<usize>,
    pub market: RawMarket,
    pub demand: RawDemand,
    pub price: RawPrice,
    pub forward: Option<RawForward>,
    pub call: Option<RawCall>,
    pub dr: Option<RawDr>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMarket {
    pub lambda_f: f64,
    pub unit: Option<PriceUnit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDemand {
    pub kind: Option<String>,
    pub model: Option<PathBuf>,
    pub d_min: Option<f64>,
    pub d_max: Option<f64>,
    pub c: Option<f64>,
    pub samples: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPrice {
    pub kind: Option<String>,
    pub model: Option<PathBuf>,
    pub unit: Option<PriceUnit>,
    pub s_max: Option<f64>,
    pub mu_log: Option<f64>,
    pub sigma_log: Option<f64>,
    pub samples: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawForward {
    pub price: f64,
    pub unit: Option<PriceUnit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCall {
    pub strike: f64,
    pub premium: f64,
    pub unit: Option<PriceUnit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDr {
    /// MWh of demand reduction per USD of reward.
    pub alpha_elastic: f64,
}

/// Validated configuration in internal units (USD/MWh, MWh).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub mc_samples: usize,
    pub market: MarketParams,
    pub forward: Option<ForwardTerms>,
    pub call: Option<CallTerms>,
    pub dr: Option<DrTerms>,
}

pub const DEFAULT_MC_SAMPLES: usize = 100_000;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let raw: RawConfig =
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_raw(raw, base)
    }

    pub fn from_raw(raw: RawConfig, base: &Path) -> Result<Self> {
        let tariff_unit = require_unit(raw.market.unit, "market.unit")?;
        let demand = demand_model(&raw.demand, base)?;
        let price = price_model(&raw.price, base)?;
        let market = MarketParams::new(raw.market.lambda_f * tariff_unit.to_mwh(), demand, price)
            .map_err(|e| anyhow!("market.lambda_f: {e}"))?;
        let forward = raw
            .forward
            .map(|f| -> Result<_> {
                let u = require_unit(f.unit, "forward.unit")?;
                ForwardTerms::new(f.price * u.to_mwh()).map_err(|e| anyhow!("forward.price: {e}"))
            })
            .transpose()?;
        let call = raw
            .call
            .map(|c| -> Result<_> {
                let u = require_unit(c.unit, "call.unit")?.to_mwh();
                CallTerms::new(c.strike * u, c.premium * u).map_err(|e| anyhow!("call: {e}"))
            })
            .transpose()?;
        let dr = raw
            .dr
            .map(|d| DrTerms::new(d.alpha_elastic).map_err(|e| anyhow!("dr.alpha_elastic: {e}")))
            .transpose()?;
        let mc_samples = raw.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES);
        if mc_samples == 0 {
            bail!("mc_samples: must be at least 1");
        }
        Ok(Self {
            seed: raw.seed.unwrap_or(0),
            out: raw.out,
            mc_samples,
            market,
            forward,
            call,
            dr,
        })
    }

    pub fn instruments(&self) -> Vec<Instrument> {
        let mut out = Vec::new();
        if let Some(f) = self.forward {
            out.push(Instrument::Forward(f));
        }
        if let Some(c) = self.call {
            out.push(Instrument::Call(c));
        }
        if let Some(d) = self.dr {
            out.push(Instrument::DemandResponse(d));
        }
        out
    }

    /// Scenario with every instrument present, for pairwise analyses.
    pub fn scenario(&self) -> Result<Scenario> {
        Ok(Scenario {
            market: self.market.clone(),
            forward: self
                .forward
                .ok_or_else(|| anyhow!("forward: block required"))?,
            call: self.call.ok_or_else(|| anyhow!("call: block required"))?,
            dr: self.dr.ok_or_else(|| anyhow!("dr: block required"))?,
        })
    }
}

fn require_unit(unit: Option<PriceUnit>, path: &str) -> Result<PriceUnit> {
    unit.ok_or_else(|| anyhow!("{path}: unit tag required (usd_per_mwh or usd_per_kwh)"))
}

fn need<T: Copy>(v: Option<T>, path: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("{path}: required"))
}

fn source<'a>(
    kind: &'a Option<String>,
    model: &Option<PathBuf>,
    block: &str,
) -> Result<Option<&'a str>> {
    match (kind, model) {
        (Some(_), Some(_)) => bail!("{block}: give either `kind` or `model`, not both"),
        (None, None) => bail!("{block}: one of `kind` or `model` is required"),
        (Some(k), None) => Ok(Some(k.as_str())),
        (None, Some(_)) => Ok(None),
    }
}

fn read_model<T: serde::de::DeserializeOwned>(path: &Path, base: &Path, block: &str) -> Result<T> {
    let full = if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    };
    let text = std::fs::read_to_string(&full)
        .with_context(|| format!("{block}.model: cannot read {}", full.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("{block}.model: invalid model file {}", full.display()))
}

fn demand_model(raw: &RawDemand, base: &Path) -> Result<DemandModel> {
    let Some(kind) = source(&raw.kind, &raw.model, "demand")? else {
        return read_model(
            raw.model.as_deref().unwrap_or(Path::new("")),
            base,
            "demand",
        );
    };
    let built = match kind {
        "uniform" => UniformDemand::new(
            need(raw.d_min, "demand.d_min")?,
            need(raw.d_max, "demand.d_max")?,
        )
        .map(DemandModel::from),
        "linexp" => LinExpDemand::new(
            need(raw.c, "demand.c")?,
            need(raw.d_min, "demand.d_min")?,
            need(raw.d_max, "demand.d_max")?,
        )
        .map(DemandModel::from),
        "empirical" => EmpiricalDemand::new(
            raw.samples
                .clone()
                .ok_or_else(|| anyhow!("demand.samples: required"))?,
        )
        .map(DemandModel::from),
        other => bail!("demand.kind: unknown kind `{other}` (uniform, linexp, empirical)"),
    };
    built.map_err(|e| anyhow!("demand: {e}"))
}

fn price_model(raw: &RawPrice, base: &Path) -> Result<PriceModel> {
    let Some(kind) = source(&raw.kind, &raw.model, "price")? else {
        if raw.unit.is_some_and(|u| u != PriceUnit::UsdPerMwh) {
            bail!("price.unit: fitted model files are in usd_per_mwh");
        }
        return read_model(raw.model.as_deref().unwrap_or(Path::new("")), base, "price");
    };
    let scale = require_unit(raw.unit, "price.unit")?.to_mwh();
    let built = match kind {
        "uniform" => {
            UniformPrice::new(need(raw.s_max, "price.s_max")? * scale).map(PriceModel::from)
        }
        "lognormal" => LogNormalPrice::new(
            need(raw.mu_log, "price.mu_log")? + scale.ln(),
            need(raw.sigma_log, "price.sigma_log")?,
        )
        .map(PriceModel::from),
        "empirical" => EmpiricalPrice::new(
            raw.samples
                .as_ref()
                .ok_or_else(|| anyhow!("price.samples: required"))?
                .iter()
                .map(|p| p * scale)
                .collect(),
        )
        .map(PriceModel::from),
        other => bail!("price.kind: unknown kind `{other}` (uniform, lognormal, empirical)"),
    };
    built.map_err(|e| anyhow!("price: {e}"))
}
