use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use serde::Serialize;
use serde_json::{json, Map, Value};

use hedge_core::boundaries::{boundary_surface, AxisSpec, BoundaryPair, BoundarySurface};
use hedge_core::distributions::{DemandDistribution, DemandModel, PriceModel};
use hedge_core::hedging::{self, HedgeDecision, Instrument, MarketParams};
use hedge_core::ingestion::{
    aggregate_demand, condition_on_threshold, fit_demand_density, fit_lognormal, load_lmp_csv,
    load_meter_csv, to_hourly, ThresholdRule, PEAK_HOURS,
};
use hedge_core::oracle::{self, DrShift, SaddlePair};

use crate::config::RunConfig;
use crate::failure::{core, Failure, Stage, Tag};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| anyhow!("cannot write {}: {e}", p.display()))
            .data(),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(anyhow::Error::from)
            .data(),
    }
}

fn pretty<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).data()?;
    s.push('\n');
    Ok(s)
}

fn merge(parts: &[Value]) -> Value {
    let mut out = Map::new();
    for part in parts {
        if let Value::Object(m) = part {
            out.extend(m.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
    }
    Value::Object(out)
}

pub struct FitDemandArgs<'a> {
    pub meters: &'a Path,
    pub group_size: usize,
    pub seed: u64,
    pub bins: usize,
    pub out: Option<&'a Path>,
}

pub fn fit_demand(args: FitDemandArgs) -> Result<(), Failure> {
    let loaded = core(load_meter_csv(args.meters))?;
    let samples = aggregate_demand(&loaded.records, args.group_size, &PEAK_HOURS, args.seed)
        .map_err(|e| Failure {
            stage: match e {
                hedge_core::Error::InvalidParameter(_) => Stage::Config,
                _ => Stage::Data,
            },
            error: e.into(),
        })?;
    let mwh: Vec<f64> = samples.iter().map(|s| s.aggregate_kwh / 1000.0).collect();
    let (model, report) = core(fit_demand_density(&mwh, args.bins))?;
    let model = DemandModel::from(model);
    let doc = merge(&[
        serde_json::to_value(&model).data()?,
        serde_json::to_value(&report).data()?,
        json!({
            "unit": "mwh",
            "group_size": args.group_size,
            "seed": args.seed,
            "malformed_rows": loaded.malformed,
        }),
    ]);
    emit(args.out, &pretty(&doc)?)
}

pub struct FitPricesArgs<'a> {
    pub lmp: &'a Path,
    pub xi: f64,
    pub strict: bool,
    pub out: Option<&'a Path>,
}

pub fn fit_prices(args: FitPricesArgs) -> Result<(), Failure> {
    if !args.xi.is_finite() {
        return Err(anyhow!("xi must be finite")).config();
    }
    let loaded = core(load_lmp_csv(args.lmp))?;
    let hourly = core(to_hourly(&loaded.records))?;
    let rule = if args.strict {
        ThresholdRule::Above
    } else {
        ThresholdRule::AtLeast
    };
    let selected = condition_on_threshold(&hourly.prices, args.xi, rule);
    let (model, mut report) = core(fit_lognormal(&selected))?;
    report.xi = Some(args.xi);
    let model = PriceModel::from(model);
    let doc = merge(&[
        serde_json::to_value(&model).data()?,
        serde_json::to_value(&report).data()?,
        json!({
            "unit": "usd_per_mwh",
            "threshold_rule": rule,
            "hours": hourly.prices.len(),
            "dropped_hours": hourly.dropped,
            "malformed_rows": loaded.malformed,
        }),
    ]);
    emit(args.out, &pretty(&doc)?)
}

#[derive(Serialize)]
struct DecisionRow {
    #[serde(skip)]
    instrument: &'static str,
    #[serde(flatten)]
    decision: HedgeDecision,
}

#[derive(Serialize)]
struct CvarRow {
    instrument: &'static str,
    level: Option<f64>,
    profit: Option<f64>,
}

#[derive(Serialize)]
struct ValidationRow {
    instrument: &'static str,
    dr_shift: Option<DrShift>,
    oracle_argmax: f64,
    oracle_value: f64,
    /// `|decision − oracle argmax|` over the decision range.
    decision_delta: f64,
    /// `|profit − oracle value|` over `max(|profit|, 1)`.
    profit_delta: f64,
    mc_mean: f64,
    mc_std_error: f64,
    mc_samples: usize,
}

#[derive(Serialize)]
struct ResultEnvelope<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    base_profit: f64,
    decisions: Vec<DecisionRow>,
    best: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cvar: Option<Vec<CvarRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    validation: Option<Vec<ValidationRow>>,
}

/// Shift model under which the closed-form reward is the exact optimum.
fn comparable_shift(market: &MarketParams) -> DrShift {
    if market.demand.support().0 > 0.0 {
        DrShift::AtZero
    } else {
        DrShift::AtMinimum
    }
}

fn validate(
    cfg: &RunConfig,
    inst: &Instrument,
    d: &HedgeDecision,
) -> Result<ValidationRow, Failure> {
    let market = &cfg.market;
    let shift = comparable_shift(market);
    let curve = core(oracle::oracle_optimum(market, inst, shift))?;
    let (_, scale) = oracle::decision_range(market, inst);
    let mc = core(oracle::monte_carlo_profit(
        Some(inst),
        d.decision,
        market,
        shift,
        cfg.mc_samples,
        cfg.seed,
    ))?;
    Ok(ValidationRow {
        instrument: inst.name(),
        dr_shift: matches!(inst, Instrument::DemandResponse(_)).then_some(shift),
        oracle_argmax: curve.argmax,
        oracle_value: curve.max_value,
        decision_delta: (d.decision - curve.argmax).abs() / scale,
        profit_delta: (d.expected_profit - curve.max_value).abs()
            / d.expected_profit.abs().max(1.0),
        mc_mean: mc.mean,
        mc_std_error: mc.std_error,
        mc_samples: mc.samples,
    })
}

pub fn optimize(cfg: &RunConfig, with_validation: bool, with_cvar: bool) -> Result<(), Failure> {
    let market = &cfg.market;
    let instruments = cfg.instruments();
    let decisions: Vec<DecisionRow> = instruments
        .iter()
        .map(|i| DecisionRow {
            instrument: i.name(),
            decision: hedging::optimal(market, i),
        })
        .collect();
    let best = decisions
        .iter()
        .fold(None::<&DecisionRow>, |b, d| match b {
            Some(b) if b.decision.expected_profit >= d.decision.expected_profit => Some(b),
            _ => Some(d),
        })
        .map(|d| d.instrument)
        .unwrap_or("none");
    let cvar = if with_cvar {
        let mut rows = Vec::new();
        for i in &instruments {
            let level = hedging::cvar_level(market, i);
            let profit = match level {
                Some(_) => Some(core(hedging::profit_via_cvar(market, i))?),
                None => None,
            };
            rows.push(CvarRow {
                instrument: i.name(),
                level,
                profit,
            });
        }
        Some(rows)
    } else {
        None
    };
    let validation = if with_validation {
        Some(
            instruments
                .iter()
                .zip(&decisions)
                .map(|(i, d)| validate(cfg, i, &d.decision))
                .collect::<Result<Vec<_>, _>>()?,
        )
    } else {
        None
    };
    let envelope = ResultEnvelope {
        tool: "lse-hedge",
        version: VERSION,
        config: cfg,
        base_profit: hedging::base_profit(market),
        decisions,
        best,
        cvar,
        validation,
    };
    emit(cfg.out.as_deref(), &pretty(&envelope)?)
}

/// Parses `name:lo:hi:steps`.
pub fn parse_axis(spec: &str) -> Result<AxisSpec, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [name, lo, hi, steps] = parts[..] else {
        return Err(anyhow!("axis `{spec}`: expected name:lo:hi:steps")).config();
    };
    let axis = hedge_core::boundaries::Axis::from_name(name)
        .ok_or_else(|| anyhow!("unknown axis name `{name}`"))
        .config()?;
    let num = |s: &str| -> Result<f64, Failure> {
        s.parse::<f64>()
            .map_err(|_| anyhow!("axis `{spec}`: `{s}` is not a number"))
            .config()
    };
    let steps: usize = steps
        .parse()
        .map_err(|_| anyhow!("axis `{spec}`: `{steps}` is not a grid size"))
        .config()?;
    Ok(AxisSpec {
        axis,
        lo: num(lo)?,
        hi: num(hi)?,
        steps,
    })
}

fn surface_csv(s: &BoundarySurface) -> String {
    let mut out = String::from("axis1,axis2,boundary_value,marker");
    if s.lower_bound.is_some() {
        out.push_str(",lower_bound");
    }
    out.push('\n');
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for (i, x) in s.axis1_grid.iter().enumerate() {
        for (j, y) in s.axis2_grid.iter().enumerate() {
            let cell = s.cells[i][j];
            out.push_str(&format!(
                "{x},{y},{},{}",
                fmt(cell.value),
                cell.marker.name()
            ));
            if let Some(lb) = &s.lower_bound {
                out.push_str(&format!(",{}", fmt(lb[i][j])));
            }
            out.push('\n');
        }
    }
    out
}

pub fn boundary(
    cfg: &RunConfig,
    pair: BoundaryPair,
    axis1: AxisSpec,
    axis2: AxisSpec,
) -> Result<(), Failure> {
    let out: PathBuf = cfg
        .out
        .clone()
        .ok_or_else(|| anyhow!("boundary needs an output path (--out or `out` in the config)"))
        .config()?;
    for spec in [&axis1, &axis2] {
        if !pair.grid_axes().contains(&spec.axis) {
            let allowed: Vec<&str> = pair.grid_axes().iter().map(|a| a.name()).collect();
            return Err(anyhow!(
                "axis `{}` is not valid for {:?}; use one of {}",
                spec.axis.name(),
                pair,
                allowed.join(", ")
            ))
            .config();
        }
    }
    let scenario = cfg.scenario().config()?;
    let surface = boundary_surface(pair, axis1, axis2, &scenario).config()?;
    emit(Some(&out), &surface_csv(&surface))?;
    let sidecar = json!({
        "tool": "lse-hedge",
        "version": VERSION,
        "pair": pair,
        "sides": pair.sides(),
        "axis1": { "name": axis1.axis.name(), "lo": axis1.lo, "hi": axis1.hi, "steps": axis1.steps },
        "axis2": { "name": axis2.axis.name(), "lo": axis2.lo, "hi": axis2.hi, "steps": axis2.steps },
        "boundary_value": surface.reported.name(),
        "lower_bound": surface.lower_bound.as_ref().map(|_| "dr_profitability_elasticity"),
        "units": {
            "prices": "usd_per_mwh",
            "elasticity": "mwh_per_usd",
        },
        "config": cfg,
    });
    emit(Some(&out.with_extension("json")), &pretty(&sidecar)?)
}

pub fn saddle(cfg: &RunConfig, pair: SaddlePair) -> Result<(), Failure> {
    if cfg.market.demand.as_uniform().is_none() {
        return Err(anyhow!(
            "saddle analysis is defined for uniform demand only; configure demand.kind = \"uniform\""
        ))
        .config();
    }
    let s = cfg.scenario().config()?;
    let report = core(oracle::pairwise_saddle_check(
        pair, &s.market, &s.forward, &s.call, &s.dr,
    ))?;
    emit(cfg.out.as_deref(), &pretty(&report)?)
}
