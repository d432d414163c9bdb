//! Parameter values at which two instruments earn the same optimal expected
//! profit: closed forms for uniform laws and a numerical root search that
//! works with any demand and price law.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hedging::{
    base_profit, optimal_call, optimal_dr, optimal_forward, CallTerms, DrTerms, ForwardTerms,
    MarketParams,
};
use crate::solve::{safeguarded_newton, RootSearch};

/// Iteration cap of the boundary root search.
pub const MAX_ITER: usize = 100;
/// Root accepted once `|Δ| ≤ BOUNDARY_TOL·|base profit|`.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Lower end of the inverse-elasticity search, as a fraction of `E[λ_s] − λ_f`.
pub const MIN_INVERSE_ELASTICITY: f64 = 1e-9;

/// Forward-price threshold below which the forward beats the call, for
/// demand uniform on `[0, d_max]` and price uniform on `[0, 2·mean_spot]`.
pub fn forward_vs_call_closed(mean_spot: f64, strike: f64, premium: f64) -> Result<f64> {
    positive("mean spot price", mean_spot)?;
    let k = uniform_option_value(mean_spot, strike);
    let ratio = k / mean_spot;
    if ratio.is_nan() || ratio <= 0.0 {
        return Err(Error::invalid(format!(
            "option value {k} leaves no real threshold"
        )));
    }
    Ok(mean_spot - (k - premium) / ratio.sqrt())
}

/// Inverse-elasticity threshold `1/α` below which demand response beats the
/// forward contract under the same uniform laws.
pub fn dr_vs_forward_closed(mean_spot: f64, tariff: f64, forward_price: f64) -> Result<f64> {
    let margin = spot_margin(mean_spot, tariff)?;
    if forward_price > mean_spot {
        return Err(Error::invalid(format!(
            "forward price {forward_price} must not exceed the mean spot price {mean_spot}"
        )));
    }
    Ok(margin * (1.0 - (mean_spot / margin).sqrt() * (1.0 - forward_price / mean_spot)))
}

/// Which grouping of the option value `L` to use in [`dr_vs_call_closed_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptionValueForm {
    /// `E − λ̄_C + λ̄_C²/(4E)`, the call option value under uniform prices.
    #[default]
    Corrected,
    /// `(E − λ̄_C + λ̄_C²)/(4E)`.
    Printed,
}

/// Inverse-elasticity threshold below which demand response beats the call.
pub fn dr_vs_call_closed(mean_spot: f64, tariff: f64, strike: f64, premium: f64) -> Result<f64> {
    dr_vs_call_closed_with(
        mean_spot,
        tariff,
        strike,
        premium,
        OptionValueForm::Corrected,
    )
}

pub fn dr_vs_call_closed_with(
    mean_spot: f64,
    tariff: f64,
    strike: f64,
    premium: f64,
    form: OptionValueForm,
) -> Result<f64> {
    let margin = spot_margin(mean_spot, tariff)?;
    let l = match form {
        OptionValueForm::Corrected => uniform_option_value(mean_spot, strike),
        OptionValueForm::Printed => (mean_spot - strike + strike * strike) / (4.0 * mean_spot),
    };
    if l <= premium {
        return Err(Error::invalid(format!(
            "option value {l} does not exceed the premium {premium}"
        )));
    }
    Ok(margin * (1.0 - (l / margin).sqrt() * (1.0 - premium / l)))
}

fn uniform_option_value(mean_spot: f64, strike: f64) -> f64 {
    let capped = strike.min(2.0 * mean_spot);
    mean_spot - capped + capped * capped / (4.0 * mean_spot)
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be > 0, got {v}")))
    }
}

fn spot_margin(mean_spot: f64, tariff: f64) -> Result<f64> {
    positive("mean spot price", mean_spot)?;
    if mean_spot.is_nan() || mean_spot <= tariff {
        return Err(Error::invalid(format!(
            "mean spot price {mean_spot} must exceed the tariff {tariff}"
        )));
    }
    Ok(mean_spot - tariff)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPair {
    ForwardVsCall,
    DrVsForward,
    DrVsCall,
}

impl BoundaryPair {
    /// Names of the two compared instruments, first one first.
    pub fn sides(&self) -> [&'static str; 2] {
        match self {
            BoundaryPair::ForwardVsCall => ["forward", "call"],
            BoundaryPair::DrVsForward => ["demand_response", "forward"],
            BoundaryPair::DrVsCall => ["demand_response", "call"],
        }
    }

    /// The parameter solved for on a surface.
    pub fn free_axis(&self) -> Axis {
        match self {
            BoundaryPair::ForwardVsCall => Axis::ForwardPrice,
            _ => Axis::InverseElasticity,
        }
    }

    /// Axes that may span a surface for this pair.
    pub fn grid_axes(&self) -> &'static [Axis] {
        match self {
            BoundaryPair::ForwardVsCall => {
                &[Axis::Strike, Axis::Premium, Axis::MeanSpot, Axis::Tariff]
            }
            BoundaryPair::DrVsForward => &[Axis::ForwardPrice, Axis::MeanSpot, Axis::Tariff],
            BoundaryPair::DrVsCall => &[Axis::Strike, Axis::Premium, Axis::MeanSpot, Axis::Tariff],
        }
    }
}

/// A scalar parameter of a [`Scenario`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    ForwardPrice,
    Strike,
    Premium,
    MeanSpot,
    Tariff,
    Elasticity,
    InverseElasticity,
}

impl Axis {
    pub const ALL: [Axis; 7] = [
        Axis::ForwardPrice,
        Axis::Strike,
        Axis::Premium,
        Axis::MeanSpot,
        Axis::Tariff,
        Axis::Elasticity,
        Axis::InverseElasticity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Axis::ForwardPrice => "forward_price",
            Axis::Strike => "strike",
            Axis::Premium => "premium",
            Axis::MeanSpot => "mean_spot",
            Axis::Tariff => "tariff",
            Axis::Elasticity => "elasticity",
            Axis::InverseElasticity => "inverse_elasticity",
        }
    }

    pub fn from_name(name: &str) -> Option<Axis> {
        Axis::ALL.into_iter().find(|a| a.name() == name)
    }
}

/// Market plus the terms of every instrument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub market: MarketParams,
    pub forward: ForwardTerms,
    pub call: CallTerms,
    pub dr: DrTerms,
}

impl Scenario {
    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::ForwardPrice => self.forward.price,
            Axis::Strike => self.call.strike,
            Axis::Premium => self.call.premium,
            Axis::MeanSpot => self.market.mean_spot(),
            Axis::Tariff => self.market.lambda_f,
            Axis::Elasticity => self.dr.alpha_elastic,
            Axis::InverseElasticity => 1.0 / self.dr.alpha_elastic,
        }
    }

    /// Copy of the scenario with one parameter replaced.
    pub fn with(&self, axis: Axis, value: f64) -> Result<Scenario> {
        let mut s = self.clone();
        match axis {
            Axis::ForwardPrice => s.forward = ForwardTerms::new(value)?,
            Axis::Strike => s.call = CallTerms::new(value, s.call.premium)?,
            Axis::Premium => s.call = CallTerms::new(s.call.strike, value)?,
            Axis::MeanSpot => s.market.price = s.market.price.with_mean(value)?,
            Axis::Tariff => {
                s.market =
                    MarketParams::new(value, s.market.demand.clone(), s.market.price.clone())?
            }
            Axis::Elasticity => s.dr = DrTerms::new(value)?,
            Axis::InverseElasticity => {
                positive("inverse elasticity", value)?;
                s.dr = DrTerms::new(1.0 / value)?
            }
        }
        Ok(s)
    }

    /// Optimal expected profit of the first side minus that of the second.
    pub fn profit_gap(&self, pair: BoundaryPair) -> f64 {
        let m = &self.market;
        let fwd = || optimal_forward(m, &self.forward).expected_profit;
        let call = || optimal_call(m, &self.call).expected_profit;
        let dr = || optimal_dr(m, &self.dr).expected_profit;
        match pair {
            BoundaryPair::ForwardVsCall => fwd() - call(),
            BoundaryPair::DrVsForward => dr() - fwd(),
            BoundaryPair::DrVsCall => dr() - call(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryQuery {
    pub pair: BoundaryPair,
    pub free_axis: Axis,
    pub search_interval: (f64, f64),
}

impl BoundaryQuery {
    /// Query over the pair's natural free axis: forward price on `[0, E[λ_s]]`
    /// or inverse elasticity on `(0, E[λ_s] − λ_f]`.
    pub fn natural(pair: BoundaryPair, scenario: &Scenario) -> Result<Self> {
        let spot = scenario.market.mean_spot();
        let search_interval = match pair {
            BoundaryPair::ForwardVsCall => (0.0, spot),
            _ => {
                let margin = spot_margin(spot, scenario.market.lambda_f)?;
                (margin * MIN_INVERSE_ELASTICITY, margin)
            }
        };
        Ok(Self {
            pair,
            free_axis: pair.free_axis(),
            search_interval,
        })
    }
}

/// Value of the free parameter at which the two optimal expected profits
/// agree, found by safeguarded Newton iterations.
pub fn numeric_boundary(query: &BoundaryQuery, template: &Scenario) -> Result<f64> {
    let (lo, hi) = query.search_interval;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid(format!(
            "search interval [{lo}, {hi}] is empty"
        )));
    }
    // validate both ends before handing an infallible closure to the solver
    template.with(query.free_axis, lo)?;
    template.with(query.free_axis, hi)?;
    let gap = |x: f64| {
        template
            .with(query.free_axis, x.clamp(lo, hi))
            .map(|s| s.profit_gap(query.pair))
            .unwrap_or(f64::NAN)
    };
    let scale = base_profit(&template.market).abs();
    let tol = BOUNDARY_TOL * if scale > 0.0 { scale } else { 1.0 };
    match safeguarded_newton(gap, lo, hi, tol, MAX_ITER) {
        RootSearch::Root(x) => Ok(x),
        RootSearch::SameSign { f_lo, .. } => {
            let [first, second] = query.pair.sides();
            Err(Error::NoSignChange {
                lo,
                hi,
                preferred: if f_lo > 0.0 { first } else { second },
            })
        }
        RootSearch::NoConvergence => Err(Error::NoConvergence(MAX_ITER)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl AxisSpec {
    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == n {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Marker {
    Crossing,
    /// The first instrument of the pair wins on the whole search interval.
    AlwaysFirst,
    /// The second instrument of the pair wins on the whole search interval.
    AlwaysSecond,
    NoConvergence,
    /// The cell's parameters are outside the model's domain.
    Invalid,
}

impl Marker {
    pub fn name(&self) -> &'static str {
        match self {
            Marker::Crossing => "crossing",
            Marker::AlwaysFirst => "always_first",
            Marker::AlwaysSecond => "always_second",
            Marker::NoConvergence => "no_convergence",
            Marker::Invalid => "invalid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCell {
    /// Boundary in the reported unit: forward price, or elasticity `α` for
    /// the demand-response pairs. Absent unless the marker is `Crossing`.
    pub value: Option<f64>,
    pub marker: Marker,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySurface {
    pub pair: BoundaryPair,
    /// Reported quantity: `forward_price` or `elasticity`.
    pub reported: Axis,
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    pub axis1_grid: Vec<f64>,
    pub axis2_grid: Vec<f64>,
    /// `cells[i][j]` belongs to `(axis1_grid[i], axis2_grid[j])`.
    pub cells: Vec<Vec<BoundaryCell>>,
    /// Demand-response profitability bound `(E[λ_s] − λ_f)⁻¹` per cell, only
    /// for `DrVsForward`; absent where the spot price does not exceed the tariff.
    pub lower_bound: Option<Vec<Vec<Option<f64>>>>,
}

/// Evaluates [`numeric_boundary`] independently on every cell of a grid.
pub fn boundary_surface(
    pair: BoundaryPair,
    axis1: AxisSpec,
    axis2: AxisSpec,
    template: &Scenario,
) -> Result<BoundarySurface> {
    for spec in [&axis1, &axis2] {
        if spec.steps == 0 {
            return Err(Error::invalid(format!(
                "axis {} has no grid points",
                spec.axis.name()
            )));
        }
        if !(spec.lo.is_finite() && spec.hi.is_finite() && spec.lo <= spec.hi) {
            return Err(Error::invalid(format!(
                "axis {} range is invalid",
                spec.axis.name()
            )));
        }
        if !pair.grid_axes().contains(&spec.axis) {
            return Err(Error::invalid(format!(
                "axis {} cannot span a {:?} surface",
                spec.axis.name(),
                pair
            )));
        }
    }
    if axis1.axis == axis2.axis {
        return Err(Error::invalid("surface axes must differ"));
    }
    let g1 = axis1.grid();
    let g2 = axis2.grid();
    let points: Vec<(usize, usize)> = (0..g1.len())
        .flat_map(|i| (0..g2.len()).map(move |j| (i, j)))
        .collect();
    let flat: Vec<(BoundaryCell, Option<f64>)> = points
        .par_iter()
        .map(|&(i, j)| {
            let cell = template
                .with(axis1.axis, g1[i])
                .and_then(|s| s.with(axis2.axis, g2[j]));
            match cell {
                Ok(s) => (solve_cell(pair, &s), dr_lower_bound(&s.market)),
                Err(_) => (
                    BoundaryCell {
                        value: None,
                        marker: Marker::Invalid,
                    },
                    None,
                ),
            }
        })
        .collect();
    let mut cells = vec![Vec::with_capacity(g2.len()); g1.len()];
    let mut bounds = vec![Vec::with_capacity(g2.len()); g1.len()];
    for (&(i, _), (cell, bound)) in points.iter().zip(flat) {
        cells[i].push(cell);
        bounds[i].push(bound);
    }
    Ok(BoundarySurface {
        pair,
        reported: match pair {
            BoundaryPair::ForwardVsCall => Axis::ForwardPrice,
            _ => Axis::Elasticity,
        },
        axis1,
        axis2,
        axis1_grid: g1,
        axis2_grid: g2,
        cells,
        lower_bound: (pair == BoundaryPair::DrVsForward).then_some(bounds),
    })
}

/// `(E[λ_s] − λ_f)⁻¹`, the smallest elasticity at which demand response pays.
pub fn dr_lower_bound(market: &MarketParams) -> Option<f64> {
    let margin = market.spot_margin();
    (margin > 0.0).then(|| 1.0 / margin)
}

fn solve_cell(pair: BoundaryPair, scenario: &Scenario) -> BoundaryCell {
    let query = match BoundaryQuery::natural(pair, scenario) {
        Ok(q) => q,
        // spot price at or below the tariff: demand response never pays
        Err(_) => {
            return BoundaryCell {
                value: None,
                marker: Marker::AlwaysSecond,
            }
        }
    };
    let [first, _] = pair.sides();
    match numeric_boundary(&query, scenario) {
        Ok(x) => BoundaryCell {
            value: Some(match pair {
                BoundaryPair::ForwardVsCall => x,
                _ => 1.0 / x,
            }),
            marker: Marker::Crossing,
        },
        Err(Error::NoSignChange { preferred, .. }) => BoundaryCell {
            value: None,
            marker: if preferred == first {
                Marker::AlwaysFirst
            } else {
                Marker::AlwaysSecond
            },
        },
        Err(Error::NoConvergence(_)) => BoundaryCell {
            value: None,
            marker: Marker::NoConvergence,
        },
        Err(_) => BoundaryCell {
            value: None,
            marker: Marker::Invalid,
        },
    }
}
