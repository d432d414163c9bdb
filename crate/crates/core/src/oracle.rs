//! Independent numerical evaluation of the raw expected-profit expressions.
//!
//! Nothing here reuses the closed-form functionals of [`crate::hedging`]:
//! every expectation is integrated from the densities directly, so the two
//! modules can be checked against each other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{DemandDistribution, PriceDistribution, UNBOUNDED_TAIL};
use crate::error::{Error, Result};
use crate::hedging::{CallTerms, DrTerms, ForwardTerms, Instrument, MarketParams};
use crate::quadrature::integrate_pieces;
use crate::solve::golden_max;

/// Relative accuracy requested from every quadrature in this module.
pub const QUAD_REL_TOL: f64 = 1e-12;
/// Number of grid points used by [`numeric_argmax`] before refinement.
pub const ARGMAX_GRID: usize = 513;
/// Samples per Monte Carlo chunk; each chunk owns one generator stream.
pub const MC_CHUNK: usize = 4096;
/// Finite-difference step for gradients and Hessians, as a fraction of
/// each axis scale.
pub const FD_STEP: f64 = 1e-4;

/// How demand below `d_min` is treated once a reward shifts the law down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrShift {
    /// `d(r) = max(d − h, d_min)`: shifted mass piles up at `d_min`.
    #[default]
    AtMinimum,
    /// `d(r) = max(d − h, 0)`.
    AtZero,
}

impl DrShift {
    fn floor(self, d_min: f64) -> f64 {
        match self {
            DrShift::AtMinimum => d_min,
            DrShift::AtZero => 0.0,
        }
    }
}

/// Demand-side integrals by quadrature of the density.
struct DemandQuad<'a> {
    dist: &'a (dyn DemandDistribution + Sync),
    lo: f64,
    hi: f64,
    breaks: Vec<f64>,
    tol: f64,
}

impl<'a> DemandQuad<'a> {
    fn new(dist: &'a (dyn DemandDistribution + Sync)) -> Self {
        let (lo, hi) = dist.support();
        let hi = if hi.is_finite() {
            hi
        } else {
            dist.quantile(1.0 - UNBOUNDED_TAIL)
        };
        let scale = lo.abs().max(hi.abs()).max(1.0);
        Self {
            dist,
            lo,
            hi,
            breaks: dist.breakpoints(),
            tol: QUAD_REL_TOL * scale,
        }
    }

    fn integrate<F: Fn(f64) -> f64>(&self, g: F, a: f64, b: f64, extra: &[f64]) -> f64 {
        let a = a.max(self.lo);
        let b = b.min(self.hi);
        if b <= a {
            return 0.0;
        }
        let mut breaks = self.breaks.clone();
        breaks.extend_from_slice(extra);
        integrate_pieces(|x| g(x) * self.dist.density(x), a, b, &breaks, self.tol)
    }

    fn mass(&self, a: f64, b: f64) -> f64 {
        self.integrate(|_| 1.0, a, b, &[])
    }

    fn mean(&self) -> f64 {
        self.integrate(|x| x, self.lo, self.hi, &[])
    }

    /// `E[(d − t)₊]`.
    fn excess(&self, t: f64) -> f64 {
        self.integrate(|x| x - t, t, self.hi, &[t])
    }

    /// `E[(d(r) − t)₊]` for `t ≥ 0` under a shift of `h`.
    fn shifted_excess(&self, h: f64, t: f64, shift: DrShift) -> f64 {
        let floor = shift.floor(self.lo);
        let cut = floor + h;
        let above = self.integrate(|x| (x - h - t).max(0.0), cut, self.hi, &[cut, h + t]);
        let piled = (floor - t).max(0.0) * self.mass(self.lo, cut);
        above + piled
    }

    /// `E[d(r)]` under a shift of `h`.
    fn shifted_mean(&self, h: f64, shift: DrShift) -> f64 {
        self.shifted_excess(h, 0.0, shift)
    }
}

/// `E[min(λ_s, λ̄_C)] = ∫₀^{λ̄_C} y g(y) dy + λ̄_C (1 − G(λ̄_C))`.
fn expected_capped_price(price: &dyn PriceDistribution, strike: f64) -> f64 {
    if strike <= 0.0 {
        return 0.0;
    }
    let tol = QUAD_REL_TOL * strike.max(1.0) * strike.max(1.0);
    let below = integrate_pieces(
        |y| y * price.density(y),
        0.0,
        strike,
        &price.breakpoints(),
        tol,
    );
    below + strike * (1.0 - price.cdf(strike))
}

fn check_decision(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be >= 0, got {x}")))
    }
}

/// Expectation of the forward-contract profit at volume `q`.
pub fn expected_profit_forward(q: f64, params: &MarketParams, terms: &ForwardTerms) -> Result<f64> {
    check_decision(q, "forward volume")?;
    let quad = DemandQuad::new(&params.demand);
    let lf = params.lambda_f;
    let covered = quad.integrate(|x| x, quad.lo, q, &[q]);
    let over = 1.0 - params.demand.cdf(q);
    Ok(
        -q * terms.price
            + lf * covered
            + lf * q * over
            + (lf - params.mean_spot()) * quad.excess(q),
    )
}

/// Expectation of the call-option profit at volume `q`.
pub fn expected_profit_call(q: f64, params: &MarketParams, terms: &CallTerms) -> Result<f64> {
    check_decision(q, "call volume")?;
    let quad = DemandQuad::new(&params.demand);
    let capped = expected_capped_price(&params.price, terms.strike);
    let covered = quad.integrate(|x| x, quad.lo, q, &[q]);
    let over = 1.0 - params.demand.cdf(q);
    Ok(params.lambda_f * quad.mean()
        - terms.premium * q
        - capped * covered
        - capped * q * over
        - params.mean_spot() * quad.excess(q))
}

/// Expectation of the demand-response profit at reward `r`.
pub fn expected_profit_dr(
    r: f64,
    params: &MarketParams,
    terms: &DrTerms,
    shift: DrShift,
) -> Result<f64> {
    check_decision(r, "reward")?;
    let quad = DemandQuad::new(&params.demand);
    let served = quad.shifted_mean(terms.shift(r), shift);
    Ok((params.lambda_f - params.mean_spot()) * served - r)
}

/// Expectation of the profit for any instrument at its decision variable.
pub fn expected_profit(
    decision: f64,
    params: &MarketParams,
    instrument: &Instrument,
    shift: DrShift,
) -> Result<f64> {
    match instrument {
        Instrument::Forward(t) => expected_profit_forward(decision, params, t),
        Instrument::Call(t) => expected_profit_call(decision, params, t),
        Instrument::DemandResponse(t) => expected_profit_dr(decision, params, t, shift),
    }
}

/// Natural search range `[0, hi]` for an instrument's decision variable:
/// `d_max` for volumes and `d_max / α` for rewards.
pub fn decision_range(params: &MarketParams, instrument: &Instrument) -> (f64, f64) {
    let (_, hi) = params.demand.support();
    let hi = if hi.is_finite() {
        hi
    } else {
        params.demand.quantile(1.0 - UNBOUNDED_TAIL)
    };
    match instrument {
        Instrument::DemandResponse(t) => (0.0, hi / t.alpha_elastic),
        _ => (0.0, hi),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Lower,
    Upper,
}

/// Sampled objective with its refined maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveCurve {
    pub decision_grid: Vec<f64>,
    pub profit_values: Vec<f64>,
    pub argmax: f64,
    pub max_value: f64,
    /// Set when the maximum sits on a bracket endpoint.
    pub endpoint: Option<Endpoint>,
}

/// Grid search over `[lo, hi]` followed by golden-section refinement of the
/// best cell.
pub fn numeric_argmax<F>(objective: F, lo: f64, hi: f64) -> Result<ObjectiveCurve>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid(format!(
            "argmax bracket [{lo}, {hi}] is empty"
        )));
    }
    let n = ARGMAX_GRID;
    let step = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect();
    let values: Vec<f64> = grid.par_iter().map(|&x| objective(x)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        log::debug!("objective not finite at {}", grid[i]);
        return Err(Error::NonFinite("objective value"));
    }
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v > values[b] { i } else { b });
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(n - 1)];
    let x_tol = 1e-10 * (hi - lo);
    let (mut argmax, mut max_value) = golden_max(&objective, a, b, x_tol);
    if values[best] > max_value {
        argmax = grid[best];
        max_value = values[best];
    }
    let endpoint = if argmax - lo <= 1e-6 * (hi - lo) {
        Some(Endpoint::Lower)
    } else if hi - argmax <= 1e-6 * (hi - lo) {
        Some(Endpoint::Upper)
    } else {
        None
    };
    Ok(ObjectiveCurve {
        decision_grid: grid,
        profit_values: values,
        argmax,
        max_value,
        endpoint,
    })
}

/// Maximizes the quadrature objective of `instrument` over its
/// [`decision_range`].
pub fn oracle_optimum(
    params: &MarketParams,
    instrument: &Instrument,
    shift: DrShift,
) -> Result<ObjectiveCurve> {
    let (lo, hi) = decision_range(params, instrument);
    // decisions are validated up front, so the objective cannot fail
    numeric_argmax(
        |x| expected_profit(x, params, instrument, shift).unwrap_or(f64::NAN),
        lo,
        hi,
    )
}

/// Sample mean of realized profit and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[derive(Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    const EMPTY: Moments = Moments {
        n: 0.0,
        mean: 0.0,
        m2: 0.0,
    };

    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if other.n == 0.0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n / n,
            m2: self.m2 + other.m2 + delta * delta * self.n * other.n / n,
        }
    }
}

/// Realized profit for one `(d, λ_s)` draw.
pub fn realized_profit(
    hedge: Option<&Instrument>,
    decision: f64,
    params: &MarketParams,
    shift: DrShift,
    d: f64,
    spot: f64,
) -> f64 {
    let lf = params.lambda_f;
    match hedge {
        None => (lf - spot) * d,
        Some(Instrument::Forward(t)) => {
            lf * d - t.price * decision - spot * (d - decision).max(0.0)
        }
        Some(Instrument::Call(t)) => {
            lf * d
                - t.premium * decision
                - spot.min(t.strike) * d.min(decision)
                - spot * (d - decision).max(0.0)
        }
        Some(Instrument::DemandResponse(t)) => {
            let floor = shift.floor(params.demand.support().0);
            let served = (d - t.shift(decision)).max(floor);
            (lf - spot) * served - decision
        }
    }
}

/// Monte Carlo estimate of the expected profit, sampling demand and price
/// independently by inverse CDF. The sample range is cut into fixed chunks,
/// each drawing from its own ChaCha stream, so the result does not depend on
/// the number of worker threads.
pub fn monte_carlo_profit(
    hedge: Option<&Instrument>,
    decision: f64,
    params: &MarketParams,
    shift: DrShift,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::invalid("Monte Carlo needs at least one sample"));
    }
    check_decision(decision, "decision")?;
    let chunks = n.div_ceil(MC_CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = MC_CHUNK.min(n - c * MC_CHUNK);
            let mut m = Moments::EMPTY;
            for _ in 0..len {
                let d = params.demand.quantile(rng.random::<f64>());
                let spot = params.price.quantile(rng.random::<f64>());
                m.push(realized_profit(hedge, decision, params, shift, d, spot));
            }
            m
        })
        .collect();
    let total = parts.into_iter().fold(Moments::EMPTY, Moments::merge);
    let var = if n > 1 {
        total.m2 / (total.n - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean: total.mean,
        std_error: (var / total.n).sqrt(),
        samples: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaddlePair {
    ForwardCall,
    ForwardDr,
    CallDr,
}

impl SaddlePair {
    pub fn axes(&self) -> [&'static str; 2] {
        match self {
            SaddlePair::ForwardCall => ["forward_volume", "call_volume"],
            SaddlePair::ForwardDr => ["forward_volume", "reward"],
            SaddlePair::CallDr => ["call_volume", "reward"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Saddle,
    Max,
    Min,
    Degenerate,
    NoInteriorStationaryPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub point: [f64; 2],
    pub value: f64,
    pub hessian: [[f64; 2]; 2],
    pub det: f64,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleReport {
    pub pair: SaddlePair,
    pub axes: [String; 2],
    /// Upper edge of the search rectangle `[0, hi₀] × [0, hi₁]`.
    pub upper: [f64; 2],
    /// Overall verdict: `Max` if any interior maximum was found, otherwise
    /// the class of the first stationary point.
    pub classification: Classification,
    pub stationary_points: Vec<StationaryPoint>,
    /// Best grid cell of the surface, with its value.
    pub grid_max: [f64; 3],
}

struct Surface<'a> {
    pair: SaddlePair,
    params: &'a MarketParams,
    quad: DemandQuad<'a>,
    mean_d: f64,
    fwd: ForwardTerms,
    call: CallTerms,
    dr: DrTerms,
    capped: f64,
    shift: DrShift,
}

impl Surface<'_> {
    /// Expected two-instrument profit.
    fn value(&self, x: f64, y: f64) -> f64 {
        let lf = self.params.lambda_f;
        let spot = self.params.mean_spot();
        let option_value = spot - self.capped;
        match self.pair {
            SaddlePair::ForwardCall => {
                lf * self.mean_d
                    - self.fwd.price * x
                    - self.call.premium * y
                    - self.capped * self.quad.excess(x)
                    - option_value * self.quad.excess(x + y)
            }
            SaddlePair::ForwardDr => {
                let h = self.dr.shift(y);
                lf * self.quad.shifted_mean(h, self.shift)
                    - self.fwd.price * x
                    - spot * self.quad.shifted_excess(h, x, self.shift)
                    - y
            }
            SaddlePair::CallDr => {
                let h = self.dr.shift(y);
                (lf - self.capped) * self.quad.shifted_mean(h, self.shift)
                    - option_value * self.quad.shifted_excess(h, x, self.shift)
                    - self.call.premium * x
                    - y
            }
        }
    }
}

/// Evaluates the expected profit of a two-instrument portfolio.
pub fn pairwise_profit(
    pair: SaddlePair,
    point: [f64; 2],
    params: &MarketParams,
    fwd: &ForwardTerms,
    call: &CallTerms,
    dr: &DrTerms,
    shift: DrShift,
) -> Result<f64> {
    check_decision(point[0], "first decision")?;
    check_decision(point[1], "second decision")?;
    Ok(surface(pair, params, fwd, call, dr, shift).value(point[0], point[1]))
}

fn surface<'a>(
    pair: SaddlePair,
    params: &'a MarketParams,
    fwd: &ForwardTerms,
    call: &CallTerms,
    dr: &DrTerms,
    shift: DrShift,
) -> Surface<'a> {
    let quad = DemandQuad::new(&params.demand);
    let mean_d = quad.mean();
    Surface {
        pair,
        params,
        quad,
        mean_d,
        fwd: *fwd,
        call: *call,
        dr: *dr,
        capped: expected_capped_price(&params.price, call.strike),
        shift,
    }
}

/// Stationary-point analysis of a two-instrument surface for uniform demand.
pub fn pairwise_saddle_check(
    pair: SaddlePair,
    params: &MarketParams,
    fwd: &ForwardTerms,
    call: &CallTerms,
    dr: &DrTerms,
) -> Result<SaddleReport> {
    if params.demand.as_uniform().is_none() {
        return Err(Error::NotUniform("pairwise saddle check"));
    }
    saddle_scan(pair, params, fwd, call, dr, DrShift::AtMinimum)
}

const SCAN_GRID: usize = 33;
const NEWTON_ITERS: usize = 60;

/// Locates interior stationary points of a two-instrument surface for any
/// demand law and classifies each by its finite-difference Hessian.
pub fn saddle_scan(
    pair: SaddlePair,
    params: &MarketParams,
    fwd: &ForwardTerms,
    call: &CallTerms,
    dr: &DrTerms,
    shift: DrShift,
) -> Result<SaddleReport> {
    let s = surface(pair, params, fwd, call, dr, shift);
    let d_hi = s.quad.hi;
    let upper = match pair {
        SaddlePair::ForwardCall => [d_hi, d_hi],
        _ => [d_hi, d_hi / dr.alpha_elastic],
    };
    let axes = pair.axes().map(str::to_owned);

    // work in unit coordinates so both axes share one step size
    let f = |u: f64, v: f64| s.value(u * upper[0], v * upper[1]);
    let nodes: Vec<(usize, usize)> = (0..SCAN_GRID)
        .flat_map(|i| (0..SCAN_GRID).map(move |j| (i, j)))
        .collect();
    let at = |k: usize| k as f64 / (SCAN_GRID - 1) as f64;
    let values: Vec<f64> = nodes.par_iter().map(|&(i, j)| f(at(i), at(j))).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (k, v)| if *v > values[b] { k } else { b });
    let (bi, bj) = nodes[best];
    let grid_max = [at(bi) * upper[0], at(bj) * upper[1], values[best]];

    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let (lo, hi) = params.demand.support();
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        return Ok(SaddleReport {
            pair,
            axes,
            upper,
            classification: Classification::Degenerate,
            stationary_points: Vec::new(),
            grid_max,
        });
    }

    let h = FD_STEP;
    let grad = |u: f64, v: f64| {
        [
            (f(u + h, v) - f(u - h, v)) / (2.0 * h),
            (f(u, v + h) - f(u, v - h)) / (2.0 * h),
        ]
    };
    let hess = |u: f64, v: f64| {
        let c = f(u, v);
        let fuu = (f(u + h, v) - 2.0 * c + f(u - h, v)) / (h * h);
        let fvv = (f(u, v + h) - 2.0 * c + f(u, v - h)) / (h * h);
        let fuv =
            (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4.0 * h * h);
        [[fuu, fuv], [fuv, fvv]]
    };

    // seeds: interior grid nodes where the gradient norm is a local minimum
    let inner: Vec<(usize, usize)> = nodes
        .iter()
        .copied()
        .filter(|&(i, j)| i > 0 && j > 0 && i < SCAN_GRID - 1 && j < SCAN_GRID - 1)
        .collect();
    let norms: Vec<f64> = inner
        .par_iter()
        .map(|&(i, j)| {
            let g = grad(at(i), at(j));
            g[0].hypot(g[1])
        })
        .collect();
    let norm_at = |i: usize, j: usize| -> f64 {
        inner
            .iter()
            .position(|&p| p == (i, j))
            .map(|k| norms[k])
            .unwrap_or(f64::INFINITY)
    };
    let mut seeds: Vec<(f64, usize, usize)> = inner
        .iter()
        .zip(&norms)
        .filter(|(&(i, j), &n)| {
            (-1i64..=1).all(|di| {
                (-1i64..=1).all(|dj| {
                    (di == 0 && dj == 0)
                        || norm_at((i as i64 + di) as usize, (j as i64 + dj) as usize) >= n
                })
            })
        })
        .map(|(&(i, j), &n)| (n, i, j))
        .collect();
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    seeds.truncate(8);

    let grad_tol = 1e-7 * scale;
    let margin = 2.0 * h;
    let mut found: Vec<StationaryPoint> = Vec::new();
    for &(_, i, j) in &seeds {
        let (mut u, mut v) = (at(i), at(j));
        let mut converged = false;
        for _ in 0..NEWTON_ITERS {
            let g = grad(u, v);
            if g[0].hypot(g[1]) <= grad_tol {
                converged = true;
                break;
            }
            let hm = hess(u, v);
            let det = hm[0][0] * hm[1][1] - hm[0][1] * hm[1][0];
            if det.abs() <= f64::EPSILON * scale * scale {
                break;
            }
            let du = (hm[1][1] * g[0] - hm[0][1] * g[1]) / det;
            let dv = (hm[0][0] * g[1] - hm[1][0] * g[0]) / det;
            u -= du;
            v -= dv;
            if !(u > margin && v > margin && u < 1.0 - margin && v < 1.0 - margin) {
                break;
            }
        }
        if !converged {
            continue;
        }
        let point = [u * upper[0], v * upper[1]];
        let dup = found.iter().any(|p| {
            ((p.point[0] - point[0]) / upper[0]).abs() < 1e-4
                && ((p.point[1] - point[1]) / upper[1]).abs() < 1e-4
        });
        if dup {
            continue;
        }
        let hu = hess(u, v);
        let hessian = [
            [
                hu[0][0] / (upper[0] * upper[0]),
                hu[0][1] / (upper[0] * upper[1]),
            ],
            [
                hu[1][0] / (upper[0] * upper[1]),
                hu[1][1] / (upper[1] * upper[1]),
            ],
        ];
        let det = hessian[0][0] * hessian[1][1] - hessian[0][1] * hessian[1][0];
        let det_unit = hu[0][0] * hu[1][1] - hu[0][1] * hu[1][0];
        let classification = classify(hu, det_unit, scale);
        found.push(StationaryPoint {
            point,
            value: f(u, v),
            hessian,
            det,
            classification,
        });
    }

    let classification = if found
        .iter()
        .any(|p| p.classification == Classification::Max)
    {
        Classification::Max
    } else {
        found
            .first()
            .map(|p| p.classification)
            .unwrap_or(Classification::NoInteriorStationaryPoint)
    };
    Ok(SaddleReport {
        pair,
        axes,
        upper,
        classification,
        stationary_points: found,
        grid_max,
    })
}

/// Classifies a Hessian given in unit coordinates; entries below `1e-6`
/// of the surface scale count as zero.
fn classify(h: [[f64; 2]; 2], det: f64, scale: f64) -> Classification {
    let tol = 1e-6 * scale;
    if det.abs() <= tol * tol {
        Classification::Degenerate
    } else if det < 0.0 {
        Classification::Saddle
    } else if h[0][0] + h[1][1] < 0.0 {
        Classification::Max
    } else {
        Classification::Min
    }
}
