//! Raw smart-meter and LMP data: CSV loading, aggregation into group
//! demand samples, hourly price conversion, threshold conditioning and the
//! density fits.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use chrono::{NaiveDateTime, Timelike};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{DemandDistribution, LinExpDemand, LogNormalPrice};
use crate::error::{Error, Result};
use crate::solve::golden_max;

/// Share of malformed data rows above which a file is rejected.
pub const MAX_MALFORMED_SHARE: f64 = 0.01;
/// Hourly prices need at least this many 5-minute intervals.
pub const MIN_INTERVALS: usize = 9;
/// Minimum sample count for either density fit.
pub const MIN_FIT_SAMPLES: usize = 30;
/// Afternoon peak hours (hour-beginning), 4–5 pm and 5–6 pm.
pub const PEAK_HOURS: [u32; 2] = [16, 17];

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeterReading {
    /// Start of the metered hour, local civil time.
    pub timestamp: NaiveDateTime,
    pub meter_id: String,
    pub kwh: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmpRecord {
    pub timestamp: NaiveDateTime,
    /// USD/MWh; negative values are kept at load time.
    pub price: f64,
}

/// Parsed rows plus the number of rows that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub records: Vec<T>,
    pub malformed: usize,
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))
}

fn parse_timestamp(raw: &str, minute_step: u32) -> Option<NaiveDateTime> {
    let ts = NaiveDateTime::parse_from_str(raw.trim(), TIMESTAMP_FORMAT).ok()?;
    (ts.minute() % minute_step == 0).then_some(ts)
}

/// Reads a headed CSV, turning each row into `T` with `parse` and counting
/// the rows it rejects. The caller applies [`check_malformed`].
fn read_rows<R, T, F>(reader: R, columns: &[&str], parse: F) -> Result<Loaded<T>>
where
    R: Read,
    F: Fn(&[&str]) -> Option<T>,
{
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let idx = columns
        .iter()
        .map(|c| column_index(&headers, c))
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    let mut malformed = 0usize;
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(_) => {
                malformed += 1;
                continue;
            }
        };
        let fields: Vec<&str> = idx.iter().map(|&i| row.get(i).unwrap_or("")).collect();
        match parse(&fields) {
            Some(t) => records.push(t),
            None => malformed += 1,
        }
    }
    Ok(Loaded { records, malformed })
}

fn check_malformed<T>(loaded: &Loaded<T>, what: &str) -> Result<()> {
    let malformed = loaded.malformed;
    let total = loaded.records.len() + malformed;
    if total == 0 {
        return Err(Error::Data(format!("{what} file has no data rows")));
    }
    if malformed as f64 > MAX_MALFORMED_SHARE * total as f64 {
        return Err(Error::Data(format!(
            "{malformed} of {total} {what} rows are malformed (limit {}%)",
            MAX_MALFORMED_SHARE * 100.0
        )));
    }
    if malformed > 0 {
        log::warn!("skipped {malformed} malformed {what} rows out of {total}");
    }
    Ok(())
}

/// Loads `timestamp,meter_id,kwh` rows, sorted by time then meter.
pub fn load_meter_csv(path: impl AsRef<Path>) -> Result<Loaded<MeterReading>> {
    read_meter_csv(std::fs::File::open(path)?)
}

pub fn read_meter_csv<R: Read>(reader: R) -> Result<Loaded<MeterReading>> {
    let mut loaded = read_rows(reader, &["timestamp", "meter_id", "kwh"], |f| {
        let timestamp = parse_timestamp(f[0], 60)?;
        let kwh: f64 = f[2].parse().ok()?;
        if f[1].is_empty() || !kwh.is_finite() || kwh < 0.0 {
            return None;
        }
        Some(MeterReading {
            timestamp,
            meter_id: f[1].to_owned(),
            kwh,
        })
    })?;
    loaded
        .records
        .sort_by(|a, b| (a.timestamp, &a.meter_id).cmp(&(b.timestamp, &b.meter_id)));
    check_malformed(&loaded, "meter")?;
    Ok(loaded)
}

/// Loads `timestamp,price_usd_mwh` rows at 5-minute marks, sorted by time.
/// Repeated timestamps keep the first row and count the rest as malformed.
pub fn load_lmp_csv(path: impl AsRef<Path>) -> Result<Loaded<LmpRecord>> {
    read_lmp_csv(std::fs::File::open(path)?)
}

pub fn read_lmp_csv<R: Read>(reader: R) -> Result<Loaded<LmpRecord>> {
    let mut loaded = read_rows(reader, &["timestamp", "price_usd_mwh"], |f| {
        let timestamp = parse_timestamp(f[0], 5)?;
        let price: f64 = f[1].parse().ok()?;
        price.is_finite().then_some(LmpRecord { timestamp, price })
    })?;
    loaded.records.sort_by_key(|r| r.timestamp);
    let before = loaded.records.len();
    loaded.records.dedup_by_key(|r| r.timestamp);
    loaded.malformed += before - loaded.records.len();
    check_malformed(&loaded, "LMP")?;
    Ok(loaded)
}

/// Summed consumption of one meter group in one hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyDemandSample {
    pub group: usize,
    pub timestamp: NaiveDateTime,
    /// Hour-beginning of the window, e.g. 16 for 4–5 pm.
    pub hour_window: u32,
    pub group_size: usize,
    pub aggregate_kwh: f64,
}

/// Splits the meters into disjoint seeded-random groups of `group_size`
/// (leftover meters are dropped) and sums each group's consumption over
/// every hour in `hours` for which all of its members reported.
pub fn aggregate_demand(
    readings: &[MeterReading],
    group_size: usize,
    hours: &[u32],
    seed: u64,
) -> Result<Vec<HourlyDemandSample>> {
    if group_size == 0 {
        return Err(Error::invalid("group size must be at least 1"));
    }
    let meters: BTreeSet<&str> = readings.iter().map(|r| r.meter_id.as_str()).collect();
    if meters.len() < group_size {
        return Err(Error::Data(format!(
            "group size {group_size} exceeds the {} meters available",
            meters.len()
        )));
    }
    let mut order: Vec<&str> = meters.into_iter().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let group_of: BTreeMap<&str, usize> = order
        .chunks_exact(group_size)
        .enumerate()
        .flat_map(|(g, ids)| ids.iter().map(move |id| (*id, g)))
        .collect();

    let mut sorted: Vec<&MeterReading> = readings.iter().collect();
    sorted.sort_by(|a, b| (a.timestamp, &a.meter_id).cmp(&(b.timestamp, &b.meter_id)));
    let mut cells: BTreeMap<(usize, NaiveDateTime), (f64, BTreeSet<&str>)> = BTreeMap::new();
    for r in sorted {
        if !hours.contains(&r.timestamp.hour()) {
            continue;
        }
        let Some(&g) = group_of.get(r.meter_id.as_str()) else {
            continue;
        };
        let cell = cells.entry((g, r.timestamp)).or_default();
        cell.0 += r.kwh;
        cell.1.insert(r.meter_id.as_str());
    }
    let mut incomplete = 0usize;
    let samples: Vec<HourlyDemandSample> = cells
        .into_iter()
        .filter_map(|((group, timestamp), (sum, members))| {
            if members.len() < group_size {
                incomplete += 1;
                return None;
            }
            Some(HourlyDemandSample {
                group,
                timestamp,
                hour_window: timestamp.hour(),
                group_size,
                aggregate_kwh: sum,
            })
        })
        .collect();
    if incomplete > 0 {
        log::warn!("dropped {incomplete} group-hours with missing members");
    }
    Ok(samples)
}

/// Fit diagnostics for the linear-exponential demand density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandFitReport {
    pub c: f64,
    pub a: f64,
    pub gamma: f64,
    pub d_min: f64,
    pub d_max: f64,
    /// Sum of squared differences between the fitted and empirical CDF.
    pub sse: f64,
    pub samples: usize,
    pub bins: usize,
    /// Root-mean-square gap between the histogram and the fitted density.
    pub histogram_rmse: f64,
}

/// Fit diagnostics for the log-normal price density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceFitReport {
    pub mu_log: f64,
    pub sigma_log: f64,
    /// Conditioning threshold, when the prices were conditioned.
    pub xi: Option<f64>,
    pub log_likelihood: f64,
    pub samples: usize,
    /// Non-positive prices removed before fitting.
    pub discarded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FitReport {
    Demand(DemandFitReport),
    Price(PriceFitReport),
}

// c·(d_max − d_min) scanned on a log grid before the golden-section refinement
const SHAPE_GRID: usize = 64;
const SHAPE_MIN: f64 = 1e-3;
const SHAPE_MAX: f64 = 500.0;

/// Least-squares fit of the linear-exponential CDF to the empirical CDF of
/// `samples` (MWh). `d_min`/`d_max` are the sample extremes; `bins` only
/// shapes the histogram diagnostic.
pub fn fit_demand_density(samples: &[f64], bins: usize) -> Result<(LinExpDemand, DemandFitReport)> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::Data(format!(
            "need at least {MIN_FIT_SAMPLES} demand samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Data("demand samples must be finite and >= 0".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let (d_min, d_max) = (xs[0], xs[xs.len() - 1]);
    if d_max <= d_min {
        return Err(Error::Data(format!("all demand samples equal {d_min}")));
    }
    let width = d_max - d_min;
    let last = (xs.len() - 1) as f64;
    let sse = |c: f64| -> f64 {
        match LinExpDemand::new(c, d_min, d_max) {
            Ok(d) => xs
                .iter()
                .enumerate()
                .map(|(i, &x)| (d.cdf(x) - i as f64 / last).powi(2))
                .sum(),
            Err(_) => f64::INFINITY,
        }
    };
    let (lo, hi) = (SHAPE_MIN.ln(), SHAPE_MAX.ln());
    let shape_at = |k: usize| lo + (hi - lo) * k as f64 / (SHAPE_GRID - 1) as f64;
    let scores: Vec<f64> = (0..SHAPE_GRID)
        .map(|k| sse(shape_at(k).exp() / width))
        .collect();
    let best = scores
        .iter()
        .enumerate()
        .fold(0, |b, (k, s)| if *s < scores[b] { k } else { b });
    let a = shape_at(best.saturating_sub(1));
    let b = shape_at((best + 1).min(SHAPE_GRID - 1));
    let (log_shape, neg) = golden_max(|t| -sse(t.exp() / width), a, b, 1e-10);
    let (c, objective) = if -neg <= scores[best] {
        (log_shape.exp() / width, -neg)
    } else {
        (shape_at(best).exp() / width, scores[best])
    };
    let fitted = LinExpDemand::new(c, d_min, d_max)?;
    let bins = bins.max(1);
    let report = DemandFitReport {
        c,
        a: fitted.a,
        gamma: fitted.gamma,
        d_min,
        d_max,
        sse: objective,
        samples: xs.len(),
        bins,
        histogram_rmse: histogram_rmse(&xs, &fitted, bins),
    };
    Ok((fitted, report))
}

fn histogram_rmse(sorted: &[f64], fitted: &LinExpDemand, bins: usize) -> f64 {
    let (lo, hi) = (fitted.d_min, fitted.d_max);
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in sorted {
        let k = (((x - lo) / w) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = sorted.len() as f64;
    let sq: f64 = counts
        .iter()
        .enumerate()
        .map(|(k, &cnt)| {
            let left = lo + w * k as f64;
            let model = (fitted.cdf(left + w) - fitted.cdf(left)) / w;
            (cnt as f64 / (n * w) - model).powi(2)
        })
        .sum();
    (sq / bins as f64).sqrt()
}

/// Mean price of one clock hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HourlyPrice {
    pub hour: NaiveDateTime,
    pub price: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HourlySeries {
    pub prices: Vec<HourlyPrice>,
    /// Hours dropped for having fewer than [`MIN_INTERVALS`] intervals.
    pub dropped: usize,
}

/// Averages 5-minute prices into clock hours, keeping hours with at least
/// [`MIN_INTERVALS`] of their 12 intervals.
pub fn to_hourly(records: &[LmpRecord]) -> Result<HourlySeries> {
    if records.is_empty() {
        return Err(Error::Data("no LMP records".into()));
    }
    let mut hours: BTreeMap<NaiveDateTime, (f64, BTreeSet<u32>)> = BTreeMap::new();
    for r in records {
        let hour = r
            .timestamp
            .with_minute(0)
            .expect("minute 0 is always valid");
        let cell = hours.entry(hour).or_default();
        if cell.1.insert(r.timestamp.minute()) {
            cell.0 += r.price;
        }
    }
    let mut dropped = 0;
    let prices = hours
        .into_iter()
        .filter_map(|(hour, (sum, minutes))| {
            if minutes.len() < MIN_INTERVALS {
                log::warn!("dropping {hour}: only {} intervals", minutes.len());
                dropped += 1;
                return None;
            }
            Some(HourlyPrice {
                hour,
                price: sum / minutes.len() as f64,
                intervals: minutes.len(),
            })
        })
        .collect();
    Ok(HourlySeries { prices, dropped })
}

/// How a predecessor price is compared with the threshold `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    /// `λ ≥ ξ`
    #[default]
    AtLeast,
    /// `λ > ξ`
    Above,
}

impl ThresholdRule {
    fn passes(self, price: f64, xi: f64) -> bool {
        match self {
            ThresholdRule::AtLeast => price >= xi,
            ThresholdRule::Above => price > xi,
        }
    }
}

/// Prices whose two immediately preceding clock hours both met the
/// threshold. A missing hour breaks the chain.
pub fn condition_on_threshold(series: &[HourlyPrice], xi: f64, rule: ThresholdRule) -> Vec<f64> {
    let hour = chrono::Duration::hours(1);
    series
        .windows(3)
        .filter(|w| {
            w[1].hour - w[0].hour == hour
                && w[2].hour - w[1].hour == hour
                && rule.passes(w[0].price, xi)
                && rule.passes(w[1].price, xi)
        })
        .map(|w| w[2].price)
        .collect()
}

/// Maximum-likelihood log-normal fit after discarding non-positive prices.
pub fn fit_lognormal(prices: &[f64]) -> Result<(LogNormalPrice, PriceFitReport)> {
    let logs: Vec<f64> = prices
        .iter()
        .filter(|p| p.is_finite() && **p > 0.0)
        .map(|p| p.ln())
        .collect();
    let discarded = prices.len() - logs.len();
    if logs.len() < MIN_FIT_SAMPLES {
        return Err(Error::Data(format!(
            "insufficient conditioned samples: {} positive prices, need {MIN_FIT_SAMPLES}",
            logs.len()
        )));
    }
    let n = logs.len() as f64;
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / n;
    let sigma = var.sqrt();
    if sigma.is_nan() || sigma <= 1e-12 * mu.abs().max(1.0) {
        return Err(Error::Data(format!(
            "prices are constant (log-mean {mu}), log-normal fit is degenerate"
        )));
    }
    let fitted = LogNormalPrice::new(mu, sigma)?;
    let log_likelihood = -logs.iter().sum::<f64>()
        - n * (sigma.ln() + 0.5 * (2.0 * std::f64::consts::PI).ln())
        - logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / (2.0 * var);
    Ok((
        fitted,
        PriceFitReport {
            mu_log: mu,
            sigma_log: sigma,
            xi: None,
            log_likelihood,
            samples: logs.len(),
            discarded,
        },
    ))
}
