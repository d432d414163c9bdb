//! Regenerates the synthetic meter and LMP fixtures in `fixtures/`.
//!
//! cargo run -p hedge-core --example gen_fixtures

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::{Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const METERS: usize = 300;
const METER_DAYS: i64 = 30;
const LMP_DAYS: i64 = 60;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn meters(out: &Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_701);
    let start = NaiveDate::from_ymd_opt(2024, 7, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap();
    let scale: Vec<f64> = (0..METERS)
        .map(|_| (0.1 + 0.45 * normal(&mut rng)).exp())
        .collect();
    let mut csv = String::from("timestamp,meter_id,kwh\n");
    for day in 0..METER_DAYS {
        let heat = (0.25 * normal(&mut rng)).exp();
        for hour in 15..=17 {
            let ts = start + Duration::days(day) + Duration::hours(hour);
            let stamp = ts.format("%Y-%m-%dT%H:%M");
            let shape = 1.0 + 0.15 * (hour - 15) as f64;
            for (m, s) in scale.iter().enumerate() {
                let kwh = s * heat * shape * (0.3 * normal(&mut rng)).exp();
                writeln!(csv, "{stamp},M{m:04},{kwh:.4}").unwrap();
            }
        }
    }
    // a few corrupt rows, well under the rejection threshold
    csv.push_str("2024-07-02 16:00,M0001,1.0\n");
    csv.push_str("2024-07-03T16:00,M0002,n/a\n");
    fs::write(out.join("meters.csv"), csv).unwrap();
}

fn lmp(out: &Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let start = NaiveDate::from_ymd_opt(2024, 6, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap();
    let mut csv = String::from("timestamp,price_usd_mwh\n");
    let mut shock = 0.0;
    let mut high_run = 0;
    for h in 0..LMP_DAYS * 24 {
        let hour = (h % 24) as f64;
        shock = 0.8 * shock + 0.2 * normal(&mut rng);
        let peak = (-(hour - 17.5).powi(2) / 6.0).exp();
        let mut level = (45f64.ln() + 1.05 * peak + shock).exp();
        // post-peak oversupply crash
        if high_run >= 2 && hour >= 20.0 && rng.random::<f64>() < 0.08 {
            level = -8.0 - 10.0 * rng.random::<f64>();
        }
        high_run = if level >= 80.0 { high_run + 1 } else { 0 };
        let ts = start + Duration::hours(h);
        // one sparse hour to exercise the completeness rule
        let intervals = if h == 24 * 10 + 3 { 6 } else { 12 };
        for i in 0..intervals {
            let t = ts + Duration::minutes(5 * i);
            let p = level + 0.03 * level.abs() * normal(&mut rng);
            writeln!(csv, "{},{p:.3}", t.format("%Y-%m-%dT%H:%M")).unwrap();
        }
    }
    fs::write(out.join("lmp.csv"), csv).unwrap();
}

fn main() {
    let out = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    fs::create_dir_all(&out).unwrap();
    meters(&out);
    lmp(&out);
    println!("wrote fixtures to {}", out.display());
}
