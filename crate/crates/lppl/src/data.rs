//! Price-series ingestion, trading-day indexing, window slicing and seeded
//! synthetic series generation.
//!
//! The time axis used everywhere downstream is the trading-day index: the
//! row position of an observation in the loaded series. Calendar dates are
//! carried as metadata only, so weekends and holidays do not distort
//! distances to the critical time.

use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::calibrate::FitWindow;
use crate::error::{Error, Result};
use crate::model::{self, PhaseParams, EPS_T};

/// First calendar date assigned to generated synthetic series.
const SYNTH_BASE_DATE: &str = "2000-01-03";

/// Immutable time-indexed observations: calendar dates (metadata), the
/// original prices, and their logs. The trading-day index of observation
/// `i` is `i` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    price: Vec<f64>,
    log_price: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series from date/price pairs, validating positivity and
    /// strict date ordering.
    pub fn from_prices(dates: Vec<NaiveDate>, price: Vec<f64>) -> Result<Self> {
        if dates.len() != price.len() {
            return Err(Error::InvalidParameter("dates and prices differ in length".into()));
        }
        if dates.len() < 2 {
            return Err(Error::InvalidParameter("a series needs at least 2 observations".into()));
        }
        for w in dates.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::DuplicateDate(w[1].to_string()));
            }
        }
        let mut log_price = Vec::with_capacity(price.len());
        for &p in &price {
            if !(p > 0.0) {
                return Err(Error::InvalidParameter(format!("non-positive price {p}")));
            }
            let lp = p.ln();
            if !lp.is_finite() {
                return Err(Error::NonFinite("log price"));
            }
            log_price.push(lp);
        }
        Ok(Self { dates, price, log_price })
    }

    /// Builds a series from bare prices, one per trading day, attaching
    /// synthetic consecutive calendar dates as metadata.
    pub fn from_daily_prices(price: Vec<f64>) -> Result<Self> {
        let base = NaiveDate::parse_from_str(SYNTH_BASE_DATE, "%Y-%m-%d").expect("valid base date");
        let dates = (0..price.len()).map(|i| base + chrono::Days::new(i as u64)).collect();
        Self::from_prices(dates, price)
    }

    pub fn len(&self) -> usize {
        self.log_price.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_price.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.price
    }

    pub fn log_prices(&self) -> &[f64] {
        &self.log_price
    }

    /// Trading-day index of the first observation on or after `date`.
    pub fn first_index_at_or_after(&self, date: NaiveDate) -> Option<usize> {
        self.dates.iter().position(|&d| d >= date)
    }

    /// Trading-day index of the last observation on or before `date`.
    pub fn last_index_at_or_before(&self, date: NaiveDate) -> Option<usize> {
        self.dates.iter().rposition(|&d| d <= date)
    }

    /// Serializes to the `date,price` CSV dialect. Prices are written in
    /// shortest round-trip form so that loading the output reproduces the
    /// series exactly.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(self.len() * 24);
        out.push_str("date,price\n");
        for (date, price) in self.dates.iter().zip(&self.price) {
            let _ = writeln!(out, "{date},{price}");
        }
        out
    }
}

/// Parses a `date,price` CSV document. An optional header row is detected
/// by a non-numeric second field. Rows may arrive unsorted and are ordered
/// by date; duplicate dates and non-positive prices are rejected with the
/// offending location.
pub fn load_csv_str(content: &str) -> Result<PriceSeries> {
    let mut rows: Vec<(NaiveDate, f64, usize)> = Vec::new();
    for (idx, raw_line) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.is_empty() {
            return Err(Error::Parse { line: line_no, message: "empty line".into() });
        }
        let mut fields = line.split(',');
        let (date_field, price_field) = match (fields.next(), fields.next(), fields.next()) {
            (Some(d), Some(p), None) => (d, p),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected exactly two comma-separated fields".into(),
                })
            }
        };

        let price: f64 = match price_field.parse() {
            Ok(p) => p,
            Err(_) if idx == 0 => continue, // header row
            Err(_) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("invalid price {price_field:?}"),
                })
            }
        };
        if !price.is_finite() {
            return Err(Error::Parse { line: line_no, message: format!("non-finite price {price}") });
        }
        if price <= 0.0 {
            return Err(Error::NonPositivePrice { line: line_no, price });
        }

        let date = NaiveDate::parse_from_str(date_field, "%Y-%m-%d").map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid ISO-8601 date {date_field:?}"),
        })?;
        rows.push((date, price, line_no));
    }

    if rows.len() < 2 {
        return Err(Error::Parse {
            line: rows.len() + 1,
            message: "a series needs at least 2 data rows".into(),
        });
    }

    rows.sort_by_key(|&(date, _, _)| date);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateDate(w[0].0.to_string()));
    }

    let dates = rows.iter().map(|&(d, _, _)| d).collect();
    let prices = rows.iter().map(|&(_, p, _)| p).collect();
    PriceSeries::from_prices(dates, prices)
}

/// Loads the CSV dialect of [`load_csv_str`] from a file.
pub fn load_csv(path: impl AsRef<Path>) -> Result<PriceSeries> {
    let content = std::fs::read_to_string(path)?;
    load_csv_str(&content)
}

/// Returns the inclusive index bounds of the sub-series between two
/// calendar dates. Dates not present in the series snap inward to the
/// nearest contained date; an empty result after snapping is an error.
pub fn slice_window(series: &PriceSeries, t1: NaiveDate, t2: NaiveDate) -> Result<FitWindow> {
    if t1 > t2 {
        return Err(Error::EmptyWindow(format!("{t1} is after {t2}")));
    }
    let start = series
        .first_index_at_or_after(t1)
        .ok_or_else(|| Error::EmptyWindow(format!("no observation on or after {t1}")))?;
    let end = series
        .last_index_at_or_before(t2)
        .ok_or_else(|| Error::EmptyWindow(format!("no observation on or before {t2}")))?;
    if start > end {
        return Err(Error::EmptyWindow(format!("no observations between {t1} and {t2}")));
    }
    Ok(FitWindow::new(start, end))
}

/// Specification of a synthetic series: generating truth in phase form,
/// length, additive Gaussian log-price noise, and the generator seed.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub params: PhaseParams,
    pub n_points: usize,
    pub noise_sigma: f64,
    pub rng_seed: u64,
}

/// Generates `log_price[i] = model(i) + sigma * z_i` for `i = 0..n_points`
/// with standard normal `z` from the seeded portable generator. The
/// critical time must lie beyond the generated window.
pub fn synth_generate(spec: &SynthSpec) -> Result<PriceSeries> {
    if spec.n_points < 2 {
        return Err(Error::InvalidParameter("n_points must be at least 2".into()));
    }
    if !(spec.noise_sigma >= 0.0) {
        return Err(Error::InvalidParameter("noise_sigma must be nonnegative".into()));
    }
    let last = (spec.n_points - 1) as f64;
    if !(spec.params.t_c - last >= EPS_T) {
        return Err(Error::BeyondCriticalTime { t: last, t_c: spec.params.t_c });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let base = NaiveDate::parse_from_str(SYNTH_BASE_DATE, "%Y-%m-%d").expect("valid base date");

    let mut dates = Vec::with_capacity(spec.n_points);
    let mut prices = Vec::with_capacity(spec.n_points);
    for i in 0..spec.n_points {
        let t = i as f64;
        let mut lp = model::eval_lppl_phase(&spec.params, t)?;
        if spec.noise_sigma > 0.0 {
            let z: f64 = StandardNormal.sample(&mut rng);
            lp += spec.noise_sigma * z;
        }
        dates.push(base + chrono::Days::new(i as u64));
        prices.push(lp.exp());
    }
    PriceSeries::from_prices(dates, prices)
}
