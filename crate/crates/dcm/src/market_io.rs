//! CSV price series and rate schedules.
//!
//! One point per line under a fixed header: `date,price` for prices and
//! `date,rate` for rates. Dates are ISO-8601; lines are numbered from 1 with
//! the header on line 1.

use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use chrono::NaiveDate;
use dcm_core::market::{MarketError, PriceSeries, RateSchedule};
use dcm_core::WeightUnit;
use rust_decimal::Decimal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MarketDataError {
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("series has no data rows")]
    Empty,
    #[error("line {line}: {source}")]
    Invalid { line: u64, source: MarketError },
}

/// Metadata a price file does not carry.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub material: String,
    pub currency: String,
    pub unit: WeightUnit,
}

fn read_rows<T, R: Read>(
    input: R,
    value_column: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Vec<(NaiveDate, T)>, MarketDataError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(|e| MarketDataError::Parse { line: 1, msg: e.to_string() })?.clone();
    if headers.len() != 2 || &headers[0] != "date" || &headers[1] != value_column {
        return Err(MarketDataError::Parse { line: 1, msg: format!("expected header `date,{value_column}`") });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record
            .map_err(|e| MarketDataError::Parse { line: e.position().map_or(0, |p| p.line()), msg: e.to_string() })?;
        let line = record.position().map_or(0, |p| p.line());
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|_| MarketDataError::Parse { line, msg: format!("bad date `{}`", &record[0]) })?;
        let value = parse(&record[1])
            .ok_or_else(|| MarketDataError::Parse { line, msg: format!("bad {value_column} `{}`", &record[1]) })?;
        rows.push((date, value));
    }
    if rows.is_empty() {
        return Err(MarketDataError::Empty);
    }
    Ok(rows)
}

fn locate(err: MarketError) -> MarketDataError {
    let index = match &err {
        MarketError::NotIncreasing { index, .. }
        | MarketError::NonPositivePrice { index }
        | MarketError::RateOutOfRange { index, .. } => *index,
        MarketError::Empty => return MarketDataError::Empty,
        MarketError::NoQuote(_) => 0,
    };
    MarketDataError::Invalid { line: index as u64 + 2, source: err }
}

pub fn load_series<R: Read>(input: R, meta: &SeriesMeta) -> Result<PriceSeries, MarketDataError> {
    let rows = read_rows(input, "price", |s| Decimal::from_str(s).ok())?;
    PriceSeries::new(meta.material.clone(), meta.currency.clone(), meta.unit, rows).map_err(locate)
}

pub fn serialize_series(series: &PriceSeries) -> String {
    let mut out = String::from("date,price\n");
    for (date, price) in series.points() {
        let _ = writeln!(out, "{},{price}", date.format("%Y-%m-%d"));
    }
    out
}

pub fn load_rates<R: Read>(input: R) -> Result<RateSchedule, MarketDataError> {
    let rows = read_rows(input, "rate", |s| f64::from_str(s).ok().filter(|v| v.is_finite()))?;
    RateSchedule::new(rows).map_err(locate)
}
