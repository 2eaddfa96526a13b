//! Dated market quotations and bank-rate schedules.
//!
//! Lookups are step functions: the value on a date is the one from the latest
//! point on or before it. There is no interpolation.

use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;
use rust_decimal::Decimal;
use thiserror::Error;

use crate::certificate::MarketQuote;
use crate::units::WeightUnit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketError {
    #[error("series is empty")]
    Empty,
    #[error("point {index}: date {date} does not follow the previous point")]
    NotIncreasing { index: usize, date: NaiveDate },
    #[error("point {index}: price must be > 0")]
    NonPositivePrice { index: usize },
    #[error("point {index}: rate {rate} outside [-0.05, 1)")]
    RateOutOfRange { index: usize, rate: f64 },
    #[error("no quotation on or before {0}")]
    NoQuote(NaiveDate),
}

fn check_increasing<T>(points: &[(NaiveDate, T)]) -> Result<(), MarketError> {
    if points.is_empty() {
        return Err(MarketError::Empty);
    }
    for (index, pair) in points.windows(2).enumerate() {
        if pair[1].0 <= pair[0].0 {
            return Err(MarketError::NotIncreasing { index: index + 1, date: pair[1].0 });
        }
    }
    Ok(())
}

fn step_lookup<T: Copy>(points: &[(NaiveDate, T)], date: NaiveDate) -> Result<T, MarketError> {
    let after = points.partition_point(|(d, _)| *d <= date);
    if after == 0 {
        return Err(MarketError::NoQuote(date));
    }
    Ok(points[after - 1].1)
}

/// Quotations for one material in one currency, per `unit` of weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub material: String,
    pub currency: String,
    pub unit: WeightUnit,
    points: Vec<(NaiveDate, Decimal)>,
}

impl PriceSeries {
    pub fn new(
        material: impl Into<String>,
        currency: impl Into<String>,
        unit: WeightUnit,
        points: Vec<(NaiveDate, Decimal)>,
    ) -> Result<Self, MarketError> {
        check_increasing(&points)?;
        if let Some(index) = points.iter().position(|(_, p)| *p <= Decimal::ZERO) {
            return Err(MarketError::NonPositivePrice { index });
        }
        Ok(PriceSeries { material: material.into(), currency: currency.into(), unit, points })
    }

    pub fn points(&self) -> &[(NaiveDate, Decimal)] {
        &self.points
    }

    pub fn quote_at(&self, date: NaiveDate) -> Result<Decimal, MarketError> {
        step_lookup(&self.points, date)
    }

    /// The quotation on `date` as a [`MarketQuote`] without premium.
    pub fn market_quote(&self, date: NaiveDate) -> Result<MarketQuote, MarketError> {
        Ok(MarketQuote { quotation: self.quote_at(date)?, premium: Decimal::ZERO, unit: self.unit, as_of: Some(date) })
    }
}

/// Annual bank rates over time. Negative rates down to -5% are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSchedule {
    points: Vec<(NaiveDate, f64)>,
}

impl RateSchedule {
    pub fn new(points: Vec<(NaiveDate, f64)>) -> Result<Self, MarketError> {
        check_increasing(&points)?;
        for (index, (_, rate)) in points.iter().enumerate() {
            if !(rate.is_finite() && (-0.05..1.0).contains(rate)) {
                return Err(MarketError::RateOutOfRange { index, rate: *rate });
            }
        }
        Ok(RateSchedule { points })
    }

    pub fn points(&self) -> &[(NaiveDate, f64)] {
        &self.points
    }

    pub fn rate_at(&self, date: NaiveDate) -> Result<f64, MarketError> {
        step_lookup(&self.points, date)
    }
}
