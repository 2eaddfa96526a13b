//! Display and booking precision.
//!
//! Weights and money are computed in `f64` and booked as decimals rounded
//! half-to-even at a per-report number of places.

use rust_decimal::{Decimal, RoundingStrategy};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoundingError {
    #[error("{0} cannot be represented as a decimal")]
    Unrepresentable(f64),
    #[error("at most 20 decimal places are supported, got {0}")]
    TooManyPlaces(u32),
}

/// Decimal places for booked weights and money.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundingProfile {
    pub weight_dp: u32,
    pub money_dp: u32,
}

impl Default for RoundingProfile {
    fn default() -> Self {
        RoundingProfile { weight_dp: 4, money_dp: 4 }
    }
}

impl RoundingProfile {
    pub fn new(weight_dp: u32, money_dp: u32) -> Result<Self, RoundingError> {
        for dp in [weight_dp, money_dp] {
            if dp > 20 {
                return Err(RoundingError::TooManyPlaces(dp));
            }
        }
        Ok(RoundingProfile { weight_dp, money_dp })
    }

    pub fn weight(&self, value: f64) -> Result<Decimal, RoundingError> {
        round_f64(value, self.weight_dp)
    }

    pub fn weight_dec(&self, value: Decimal) -> Decimal {
        round_dec(value, self.weight_dp)
    }

    pub fn money(&self, value: f64) -> Result<Decimal, RoundingError> {
        round_f64(value, self.money_dp)
    }

    pub fn money_dec(&self, value: Decimal) -> Decimal {
        round_dec(value, self.money_dp)
    }
}

/// The exact value of `value` as a decimal, to the 28 significant digits a
/// [`Decimal`] holds.
pub fn exact(value: f64) -> Result<Decimal, RoundingError> {
    Decimal::from_f64_retain(value).ok_or(RoundingError::Unrepresentable(value))
}

/// Rounds half-to-even and pads to exactly `dp` places.
pub fn round_dec(value: Decimal, dp: u32) -> Decimal {
    let mut rounded = value.round_dp_with_strategy(dp, RoundingStrategy::MidpointNearestEven);
    rounded.rescale(dp);
    rounded
}

/// Rounds the exact binary value of `value` half-to-even at `dp` places.
pub fn round_f64(value: f64, dp: u32) -> Result<Decimal, RoundingError> {
    Ok(round_dec(exact(value)?, dp))
}
