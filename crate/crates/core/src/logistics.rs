//! Logistics costing of an anchor commodity: the total annual cost of keeping
//! it supplied, the landed (CIF) unit price at the warehouse, and the costs
//! that accrue while a unit sits in storage.

use chrono::NaiveDate;
use thiserror::Error;

use crate::DAYS_PER_YEAR;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogisticsError {
    #[error("invalid logistics parameter: {0}")]
    InvalidParams(&'static str),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("holding cost rate S + (P + T) * rate is zero; the order quantity is unbounded")]
    Unbounded,
}

/// Inputs of the annual logistics cost model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticsParams {
    /// Cost per order placed.
    pub ordering_cost: f64,
    /// Units demanded per year.
    pub annual_demand: f64,
    /// Units per order, when fixed.
    pub order_quantity: Option<f64>,
    /// Purchase price per unit.
    pub purchase_price: f64,
    /// Warehouse cost per unit per year.
    pub unit_warehouse_cost: f64,
    /// Transport cost per unit.
    pub transport_cost: f64,
    /// Transit time in days.
    pub transit_days: f64,
    /// Annual bank rate as a fraction.
    pub bank_rate: f64,
}

impl LogisticsParams {
    pub fn validate(&self) -> Result<(), LogisticsError> {
        let money = [self.ordering_cost, self.purchase_price, self.unit_warehouse_cost, self.transport_cost];
        if money.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(LogisticsError::InvalidParams("monetary fields must be finite and >= 0"));
        }
        if !(self.annual_demand.is_finite() && self.annual_demand > 0.0) {
            return Err(LogisticsError::InvalidParams("annual demand must be > 0"));
        }
        if let Some(q) = self.order_quantity {
            if !(q.is_finite() && q > 0.0) {
                return Err(LogisticsError::InvalidParams("order quantity must be > 0"));
            }
        }
        if !(self.bank_rate.is_finite() && (0.0..1.0).contains(&self.bank_rate)) {
            return Err(LogisticsError::InvalidParams("bank rate must lie in [0, 1)"));
        }
        if !(self.transit_days.is_finite() && self.transit_days >= 0.0) {
            return Err(LogisticsError::InvalidParams("transit days must be >= 0"));
        }
        Ok(())
    }

    /// Annual holding cost per unit of average inventory: `S + (P + T) * rate`.
    pub fn holding_rate(&self) -> f64 {
        self.unit_warehouse_cost + (self.purchase_price + self.transport_cost) * self.bank_rate
    }
}

/// Total annual logistics cost at order quantity `q`: ordering, purchase,
/// holding (warehouse plus capital tied up in stock), transport and capital
/// tied up in transit.
pub fn total_logistics_cost(params: &LogisticsParams, q: f64) -> Result<f64, LogisticsError> {
    params.validate()?;
    if !(q.is_finite() && q > 0.0) {
        return Err(LogisticsError::Domain("order quantity must be > 0"));
    }
    let p = params;
    let ordering = p.ordering_cost * p.annual_demand / q;
    let purchase = p.purchase_price * p.annual_demand;
    let holding = q / 2.0 * p.holding_rate();
    let transport = p.transport_cost * p.annual_demand;
    let in_transit = p.bank_rate * p.purchase_price * p.annual_demand * p.transit_days / DAYS_PER_YEAR;
    Ok(ordering + purchase + holding + transport + in_transit)
}

/// The order quantity minimising [`total_logistics_cost`].
pub fn optimal_order_quantity(params: &LogisticsParams) -> Result<f64, LogisticsError> {
    params.validate()?;
    if params.ordering_cost <= 0.0 {
        return Err(LogisticsError::Domain("ordering cost must be > 0"));
    }
    let h = params.holding_rate();
    if h <= 0.0 {
        return Err(LogisticsError::Unbounded);
    }
    Ok(libm::sqrt(2.0 * params.ordering_cost * params.annual_demand / h))
}

/// Landed unit price of a material at a warehouse.
#[derive(Debug, Clone, PartialEq)]
pub struct CifQuote {
    pub price_per_unit: f64,
    pub material: alloc::string::String,
    pub location: alloc::string::String,
    pub as_of: Option<NaiveDate>,
}

impl CifQuote {
    /// A bare price without material, location or date.
    pub fn price(price_per_unit: f64) -> Result<Self, LogisticsError> {
        if !(price_per_unit.is_finite() && price_per_unit > 0.0) {
            return Err(LogisticsError::InvalidParams("CIF price must be > 0"));
        }
        Ok(CifQuote {
            price_per_unit,
            material: alloc::string::String::new(),
            location: alloc::string::String::new(),
            as_of: None,
        })
    }
}

/// `A/Q + P + T + t * rate * P / 365`.
pub fn cif_price(params: &LogisticsParams) -> Result<CifQuote, LogisticsError> {
    params.validate()?;
    let q = params.order_quantity.ok_or(LogisticsError::Domain("order quantity is required for the CIF price"))?;
    let p = params;
    let price = p.ordering_cost / q
        + p.purchase_price
        + p.transport_cost
        + p.transit_days * p.bank_rate * p.purchase_price / DAYS_PER_YEAR;
    CifQuote::price(price)
}

/// What a warehouse charges to hold one unit of a material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageTariff {
    /// Per unit per day.
    pub daily_warehouse_charge: f64,
    /// Per unit, charged once when the unit leaves for delivery.
    pub outbound_transfer_charge: f64,
    pub bank_rate: f64,
}

impl StorageTariff {
    pub fn validate(&self) -> Result<(), LogisticsError> {
        let all = [self.daily_warehouse_charge, self.outbound_transfer_charge, self.bank_rate];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(LogisticsError::InvalidParams("tariff fields must be finite and >= 0"));
        }
        Ok(())
    }
}

fn check_elapsed(delta_t: f64) -> Result<(), LogisticsError> {
    if !(delta_t.is_finite() && delta_t >= 0.0) {
        return Err(LogisticsError::Domain("elapsed days must be >= 0"));
    }
    Ok(())
}

/// Warehouse charges accrued over `delta_t` days.
pub fn accrued_storage_cost(tariff: &StorageTariff, delta_t: f64) -> Result<f64, LogisticsError> {
    check_elapsed(delta_t)?;
    Ok(tariff.daily_warehouse_charge * delta_t)
}

/// Interest on the capital locked in one unit at its CIF price.
pub fn accrued_capital_interest(cif: &CifQuote, bank_rate: f64, delta_t: f64) -> Result<f64, LogisticsError> {
    check_elapsed(delta_t)?;
    Ok(delta_t / DAYS_PER_YEAR * cif.price_per_unit * bank_rate)
}

/// Unit price after `delta_t` days in storage, optionally including the
/// outbound transfer charge.
pub fn price_after_storage(
    cif: &CifQuote,
    tariff: &StorageTariff,
    delta_t: f64,
    include_transfer: bool,
) -> Result<f64, LogisticsError> {
    Ok(cif.price_per_unit + storage_increment(cif, tariff, delta_t, include_transfer)?)
}

/// Cost added on top of the CIF price after `delta_t` days.
pub fn storage_increment(
    cif: &CifQuote,
    tariff: &StorageTariff,
    delta_t: f64,
    include_transfer: bool,
) -> Result<f64, LogisticsError> {
    let storage = accrued_storage_cost(tariff, delta_t)?;
    let interest = accrued_capital_interest(cif, tariff.bank_rate, delta_t)?;
    let transfer = if include_transfer { tariff.outbound_transfer_charge } else { 0.0 };
    Ok(storage + interest + transfer)
}
