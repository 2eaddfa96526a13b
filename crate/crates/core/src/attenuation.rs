//! The daily attenuation coefficient θ of a certificate and the residual
//! weight it implies.
//!
//! A certificate's face weight shrinks by the factor θ every day so that the
//! withheld weight pays the custodian. θ is derived from a storage tariff and
//! the anchor's CIF price under one of three cost models, or given explicitly.
//! The spec is stored as the daily loss fraction `1 - θ`, computed straight
//! from the cost terms; `1 - θ` recomputed from a rounded θ near one loses
//! most of its significant digits.

use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::logistics::{CifQuote, StorageTariff};
use crate::DAYS_PER_YEAR;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttenuationError {
    #[error("attenuation coefficient {theta} lies outside (0, 1)")]
    OutOfRange { theta: f64 },
    #[error("invalid derivation input: {0}")]
    InvalidInput(&'static str),
    #[error("stored coefficient {stored} does not match {recomputed} recomputed from its inputs")]
    Inconsistent { stored: f64, recomputed: f64 },
    #[error("unknown attenuation mode `{0}`")]
    UnknownMode(alloc::string::String),
    #[error("face weight must be finite and > 0")]
    FaceWeight,
}

/// How θ was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DecayMode {
    /// `θ = 1 + rate/365 - (warehouse + transfer)/P`: daily interest is
    /// credited to the holder rather than recovered. This form does not
    /// balance the daily cost; it is kept so the discrepancy can be measured.
    InterestCredited,
    /// `θ = 1 - rate/365 - (warehouse + transfer)/P`: the weight withheld in
    /// one day pays warehouse, capital interest and transfer exactly.
    CostBalanced,
    /// `θ = 1 - warehouse/P`: interest and transfer are paid by the holder
    /// separately. Default for new issues.
    #[default]
    WarehouseOnly,
    /// Given directly, no derivation inputs.
    Explicit,
}

impl DecayMode {
    pub const fn as_str(self) -> &'static str {
        match self {
            DecayMode::InterestCredited => "interest-credited",
            DecayMode::CostBalanced => "cost-balanced",
            DecayMode::WarehouseOnly => "warehouse-only",
            DecayMode::Explicit => "explicit",
        }
    }
}

impl fmt::Display for DecayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecayMode {
    type Err = AttenuationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "interest-credited" => Ok(DecayMode::InterestCredited),
            "cost-balanced" => Ok(DecayMode::CostBalanced),
            "warehouse-only" => Ok(DecayMode::WarehouseOnly),
            "explicit" => Ok(DecayMode::Explicit),
            other => Err(AttenuationError::UnknownMode(other.into())),
        }
    }
}

/// The tariff and CIF price a derived θ came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivationInputs {
    pub tariff: StorageTariff,
    pub cif_price: f64,
}

impl DerivationInputs {
    /// One day's cost of holding a unit: warehouse, capital interest and
    /// outbound transfer.
    pub fn daily_cost(&self) -> f64 {
        self.tariff.daily_warehouse_charge
            + self.cif_price * self.tariff.bank_rate / DAYS_PER_YEAR
            + self.tariff.outbound_transfer_charge
    }

    fn daily_loss(&self, mode: DecayMode) -> Option<f64> {
        let t = &self.tariff;
        let p = self.cif_price;
        let charges = (t.daily_warehouse_charge + t.outbound_transfer_charge) / p;
        let interest = t.bank_rate / DAYS_PER_YEAR;
        match mode {
            DecayMode::InterestCredited => Some(charges - interest),
            DecayMode::CostBalanced => Some(charges + interest),
            DecayMode::WarehouseOnly => Some(t.daily_warehouse_charge / p),
            DecayMode::Explicit => None,
        }
    }
}

/// A validated daily attenuation coefficient, `0 < θ < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttenuationSpec {
    daily_loss: f64,
    mode: DecayMode,
    inputs: Option<DerivationInputs>,
}

fn check_loss(loss: f64) -> Result<f64, AttenuationError> {
    if loss.is_finite() && loss > 0.0 && loss < 1.0 {
        Ok(loss)
    } else {
        Err(AttenuationError::OutOfRange { theta: 1.0 - loss })
    }
}

impl AttenuationSpec {
    /// θ given directly.
    pub fn explicit(theta: f64) -> Result<Self, AttenuationError> {
        if !(theta.is_finite() && theta > 0.0 && theta < 1.0) {
            return Err(AttenuationError::OutOfRange { theta });
        }
        Ok(AttenuationSpec { daily_loss: 1.0 - theta, mode: DecayMode::Explicit, inputs: None })
    }

    /// θ given by its daily loss fraction `1 - θ`.
    pub fn from_daily_loss(loss: f64) -> Result<Self, AttenuationError> {
        Ok(AttenuationSpec { daily_loss: check_loss(loss)?, mode: DecayMode::Explicit, inputs: None })
    }

    /// Rebuilds a stored spec, checking that a derived θ still matches its
    /// inputs to 1e-12 relative.
    pub fn from_parts(
        daily_loss: f64,
        mode: DecayMode,
        inputs: Option<DerivationInputs>,
    ) -> Result<Self, AttenuationError> {
        check_loss(daily_loss)?;
        match (mode, inputs) {
            (DecayMode::Explicit, None) => Self::from_daily_loss(daily_loss),
            (DecayMode::Explicit, Some(_)) => {
                Err(AttenuationError::InvalidInput("explicit coefficient carries no inputs"))
            }
            (_, None) => Err(AttenuationError::InvalidInput("derived coefficient needs its inputs")),
            (mode, Some(inputs)) => {
                let spec = derive(inputs, mode)?;
                let (stored, recomputed) = (1.0 - daily_loss, spec.theta());
                if (stored - recomputed).abs() > 1e-12 * recomputed.abs() {
                    return Err(AttenuationError::Inconsistent { stored, recomputed });
                }
                Ok(AttenuationSpec { daily_loss, mode, inputs: Some(inputs) })
            }
        }
    }

    pub fn theta(&self) -> f64 {
        1.0 - self.daily_loss
    }

    /// `1 - θ`, at full precision.
    pub fn daily_loss(&self) -> f64 {
        self.daily_loss
    }

    pub fn mode(&self) -> DecayMode {
        self.mode
    }

    pub fn inputs(&self) -> Option<&DerivationInputs> {
        self.inputs.as_ref()
    }

    /// `θ^days`.
    pub fn retention(&self, days: u32) -> f64 {
        libm::exp(f64::from(days) * libm::log1p(-self.daily_loss))
    }

    /// One day's holding cost minus the value withheld by one day of decay,
    /// per unit: `[warehouse + P*rate/365 + transfer] - P(1 - θ)`.
    ///
    /// Zero (up to rounding) for [`DecayMode::CostBalanced`]; `2*P*rate/365`
    /// for [`DecayMode::InterestCredited`]. `None` for explicit coefficients.
    pub fn cost_balance_residual(&self) -> Option<f64> {
        let inputs = self.inputs?;
        Some(inputs.daily_cost() - inputs.cif_price * self.daily_loss)
    }
}

fn derive(inputs: DerivationInputs, mode: DecayMode) -> Result<AttenuationSpec, AttenuationError> {
    inputs.tariff.validate().map_err(|_| AttenuationError::InvalidInput("tariff fields must be finite and >= 0"))?;
    if !(inputs.cif_price.is_finite() && inputs.cif_price > 0.0) {
        return Err(AttenuationError::InvalidInput("CIF price must be > 0"));
    }
    let loss = inputs
        .daily_loss(mode)
        .ok_or(AttenuationError::InvalidInput("explicit mode cannot be derived from a tariff"))?;
    Ok(AttenuationSpec { daily_loss: check_loss(loss)?, mode, inputs: Some(inputs) })
}

/// Derives θ from a storage tariff and the anchor's CIF price.
pub fn attenuation_coefficient(
    tariff: &StorageTariff,
    cif: &CifQuote,
    mode: DecayMode,
) -> Result<AttenuationSpec, AttenuationError> {
    derive(DerivationInputs { tariff: *tariff, cif_price: cif.price_per_unit }, mode)
}

/// Weight remaining `days` after issue: `face_weight * θ^days`.
pub fn residual_weight(face_weight: f64, theta: &AttenuationSpec, days: u32) -> Result<f64, AttenuationError> {
    if !(face_weight.is_finite() && face_weight > 0.0) {
        return Err(AttenuationError::FaceWeight);
    }
    Ok(face_weight * theta.retention(days))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tariff(warehouse: f64, transfer: f64, rate: f64) -> StorageTariff {
        StorageTariff { daily_warehouse_charge: warehouse, outbound_transfer_charge: transfer, bank_rate: rate }
    }

    #[test]
    fn warehouse_only_gives_lme_value() {
        let cif = CifQuote::price(5000.0).unwrap();
        let spec = attenuation_coefficient(&tariff(0.2, 0.0, 0.0), &cif, DecayMode::WarehouseOnly).unwrap();
        assert!((spec.theta() - 0.99996).abs() < 1e-15);
        assert_eq!(spec.mode(), DecayMode::WarehouseOnly);
    }

    #[test]
    fn zero_tariff_is_rejected_in_every_mode() {
        let cif = CifQuote::price(5000.0).unwrap();
        for mode in [DecayMode::InterestCredited, DecayMode::CostBalanced, DecayMode::WarehouseOnly] {
            let err = attenuation_coefficient(&tariff(0.0, 0.0, 0.0), &cif, mode).unwrap_err();
            assert_eq!(err, AttenuationError::OutOfRange { theta: 1.0 });
        }
    }

    #[test]
    fn interest_credited_can_exceed_one() {
        let cif = CifQuote::price(5000.0).unwrap();
        let err = attenuation_coefficient(&tariff(0.2, 0.0, 0.0365), &cif, DecayMode::InterestCredited).unwrap_err();
        match err {
            AttenuationError::OutOfRange { theta } => assert!((theta - 1.00006).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cost_balanced_closes_the_daily_balance() {
        let cif = CifQuote::price(5000.0).unwrap();
        let t = tariff(0.2, 0.05, 0.0365);
        let spec = attenuation_coefficient(&t, &cif, DecayMode::CostBalanced).unwrap();
        let recovered = 5000.0 * (1.0 - spec.theta());
        let cost = 0.2 + 5000.0 * 0.0365 / 365.0 + 0.05;
        assert!((recovered - cost).abs() < 1e-12 * 5000.0);
        assert!(spec.cost_balance_residual().unwrap().abs() < 1e-12 * 5000.0);
    }

    #[test]
    fn explicit_range() {
        assert!(AttenuationSpec::explicit(0.99996).is_ok());
        for bad in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(AttenuationSpec::explicit(bad).is_err(), "{bad}");
        }
        assert!(AttenuationSpec::explicit(0.5).unwrap().cost_balance_residual().is_none());
    }

    #[test]
    fn from_parts_checks_consistency() {
        let cif = CifQuote::price(5000.0).unwrap();
        let spec = attenuation_coefficient(&tariff(0.2, 0.0, 0.0), &cif, DecayMode::WarehouseOnly).unwrap();
        let rebuilt = AttenuationSpec::from_parts(spec.daily_loss(), spec.mode(), spec.inputs().copied()).unwrap();
        assert_eq!(rebuilt, spec);
        let err = AttenuationSpec::from_parts(5e-5, spec.mode(), spec.inputs().copied()).unwrap_err();
        assert!(matches!(err, AttenuationError::Inconsistent { .. }));
        assert!(AttenuationSpec::from_parts(5e-5, DecayMode::CostBalanced, None).is_err());
    }

    #[test]
    fn residual_weight_case_studies() {
        let lme = AttenuationSpec::explicit(0.99996).unwrap();
        assert!((residual_weight(1000.0, &lme, 183).unwrap() - 992.7066).abs() < 1e-4);
        let shfe = AttenuationSpec::explicit(0.999945).unwrap();
        // printed as 98.99856; the exact value is 98.99852...
        assert!((residual_weight(100.0, &shfe, 183).unwrap() - 98.99856).abs() < 1e-4);
        assert!((residual_weight(100.0, &shfe, 183).unwrap() - 98.998_520_857_578_78).abs() < 1e-10);
    }

    #[test]
    fn residual_weight_at_issue_is_face() {
        let spec = AttenuationSpec::explicit(0.7).unwrap();
        assert_eq!(residual_weight(123.25, &spec, 0).unwrap(), 123.25);
        assert!(residual_weight(0.0, &spec, 3).is_err());
    }

    #[test]
    fn mode_names_round_trip() {
        for mode in
            [DecayMode::InterestCredited, DecayMode::CostBalanced, DecayMode::WarehouseOnly, DecayMode::Explicit]
        {
            assert_eq!(mode.as_str().parse::<DecayMode>().unwrap(), mode);
        }
    }
}
