//! Pricing and settlement of a certificate `days` after issue.
//!
//! Weights are booked at the rounding profile's weight precision and money is
//! computed from the booked weight, so a printed weight times a printed price
//! gives the printed amount. The charged weight is booked as the remainder
//! `booked residual - net`, which makes `net + charged` equal the booked
//! residual exactly.

use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use thiserror::Error;

use crate::certificate::{Certificate, CertificateStatus, MarketQuote};
use crate::rounding::{self, RoundingError, RoundingProfile};
use crate::units::WeightUnit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SettlementError {
    #[error("certificate is {0}; no further settlement is possible")]
    State(CertificateStatus),
    #[error("certificate expired: day {days} is past its validity of {validity} days")]
    Expired { days: u32, validity: u32 },
    #[error("face weight {face} is below the minimum delivery lot of {min}")]
    LotSize { face: f64, min: f64 },
    #[error("certificate is still within its validity ({validity} days) on day {days}")]
    NotExpired { days: u32, validity: u32 },
    #[error("certificate has no validity limit and cannot expire")]
    NoValidity,
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error("amount overflows the decimal range")]
    Overflow,
}

/// Transaction price of a certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Pricing {
    pub days: u32,
    /// `face * θ^days`, unrounded.
    pub residual: f64,
    pub booked_residual: Decimal,
    /// `quotation + premium`, per quote unit.
    pub unit_price: Decimal,
    /// Price from the unrounded residual.
    pub price_full: f64,
    /// Price from the booked residual, rounded to money precision.
    pub price: Decimal,
}

/// Weight leaving custody on delivery or buyback.
#[derive(Debug, Clone, PartialEq)]
pub struct Withdrawal {
    pub days: u32,
    pub residual: f64,
    pub booked_residual: Decimal,
    pub charge_ratio: Decimal,
    /// `residual * (1 - ratio)`, unrounded.
    pub net_full: f64,
    /// Net weight handed over (delivered, or bought back for cash).
    pub net: Decimal,
    /// Weight kept by the issuer as the charge.
    pub charged: Decimal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Buyback {
    pub withdrawal: Withdrawal,
    pub quotation: Decimal,
    pub cash_full: f64,
    pub cash: Decimal,
}

fn ensure_settleable(cert: &Certificate, days: u32) -> Result<(), SettlementError> {
    if cert.status.is_terminal() {
        return Err(SettlementError::State(cert.status));
    }
    if let Some(validity) = cert.rules.validity_days {
        if days > validity {
            return Err(SettlementError::Expired { days, validity });
        }
    }
    Ok(())
}

fn mul(a: Decimal, b: Decimal) -> Result<Decimal, SettlementError> {
    a.checked_mul(b).ok_or(SettlementError::Overflow)
}

fn to_f64(d: Decimal) -> f64 {
    d.to_f64().unwrap_or(f64::NAN)
}

/// Amount for `weight` (in `weight_unit`) at `per_unit` per `quote_unit`.
fn amount(
    weight: Decimal,
    weight_unit: WeightUnit,
    per_unit: Decimal,
    quote_unit: WeightUnit,
) -> Result<Decimal, SettlementError> {
    mul(mul(weight, weight_unit.factor_to(quote_unit))?, per_unit)
}

/// Weight a certificate commands `days` after issue, unrounded.
pub fn residual(cert: &Certificate, days: u32) -> f64 {
    cert.face_weight * cert.theta.retention(days)
}

/// `(quotation + premium) * face * θ^days`.
pub fn transaction_price(
    cert: &Certificate,
    quote: &MarketQuote,
    days: u32,
    profile: &RoundingProfile,
) -> Result<Pricing, SettlementError> {
    ensure_settleable(cert, days)?;
    let residual = residual(cert, days);
    let booked_residual = profile.weight(residual)?;
    let unit_price = quote.quotation + quote.premium;
    let factor = to_f64(cert.unit.factor_to(quote.unit));
    let price_full = to_f64(unit_price) * residual * factor;
    let price = profile.money_dec(amount(booked_residual, cert.unit, unit_price, quote.unit)?);
    Ok(Pricing { days, residual, booked_residual, unit_price, price_full, price })
}

fn withdraw(
    cert: &Certificate,
    days: u32,
    ratio: Decimal,
    profile: &RoundingProfile,
) -> Result<Withdrawal, SettlementError> {
    let residual = residual(cert, days);
    let booked_residual = profile.weight(residual)?;
    let keep = Decimal::ONE - ratio;
    let net = profile.weight_dec(mul(rounding::exact(residual)?, keep)?);
    let charged = booked_residual - net;
    Ok(Withdrawal {
        days,
        residual,
        booked_residual,
        charge_ratio: ratio,
        net_full: residual * to_f64(keep),
        net,
        charged,
    })
}

/// Whole-certificate physical delivery: `face * θ^days * (1 - delivery charge)`.
///
/// The minimum lot applies to the face weight; every residual is below face.
pub fn physical_delivery(
    cert: &Certificate,
    days: u32,
    profile: &RoundingProfile,
) -> Result<Withdrawal, SettlementError> {
    ensure_settleable(cert, days)?;
    if cert.face_weight < cert.rules.min_delivery_weight {
        return Err(SettlementError::LotSize { face: cert.face_weight, min: cert.rules.min_delivery_weight });
    }
    withdraw(cert, days, cert.rules.delivery_charge_ratio, profile)
}

/// Cash buyback at the day's quotation, without premium.
pub fn buyback(
    cert: &Certificate,
    days: u32,
    quote: &MarketQuote,
    profile: &RoundingProfile,
) -> Result<Buyback, SettlementError> {
    ensure_settleable(cert, days)?;
    let withdrawal = withdraw(cert, days, cert.rules.withdrawal_charge_ratio, profile)?;
    let factor = to_f64(cert.unit.factor_to(quote.unit));
    let cash_full = withdrawal.net_full * factor * to_f64(quote.quotation);
    let cash = profile.money_dec(amount(withdrawal.net, cert.unit, quote.quotation, quote.unit)?);
    Ok(Buyback { withdrawal, quotation: quote.quotation, cash_full, cash })
}

/// Residual weight that falls to the issuer when a certificate lapses.
pub fn expiry(cert: &Certificate, days: u32, profile: &RoundingProfile) -> Result<Decimal, SettlementError> {
    if cert.status.is_terminal() {
        return Err(SettlementError::State(cert.status));
    }
    let validity = cert.rules.validity_days.ok_or(SettlementError::NoValidity)?;
    if days <= validity {
        return Err(SettlementError::NotExpired { days, validity });
    }
    Ok(profile.weight(residual(cert, days))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attenuation::AttenuationSpec;
    use crate::certificate::{CertId, DeliveryRules, MaterialId, PartyId};
    use alloc::string::ToString;
    use chrono::NaiveDate;
    use core::str::FromStr;

    fn d(s: &str) -> Decimal {
        Decimal::from_str(s).unwrap()
    }

    pub(crate) fn lme() -> Certificate {
        Certificate {
            id: CertId::new("LME-CU-1").unwrap(),
            issuer: PartyId::new("LME").unwrap(),
            material: MaterialId::new("copper").unwrap(),
            unit: WeightUnit::Kilogram,
            face_weight: 1000.0,
            purity: 0.9999,
            issue_date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            theta: AttenuationSpec::explicit(0.99996).unwrap(),
            rules: DeliveryRules {
                delivery_charge_ratio: d("0.003"),
                withdrawal_charge_ratio: d("0.002"),
                min_delivery_weight: 1000.0,
                delivery_location: "LME designated warehouse".into(),
                validity_days: None,
            },
            status: CertificateStatus::Active,
            owner: PartyId::new("client").unwrap(),
        }
    }

    fn shfe() -> Certificate {
        Certificate {
            unit: WeightUnit::Tonne,
            face_weight: 100.0,
            purity: 1.0,
            theta: AttenuationSpec::explicit(0.999945).unwrap(),
            rules: DeliveryRules {
                delivery_charge_ratio: d("0.005"),
                withdrawal_charge_ratio: d("0.002"),
                min_delivery_weight: 100.0,
                delivery_location: "Shanghai".into(),
                validity_days: Some(50 * 365),
            },
            ..lme()
        }
    }

    fn per_tonne(price: &str) -> MarketQuote {
        MarketQuote::new(d(price), WeightUnit::Tonne).unwrap()
    }

    #[test]
    fn lme_purchase_price() {
        let p = transaction_price(&lme(), &per_tonne("5000"), 183, &RoundingProfile::default()).unwrap();
        assert_eq!(p.booked_residual.to_string(), "992.7066");
        // printed 4963.5331
        assert_eq!(p.price.to_string(), "4963.5330");
        assert!((p.price_full - 4_963.532_903_064).abs() < 1e-6);
    }

    #[test]
    fn shfe_purchase_price() {
        let p = transaction_price(&shfe(), &per_tonne("2500"), 183, &RoundingProfile::default()).unwrap();
        assert_eq!(p.booked_residual.to_string(), "98.9985");
        assert!((p.price - d("247496")).abs() <= Decimal::ONE);
    }

    #[test]
    fn price_at_issue_without_premium() {
        let p = transaction_price(&lme(), &per_tonne("5000"), 0, &RoundingProfile::default()).unwrap();
        assert_eq!(p.price, d("5000"));
        assert_eq!(p.price_full, 5000.0);
    }

    #[test]
    fn premium_adds_per_unit() {
        let q = per_tonne("5000").with_premium(d("10"));
        let p = transaction_price(&lme(), &q, 0, &RoundingProfile::default()).unwrap();
        assert_eq!(p.price, d("5010"));
    }

    #[test]
    fn lme_delivery_and_buyback() {
        let prof = RoundingProfile::default();
        let w = physical_delivery(&lme(), 365, &prof).unwrap();
        assert_eq!(w.net.to_string(), "982.5493");
        assert_eq!(w.net + w.charged, w.booked_residual);
        let b = buyback(&lme(), 365, &per_tonne("5500"), &prof).unwrap();
        assert_eq!(b.withdrawal.net.to_string(), "983.5348");
        assert_eq!(b.cash.to_string(), "5409.4414");
    }

    #[test]
    fn shfe_delivery_and_buyback() {
        let prof = RoundingProfile::default();
        assert_eq!(physical_delivery(&shfe(), 365, &prof).unwrap().net.to_string(), "97.5224");
        let b = buyback(&shfe(), 365, &per_tonne("2600"), &prof).unwrap();
        assert_eq!(b.withdrawal.net.to_string(), "97.8164");
        assert!((b.cash - d("254323")).abs() <= Decimal::ONE);
    }

    #[test]
    fn identity_settlement() {
        let mut cert = lme();
        cert.rules.delivery_charge_ratio = Decimal::ZERO;
        cert.rules.withdrawal_charge_ratio = Decimal::ZERO;
        let prof = RoundingProfile::default();
        assert_eq!(physical_delivery(&cert, 0, &prof).unwrap().net, d("1000"));
        let b = buyback(&cert, 0, &per_tonne("5000"), &prof).unwrap();
        assert_eq!(b.cash, d("5000"));
    }

    #[test]
    fn lot_size_checks_face_weight() {
        let mut small = lme();
        small.face_weight = 100.0;
        let err = physical_delivery(&small, 10, &RoundingProfile::default()).unwrap_err();
        assert_eq!(err, SettlementError::LotSize { face: 100.0, min: 1000.0 });
        // a decayed 1000 kg certificate is still deliverable
        assert!(physical_delivery(&lme(), 10_000, &RoundingProfile::default()).is_ok());
    }

    #[test]
    fn validity_limits() {
        let prof = RoundingProfile::default();
        let cert = shfe();
        assert!(physical_delivery(&cert, 18_250, &prof).is_ok());
        assert_eq!(
            physical_delivery(&cert, 18_251, &prof).unwrap_err(),
            SettlementError::Expired { days: 18_251, validity: 18_250 }
        );
        assert!(transaction_price(&cert, &per_tonne("1"), 18_251, &prof).is_err());
        assert!(expiry(&cert, 18_250, &prof).is_err());
        assert!(expiry(&cert, 18_251, &prof).unwrap() > Decimal::ZERO);
        assert_eq!(expiry(&lme(), 99_999, &prof).unwrap_err(), SettlementError::NoValidity);
    }

    #[test]
    fn terminal_certificates_refuse_settlement() {
        let mut cert = lme();
        cert.status = CertificateStatus::Delivered;
        let prof = RoundingProfile::default();
        assert_eq!(
            physical_delivery(&cert, 1, &prof).unwrap_err(),
            SettlementError::State(CertificateStatus::Delivered)
        );
        assert!(buyback(&cert, 1, &per_tonne("1"), &prof).is_err());
        assert!(transaction_price(&cert, &per_tonne("1"), 1, &prof).is_err());
    }
}
