//! Plain-text certificate terms.
//!
//! One `key: value` per line in this fixed order:
//!
//! ```text
//! material: copper
//! weight: 1000 kg
//! purity: 0.9999
//! issue_date: 2020-01-01
//! attenuation: 0.999960
//! issuer: LME
//! code: LME-CU-0001
//! delivery_charge: 0.003
//! withdrawal_charge: 0.002
//! min_delivery_weight: 1000 kg
//! delivery_location: LME designated warehouse
//! validity_days: none
//! ```
//!
//! The attenuation coefficient is printed to six decimal places, so an
//! imported certificate carries an explicit θ at that precision.

use std::fmt::Write as _;
use std::str::FromStr;

use chrono::NaiveDate;
use dcm_core::attenuation::AttenuationSpec;
use dcm_core::certificate::{CertId, Certificate, DeliveryRules, MaterialId, PartyId};
use dcm_core::WeightUnit;
use rust_decimal::Decimal;

use crate::error::DcmError;

/// What a certificate states, without holder or lifecycle state.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateTerms {
    pub material: MaterialId,
    pub face_weight: f64,
    pub unit: WeightUnit,
    pub purity: f64,
    pub issue_date: NaiveDate,
    pub theta: AttenuationSpec,
    pub issuer: PartyId,
    pub code: CertId,
    pub rules: DeliveryRules,
}

const KEYS: [&str; 12] = [
    "material",
    "weight",
    "purity",
    "issue_date",
    "attenuation",
    "issuer",
    "code",
    "delivery_charge",
    "withdrawal_charge",
    "min_delivery_weight",
    "delivery_location",
    "validity_days",
];

pub fn export(cert: &Certificate) -> String {
    let mut out = String::new();
    let unit = cert.unit;
    let rules = &cert.rules;
    let values = [
        cert.material.to_string(),
        format!("{} {unit}", cert.face_weight),
        cert.purity.to_string(),
        cert.issue_date.format("%Y-%m-%d").to_string(),
        format!("{:.6}", cert.theta.theta()),
        cert.issuer.to_string(),
        cert.id.to_string(),
        rules.delivery_charge_ratio.to_string(),
        rules.withdrawal_charge_ratio.to_string(),
        format!("{} {unit}", rules.min_delivery_weight),
        rules.delivery_location.clone(),
        rules.validity_days.map_or_else(|| "none".to_owned(), |v| v.to_string()),
    ];
    for (key, value) in KEYS.iter().zip(values) {
        let _ = writeln!(out, "{key}: {value}");
    }
    out
}

fn weight(s: &str) -> Result<(f64, WeightUnit), DcmError> {
    let (amount, unit) = s.split_once(' ').ok_or_else(|| DcmError::invalid(format!("weight `{s}` needs a unit")))?;
    let amount = f64::from_str(amount).map_err(|_| DcmError::invalid(format!("bad weight `{s}`")))?;
    let unit = WeightUnit::from_str(unit).map_err(DcmError::invalid)?;
    Ok((amount, unit))
}

fn parse<T: FromStr>(key: &str, s: &str) -> Result<T, DcmError> {
    s.parse().map_err(|_| DcmError::invalid(format!("bad {key} `{s}`")))
}

pub fn import(text: &str) -> Result<CertificateTerms, DcmError> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != KEYS.len() {
        return Err(DcmError::invalid(format!("expected {} lines, found {}", KEYS.len(), lines.len())));
    }
    let mut values = Vec::with_capacity(KEYS.len());
    for (key, line) in KEYS.iter().zip(&lines) {
        match line.split_once(':') {
            Some((k, v)) if k.trim() == *key => values.push(v.trim()),
            _ => return Err(DcmError::invalid(format!("expected `{key}: ...`, found `{line}`"))),
        }
    }
    let (face_weight, unit) = weight(values[1])?;
    let (min_delivery_weight, min_unit) = weight(values[9])?;
    if min_unit != unit {
        return Err(DcmError::invalid("minimum delivery weight must use the certificate's unit"));
    }
    let theta = AttenuationSpec::explicit(parse("attenuation", values[4])?).map_err(DcmError::invalid)?;
    let terms = CertificateTerms {
        material: MaterialId::new(values[0]).map_err(DcmError::invalid)?,
        face_weight,
        unit,
        purity: parse("purity", values[2])?,
        issue_date: NaiveDate::parse_from_str(values[3], "%Y-%m-%d")
            .map_err(|_| DcmError::invalid(format!("bad issue_date `{}`", values[3])))?,
        theta,
        issuer: PartyId::new(values[5]).map_err(DcmError::invalid)?,
        code: CertId::new(values[6]).map_err(DcmError::invalid)?,
        rules: DeliveryRules {
            delivery_charge_ratio: parse::<Decimal>("delivery_charge", values[7])?,
            withdrawal_charge_ratio: parse::<Decimal>("withdrawal_charge", values[8])?,
            min_delivery_weight,
            delivery_location: values[10].to_owned(),
            validity_days: match values[11] {
                "none" => None,
                v => Some(parse("validity_days", v)?),
            },
        },
    };
    terms.rules.validate().map_err(DcmError::invalid)?;
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dcm_core::certificate::CertificateStatus;

    fn cert() -> Certificate {
        Certificate {
            id: CertId::new("SHFE-ST-1").unwrap(),
            issuer: PartyId::new("SHFE").unwrap(),
            material: MaterialId::new("steel").unwrap(),
            unit: WeightUnit::Tonne,
            face_weight: 100.0,
            purity: 1.0,
            issue_date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            theta: AttenuationSpec::explicit(0.999945).unwrap(),
            rules: DeliveryRules {
                delivery_charge_ratio: Decimal::new(5, 3),
                withdrawal_charge_ratio: Decimal::new(2, 3),
                min_delivery_weight: 100.0,
                delivery_location: "Shanghai".into(),
                validity_days: Some(18250),
            },
            status: CertificateStatus::Active,
            owner: PartyId::new("client").unwrap(),
        }
    }

    #[test]
    fn export_layout() {
        let text = export(&cert());
        assert_eq!(
            text,
            "material: steel\nweight: 100 t\npurity: 1\nissue_date: 2020-01-01\nattenuation: 0.999945\n\
             issuer: SHFE\ncode: SHFE-ST-1\ndelivery_charge: 0.005\nwithdrawal_charge: 0.002\n\
             min_delivery_weight: 100 t\ndelivery_location: Shanghai\nvalidity_days: 18250\n"
        );
    }

    #[test]
    fn import_restores_terms() {
        let c = cert();
        let terms = import(&export(&c)).unwrap();
        assert_eq!(terms.code, c.id);
        assert_eq!(terms.face_weight, 100.0);
        assert_eq!(terms.unit, WeightUnit::Tonne);
        assert_eq!(terms.rules, c.rules);
        assert!((terms.theta.theta() - 0.999945).abs() < 1e-15);
    }

    #[test]
    fn import_rejects_reordered_keys() {
        let text = export(&cert()).replacen("material: steel\nweight: 100 t", "weight: 100 t\nmaterial: steel", 1);
        assert!(import(&text).is_err());
        assert!(import("material: steel\n").is_err());
    }
}
