//! Certificates and the terms they carry.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use chrono::NaiveDate;
use rust_decimal::Decimal;
use thiserror::Error;

use crate::attenuation::AttenuationSpec;
use crate::units::WeightUnit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TermsError {
    #[error("invalid identifier `{0}`: use 1-64 characters from [A-Za-z0-9._:-]")]
    Identifier(String),
    #[error("{0}")]
    Invalid(&'static str),
    #[error("face weight {weight} {unit} is not among the issuer's denominations")]
    Denomination { weight: f64, unit: WeightUnit },
}

macro_rules! identifier {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Result<Self, TermsError> {
                let s = s.into();
                let ok = !s.is_empty()
                    && s.len() <= 64
                    && s.bytes().all(|b| b.is_ascii_alphanumeric() || b"._:-".contains(&b));
                if ok { Ok($name(s)) } else { Err(TermsError::Identifier(s)) }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl FromStr for $name {
            type Err = TermsError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                $name::new(s)
            }
        }
    };
}

identifier!(
    /// Certificate code, unique within a registry.
    CertId
);
identifier!(
    /// An issuer or holder.
    PartyId
);
identifier!(MaterialId);

/// Lifecycle state. Every state but `Active` is terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertificateStatus {
    Active,
    Delivered,
    BoughtBack,
    Expired,
}

impl CertificateStatus {
    pub fn is_terminal(self) -> bool {
        self != CertificateStatus::Active
    }

    pub fn can_become(self, next: CertificateStatus) -> bool {
        self == CertificateStatus::Active && next.is_terminal()
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            CertificateStatus::Active => "active",
            CertificateStatus::Delivered => "delivered",
            CertificateStatus::BoughtBack => "bought-back",
            CertificateStatus::Expired => "expired",
        }
    }
}

impl fmt::Display for CertificateStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Settlement terms printed on a certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct DeliveryRules {
    /// Fraction of the residual weight withheld on physical delivery.
    pub delivery_charge_ratio: Decimal,
    /// Fraction of the residual weight withheld on cash buyback.
    pub withdrawal_charge_ratio: Decimal,
    /// Smallest face weight that may be delivered, in the certificate's unit.
    pub min_delivery_weight: f64,
    pub delivery_location: String,
    /// Days after issue during which the certificate can be settled.
    pub validity_days: Option<u32>,
}

impl DeliveryRules {
    pub fn validate(&self) -> Result<(), TermsError> {
        let max = Decimal::new(1, 1);
        for ratio in [self.delivery_charge_ratio, self.withdrawal_charge_ratio] {
            if ratio < Decimal::ZERO || ratio > max {
                return Err(TermsError::Invalid("charge ratios must lie in [0, 0.1]"));
            }
        }
        if !(self.min_delivery_weight.is_finite() && self.min_delivery_weight > 0.0) {
            return Err(TermsError::Invalid("minimum delivery weight must be > 0"));
        }
        if self.delivery_location.chars().any(char::is_control) {
            return Err(TermsError::Invalid("delivery location must not contain control characters"));
        }
        Ok(())
    }
}

/// An issued certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub id: CertId,
    pub issuer: PartyId,
    pub material: MaterialId,
    pub unit: WeightUnit,
    pub face_weight: f64,
    pub purity: f64,
    pub issue_date: NaiveDate,
    /// Fixed at issue; never recomputed from later tariffs.
    pub theta: AttenuationSpec,
    pub rules: DeliveryRules,
    pub status: CertificateStatus,
    pub owner: PartyId,
}

impl Certificate {
    pub fn validate(&self) -> Result<(), TermsError> {
        if !(self.face_weight.is_finite() && self.face_weight > 0.0) {
            return Err(TermsError::Invalid("face weight must be > 0"));
        }
        if !(self.purity > 0.0 && self.purity <= 1.0) {
            return Err(TermsError::Invalid("purity must lie in (0, 1]"));
        }
        self.rules.validate()
    }

    pub fn is_valid_on_day(&self, days: u32) -> bool {
        self.rules.validity_days.is_none_or(|limit| days <= limit)
    }
}

/// Face values an issuer offers, in one unit.
#[derive(Debug, Clone, PartialEq)]
pub struct IssuerProfile {
    pub id: PartyId,
    pub unit: WeightUnit,
    pub denominations: Vec<f64>,
}

impl IssuerProfile {
    pub fn offers(&self, weight: f64) -> bool {
        self.denominations.contains(&weight)
    }
}

/// A market quotation for the anchor, per unit weight.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketQuote {
    pub quotation: Decimal,
    /// Issuer's premium over the quotation; may be zero or negative.
    pub premium: Decimal,
    /// Unit weight the quotation is per.
    pub unit: WeightUnit,
    pub as_of: Option<NaiveDate>,
}

impl MarketQuote {
    pub fn new(quotation: Decimal, unit: WeightUnit) -> Result<Self, TermsError> {
        if quotation <= Decimal::ZERO {
            return Err(TermsError::Invalid("quotation must be > 0"));
        }
        Ok(MarketQuote { quotation, premium: Decimal::ZERO, unit, as_of: None })
    }

    pub fn with_premium(mut self, premium: Decimal) -> Self {
        self.premium = premium;
        self
    }

    pub fn on(mut self, date: NaiveDate) -> Self {
        self.as_of = Some(date);
        self
    }
}
