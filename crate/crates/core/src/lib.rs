//! Core of a decayed-commodity-money engine.
//!
//! Everything in this crate is pure: logistics costing, derivation of the daily
//! attenuation coefficient, weight decay, certificate lifecycle and settlement
//! arithmetic, the hash-chained event ledger codec and price lookups. It needs
//! `alloc` but not `std`; file formats and the command line live in the `dcm`
//! crate.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`logistics`] | total logistics cost, EOQ, CIF price, storage accrual |
//! | [`attenuation`] | attenuation coefficient derivation and residual weight |
//! | [`certificate`] | certificates, delivery rules, issuer profiles |
//! | [`settlement`] | transaction price, delivery and buyback arithmetic |
//! | [`ledger`] | event records, canonical line codec, hash chain |
//! | [`registry`] | single-writer certificate registry with replay |
//! | [`market`] | price series and bank-rate schedules |
//! | [`projection`] | long-horizon anchor decay |

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod attenuation;
pub mod certificate;
pub mod ledger;
pub mod logistics;
pub mod market;
pub mod projection;
pub mod registry;
pub mod rounding;
pub mod settlement;
pub mod units;

pub use attenuation::{attenuation_coefficient, residual_weight, AttenuationSpec, DecayMode};
pub use certificate::{CertId, Certificate, CertificateStatus, DeliveryRules, IssuerProfile, MarketQuote, PartyId};
pub use ledger::{EventKind, LedgerEvent, Payload};
pub use logistics::{CifQuote, LogisticsParams, StorageTariff};
pub use market::{PriceSeries, RateSchedule};
pub use registry::{Registry, RegistryError, When};
pub use rounding::RoundingProfile;
pub use units::WeightUnit;

/// Coarse classification of failures, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: parameters outside their domain, malformed data.
    Validation,
    /// A settlement or lifecycle rule refused the operation.
    Settlement,
    /// The ledger failed verification.
    Integrity,
}

/// Days per year in every accrual formula. No leap-year adjustment.
pub const DAYS_PER_YEAR: f64 = 365.0;
