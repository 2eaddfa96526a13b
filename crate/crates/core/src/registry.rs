//! Certificate registry backed by the event ledger.
//!
//! Every mutation is expressed as a [`LedgerEvent`] and applied through the
//! same code path that [`Registry::replay`] uses, so a registry rebuilt from
//! its events equals the live one. Mutations take `&mut self`: one writer,
//! any number of readers between writes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{Days, NaiveDate};
use rust_decimal::Decimal;
use thiserror::Error;

use crate::attenuation::AttenuationSpec;
use crate::certificate::{
    CertId, Certificate, CertificateStatus, DeliveryRules, IssuerProfile, MarketQuote, MaterialId, PartyId, TermsError,
};
use crate::ledger::{verify_lines, Digest, IssueRecord, LedgerError, LedgerEvent, Payload};
use crate::rounding::RoundingProfile;
use crate::settlement::{self, Buyback, Pricing, SettlementError, Withdrawal};
use crate::ErrorClass;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegistryError {
    #[error(transparent)]
    Terms(#[from] TermsError),
    #[error(transparent)]
    Settlement(#[from] SettlementError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("certificate {0} already exists")]
    Duplicate(CertId),
    #[error("no certificate {0}")]
    Unknown(CertId),
    #[error("date {date} is before the issue date {issued}")]
    BeforeIssue { date: NaiveDate, issued: NaiveDate },
    #[error("date overflow adding {0} days")]
    DateOverflow(u32),
}

impl RegistryError {
    pub fn class(&self) -> ErrorClass {
        match self {
            RegistryError::Settlement(SettlementError::Rounding(_) | SettlementError::Overflow) => {
                ErrorClass::Validation
            }
            RegistryError::Settlement(_) => ErrorClass::Settlement,
            RegistryError::Ledger(_) => ErrorClass::Integrity,
            _ => ErrorClass::Validation,
        }
    }
}

/// When an operation happens: days since the certificate's issue date, and
/// optionally the calendar date to stamp on the event. Without a date the
/// stamp is issue date plus `days`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct When {
    pub days: u32,
    pub date: Option<NaiveDate>,
}

impl When {
    pub fn on(days: u32, date: NaiveDate) -> Self {
        When { days, date: Some(date) }
    }
}

impl From<u32> for When {
    fn from(days: u32) -> Self {
        When { days, date: None }
    }
}

/// Terms of a new certificate. The issuer comes from the [`IssuerProfile`].
#[derive(Debug, Clone, PartialEq)]
pub struct IssueRequest {
    pub id: CertId,
    pub material: MaterialId,
    pub face_weight: f64,
    pub purity: f64,
    pub issue_date: NaiveDate,
    pub theta: AttenuationSpec,
    pub rules: DeliveryRules,
    pub owner: PartyId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    profile: RoundingProfile,
    certificates: BTreeMap<CertId, Certificate>,
    events: Vec<LedgerEvent>,
}

impl Registry {
    pub fn new(profile: RoundingProfile) -> Self {
        Registry { profile, certificates: BTreeMap::new(), events: Vec::new() }
    }

    pub fn profile(&self) -> &RoundingProfile {
        &self.profile
    }

    pub fn certificate(&self, id: &CertId) -> Option<&Certificate> {
        self.certificates.get(id)
    }

    pub fn certificates(&self) -> impl Iterator<Item = &Certificate> {
        self.certificates.values()
    }

    pub fn events(&self) -> &[LedgerEvent] {
        &self.events
    }

    /// Hash of the last event, or the genesis digest.
    pub fn head(&self) -> Digest {
        self.events.last().map_or(Digest::GENESIS, |e| e.hash)
    }

    /// Rebuilds a registry from events, checking sequence, hash chain and
    /// lifecycle rules. Errors name the first bad seq.
    pub fn replay<I>(profile: RoundingProfile, events: I) -> Result<Self, LedgerError>
    where
        I: IntoIterator<Item = LedgerEvent>,
    {
        let mut registry = Registry::new(profile);
        for event in events {
            let expected = registry.events.len() as u64 + 1;
            if event.seq != expected {
                return Err(LedgerError::at(
                    expected,
                    format!("found seq {} where {expected} was expected", event.seq),
                ));
            }
            if event.prev_hash != registry.head() {
                return Err(LedgerError::at(expected, "prev_hash does not match the previous event"));
            }
            let resealed = LedgerEvent::seal(
                event.seq,
                event.timestamp,
                event.cert_id.clone(),
                event.payload.clone(),
                event.prev_hash,
            );
            if resealed.hash != event.hash {
                return Err(LedgerError::at(expected, "hash does not match event content"));
            }
            registry.apply(event).map_err(|reason| LedgerError::at(expected, reason))?;
        }
        Ok(registry)
    }

    /// Decodes ledger lines and replays them.
    pub fn replay_lines<'a, I>(profile: RoundingProfile, lines: I) -> Result<Self, LedgerError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        Registry::replay(profile, verify_lines(lines)?)
    }

    fn apply(&mut self, event: LedgerEvent) -> Result<(), String> {
        let id = &event.cert_id;
        match &event.payload {
            Payload::Issue(r) => {
                if self.certificates.contains_key(id) {
                    return Err(format!("certificate {id} issued twice"));
                }
                let cert = Certificate {
                    id: id.clone(),
                    issuer: r.issuer.clone(),
                    material: r.material.clone(),
                    unit: r.unit,
                    face_weight: r.face_weight,
                    purity: r.purity,
                    issue_date: event.timestamp,
                    theta: r.theta,
                    rules: r.rules.clone(),
                    status: CertificateStatus::Active,
                    owner: r.owner.clone(),
                };
                cert.validate().map_err(|e| format!("{e}"))?;
                self.certificates.insert(id.clone(), cert);
            }
            payload => {
                let cert =
                    self.certificates.get_mut(id).ok_or_else(|| format!("event for unknown certificate {id}"))?;
                if cert.status.is_terminal() {
                    return Err(format!("{} event on {} certificate {id}", payload.kind(), cert.status));
                }
                match payload {
                    Payload::Transfer { from, to, .. } => {
                        if *from != cert.owner {
                            return Err(format!("transfer from {from}, but {id} is held by {}", cert.owner));
                        }
                        cert.owner = to.clone();
                    }
                    Payload::Quote { .. } => {}
                    Payload::Deliver { .. } => cert.status = CertificateStatus::Delivered,
                    Payload::Buyback { .. } => cert.status = CertificateStatus::BoughtBack,
                    Payload::Expire { .. } => cert.status = CertificateStatus::Expired,
                    Payload::Issue(_) => unreachable!(),
                }
            }
        }
        self.events.push(event);
        Ok(())
    }

    fn append(&mut self, timestamp: NaiveDate, id: CertId, payload: Payload) {
        let event = LedgerEvent::seal(self.events.len() as u64 + 1, timestamp, id, payload, self.head());
        self.apply(event).expect("validated operation must apply");
    }

    fn active(&self, id: &CertId) -> Result<&Certificate, RegistryError> {
        let cert = self.certificates.get(id).ok_or_else(|| RegistryError::Unknown(id.clone()))?;
        if cert.status.is_terminal() {
            return Err(SettlementError::State(cert.status).into());
        }
        Ok(cert)
    }

    fn stamp(cert: &Certificate, when: When) -> Result<NaiveDate, RegistryError> {
        let date = match when.date {
            Some(date) => date,
            None => cert
                .issue_date
                .checked_add_days(Days::new(when.days.into()))
                .ok_or(RegistryError::DateOverflow(when.days))?,
        };
        if date < cert.issue_date {
            return Err(RegistryError::BeforeIssue { date, issued: cert.issue_date });
        }
        Ok(date)
    }

    pub fn issue(&mut self, issuer: &IssuerProfile, req: IssueRequest) -> Result<&Certificate, RegistryError> {
        if self.certificates.contains_key(&req.id) {
            return Err(RegistryError::Duplicate(req.id));
        }
        if !issuer.offers(req.face_weight) {
            return Err(TermsError::Denomination { weight: req.face_weight, unit: issuer.unit }.into());
        }
        let cert = Certificate {
            id: req.id.clone(),
            issuer: issuer.id.clone(),
            material: req.material.clone(),
            unit: issuer.unit,
            face_weight: req.face_weight,
            purity: req.purity,
            issue_date: req.issue_date,
            theta: req.theta,
            rules: req.rules.clone(),
            status: CertificateStatus::Active,
            owner: req.owner.clone(),
        };
        cert.validate()?;
        let record = IssueRecord {
            issuer: cert.issuer,
            material: cert.material,
            unit: cert.unit,
            face_weight: cert.face_weight,
            purity: cert.purity,
            theta: cert.theta,
            rules: cert.rules,
            owner: cert.owner,
        };
        self.append(req.issue_date, req.id.clone(), Payload::Issue(record));
        Ok(&self.certificates[&req.id])
    }

    /// Prices a sale of the certificate and records a QUOTE event.
    pub fn quote(&mut self, id: &CertId, quote: &MarketQuote, when: impl Into<When>) -> Result<Pricing, RegistryError> {
        let when = when.into();
        let cert = self.active(id)?;
        let pricing = settlement::transaction_price(cert, quote, when.days, &self.profile)?;
        let stamp = Self::stamp(cert, when)?;
        self.append(
            stamp,
            id.clone(),
            Payload::Quote {
                days: when.days,
                unit_price: pricing.unit_price,
                quote_unit: quote.unit,
                residual: pricing.booked_residual,
                price: pricing.price,
            },
        );
        Ok(pricing)
    }

    /// Changes the holder. Decay depends only on the issue date, so nothing
    /// else changes.
    pub fn transfer(
        &mut self,
        id: &CertId,
        new_owner: PartyId,
        when: impl Into<When>,
    ) -> Result<&Certificate, RegistryError> {
        let when = when.into();
        let cert = self.active(id)?;
        let stamp = Self::stamp(cert, when)?;
        let from = cert.owner.clone();
        self.append(stamp, id.clone(), Payload::Transfer { days: when.days, from, to: new_owner });
        Ok(&self.certificates[id])
    }

    pub fn deliver(&mut self, id: &CertId, when: impl Into<When>) -> Result<Withdrawal, RegistryError> {
        let when = when.into();
        let cert = self.active(id)?;
        let w = settlement::physical_delivery(cert, when.days, &self.profile)?;
        let stamp = Self::stamp(cert, when)?;
        self.append(
            stamp,
            id.clone(),
            Payload::Deliver {
                days: when.days,
                ratio: w.charge_ratio,
                residual: w.booked_residual,
                delivered: w.net,
                charged: w.charged,
            },
        );
        Ok(w)
    }

    pub fn buyback(
        &mut self,
        id: &CertId,
        quote: &MarketQuote,
        when: impl Into<When>,
    ) -> Result<Buyback, RegistryError> {
        let when = when.into();
        let cert = self.active(id)?;
        let b = settlement::buyback(cert, when.days, quote, &self.profile)?;
        let stamp = Self::stamp(cert, when)?;
        self.append(
            stamp,
            id.clone(),
            Payload::Buyback {
                days: when.days,
                ratio: b.withdrawal.charge_ratio,
                quotation: b.quotation,
                quote_unit: quote.unit,
                residual: b.withdrawal.booked_residual,
                withdrawn: b.withdrawal.net,
                charged: b.withdrawal.charged,
                cash: b.cash,
            },
        );
        Ok(b)
    }

    /// Marks a lapsed certificate EXPIRED; its residual weight falls to the
    /// issuer.
    pub fn expire(&mut self, id: &CertId, when: impl Into<When>) -> Result<Decimal, RegistryError> {
        let when = when.into();
        let cert = self.active(id)?;
        let residual = settlement::expiry(cert, when.days, &self.profile)?;
        let stamp = Self::stamp(cert, when)?;
        self.append(stamp, id.clone(), Payload::Expire { days: when.days, residual });
        Ok(residual)
    }

    /// Expires every active certificate whose validity has lapsed by `date`.
    pub fn sweep_expired(&mut self, date: NaiveDate) -> Result<Vec<CertId>, RegistryError> {
        let lapsed: Vec<(CertId, u32)> = self
            .certificates
            .values()
            .filter(|c| c.status == CertificateStatus::Active && date > c.issue_date)
            .filter_map(|c| {
                let days = u32::try_from((date - c.issue_date).num_days()).ok()?;
                (!c.is_valid_on_day(days)).then(|| (c.id.clone(), days))
            })
            .collect();
        for (id, days) in &lapsed {
            self.expire(id, When::on(*days, date))?;
        }
        Ok(lapsed.into_iter().map(|(id, _)| id).collect())
    }
}
