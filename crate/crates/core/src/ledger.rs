//! Append-only event ledger with a SHA-256 hash chain.
//!
//! Each event is one line of seven `|`-separated fields in fixed order:
//!
//! ```text
//! seq|timestamp|kind|cert_id|payload|prev_hash|hash
//! ```
//!
//! * `seq` starts at 1 and increases by one per event.
//! * `timestamp` is an ISO-8601 date.
//! * `kind` is one of `ISSUE`, `TRANSFER`, `QUOTE`, `DELIVER`, `BUYBACK`, `EXPIRE`.
//! * `payload` is a comma-separated list of `key=value` pairs whose keys and
//!   order are fixed per kind (see [`Payload`]). Floats use the shortest
//!   representation that round-trips; decimals keep their scale; free text is
//!   percent-escaped (`%`, `,`, `=`, `|` and control characters).
//! * `prev_hash` is the previous event's `hash`, or 64 zeros for the first.
//! * `hash` is the lowercase hex SHA-256 of the line's bytes up to, not
//!   including, the final `|`.
//!
//! Decoding is strict: a line must re-encode to exactly the same bytes.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write as _};
use core::str::FromStr;

use chrono::NaiveDate;
use rust_decimal::Decimal;
use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::attenuation::{AttenuationSpec, DecayMode, DerivationInputs};
use crate::certificate::{CertId, DeliveryRules, MaterialId, PartyId};
use crate::logistics::StorageTariff;
use crate::units::WeightUnit;

/// A SHA-256 digest.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    /// `prev_hash` of the first event.
    pub const GENESIS: Digest = Digest([0; 32]);

    pub fn of(bytes: &[u8]) -> Digest {
        Digest(Sha256::digest(bytes).into())
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Parses exactly 64 lowercase hex digits.
    pub fn from_hex(s: &str) -> Option<Digest> {
        if s.len() != 64 || !s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return None;
        }
        let mut out = [0u8; 32];
        hex::decode_to_slice(s, &mut out).ok()?;
        Some(Digest(out))
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Issue,
    Transfer,
    Quote,
    Deliver,
    Buyback,
    Expire,
}

impl EventKind {
    pub const fn as_str(self) -> &'static str {
        match self {
            EventKind::Issue => "ISSUE",
            EventKind::Transfer => "TRANSFER",
            EventKind::Quote => "QUOTE",
            EventKind::Deliver => "DELIVER",
            EventKind::Buyback => "BUYBACK",
            EventKind::Expire => "EXPIRE",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "ISSUE" => EventKind::Issue,
            "TRANSFER" => EventKind::Transfer,
            "QUOTE" => EventKind::Quote,
            "DELIVER" => EventKind::Deliver,
            "BUYBACK" => EventKind::Buyback,
            "EXPIRE" => EventKind::Expire,
            _ => return Err(()),
        })
    }
}

/// Everything an ISSUE event records about the new certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct IssueRecord {
    pub issuer: PartyId,
    pub material: MaterialId,
    pub unit: WeightUnit,
    pub face_weight: f64,
    pub purity: f64,
    pub theta: AttenuationSpec,
    pub rules: DeliveryRules,
    pub owner: PartyId,
}

/// Kind-specific event content. `days` always counts from the certificate's
/// issue date.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// Keys: `issuer, material, unit, face, purity, loss, mode, inputs,
    /// delivery_charge, withdrawal_charge, min_delivery, location, validity,
    /// owner`. `inputs` is `warehouse:transfer:rate:cif` or `-`.
    Issue(IssueRecord),
    /// Keys: `days, from, to`.
    Transfer { days: u32, from: PartyId, to: PartyId },
    /// Keys: `days, unit_price, quote_unit, residual, price`.
    Quote { days: u32, unit_price: Decimal, quote_unit: WeightUnit, residual: Decimal, price: Decimal },
    /// Keys: `days, ratio, residual, delivered, charged`.
    Deliver { days: u32, ratio: Decimal, residual: Decimal, delivered: Decimal, charged: Decimal },
    /// Keys: `days, ratio, quotation, quote_unit, residual, withdrawn, charged, cash`.
    Buyback {
        days: u32,
        ratio: Decimal,
        quotation: Decimal,
        quote_unit: WeightUnit,
        residual: Decimal,
        withdrawn: Decimal,
        charged: Decimal,
        cash: Decimal,
    },
    /// Keys: `days, residual`. The residual falls to the issuer.
    Expire { days: u32, residual: Decimal },
}

impl Payload {
    pub fn kind(&self) -> EventKind {
        match self {
            Payload::Issue(_) => EventKind::Issue,
            Payload::Transfer { .. } => EventKind::Transfer,
            Payload::Quote { .. } => EventKind::Quote,
            Payload::Deliver { .. } => EventKind::Deliver,
            Payload::Buyback { .. } => EventKind::Buyback,
            Payload::Expire { .. } => EventKind::Expire,
        }
    }

    fn encode(&self) -> String {
        let mut w = PairWriter::default();
        match self {
            Payload::Issue(r) => {
                w.pair("issuer", &r.issuer);
                w.pair("material", &r.material);
                w.pair("unit", &r.unit);
                w.pair("face", &r.face_weight);
                w.pair("purity", &r.purity);
                w.pair("loss", &r.theta.daily_loss());
                w.pair("mode", &r.theta.mode());
                match r.theta.inputs() {
                    Some(i) => w.pair(
                        "inputs",
                        &format!(
                            "{}:{}:{}:{}",
                            i.tariff.daily_warehouse_charge,
                            i.tariff.outbound_transfer_charge,
                            i.tariff.bank_rate,
                            i.cif_price
                        ),
                    ),
                    None => w.pair("inputs", &"-"),
                }
                w.pair("delivery_charge", &r.rules.delivery_charge_ratio);
                w.pair("withdrawal_charge", &r.rules.withdrawal_charge_ratio);
                w.pair("min_delivery", &r.rules.min_delivery_weight);
                w.pair("location", &escape(&r.rules.delivery_location));
                match r.rules.validity_days {
                    Some(v) => w.pair("validity", &v),
                    None => w.pair("validity", &"-"),
                }
                w.pair("owner", &r.owner);
            }
            Payload::Transfer { days, from, to } => {
                w.pair("days", days);
                w.pair("from", from);
                w.pair("to", to);
            }
            Payload::Quote { days, unit_price, quote_unit, residual, price } => {
                w.pair("days", days);
                w.pair("unit_price", unit_price);
                w.pair("quote_unit", quote_unit);
                w.pair("residual", residual);
                w.pair("price", price);
            }
            Payload::Deliver { days, ratio, residual, delivered, charged } => {
                w.pair("days", days);
                w.pair("ratio", ratio);
                w.pair("residual", residual);
                w.pair("delivered", delivered);
                w.pair("charged", charged);
            }
            Payload::Buyback { days, ratio, quotation, quote_unit, residual, withdrawn, charged, cash } => {
                w.pair("days", days);
                w.pair("ratio", ratio);
                w.pair("quotation", quotation);
                w.pair("quote_unit", quote_unit);
                w.pair("residual", residual);
                w.pair("withdrawn", withdrawn);
                w.pair("charged", charged);
                w.pair("cash", cash);
            }
            Payload::Expire { days, residual } => {
                w.pair("days", days);
                w.pair("residual", residual);
            }
        }
        w.out
    }

    fn decode(kind: EventKind, text: &str) -> Result<Payload, String> {
        let mut r = PairReader::new(text);
        let payload = match kind {
            EventKind::Issue => {
                let issuer = r.parse("issuer")?;
                let material = r.parse("material")?;
                let unit = r.parse("unit")?;
                let face_weight = r.float("face")?;
                let purity = r.float("purity")?;
                let loss = r.float("loss")?;
                let mode: DecayMode = r.parse("mode")?;
                let inputs = match r.next("inputs")? {
                    "-" => None,
                    raw => Some(parse_inputs(raw)?),
                };
                let theta = AttenuationSpec::from_parts(loss, mode, inputs).map_err(|e| e.to_string())?;
                let delivery_charge_ratio = r.parse("delivery_charge")?;
                let withdrawal_charge_ratio = r.parse("withdrawal_charge")?;
                let min_delivery_weight = r.float("min_delivery")?;
                let delivery_location = unescape(r.next("location")?)?;
                let validity_days = match r.next("validity")? {
                    "-" => None,
                    raw => Some(raw.parse().map_err(|_| format!("bad validity `{raw}`"))?),
                };
                let owner = r.parse("owner")?;
                Payload::Issue(IssueRecord {
                    issuer,
                    material,
                    unit,
                    face_weight,
                    purity,
                    theta,
                    rules: DeliveryRules {
                        delivery_charge_ratio,
                        withdrawal_charge_ratio,
                        min_delivery_weight,
                        delivery_location,
                        validity_days,
                    },
                    owner,
                })
            }
            EventKind::Transfer => {
                Payload::Transfer { days: r.parse("days")?, from: r.parse("from")?, to: r.parse("to")? }
            }
            EventKind::Quote => Payload::Quote {
                days: r.parse("days")?,
                unit_price: r.parse("unit_price")?,
                quote_unit: r.parse("quote_unit")?,
                residual: r.parse("residual")?,
                price: r.parse("price")?,
            },
            EventKind::Deliver => Payload::Deliver {
                days: r.parse("days")?,
                ratio: r.parse("ratio")?,
                residual: r.parse("residual")?,
                delivered: r.parse("delivered")?,
                charged: r.parse("charged")?,
            },
            EventKind::Buyback => Payload::Buyback {
                days: r.parse("days")?,
                ratio: r.parse("ratio")?,
                quotation: r.parse("quotation")?,
                quote_unit: r.parse("quote_unit")?,
                residual: r.parse("residual")?,
                withdrawn: r.parse("withdrawn")?,
                charged: r.parse("charged")?,
                cash: r.parse("cash")?,
            },
            EventKind::Expire => Payload::Expire { days: r.parse("days")?, residual: r.parse("residual")? },
        };
        r.finish()?;
        Ok(payload)
    }
}

fn parse_inputs(raw: &str) -> Result<DerivationInputs, String> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 4 {
        return Err(format!("bad attenuation inputs `{raw}`"));
    }
    let f = |s: &str| parse_float(s);
    Ok(DerivationInputs {
        tariff: StorageTariff {
            daily_warehouse_charge: f(parts[0])?,
            outbound_transfer_charge: f(parts[1])?,
            bank_rate: f(parts[2])?,
        },
        cif_price: f(parts[3])?,
    })
}

fn parse_float(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("bad number `{s}`")),
    }
}

#[derive(Default)]
struct PairWriter {
    out: String,
}

impl PairWriter {
    fn pair(&mut self, key: &str, value: &dyn fmt::Display) {
        if !self.out.is_empty() {
            self.out.push(',');
        }
        let _ = write!(self.out, "{key}={value}");
    }
}

struct PairReader<'a> {
    parts: core::str::Split<'a, char>,
}

impl<'a> PairReader<'a> {
    fn new(text: &'a str) -> Self {
        PairReader { parts: text.split(',') }
    }

    fn next(&mut self, key: &str) -> Result<&'a str, String> {
        let part = self.parts.next().ok_or_else(|| format!("missing `{key}`"))?;
        match part.split_once('=') {
            Some((k, v)) if k == key => Ok(v),
            _ => Err(format!("expected `{key}=...`, found `{part}`")),
        }
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<T, String> {
        let raw = self.next(key)?;
        raw.parse().map_err(|_| format!("bad value for `{key}`: `{raw}`"))
    }

    fn float(&mut self, key: &str) -> Result<f64, String> {
        parse_float(self.next(key)?)
    }

    fn finish(mut self) -> Result<(), String> {
        match self.parts.next() {
            None => Ok(()),
            Some(extra) => Err(format!("unexpected trailing field `{extra}`")),
        }
    }
}

fn needs_escape(c: char) -> bool {
    matches!(c, '%' | ',' | '=' | '|') || c.is_control()
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if needs_escape(c) {
            let mut buf = [0u8; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                let _ = write!(out, "%{b:02X}");
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn unescape(s: &str) -> Result<String, String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s.get(i + 1..i + 3).ok_or("truncated escape")?;
            if !hex.bytes().all(|b| matches!(b, b'0'..=b'9' | b'A'..=b'F')) {
                return Err(format!("bad escape `%{hex}`"));
            }
            out.push(u8::from_str_radix(hex, 16).map_err(|_| "bad escape")?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| "escaped text is not UTF-8".into())
}

/// One ledger record.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEvent {
    pub seq: u64,
    pub timestamp: NaiveDate,
    pub cert_id: CertId,
    pub payload: Payload,
    pub prev_hash: Digest,
    pub hash: Digest,
}

fn body(seq: u64, timestamp: NaiveDate, cert_id: &CertId, payload: &Payload, prev: &Digest) -> String {
    format!("{seq}|{}|{}|{cert_id}|{}|{prev}", timestamp.format("%Y-%m-%d"), payload.kind(), payload.encode())
}

impl LedgerEvent {
    /// Builds an event and computes its hash.
    pub fn seal(seq: u64, timestamp: NaiveDate, cert_id: CertId, payload: Payload, prev_hash: Digest) -> LedgerEvent {
        let hash = Digest::of(body(seq, timestamp, &cert_id, &payload, &prev_hash).as_bytes());
        LedgerEvent { seq, timestamp, cert_id, payload, prev_hash, hash }
    }

    pub fn kind(&self) -> EventKind {
        self.payload.kind()
    }

    /// The event's line, without a trailing newline.
    pub fn to_line(&self) -> String {
        let mut line = body(self.seq, self.timestamp, &self.cert_id, &self.payload, &self.prev_hash);
        line.push('|');
        line.push_str(&self.hash.to_hex());
        line
    }

    /// Decodes one line and checks its own hash. Chain linkage is checked by
    /// [`verify_lines`].
    pub fn from_line(line: &str) -> Result<LedgerEvent, String> {
        let (prefix, hash_hex) = line.rsplit_once('|').ok_or("missing fields")?;
        let hash = Digest::from_hex(hash_hex).ok_or("hash is not 64 lowercase hex digits")?;
        if Digest::of(prefix.as_bytes()) != hash {
            return Err("hash does not match event content".into());
        }
        let fields: Vec<&str> = prefix.split('|').collect();
        let [seq, timestamp, kind, cert_id, payload, prev] = fields[..] else {
            return Err(format!("expected 7 fields, found {}", fields.len() + 1));
        };
        let seq: u64 = seq.parse().map_err(|_| format!("bad seq `{seq}`"))?;
        let timestamp =
            NaiveDate::parse_from_str(timestamp, "%Y-%m-%d").map_err(|_| format!("bad timestamp `{timestamp}`"))?;
        let kind: EventKind = kind.parse().map_err(|_| format!("unknown kind `{kind}`"))?;
        let cert_id = CertId::new(cert_id).map_err(|e| e.to_string())?;
        let payload = Payload::decode(kind, payload)?;
        let prev_hash = Digest::from_hex(prev).ok_or("prev_hash is not 64 lowercase hex digits")?;
        let event = LedgerEvent { seq, timestamp, cert_id, payload, prev_hash, hash };
        if event.to_line() != line {
            return Err("line is not in canonical form".into());
        }
        Ok(event)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("ledger integrity error at seq {seq}: {reason}")]
    Integrity { seq: u64, reason: String },
}

impl LedgerError {
    pub fn seq(&self) -> u64 {
        match self {
            LedgerError::Integrity { seq, .. } => *seq,
        }
    }

    pub(crate) fn at(seq: u64, reason: impl Into<String>) -> Self {
        LedgerError::Integrity { seq, reason: reason.into() }
    }
}

/// Decodes and chain-checks a sequence of lines. The `n`th line (from 1) must
/// carry seq `n` and link to the hash of line `n - 1`.
pub fn verify_lines<'a, I>(lines: I) -> Result<Vec<LedgerEvent>, LedgerError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut events = Vec::new();
    let mut prev = Digest::GENESIS;
    for (index, line) in lines.into_iter().enumerate() {
        let expected = index as u64 + 1;
        let event = LedgerEvent::from_line(line).map_err(|reason| LedgerError::at(expected, reason))?;
        if event.seq != expected {
            return Err(LedgerError::at(expected, format!("found seq {} where {expected} was expected", event.seq)));
        }
        if event.prev_hash != prev {
            return Err(LedgerError::at(expected, "prev_hash does not match the previous event"));
        }
        prev = event.hash;
        events.push(event);
    }
    Ok(events)
}
