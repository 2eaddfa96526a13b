//! Scripted scenarios: one issuer, one price series, and a list of steps run
//! against a fresh registry.
//!
//! A scenario is a TOML file:
//!
//! ```toml
//! name = "lme_copper"
//! issue_date = "2020-01-01"
//! rate_schedule = "rates.csv"        # optional, `date,rate`
//!
//! [rounding]                         # optional, defaults 4 / 4
//! weight_dp = 4
//! money_dp = 4
//!
//! [issuer]
//! id = "LME"
//! material = "copper"
//! unit = "kg"
//! denominations = [1, 10, 100, 1000]
//! purity = 0.9999
//!
//! [issuer.attenuation]               # either `theta = ...` or a tariff
//! mode = "warehouse-only"
//! daily_warehouse_charge = 0.2
//! cif_price = 5000.0
//!
//! [issuer.rules]
//! delivery_charge = "0.003"
//! withdrawal_charge = "0.002"
//! min_delivery_weight = 1000
//! delivery_location = "LME designated warehouse"
//! # validity_days = 18250
//!
//! [prices]                           # optional, `date,price`
//! path = "lme_copper_prices.csv"
//! currency = "USD"
//! unit = "t"
//!
//! [[steps]]
//! day = 0
//! action = "issue"
//! cert = "LME-CU-A"
//! face_weight = 1000
//! owner = "LME"
//! ```
//!
//! Step actions: `issue`, `residual`, `quote`, `transfer`, `deliver`,
//! `buyback`, `expire` and `project`. `day` counts from `issue_date` and must
//! not decrease. `date` optionally pins the calendar date used for the event
//! stamp and the price lookup; otherwise it is `issue_date + day`. A `quote`
//! or `buyback` takes its quotation from `price` if given, else from the
//! series. `project` splits `anchor_weight` after `day` days of decay.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};
use dcm_core::attenuation::{attenuation_coefficient, AttenuationSpec, DecayMode};
use dcm_core::certificate::{CertId, DeliveryRules, IssuerProfile, MarketQuote, MaterialId, PartyId};
use dcm_core::logistics::{CifQuote, StorageTariff};
use dcm_core::market::{PriceSeries, RateSchedule};
use dcm_core::projection::wealth_projection;
use dcm_core::registry::{IssueRequest, Registry, When};
use dcm_core::settlement;
use dcm_core::{RoundingProfile, WeightUnit};
use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::DcmError;
use crate::market_io::{self, SeriesMeta};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub issue_date: NaiveDate,
    #[serde(default)]
    pub rounding: RoundingConfig,
    pub issuer: IssuerConfig,
    pub prices: Option<PricesConfig>,
    pub rate_schedule: Option<PathBuf>,
    #[serde(default)]
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundingConfig {
    pub weight_dp: u32,
    pub money_dp: u32,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        let p = RoundingProfile::default();
        RoundingConfig { weight_dp: p.weight_dp, money_dp: p.money_dp }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssuerConfig {
    pub id: String,
    pub material: String,
    pub unit: String,
    pub denominations: Vec<f64>,
    pub purity: f64,
    pub attenuation: AttenuationConfig,
    pub rules: RulesConfig,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttenuationConfig {
    pub mode: Option<String>,
    pub theta: Option<f64>,
    pub daily_warehouse_charge: Option<f64>,
    pub outbound_transfer_charge: Option<f64>,
    /// Falls back to the rate schedule on the issue date, then zero.
    pub bank_rate: Option<f64>,
    pub cif_price: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RulesConfig {
    pub delivery_charge: Decimal,
    pub withdrawal_charge: Decimal,
    pub min_delivery_weight: f64,
    pub delivery_location: String,
    pub validity_days: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricesConfig {
    pub path: PathBuf,
    pub currency: String,
    pub unit: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Issue,
    Residual,
    Quote,
    Transfer,
    Deliver,
    Buyback,
    Expire,
    Project,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Step {
    pub day: u32,
    pub date: Option<NaiveDate>,
    pub action: Action,
    pub cert: Option<String>,
    pub face_weight: Option<f64>,
    pub owner: Option<String>,
    pub to: Option<String>,
    pub premium: Option<Decimal>,
    pub price: Option<Decimal>,
    pub anchor_weight: Option<f64>,
}

/// A parsed scenario with its market data loaded.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub prices: Option<PriceSeries>,
    pub rates: Option<RateSchedule>,
}

const BUNDLED: &[(&str, &str)] = &[
    ("lme_copper", include_str!("../scenarios/lme_copper.toml")),
    ("shfe_steel", include_str!("../scenarios/shfe_steel.toml")),
];

const BUNDLED_DATA: &[(&str, &str)] = &[
    ("lme_copper_prices.csv", include_str!("../scenarios/lme_copper_prices.csv")),
    ("shfe_steel_prices.csv", include_str!("../scenarios/shfe_steel_prices.csv")),
];

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(name, _)| *name)
}

impl Scenario {
    pub fn parse(text: &str, read: impl Fn(&Path) -> Result<String, DcmError>) -> Result<Self, DcmError> {
        let config: ScenarioConfig = toml::from_str(text).map_err(DcmError::invalid)?;
        if let Some(pair) = config.steps.windows(2).find(|w| w[1].day < w[0].day) {
            return Err(DcmError::invalid(format!(
                "step days must not decrease ({} after {})",
                pair[1].day, pair[0].day
            )));
        }
        let prices = match &config.prices {
            Some(p) => {
                let meta = SeriesMeta {
                    material: config.issuer.material.clone(),
                    currency: p.currency.clone(),
                    unit: p.unit.parse().map_err(DcmError::invalid)?,
                };
                Some(market_io::load_series(read(&p.path)?.as_bytes(), &meta)?)
            }
            None => None,
        };
        let rates = match &config.rate_schedule {
            Some(path) => Some(market_io::load_rates(read(path)?.as_bytes())?),
            None => None,
        };
        Ok(Scenario { config, prices, rates })
    }

    /// Loads a scenario file; data paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, DcmError> {
        let text = std::fs::read_to_string(path).map_err(|e| DcmError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Scenario::parse(&text, |rel| {
            let full = base.join(rel);
            std::fs::read_to_string(&full).map_err(|e| DcmError::io(&full, e))
        })
    }

    /// One of the scenarios shipped in the binary.
    pub fn bundled(name: &str) -> Result<Self, DcmError> {
        let (_, text) = BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| DcmError::invalid(format!("no bundled scenario `{name}`")))?;
        Scenario::parse(text, |rel| {
            BUNDLED_DATA
                .iter()
                .find(|(file, _)| Path::new(file) == rel)
                .map(|(_, data)| (*data).to_owned())
                .ok_or_else(|| DcmError::invalid(format!("no bundled file {}", rel.display())))
        })
    }

    pub fn rounding(&self) -> Result<RoundingProfile, DcmError> {
        let r = self.config.rounding;
        RoundingProfile::new(r.weight_dp, r.money_dp).map_err(DcmError::invalid)
    }

    pub fn issuer_profile(&self) -> Result<IssuerProfile, DcmError> {
        let i = &self.config.issuer;
        Ok(IssuerProfile {
            id: PartyId::new(&i.id).map_err(DcmError::invalid)?,
            unit: i.unit.parse().map_err(DcmError::invalid)?,
            denominations: i.denominations.clone(),
        })
    }

    /// θ for every certificate this scenario issues.
    pub fn theta(&self) -> Result<AttenuationSpec, DcmError> {
        let a = &self.config.issuer.attenuation;
        let mode = match &a.mode {
            Some(m) => m.parse::<DecayMode>().map_err(DcmError::invalid)?,
            None if a.theta.is_some() => DecayMode::Explicit,
            None => DecayMode::default(),
        };
        if mode == DecayMode::Explicit {
            let theta = a.theta.ok_or_else(|| DcmError::invalid("explicit attenuation needs `theta`"))?;
            return AttenuationSpec::explicit(theta).map_err(DcmError::invalid);
        }
        if a.theta.is_some() {
            return Err(DcmError::invalid("`theta` is only allowed with mode `explicit`"));
        }
        let bank_rate = match (a.bank_rate, &self.rates) {
            (Some(rate), _) => rate,
            (None, Some(rates)) => rates.rate_at(self.config.issue_date).map_err(DcmError::invalid)?,
            (None, None) => 0.0,
        };
        let tariff = StorageTariff {
            daily_warehouse_charge: a.daily_warehouse_charge.unwrap_or(0.0),
            outbound_transfer_charge: a.outbound_transfer_charge.unwrap_or(0.0),
            bank_rate,
        };
        let cif = a.cif_price.ok_or_else(|| DcmError::invalid("derived attenuation needs `cif_price`"))?;
        let cif = CifQuote::price(cif).map_err(DcmError::invalid)?;
        attenuation_coefficient(&tariff, &cif, mode).map_err(DcmError::invalid)
    }

    fn rules(&self) -> DeliveryRules {
        let r = &self.config.issuer.rules;
        DeliveryRules {
            delivery_charge_ratio: r.delivery_charge,
            withdrawal_charge_ratio: r.withdrawal_charge,
            min_delivery_weight: r.min_delivery_weight,
            delivery_location: r.delivery_location.clone(),
            validity_days: r.validity_days,
        }
    }
}

/// One report record per script step. Each quantity appears at full
/// precision and, in the `_display` field, rounded for booking.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub day: u32,
    pub date: NaiveDate,
    pub action: Option<Action>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cert: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub owner: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_display: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_display: Option<Decimal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit_price: Option<Decimal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub price: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub price_display: Option<Decimal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charge_ratio: Option<Decimal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net_display: Option<Decimal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charged_display: Option<Decimal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cash: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cash_display: Option<Decimal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor_display: Option<Decimal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub issuer_accrued_display: Option<Decimal>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub name: String,
    pub steps: Vec<StepRecord>,
    /// Ledger produced by the run.
    pub registry: Registry,
}

impl ScenarioReport {
    /// One JSON object per step, newline-terminated.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&serde_json::to_string(step).expect("report records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("scenario {}: {} steps\n", self.name, self.steps.len());
        for s in &self.steps {
            let action = s.action.map_or("", |a| action_name(a));
            let _ = write!(out, "[{}] day {} ({}) {action}", s.step, s.day, s.date);
            if let Some(cert) = &s.cert {
                let _ = write!(out, " {cert}");
            }
            let unit = s.unit.as_deref().unwrap_or("");
            let mut parts = Vec::new();
            if let Some(t) = &s.theta_display {
                parts.push(format!("theta {t}"));
            }
            if let Some(w) = &s.residual_display {
                parts.push(format!("residual {w} {unit}"));
            }
            if let Some(p) = &s.unit_price {
                parts.push(format!("unit price {p}"));
            }
            if let Some(p) = &s.price_display {
                parts.push(format!("price {p}"));
            }
            if let (Some(n), Some(c)) = (&s.net_display, &s.charged_display) {
                parts.push(format!("net {n} {unit} (charged {c} {unit})"));
            }
            if let Some(c) = &s.cash_display {
                parts.push(format!("cash {c}"));
            }
            if let (Some(a), Some(i)) = (&s.anchor_display, &s.issuer_accrued_display) {
                parts.push(format!("anchor {a} {unit}, issuer accrued {i} {unit}"));
            }
            if let Some(o) = &s.owner {
                parts.push(format!("owner {o}"));
            }
            if let Some(st) = &s.status {
                parts.push(format!("status {st}"));
            }
            if !parts.is_empty() {
                let _ = write!(out, ": {}", parts.join(", "));
            }
            out.push('\n');
        }
        out
    }
}

fn action_name(a: Action) -> &'static str {
    match a {
        Action::Issue => "issue",
        Action::Residual => "residual",
        Action::Quote => "quote",
        Action::Transfer => "transfer",
        Action::Deliver => "deliver",
        Action::Buyback => "buyback",
        Action::Expire => "expire",
        Action::Project => "project",
    }
}

fn need<'a, T>(value: &'a Option<T>, field: &str) -> Result<&'a T, DcmError> {
    value.as_ref().ok_or_else(|| DcmError::invalid(format!("step needs `{field}`")))
}

fn cert_id(step: &Step) -> Result<CertId, DcmError> {
    CertId::new(need(&step.cert, "cert")?.as_str()).map_err(DcmError::invalid)
}

fn party(s: &str) -> Result<PartyId, DcmError> {
    PartyId::new(s).map_err(DcmError::invalid)
}

/// Runs every step against a fresh registry. The first failing step aborts
/// the run with its index.
pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioReport, DcmError> {
    let profile = scenario.rounding()?;
    let issuer = scenario.issuer_profile()?;
    let theta = scenario.theta()?;
    let material = MaterialId::new(&scenario.config.issuer.material).map_err(DcmError::invalid)?;
    let quote_unit = match &scenario.config.prices {
        Some(p) => p.unit.parse().map_err(DcmError::invalid)?,
        None => issuer.unit,
    };
    let mut registry = Registry::new(profile);
    let mut steps = Vec::with_capacity(scenario.config.steps.len());
    for (index, step) in scenario.config.steps.iter().enumerate() {
        let record = run_step(scenario, &mut registry, &issuer, &material, theta, quote_unit, index, step)
            .map_err(|e| DcmError::Step { index, source: Box::new(e) })?;
        steps.push(record);
    }
    Ok(ScenarioReport { name: scenario.config.name.clone(), steps, registry })
}

#[allow(clippy::too_many_arguments)]
fn run_step(
    scenario: &Scenario,
    registry: &mut Registry,
    issuer: &IssuerProfile,
    material: &MaterialId,
    theta: AttenuationSpec,
    quote_unit: WeightUnit,
    index: usize,
    step: &Step,
) -> Result<StepRecord, DcmError> {
    let cfg = &scenario.config;
    let date = match step.date {
        Some(d) => d,
        None => cfg
            .issue_date
            .checked_add_days(Days::new(step.day.into()))
            .ok_or_else(|| DcmError::invalid("date overflow"))?,
    };
    let when = When::on(step.day, date);
    let mut rec = StepRecord {
        step: index,
        day: step.day,
        date,
        action: Some(step.action),
        cert: step.cert.clone(),
        unit: Some(issuer.unit.symbol().to_owned()),
        ..StepRecord::default()
    };
    let quote_for = |step: &Step| -> Result<MarketQuote, DcmError> {
        let quotation = match (step.price, &scenario.prices) {
            (Some(p), _) => p,
            (None, Some(series)) => series.quote_at(date).map_err(DcmError::invalid)?,
            (None, None) => return Err(DcmError::invalid("no price given and no price series loaded")),
        };
        Ok(MarketQuote::new(quotation, quote_unit)
            .map_err(DcmError::invalid)?
            .with_premium(step.premium.unwrap_or_default())
            .on(date))
    };
    match step.action {
        Action::Issue => {
            if step.day != 0 && step.date.is_none() {
                return Err(DcmError::invalid("issue steps run on day 0 unless a date is given"));
            }
            let req = IssueRequest {
                id: cert_id(step)?,
                material: material.clone(),
                face_weight: *need(&step.face_weight, "face_weight")?,
                purity: cfg.issuer.purity,
                issue_date: if step.day == 0 { cfg.issue_date } else { date },
                theta,
                rules: scenario.rules(),
                owner: party(need(&step.owner, "owner")?)?,
            };
            let cert = registry.issue(issuer, req)?.clone();
            rec.theta = Some(cert.theta.theta());
            rec.theta_display = Some(format!("{:.6}", cert.theta.theta()));
            rec.residual = Some(cert.face_weight);
            rec.residual_display = Some(registry.profile().weight(cert.face_weight).map_err(DcmError::invalid)?);
            rec.owner = Some(cert.owner.to_string());
            rec.status = Some(cert.status.to_string());
        }
        Action::Residual => {
            let id = cert_id(step)?;
            let cert = registry.certificate(&id).ok_or_else(|| DcmError::invalid(format!("no certificate {id}")))?;
            let residual = settlement::residual(cert, step.day);
            rec.residual = Some(residual);
            rec.residual_display = Some(registry.profile().weight(residual).map_err(DcmError::invalid)?);
        }
        Action::Quote => {
            let id = cert_id(step)?;
            let p = registry.quote(&id, &quote_for(step)?, when)?;
            rec.residual = Some(p.residual);
            rec.residual_display = Some(p.booked_residual);
            rec.unit_price = Some(p.unit_price);
            rec.price = Some(p.price_full);
            rec.price_display = Some(p.price);
        }
        Action::Transfer => {
            let id = cert_id(step)?;
            let cert = registry.transfer(&id, party(need(&step.to, "to")?)?, when)?;
            rec.owner = Some(cert.owner.to_string());
        }
        Action::Deliver => {
            let id = cert_id(step)?;
            let w = registry.deliver(&id, when)?;
            rec.residual = Some(w.residual);
            rec.residual_display = Some(w.booked_residual);
            rec.charge_ratio = Some(w.charge_ratio);
            rec.net = Some(w.net_full);
            rec.net_display = Some(w.net);
            rec.charged_display = Some(w.charged);
            rec.status = Some(registry.certificate(&id).expect("delivered").status.to_string());
        }
        Action::Buyback => {
            let id = cert_id(step)?;
            let b = registry.buyback(&id, &quote_for(step)?, when)?;
            let w = &b.withdrawal;
            rec.residual = Some(w.residual);
            rec.residual_display = Some(w.booked_residual);
            rec.unit_price = Some(b.quotation);
            rec.charge_ratio = Some(w.charge_ratio);
            rec.net = Some(w.net_full);
            rec.net_display = Some(w.net);
            rec.charged_display = Some(w.charged);
            rec.cash = Some(b.cash_full);
            rec.cash_display = Some(b.cash);
            rec.status = Some(registry.certificate(&id).expect("bought back").status.to_string());
        }
        Action::Expire => {
            let id = cert_id(step)?;
            let accrued = registry.expire(&id, when)?;
            rec.issuer_accrued_display = Some(accrued);
            rec.status = Some(registry.certificate(&id).expect("expired").status.to_string());
        }
        Action::Project => {
            let anchor = *need(&step.anchor_weight, "anchor_weight")?;
            let p = wealth_projection(anchor, &theta, step.day).map_err(DcmError::invalid)?;
            let prof = registry.profile();
            rec.theta = Some(theta.theta());
            rec.theta_display = Some(format!("{:.6}", theta.theta()));
            rec.residual = Some(p.residual.to_f64().unwrap_or(f64::NAN));
            let residual = prof.weight_dec(p.residual);
            let anchor = prof.weight_dec(p.anchor);
            rec.residual_display = Some(residual);
            rec.anchor_display = Some(anchor);
            rec.issuer_accrued_display = Some(anchor - residual);
        }
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_files(p: &Path) -> Result<String, DcmError> {
        Err(DcmError::invalid(format!("unexpected read of {}", p.display())))
    }

    const BASE: &str = r#"
name = "t"
issue_date = "2020-01-01"
[issuer]
id = "X"
material = "copper"
unit = "t"
denominations = [1]
purity = 1.0
[issuer.rules]
delivery_charge = "0"
withdrawal_charge = "0"
min_delivery_weight = 1
delivery_location = "here"
"#;

    fn with_attenuation(att: &str) -> Result<Scenario, DcmError> {
        Scenario::parse(&format!("{BASE}[issuer.attenuation]\n{att}\n"), no_files)
    }

    #[test]
    fn bundled_scenarios_parse() {
        for name in bundled_names() {
            let s = Scenario::bundled(name).unwrap();
            assert_eq!(s.config.name, name);
            assert!(s.prices.is_some());
        }
        assert!(Scenario::bundled("missing").is_err());
    }

    #[test]
    fn attenuation_forms() {
        let s = with_attenuation("daily_warehouse_charge = 0.2\ncif_price = 5000.0").unwrap();
        assert_eq!(s.theta().unwrap().mode(), DecayMode::WarehouseOnly);
        assert!((s.theta().unwrap().theta() - 0.99996).abs() < 1e-15);
        let s = with_attenuation("theta = 0.999945").unwrap();
        assert_eq!(s.theta().unwrap().mode(), DecayMode::Explicit);
        let s = with_attenuation("mode = \"cost-balanced\"\ntheta = 0.9").unwrap();
        assert!(s.theta().is_err());
        let s = with_attenuation("mode = \"cost-balanced\"\ndaily_warehouse_charge = 0.2").unwrap();
        assert!(s.theta().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(with_attenuation("theta = 0.9\nspeed = 1").is_err());
    }

    #[test]
    fn project_step_sums_to_anchor() {
        let text = format!(
            "{BASE}[issuer.attenuation]\ntheta = 0.999945\n[[steps]]\nday = 3650\naction = \"project\"\nanchor_weight = 4e8\n"
        );
        let report = run_scenario(&Scenario::parse(&text, no_files).unwrap()).unwrap();
        let step = &report.steps[0];
        assert_eq!(step.residual_display.unwrap() + step.issuer_accrued_display.unwrap(), step.anchor_display.unwrap());
        assert_eq!(step.residual_display.unwrap().to_string(), "327244967.4214");
    }

    #[test]
    fn quote_without_prices_fails_at_its_step() {
        let text = format!(
            "{BASE}[issuer.attenuation]\ntheta = 0.9999\n[[steps]]\nday = 0\naction = \"issue\"\ncert = \"A\"\nface_weight = 1\nowner = \"X\"\n[[steps]]\nday = 1\naction = \"quote\"\ncert = \"A\"\n"
        );
        let err = run_scenario(&Scenario::parse(&text, no_files).unwrap()).unwrap_err();
        assert!(matches!(err, DcmError::Step { index: 1, .. }), "{err}");
        assert_eq!(err.exit_code(), 2);
    }
}
