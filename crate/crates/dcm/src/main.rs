use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{Days, NaiveDate};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dcm::error::DcmError;
use dcm::market_io::{self, SeriesMeta};
use dcm::scenario::{bundled_names, run_scenario, Scenario};
use dcm::{ledger_file, terms};
use dcm_core::attenuation::{attenuation_coefficient, AttenuationSpec, DecayMode};
use dcm_core::certificate::{CertId, Certificate, DeliveryRules, IssuerProfile, MarketQuote, MaterialId, PartyId};
use dcm_core::logistics::{CifQuote, StorageTariff};
use dcm_core::projection::wealth_projection;
use dcm_core::registry::{IssueRequest, Registry, When};
use dcm_core::{RoundingProfile, WeightUnit};
use rust_decimal::Decimal;
use serde_json::{json, Value};

/// Decayed commodity money: warehouse certificates whose weight shrinks by a
/// daily attenuation coefficient, recorded in a hash-chained ledger.
#[derive(Debug, Parser)]
#[command(name = "dcm", version)]
struct Cli {
    /// Ledger file for certificate operations.
    #[arg(long, global = true, default_value = "dcm-ledger.log")]
    ledger: PathBuf,
    /// Price series CSV (`date,price`) used when no explicit price is given.
    #[arg(long, global = true)]
    prices: Option<PathBuf>,
    /// Weight unit the price series quotes per.
    #[arg(long, global = true, default_value = "t")]
    price_unit: WeightUnit,
    /// Currency label of the price series.
    #[arg(long, global = true, default_value = "USD")]
    currency: String,
    /// Booking precision as `WEIGHT_DP:MONEY_DP`.
    #[arg(long, global = true, default_value = "4:4", value_parser = parse_rounding)]
    rounding: RoundingProfile,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive the daily attenuation coefficient from storage costs.
    Theta(ThetaArgs),
    /// Issue a certificate into the ledger.
    Issue(IssueArgs),
    /// Price a sale of a certificate.
    Quote(PricedOp),
    /// Hand a certificate to a new holder.
    Transfer {
        cert: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        at: At,
    },
    /// Deliver the physical goods against a certificate.
    Deliver {
        cert: String,
        #[command(flatten)]
        at: At,
    },
    /// Redeem a certificate for cash at the market quotation.
    Buyback(PricedOp),
    /// Expire a certificate whose validity has lapsed.
    Expire {
        cert: String,
        #[command(flatten)]
        at: At,
    },
    /// Expire every certificate whose validity has lapsed by a date.
    Sweep {
        #[arg(long)]
        date: NaiveDate,
    },
    /// Run a scenario file or a bundled scenario.
    Run {
        /// Scenario TOML file.
        #[arg(required_unless_present = "bundled", conflicts_with = "bundled")]
        path: Option<PathBuf>,
        /// Name of a bundled scenario (`lme_copper`, `shfe_steel`).
        #[arg(long)]
        bundled: Option<String>,
        /// Also write the ledger produced by the run to this file.
        #[arg(long)]
        write_ledger: Option<PathBuf>,
    },
    /// Split a stored anchor between holders and the custodian after decay.
    Project {
        #[arg(long)]
        anchor: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        days: u32,
    },
    /// Verify the ledger's hash chain and lifecycle by full replay.
    ReplayVerify,
    /// Print the terms of a certificate in the ledger.
    Export { cert: String },
}

#[derive(Debug, Args)]
struct ThetaArgs {
    #[arg(long, default_value = "warehouse-only")]
    mode: DecayMode,
    /// Coefficient for `--mode explicit`.
    #[arg(long)]
    theta: Option<f64>,
    /// Warehouse charge per unit per day.
    #[arg(long, default_value_t = 0.0)]
    warehouse: f64,
    /// Outbound transfer charge per unit per day.
    #[arg(long, default_value_t = 0.0)]
    transfer: f64,
    /// Annual bank rate.
    #[arg(long, default_value_t = 0.0)]
    rate: f64,
    /// CIF price per unit.
    #[arg(long)]
    cif: Option<f64>,
}

#[derive(Debug, Args)]
struct IssueArgs {
    /// Certificate terms file as written by `export`.
    #[arg(long)]
    terms: Option<PathBuf>,
    #[arg(long, required_unless_present = "terms")]
    id: Option<String>,
    #[arg(long, required_unless_present = "terms")]
    issuer: Option<String>,
    #[arg(long, required_unless_present = "terms")]
    material: Option<String>,
    /// Face weight, e.g. `1000`.
    #[arg(long, required_unless_present = "terms")]
    face: Option<f64>,
    #[arg(long, default_value = "t")]
    unit: WeightUnit,
    #[arg(long, default_value_t = 1.0)]
    purity: f64,
    #[arg(long, required_unless_present = "terms")]
    issue_date: Option<NaiveDate>,
    #[arg(long, required_unless_present = "terms")]
    theta: Option<f64>,
    #[arg(long, default_value = "0")]
    delivery_charge: Decimal,
    #[arg(long, default_value = "0")]
    withdrawal_charge: Decimal,
    #[arg(long, default_value_t = 0.0)]
    min_delivery: f64,
    #[arg(long, default_value = "issuer warehouse")]
    location: String,
    #[arg(long)]
    validity: Option<u32>,
    /// Initial holder; defaults to the issuer.
    #[arg(long)]
    owner: Option<String>,
    /// Face weights the issuer offers, comma separated; defaults to the face
    /// weight being issued.
    #[arg(long, value_delimiter = ',')]
    denominations: Vec<f64>,
}

#[derive(Debug, Args)]
struct At {
    /// Days since issue.
    #[arg(long)]
    days: u32,
    /// Calendar date of the event; defaults to issue date plus `days`.
    #[arg(long)]
    date: Option<NaiveDate>,
}

#[derive(Debug, Args)]
struct PricedOp {
    cert: String,
    #[command(flatten)]
    at: At,
    /// Quotation per price unit; defaults to the price series.
    #[arg(long)]
    price: Option<Decimal>,
    /// Premium per price unit.
    #[arg(long, default_value = "0")]
    premium: Decimal,
}

fn parse_rounding(s: &str) -> Result<RoundingProfile, String> {
    let (w, m) = s.split_once(':').ok_or("expected WEIGHT_DP:MONEY_DP")?;
    let w = w.parse().map_err(|_| format!("bad weight precision `{w}`"))?;
    let m = m.parse().map_err(|_| format!("bad money precision `{m}`"))?;
    RoundingProfile::new(w, m).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Text or JSON output of one command.
fn render(cli: &Cli, text: String, value: Value) -> String {
    match cli.format {
        Format::Text => text,
        Format::Json => format!("{value}\n"),
    }
}

fn execute(cli: &Cli) -> Result<String, DcmError> {
    let profile = cli.rounding;
    match &cli.command {
        Command::Theta(args) => theta(cli, args),
        Command::Issue(args) => issue(cli, args),
        Command::Quote(op) => {
            let id = cert_id(&op.cert)?;
            let p = ledger_file::with_registry(&cli.ledger, profile, |reg| {
                let (when, quote) = priced(cli, reg, &id, op)?;
                Ok(reg.quote(&id, &quote, when)?)
            })?;
            let value = json!({
                "cert": id.as_str(), "days": p.days, "residual": p.residual,
                "residual_display": p.booked_residual, "unit_price": p.unit_price,
                "price": p.price_full, "price_display": p.price,
            });
            let text = format!(
                "{id} day {}: residual {}, unit price {}, price {}\n",
                p.days, p.booked_residual, p.unit_price, p.price
            );
            Ok(render(cli, text, value))
        }
        Command::Transfer { cert, to, at } => {
            let id = cert_id(cert)?;
            let to = party(to)?;
            ledger_file::with_registry(&cli.ledger, profile, |reg| {
                let when = when(reg, &id, at)?;
                reg.transfer(&id, to.clone(), when)?;
                Ok(())
            })?;
            let value = json!({ "cert": id.as_str(), "days": at.days, "owner": to.as_str() });
            Ok(render(cli, format!("{id} day {}: owner {to}\n", at.days), value))
        }
        Command::Deliver { cert, at } => {
            let id = cert_id(cert)?;
            let w = ledger_file::with_registry(&cli.ledger, profile, |reg| {
                let when = when(reg, &id, at)?;
                Ok(reg.deliver(&id, when)?)
            })?;
            let value = json!({
                "cert": id.as_str(), "days": w.days, "residual": w.residual,
                "residual_display": w.booked_residual, "charge_ratio": w.charge_ratio,
                "net": w.net_full, "net_display": w.net, "charged_display": w.charged,
            });
            let text = format!(
                "{id} day {}: residual {}, delivered {}, charged {}\n",
                w.days, w.booked_residual, w.net, w.charged
            );
            Ok(render(cli, text, value))
        }
        Command::Buyback(op) => {
            let id = cert_id(&op.cert)?;
            let b = ledger_file::with_registry(&cli.ledger, profile, |reg| {
                let (when, quote) = priced(cli, reg, &id, op)?;
                Ok(reg.buyback(&id, &quote, when)?)
            })?;
            let w = &b.withdrawal;
            let value = json!({
                "cert": id.as_str(), "days": w.days, "residual": w.residual,
                "residual_display": w.booked_residual, "charge_ratio": w.charge_ratio,
                "net": w.net_full, "net_display": w.net, "charged_display": w.charged,
                "unit_price": b.quotation, "cash": b.cash_full, "cash_display": b.cash,
            });
            let text = format!(
                "{id} day {}: residual {}, withdrawn {}, charged {}, cash {}\n",
                w.days, w.booked_residual, w.net, w.charged, b.cash
            );
            Ok(render(cli, text, value))
        }
        Command::Expire { cert, at } => {
            let id = cert_id(cert)?;
            let residual = ledger_file::with_registry(&cli.ledger, profile, |reg| {
                let when = when(reg, &id, at)?;
                Ok(reg.expire(&id, when)?)
            })?;
            let value = json!({ "cert": id.as_str(), "days": at.days, "issuer_accrued_display": residual });
            Ok(render(cli, format!("{id} day {}: expired, {residual} to issuer\n", at.days), value))
        }
        Command::Sweep { date } => {
            let expired = ledger_file::with_registry(&cli.ledger, profile, |reg| Ok(reg.sweep_expired(*date)?))?;
            let ids: Vec<&str> = expired.iter().map(CertId::as_str).collect();
            let text = ids.iter().map(|id| format!("{id}: expired\n")).collect();
            Ok(render(cli, text, json!({ "date": date, "expired": ids })))
        }
        Command::Run { path, bundled, write_ledger } => {
            let scenario = match (path, bundled) {
                (Some(path), _) => Scenario::load(path)?,
                (None, Some(name)) => Scenario::bundled(name).map_err(|e| {
                    let names: Vec<_> = bundled_names().collect();
                    DcmError::invalid(format!("{e}; available: {}", names.join(", ")))
                })?,
                (None, None) => return Err(DcmError::invalid("give a scenario path or --bundled")),
            };
            let report = run_scenario(&scenario)?;
            if let Some(out) = write_ledger {
                write_fresh(out, report.registry.events())?;
            }
            Ok(match cli.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json_lines(),
            })
        }
        Command::Project { anchor, theta, days } => {
            let spec = AttenuationSpec::explicit(*theta).map_err(DcmError::invalid)?;
            let p = wealth_projection(*anchor, &spec, *days).map_err(DcmError::invalid)?;
            let residual = profile.weight_dec(p.residual);
            let anchor = profile.weight_dec(p.anchor);
            let issuer = anchor - residual;
            let value = json!({
                "days": days, "theta": theta, "anchor_display": anchor,
                "residual": p.residual, "residual_display": residual, "issuer_accrued_display": issuer,
            });
            let text = format!("after {days} days: residual {residual}, issuer accrued {issuer} (anchor {anchor})\n");
            Ok(render(cli, text, value))
        }
        Command::ReplayVerify => {
            let reg = ledger_file::load(&cli.ledger, profile)?;
            let head = reg.head().to_hex();
            let n = reg.events().len();
            let value = json!({ "events": n, "head": head });
            Ok(render(cli, format!("ok: {n} events, head {head}\n"), value))
        }
        Command::Export { cert } => {
            let id = cert_id(cert)?;
            let reg = ledger_file::load(&cli.ledger, profile)?;
            let cert = lookup(&reg, &id)?;
            Ok(terms::export(cert))
        }
    }
}

fn theta(cli: &Cli, args: &ThetaArgs) -> Result<String, DcmError> {
    let spec = if args.mode == DecayMode::Explicit {
        let theta = args.theta.ok_or_else(|| DcmError::invalid("--mode explicit needs --theta"))?;
        AttenuationSpec::explicit(theta).map_err(DcmError::invalid)?
    } else {
        let cif = args.cif.ok_or_else(|| DcmError::invalid("--cif is required"))?;
        let tariff = StorageTariff {
            daily_warehouse_charge: args.warehouse,
            outbound_transfer_charge: args.transfer,
            bank_rate: args.rate,
        };
        let cif = CifQuote::price(cif).map_err(DcmError::invalid)?;
        attenuation_coefficient(&tariff, &cif, args.mode).map_err(DcmError::invalid)?
    };
    let value = json!({
        "theta": spec.theta(),
        "theta_display": format!("{:.6}", spec.theta()),
        "mode": spec.mode().as_str(),
        "cost_balance_residual": spec.cost_balance_residual(),
    });
    Ok(render(cli, format!("{:.6} ({})\n", spec.theta(), spec.mode()), value))
}

fn issue(cli: &Cli, args: &IssueArgs) -> Result<String, DcmError> {
    let (terms, owner) = match &args.terms {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| DcmError::io(path, e))?;
            let terms = terms::import(&text)?;
            let owner = args.owner.as_deref().map(party).transpose()?.unwrap_or_else(|| terms.issuer.clone());
            (terms, owner)
        }
        None => {
            let need = |v: &Option<String>, flag: &str| {
                v.clone().ok_or_else(|| DcmError::invalid(format!("--{flag} is required")))
            };
            let issuer = party(&need(&args.issuer, "issuer")?)?;
            let terms = terms::CertificateTerms {
                material: MaterialId::new(need(&args.material, "material")?).map_err(DcmError::invalid)?,
                face_weight: args.face.ok_or_else(|| DcmError::invalid("--face is required"))?,
                unit: args.unit,
                purity: args.purity,
                issue_date: args.issue_date.ok_or_else(|| DcmError::invalid("--issue-date is required"))?,
                theta: AttenuationSpec::explicit(args.theta.ok_or_else(|| DcmError::invalid("--theta is required"))?)
                    .map_err(DcmError::invalid)?,
                issuer: issuer.clone(),
                code: cert_id(&need(&args.id, "id")?)?,
                rules: DeliveryRules {
                    delivery_charge_ratio: args.delivery_charge,
                    withdrawal_charge_ratio: args.withdrawal_charge,
                    min_delivery_weight: args.min_delivery,
                    delivery_location: args.location.clone(),
                    validity_days: args.validity,
                },
            };
            let owner = args.owner.as_deref().map(party).transpose()?.unwrap_or(issuer);
            (terms, owner)
        }
    };
    let profile = IssuerProfile {
        id: terms.issuer.clone(),
        unit: terms.unit,
        denominations: if args.denominations.is_empty() { vec![terms.face_weight] } else { args.denominations.clone() },
    };
    let request = IssueRequest {
        id: terms.code,
        material: terms.material,
        face_weight: terms.face_weight,
        purity: terms.purity,
        issue_date: terms.issue_date,
        theta: terms.theta,
        rules: terms.rules,
        owner,
    };
    let cert = ledger_file::with_registry(&cli.ledger, cli.rounding, |reg| Ok(reg.issue(&profile, request)?.clone()))?;
    let value = json!({
        "cert": cert.id.as_str(), "issuer": cert.issuer.as_str(), "owner": cert.owner.as_str(),
        "face_weight": cert.face_weight, "unit": cert.unit.symbol(), "theta": cert.theta.theta(),
        "issue_date": cert.issue_date, "status": cert.status.to_string(),
    });
    let text = format!(
        "{} issued: {} {} {} by {}, theta {:.6}, owner {}\n",
        cert.id,
        cert.face_weight,
        cert.unit,
        cert.material,
        cert.issuer,
        cert.theta.theta(),
        cert.owner
    );
    Ok(render(cli, text, value))
}

fn cert_id(s: &str) -> Result<CertId, DcmError> {
    CertId::new(s).map_err(DcmError::invalid)
}

fn party(s: &str) -> Result<PartyId, DcmError> {
    PartyId::new(s).map_err(DcmError::invalid)
}

fn lookup<'a>(reg: &'a Registry, id: &CertId) -> Result<&'a Certificate, DcmError> {
    reg.certificate(id).ok_or_else(|| DcmError::invalid(format!("no certificate {id} in the ledger")))
}

/// The event day and calendar date for an operation on `id`.
fn when(reg: &Registry, id: &CertId, at: &At) -> Result<When, DcmError> {
    match at.date {
        Some(date) => Ok(When::on(at.days, date)),
        None => {
            let cert = lookup(reg, id)?;
            let date = cert
                .issue_date
                .checked_add_days(Days::new(at.days.into()))
                .ok_or_else(|| DcmError::invalid("date overflow"))?;
            Ok(When::on(at.days, date))
        }
    }
}

fn priced(cli: &Cli, reg: &Registry, id: &CertId, op: &PricedOp) -> Result<(When, MarketQuote), DcmError> {
    let when = when(reg, id, &op.at)?;
    let date = when.date.expect("dated above");
    let quotation = match (op.price, &cli.prices) {
        (Some(price), _) => price,
        (None, Some(path)) => {
            let meta = SeriesMeta {
                material: lookup(reg, id)?.material.to_string(),
                currency: cli.currency.clone(),
                unit: cli.price_unit,
            };
            let file = std::fs::File::open(path).map_err(|e| DcmError::io(path, e))?;
            market_io::load_series(file, &meta)?.quote_at(date).map_err(DcmError::invalid)?
        }
        (None, None) => return Err(DcmError::invalid("give --price or --prices")),
    };
    let quote =
        MarketQuote::new(quotation, cli.price_unit).map_err(DcmError::invalid)?.with_premium(op.premium).on(date);
    Ok((when, quote))
}

/// Writes a complete ledger to a new file, replacing any existing one.
fn write_fresh(path: &Path, events: &[dcm_core::LedgerEvent]) -> Result<(), DcmError> {
    match std::fs::remove_file(path) {
        Ok(()) => {}
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
        Err(e) => return Err(DcmError::io(path, e)),
    }
    ledger_file::append(path, events)
}
