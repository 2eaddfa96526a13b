use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcm")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = dcm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

fn code(args: &[&str]) -> i32 {
    dcm(args).status.code().unwrap()
}

fn json_lines(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn theta_prints_six_places_and_mode() {
    assert_eq!(ok(&["theta", "--warehouse", "0.2", "--cif", "5000"]), "0.999960 (warehouse-only)\n");
    assert_eq!(
        ok(&["theta", "--mode", "cost-balanced", "--warehouse", "0.2", "--rate", "0.0365", "--cif", "5000"]),
        "0.999860 (cost-balanced)\n"
    );
}

#[test]
fn theta_outside_unit_interval_is_a_validation_error() {
    let out = dcm(&["theta", "--mode", "interest-credited", "--warehouse", "0.2", "--rate", "0.0365", "--cif", "5000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1.00006"));
    assert_eq!(code(&["theta", "--cif", "5000"]), 2);
    assert_eq!(code(&["theta", "--mode", "explicit", "--theta", "1"]), 2);
}

#[test]
fn bundled_reports_are_byte_identical_across_runs() {
    for name in ["lme_copper", "shfe_steel"] {
        for format in ["text", "json"] {
            let a = ok(&["--format", format, "run", "--bundled", name]);
            let b = ok(&["--format", format, "run", "--bundled", name]);
            assert_eq!(a, b);
        }
    }
}

#[test]
fn bundled_scenario_matches_files_on_disk() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for name in ["lme_copper", "shfe_steel"] {
        let file = dir.join(format!("{name}.toml"));
        assert_eq!(ok(&["--format", "json", "run", path(&file)]), ok(&["--format", "json", "run", "--bundled", name]));
    }
}

#[test]
fn lme_report_fields() {
    let steps = json_lines(&ok(&["--format", "json", "run", "--bundled", "lme_copper"]));
    assert_eq!(steps.len(), 8);
    assert_eq!(steps[2]["residual_display"], "992.7066");
    assert_eq!(steps[2]["price_display"], "4963.5330");
    assert_eq!(steps[6]["net_display"], "982.5493");
    assert_eq!(steps[7]["net_display"], "983.5348");
    assert_eq!(steps[7]["cash_display"], "5409.4414");
    assert_eq!(steps[7]["status"], "bought-back");
}

#[test]
fn reports_conserve_weight_at_every_step() {
    for name in ["lme_copper", "shfe_steel"] {
        for step in json_lines(&ok(&["--format", "json", "run", "--bundled", name])) {
            let dec = |k: &str| step[k].as_str().map(|s| s.parse::<rust_decimal::Decimal>().unwrap());
            if let (Some(net), Some(charged)) = (dec("net_display"), dec("charged_display")) {
                assert_eq!(net + charged, dec("residual_display").unwrap(), "{step}");
            }
            if let (Some(anchor), Some(issuer)) = (dec("anchor_display"), dec("issuer_accrued_display")) {
                assert_eq!(dec("residual_display").unwrap() + issuer, anchor, "{step}");
            }
        }
    }
}

const HEADER: &str = r#"
name = "custom"
issue_date = "2020-01-01"

[issuer]
id = "LME"
material = "copper"
unit = "kg"
denominations = [1000]
purity = 1.0

[issuer.attenuation]
theta = 0.99996

[issuer.rules]
delivery_charge = "0.003"
withdrawal_charge = "0.002"
min_delivery_weight = 1000
delivery_location = "warehouse"
"#;

fn scenario(dir: &Path, steps: &str) -> String {
    let file = dir.join("s.toml");
    std::fs::write(&file, format!("{HEADER}\n{steps}")).unwrap();
    path(&file).to_owned()
}

#[test]
fn empty_script_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario(dir.path(), "");
    assert_eq!(ok(&["--format", "json", "run", &file]), "");
    assert_eq!(ok(&["run", &file]), "scenario custom: 0 steps\n");
}

#[test]
fn failing_step_is_named_and_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let steps = r#"
[[steps]]
day = 0
action = "issue"
cert = "A"
face_weight = 1000
owner = "LME"

[[steps]]
day = 10
action = "buyback"
cert = "A"
price = "5000"

[[steps]]
day = 20
action = "deliver"
cert = "A"
"#;
    let out = dcm(&["run", &scenario(dir.path(), steps)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step 2"));
}

#[test]
fn decreasing_days_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let steps = r#"
[[steps]]
day = 5
action = "project"
anchor_weight = 1

[[steps]]
day = 4
action = "project"
anchor_weight = 1
"#;
    assert_eq!(code(&["run", &scenario(dir.path(), steps)]), 2);
}

#[test]
fn missing_price_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let steps = "[prices]\npath = \"nowhere.csv\"\ncurrency = \"USD\"\nunit = \"t\"\n";
    assert_eq!(code(&["run", &scenario(dir.path(), steps)]), 2);
}

fn issue_lme(ledger: &str, id: &str) -> String {
    ok(&[
        "--ledger",
        ledger,
        "issue",
        "--id",
        id,
        "--issuer",
        "LME",
        "--material",
        "copper",
        "--face",
        "1000",
        "--unit",
        "kg",
        "--issue-date",
        "2020-01-01",
        "--theta",
        "0.99996",
        "--delivery-charge",
        "0.003",
        "--withdrawal-charge",
        "0.002",
        "--min-delivery",
        "1000",
        "--denominations",
        "1,10,100,1000",
    ])
}

#[test]
fn ledger_operations_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("ledger.log");
    let ledger = path(&ledger);
    let prices = dir.path().join("prices.csv");
    std::fs::write(&prices, "date,price\n2020-07-01,5000\n2021-01-01,5500\n").unwrap();
    let prices = path(&prices);

    issue_lme(ledger, "A");
    issue_lme(ledger, "B");
    let q = ok(&["--ledger", ledger, "--prices", prices, "quote", "A", "--days", "183", "--date", "2020-07-01"]);
    assert_eq!(q, "A day 183: residual 992.7066, unit price 5000, price 4963.5330\n");
    ok(&["--ledger", ledger, "transfer", "A", "--to", "alice", "--days", "183"]);
    let d = ok(&["--ledger", ledger, "--format", "json", "deliver", "A", "--days", "365"]);
    let d: Value = serde_json::from_str(&d).unwrap();
    assert_eq!(d["net_display"], "982.5493");
    let b = ok(&["--ledger", ledger, "--prices", prices, "buyback", "B", "--days", "365", "--date", "2021-01-01"]);
    assert!(b.ends_with("cash 5409.4414\n"), "{b}");

    let verify = ok(&["--ledger", ledger, "replay-verify"]);
    assert!(verify.starts_with("ok: 6 events, head "), "{verify}");

    // refused operations leave the file alone
    let before = std::fs::read(ledger).unwrap();
    assert_eq!(code(&["--ledger", ledger, "deliver", "A", "--days", "400"]), 3);
    assert_eq!(code(&["--ledger", ledger, "quote", "missing", "--days", "1", "--price", "1"]), 2);
    assert_eq!(std::fs::read(ledger).unwrap(), before);

    // exported terms issue an identical certificate under a new code
    let terms = ok(&["--ledger", ledger, "export", "A"]);
    assert!(terms.contains("attenuation: 0.999960\n"));
    let file = dir.path().join("terms.txt");
    std::fs::write(&file, terms.replace("code: A", "code: C")).unwrap();
    ok(&["--ledger", ledger, "issue", "--terms", path(&file)]);
    assert_eq!(ok(&["--ledger", ledger, "export", "C"]), terms.replace("code: A", "code: C"));
}

#[test]
fn tampered_ledger_fails_verification_with_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("ledger.log");
    let ledger = path(&ledger);
    issue_lme(ledger, "A");
    ok(&["--ledger", ledger, "quote", "A", "--days", "183", "--price", "5000"]);
    let text = std::fs::read_to_string(ledger).unwrap();
    std::fs::write(ledger, text.replacen("price=4963.5330", "price=4963.5331", 1)).unwrap();
    let out = dcm(&["--ledger", ledger, "replay-verify"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seq 2"));
    // any command that loads the ledger refuses it
    assert_eq!(code(&["--ledger", ledger, "quote", "A", "--days", "200", "--price", "5000"]), 4);
}

#[test]
fn projection_splits_the_anchor() {
    let out = ok(&["--format", "json", "project", "--anchor", "4e8", "--theta", "0.999945", "--days", "3650"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["residual_display"], "327244967.4214");
    assert_eq!(v["issuer_accrued_display"], "72755032.5786");
    let zero = ok(&["--format", "json", "project", "--anchor", "4e8", "--theta", "0.999945", "--days", "0"]);
    let v: Value = serde_json::from_str(&zero).unwrap();
    assert_eq!(v["issuer_accrued_display"], "0.0000");
}

#[test]
fn unknown_bundled_scenario_lists_choices() {
    let out = dcm(&["run", "--bundled", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lme_copper"));
}
