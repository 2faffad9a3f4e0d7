use std::process::Command as Process;

use flycat::netstates::DecoderTable;
use flycat_cli::{
    failed_suites, run_scenario, selfcheck, selfcheck_with, AlphaRange, Cell, CliError, Command, Format, ScenarioConfig,
};

fn num(c: Option<&Cell>) -> f64 {
    c.and_then(Cell::as_num).expect("numeric cell")
}

fn run_toml(text: &str) -> Result<flycat_cli::RunReport, CliError> {
    run_scenario(&ScenarioConfig::from_toml(text, None)?)
}

fn flycat() -> Process {
    Process::new(env!("CARGO_BIN_EXE_flycat"))
}

#[test]
fn toml_syntax_error_reports_location() {
    let err = ScenarioConfig::from_toml("command = \"check\"\nseed = [\n", None).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("line"), "{err}");
}

#[test]
fn unknown_fields_are_rejected() {
    let err = ScenarioConfig::from_toml("command = \"check\"\n[params]\nalpah = 1.0\n", None).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("alpah"), "{err}");
    let err = ScenarioConfig::from_toml("command = \"check\"\nsede = 3\n", None).unwrap_err();
    assert!(err.to_string().contains("sede"), "{err}");
}

#[test]
fn command_mismatch_is_a_config_error() {
    let err = ScenarioConfig::from_toml("command = \"ghz\"\n", Some(Command::Check)).unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
    assert!(ScenarioConfig::from_toml("seed = 4\n", None).is_err());
    let cfg = ScenarioConfig::from_toml("seed = 4\n", Some(Command::Ghz)).unwrap();
    assert_eq!((cfg.command, cfg.seed), (Command::Ghz, 4));
}

#[test]
fn linear_and_angular_units_agree() {
    let mhz = "command = \"feasibility\"\n[cqed]\nchi = { value = -2.0, unit = \"MHz\" }\ntau = { value = 1.0, unit = \"us\" }\n";
    let rad = format!(
        "command = \"feasibility\"\n[cqed]\nchi = {{ value = {}, unit = \"rad/s\" }}\ntau = {{ value = 1000.0, unit = \"ns\" }}\n",
        -2.0 * std::f64::consts::PI * 2e6
    );
    let a = ScenarioConfig::from_toml(mhz, None).unwrap().cqed.resolve().unwrap();
    let b = ScenarioConfig::from_toml(&rad, None).unwrap().cqed.resolve().unwrap();
    assert!((a.chi - b.chi).abs() < 1e-6 * a.chi.abs());
    assert!((a.tau - b.tau).abs() < 1e-18);
    assert_eq!(a.kappa0, 2.0 * a.chi.abs());
}

#[test]
fn invalid_values_name_the_parameter() {
    let err = run_toml("command = \"check\"\n[params]\nalpha = -1.0\n").unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("alpha"), "{err}");
    let err = run_toml("command = \"loss-budget\"\n[params]\ncable = \"custom\"\n").unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("db_per_km"), "{err}");
    let err = run_toml("command = \"tetra-decode\"\n[params]\nsyndrome = [1, 1, 1, 1, 1, 1]\nerror = \"XIIIII\"\n")
        .unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn tradeoff_flags_the_argmin_once() {
    let r = run_toml("command = \"tradeoff\"\n").unwrap();
    let (pc, fc) = (r.column("p_tot").unwrap(), r.column("interior_min").unwrap());
    let flagged: Vec<usize> = (0..r.rows.len()).filter(|&k| r.rows[k][fc].as_num() == Some(1.0)).collect();
    assert_eq!(flagged.len(), 1);
    let argmin = (0..r.rows.len())
        .min_by(|&a, &b| r.rows[a][pc].as_num().unwrap().total_cmp(&r.rows[b][pc].as_num().unwrap()))
        .unwrap();
    assert_eq!(flagged[0], argmin);
}

#[test]
fn witness_sweep_shape() {
    let mut cfg = ScenarioConfig::new(Command::Witness);
    cfg.params.alpha_range = Some(AlphaRange {
        start: 0.5,
        stop: 2.0,
        steps: 4,
    });
    cfg.params.etas = Some(vec![0.01, 0.2]);
    let r = run_scenario(&cfg).unwrap();
    assert_eq!(r.columns, ["alpha", "eta", "w_model", "f_model", "w_simulated", "f_simulated", "fidelity"]);
    assert_eq!(r.rows.len(), 8);
    for row in &r.rows {
        let f = row[6].as_num().unwrap();
        assert!((0.0..=1.0).contains(&f));
    }
}

#[test]
fn feasibility_reference_rows() {
    let r = run_scenario(&ScenarioConfig::new(Command::Feasibility)).unwrap();
    assert!((num(r.quantity("bandwidth_term")) - 0.046).abs() < 0.0023);
    assert!((num(r.quantity("eps_qubit")) - 0.083).abs() < 0.00083);
    assert!(r.notes.iter().any(|n| n.contains("internal_loss_term")));
}

#[test]
fn selfcheck_passes_and_is_reproducible() {
    let a = selfcheck(3);
    assert!(a.ok, "{:?}", failed_suites(&a));
    assert_eq!(a.rows.len(), 7);
    assert_eq!(a.to_csv(), selfcheck(3).to_csv());
}

#[test]
fn selfcheck_catches_a_corrupted_decoder() {
    let mut table = DecoderTable::standard();
    table.x_rows[0][0] = -table.x_rows[0][0];
    let r = selfcheck_with(&ScenarioConfig::new(Command::Selfcheck), &table);
    assert!(!r.ok);
    let failed = failed_suites(&r);
    assert!(failed.contains(&"decoder-table".to_string()), "{failed:?}");
    assert!(failed.contains(&"decoder-exhaustion".to_string()), "{failed:?}");
    assert!(r.to_csv().contains("# status: FAILED"));
}

#[test]
fn csv_numbers_round_trip() {
    let r = run_scenario(&ScenarioConfig::new(Command::Ghz)).unwrap();
    let text = r.to_csv();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut n = 0;
    for (rec, row) in reader.records().zip(&r.rows) {
        let rec = rec.unwrap();
        if let Some(v) = row[1].as_num() {
            assert_eq!(rec[1].parse::<f64>().unwrap().to_bits(), v.to_bits());
            n += 1;
        }
    }
    assert!(n > 5);
}

#[test]
fn json_report_schema() {
    let r = run_scenario(&ScenarioConfig::new(Command::OptimizeAlpha)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
    assert_eq!(v["schema"], "flycat.optimize-alpha.v1");
    assert_eq!(v["provenance"]["seed"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn decoding_an_error_restores_the_state() {
    let r = run_toml("command = \"tetra-decode\"\n[params]\nerror = \"XZIYII\"\n").unwrap();
    assert!((num(r.quantity("fidelity")) - 1.0).abs() < 1e-12);
    let table = run_toml("command = \"tetra-decode\"\n").unwrap();
    assert_eq!(table.rows.len(), 64);
}

#[test]
fn binary_exit_codes_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fz.json");
    let ok = flycat()
        .args(["feasibility", "--format", "json", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(ok.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["command"], "feasibility");

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "command = \"check\"\n[params]\nalpha = \n").unwrap();
    let parse = flycat().arg("check").arg("--config").arg(&bad).output().unwrap();
    assert_eq!(parse.status.code(), Some(2));

    let neg = dir.path().join("neg.toml");
    std::fs::write(&neg, "[params]\nalpha = -2.0\n").unwrap();
    let invalid = flycat().arg("check").arg("--config").arg(&neg).output().unwrap();
    assert_eq!(invalid.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("alpha"));

    let missing = flycat().args(["ghz", "--config", "/nonexistent/flycat.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}
