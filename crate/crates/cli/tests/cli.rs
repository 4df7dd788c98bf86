use adkey::codes::LinearCode;
use adkey::montecarlo::HashLabResult;
use adkey::optimizer::rate_at;
use adkey::protocol::{ChannelSpec, Protocol, Q11};
use adkey::rates::{Formula, KeyRateReport};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = adkey_cli::run(std::iter::once("adkey").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    out
}

#[test]
fn text_report_marks_kept_and_discarded() {
    let out = ok(&["keyrate", "--protocol", "six-state", "--qber", "0.1", "--code", "rep:2"]);
    assert!(out.starts_with("# run: {"));
    assert!(out.contains("rep:2 [2 1 2]  no-otp  six-state qber 0.100000"));
    assert!(out.lines().any(|l| l.starts_with("0 ") && l.ends_with("kept")));
    assert!(out.lines().any(|l| l.starts_with("1 ") && l.ends_with("discarded")));
    assert!(out.contains("total_rate      0.169838\n"));
}

#[test]
fn json_round_trip_matches_library_bit_for_bit() {
    let out = ok(&[
        "keyrate",
        "--protocol",
        "bb84",
        "--qber",
        "0.12",
        "--code",
        "rep:3",
        "--formula",
        "no-otp,otp-hash",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["run"]["subcommand"], "keyrate");
    let reports: Vec<KeyRateReport> = serde_json::from_value(v["result"].clone()).unwrap();
    assert_eq!(reports.len(), 2);
    let code = LinearCode::repetition(3).unwrap();
    let spec = ChannelSpec::from_protocol(Protocol::Bb84, 0.12).unwrap();
    for (r, f) in reports.iter().zip([Formula::NoOtp, Formula::OtpHash]) {
        let direct = rate_at(&code, &spec, f, Q11::Minimize).unwrap();
        assert_eq!(*r, direct);
        let again: KeyRateReport = serde_json::from_str(&serde_json::to_string(r).unwrap()).unwrap();
        assert_eq!(again, *r);
    }
}

#[test]
fn sweep_csv_has_one_row_per_point_and_code() {
    let out = ok(&[
        "scan",
        "--protocol",
        "six-state",
        "--from",
        "0",
        "--to",
        "0.3",
        "--step",
        "0.01",
        "--code",
        "rep:2..8,spc:2..8",
        "--formula",
        "no-otp",
        "--format",
        "csv",
    ]);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("# run: "));
    assert_eq!(
        lines.next().unwrap(),
        "qber,code,formula,q11,noise_p,key_rate,key_rate_raw"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 31 * 14);
    assert!(rows[0].starts_with("0.000000,rep:2,no-otp,,,"));
    assert!(rows.last().unwrap().starts_with("0.300000,spc:8,no-otp,,,"));
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(out.as_bytes());
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let clamped: f64 = rec[5].parse().unwrap();
        let raw: f64 = rec[6].parse().unwrap();
        assert!(clamped >= 0.0 && clamped >= raw);
    }
}

#[test]
fn otp_raw_totals_may_be_negative() {
    let out = ok(&[
        "scan",
        "--protocol",
        "six-state",
        "--from",
        "0.25",
        "--to",
        "0.25",
        "--code",
        "rep:3",
        "--formula",
        "otp",
        "--format",
        "csv",
    ]);
    let row = out.lines().nth(2).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    assert_eq!(cells[5], "0.000000");
    assert!(cells[6].starts_with('-'), "{row}");
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "simulate",
        "--protocol",
        "six-state",
        "--qber",
        "0.1",
        "--samples",
        "20000",
        "--seed",
        "7",
    ];
    assert_eq!(ok(&args), ok(&args));
    let other = ok(&[
        "simulate",
        "--protocol",
        "six-state",
        "--qber",
        "0.1",
        "--samples",
        "20000",
        "--seed",
        "8",
    ]);
    assert_ne!(ok(&args), other);
}

#[test]
fn precision_flag_changes_digits() {
    let out = ok(&[
        "keyrate",
        "--protocol",
        "six-state",
        "--qber",
        "0.1",
        "--code",
        "rep:2",
        "--format",
        "csv",
        "--precision",
        "3",
    ]);
    assert_eq!(out.lines().nth(2).unwrap(), "0.100,rep:2,no-otp,,,0.170,0.170");
}

#[test]
fn bb84_rows_carry_q11_and_noise_rows_carry_p() {
    let out = ok(&[
        "keyrate",
        "--protocol",
        "bb84",
        "--qber",
        "0.1",
        "--code",
        "rep:2",
        "--q11",
        "0.01",
        "--format",
        "csv",
    ]);
    assert_eq!(out.lines().nth(2).unwrap().split(',').nth(3), Some("0.0100000"));
    let out = ok(&[
        "noise",
        "--protocol",
        "six-state",
        "--qber",
        "0.1",
        "--code",
        "full:1",
        "--noise-p",
        "0.2",
        "--format",
        "csv",
    ]);
    let row = out.lines().nth(2).unwrap();
    assert!(row.starts_with("0.100000,full:1,noise-no-otp,,0.200000,"), "{row}");
}

fn headline(out: &str) -> &str {
    out.lines()
        .find_map(|l| l.strip_prefix("threshold "))
        .map(str::trim_start)
        .unwrap()
}

#[test]
fn threshold_headline() {
    let out = ok(&["threshold", "--protocol", "six-state", "--closed-form"]);
    assert_eq!(headline(&out), "0.276393  (n -> infinity)");
    let out = ok(&["threshold", "--protocol", "bb84", "--family", "full", "--max-n", "1"]);
    assert!(headline(&out).starts_with("0.110"), "{out}");
}

#[test]
fn optimal_codes_reports_ranges_and_crossovers() {
    let out = ok(&[
        "optimal-codes",
        "--protocol",
        "six-state",
        "--from",
        "0.19",
        "--to",
        "0.23",
        "--step",
        "0.01",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let ranges = v["result"]["ranges"].as_array().unwrap();
    let first = &ranges[0];
    assert_eq!(first["code"], "rep:3");
    let q = first["crossover_to_next"].as_f64().unwrap();
    assert!((q - 0.197).abs() < 2e-3, "{q}");
}

#[test]
fn hash_lab_accepts_explicit_patterns() {
    let out = ok(&[
        "hash-lab",
        "--n",
        "4",
        "--k",
        "2",
        "--patterns",
        "0000",
        "--trials",
        "100",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let res: HashLabResult = serde_json::from_value(v["result"].clone()).unwrap();
    assert_eq!(res.failures, 0);
    assert_eq!(res.error_set_size, 1);
}

#[test]
fn out_path_receives_the_report() {
    let path = std::env::temp_dir().join(format!("adkey-cli-test-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, stdout, _) = run(&[
        "keyrate",
        "--protocol",
        "six-state",
        "--qber",
        "0.05",
        "--code",
        "rep:2",
        "--format",
        "json",
        "--out",
        p,
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["run"]["out"], p);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn errors_exit_with_single_line_causes() {
    let cases: [(&[&str], i32); 6] = [
        (
            &["keyrate", "--protocol", "bb84", "--qber", "0.1", "--code", "golay"],
            2,
        ),
        (
            &[
                "keyrate",
                "--protocol",
                "bb84",
                "--qber",
                "0.1",
                "--code",
                "rep:2",
                "--q11",
                "lots",
            ],
            2,
        ),
        (
            &[
                "keyrate",
                "--protocol",
                "bb84",
                "--qber",
                "0.1",
                "--code",
                "rep:2",
                "--q11",
                "0.9",
            ],
            2,
        ),
        (&["keyrate", "--qber", "0.1", "--code", "rep:2"], 2),
        (&["scan", "--protocol", "bb84", "--code", "rep:2", "--step", "0"], 2),
        (
            &[
                "keyrate",
                "--protocol",
                "bb84",
                "--qber",
                "0.1",
                "--code",
                "rep:2",
                "--out",
                "/nonexistent/dir/x",
            ],
            3,
        ),
    ];
    for (args, expected) in cases {
        let (code, out, err) = run(args);
        assert_eq!(code, expected, "{args:?}: {err}");
        assert!(out.is_empty());
        assert_eq!(err.lines().count(), 1, "{err}");
    }
}
