use std::fs;

use demjanenko_cli::{
    cheb_certificate, cmd_cheb, cmd_hasse_scan, cmd_orbit, cmd_quartic, parse_rational, quartic_certificate,
    scan_primes, ExitCode, HasseScanArgs, OrbitArgs, QuarticArgs, ResultEnvelope,
};
use serde_json::Value;

fn x4_args() -> QuarticArgs {
    QuarticArgs {
        a: "-4".into(),
        b: "-3".into(),
        generator: Some("4,-16".into()),
        ..Default::default()
    }
}

#[test]
fn envelope_round_trip() {
    let out = cmd_quartic(&x4_args()).unwrap();
    assert_eq!(out.exit, ExitCode::Certified);
    let text = serde_json::to_string(&out.envelope).unwrap();
    let back: ResultEnvelope = serde_json::from_str(&text).unwrap();
    assert_eq!(back, out.envelope);
    let cert = quartic_certificate(&back).unwrap();
    assert_eq!(cert.points.len(), 12);
    assert!(cert.index_bound <= 120 && cert.n_window >= 40);
    // Rationals are written as decimal strings.
    let first = &back.payload["points"][0]["x"];
    assert!(first["num"].is_string() && first["den"].is_string());
}

#[test]
fn payloads_are_deterministic() {
    let a = cmd_quartic(&x4_args()).unwrap().envelope;
    let b = cmd_quartic(&x4_args()).unwrap().envelope;
    assert_eq!(serde_json::to_string(&a.payload).unwrap(), serde_json::to_string(&b.payload).unwrap());
}

#[test]
fn preconditions_exit_two() {
    let singular = QuarticArgs { a: "1".into(), b: "0".into(), rank: Some(0), ..Default::default() };
    assert_eq!(cmd_quartic(&singular).unwrap_err().exit_code(), ExitCode::Precondition);
    let off = QuarticArgs { generator: Some("4,15".into()), ..x4_args() };
    assert_eq!(cmd_quartic(&off).unwrap_err().exit_code(), ExitCode::Precondition);
    let malformed = QuarticArgs { a: "-4/x".into(), ..x4_args() };
    assert_eq!(cmd_quartic(&malformed).unwrap_err().exit_code(), ExitCode::Precondition);
    assert!(parse_rational("3/0").is_err());
    assert_eq!(cmd_cheb(2).unwrap_err().exit_code(), ExitCode::Precondition);
}

#[test]
fn torsion_only_twist() {
    let args = QuarticArgs { a: "-4".into(), b: "-6".into(), alpha: 5, rank: Some(0), ..Default::default() };
    let cert = quartic_certificate(&cmd_quartic(&args).unwrap().envelope).unwrap();
    assert!(cert.points.is_empty());
    assert_eq!(cert.index_bound, 0);
}

#[test]
fn cheb_tags_and_codes() {
    let nine = cmd_cheb(9).unwrap();
    assert_eq!(nine.exit, ExitCode::Certified);
    assert_eq!(nine.envelope.payload["case"], Value::from("3 | d"));
    assert!(cheb_certificate(&nine.envelope).unwrap().points.is_empty());
    let twenty = cmd_cheb(20).unwrap();
    assert_eq!(twenty.envelope.payload["case"], Value::from("4 | d, 3 ∤ d"));
    assert_eq!(cheb_certificate(&twenty.envelope).unwrap().points.len(), 12);
    let seven = cmd_cheb(7).unwrap();
    assert_eq!(seven.exit, ExitCode::Undetermined);
    assert!(cheb_certificate(&seven.envelope).unwrap().evidence.is_some());
}

#[test]
fn orbit_identities() {
    let run = |start: &str, beta: Option<&str>| {
        cmd_orbit(&OrbitArgs { start: start.into(), beta: beta.map(Into::into), n: 2, ..Default::default() })
            .unwrap()
            .envelope
            .payload
    };
    let two = serde_json::json!([{ "num": "2", "den": "1" }]);
    assert_eq!(run("0", None)["orbit"], two);
    assert_eq!(run("2", None)["orbit"], two);
    assert_eq!(run("-2", None)["orbit"], two);
    assert_eq!(run("1", Some("0"))["shifted_intersection"], two);
    assert_eq!(run("-1", Some("0"))["shifted_intersection"], two);
}

#[test]
fn scan_range() {
    assert_eq!(scan_primes(3, 500), vec![73, 97, 193, 241, 313, 337, 409, 433, 457]);
    assert!(scan_primes(74, 96).is_empty());
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let args = HasseScanArgs { lo: 3, hi: 500, assume_parity: true, cache_dir: Some(dir.path().to_path_buf()) };
    let (first, s1) = cmd_hasse_scan(&args).unwrap();
    assert_eq!((s1.hits, s1.computed, s1.rejected), (0, 9, 0));
    let (second, s2) = cmd_hasse_scan(&args).unwrap();
    assert_eq!((s2.hits, s2.computed, s2.rejected), (9, 0, 0));
    assert_eq!(
        serde_json::to_string(&first.envelope.payload).unwrap(),
        serde_json::to_string(&second.envelope.payload).unwrap()
    );

    // Flip a verdict inside one line and truncate another.
    let path = dir.path().join("hasse-scan.jsonl");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[0] = lines[0].replacen("candidate_below_threshold", "conditionally_empty", 1);
    let half = lines[1].len() / 2;
    lines[1].truncate(half);
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let (third, s3) = cmd_hasse_scan(&args).unwrap();
    assert_eq!((s3.hits, s3.computed, s3.rejected), (7, 2, 2));
    assert_eq!(third.envelope.payload, first.envelope.payload);

    let plain = HasseScanArgs { assume_parity: false, cache_dir: None, ..args };
    let (out, _) = cmd_hasse_scan(&plain).unwrap();
    assert_eq!(out.exit, ExitCode::Certified);
    for v in out.envelope.payload.as_array().unwrap() {
        let verdict = v["verdict"].as_str().unwrap();
        assert!(verdict == "fails_congruence" || verdict == "unconditional_conclusion_unavailable");
    }
}

#[test]
fn scan_rejects_bad_range() {
    let args = HasseScanArgs { lo: 10, hi: 5, assume_parity: true, cache_dir: None };
    assert_eq!(cmd_hasse_scan(&args).unwrap_err().exit_code(), ExitCode::Precondition);
}
