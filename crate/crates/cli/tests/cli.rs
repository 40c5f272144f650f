use std::collections::BTreeMap;
use std::io::Write;
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

use chrono::{TimeZone, Utc};
use prekladac_core::privacy::{LogEntry, UsageLog};
use prekladac_core::usage::UsageRecord;
use prekladac_core::Lang;

const FIXTURE: &str = include_str!("../../core/data/corpus/filter_fixture.tsv");
const MANIFEST: &str = "../core/data/eval/sample_manifest.tsv";

fn prekladac(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_prekladac"));
    cmd.args(args);
    cmd
}

fn run(args: &[&str]) -> Output {
    prekladac(args).output().unwrap()
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = prekladac(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "exit {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn translit_arguments_and_stdin() {
    assert_eq!(stdout(&run(&["translit", "--from", "uk", "нашу"])), "našu\n");
    assert_eq!(stdout(&run_with_stdin(&["translit", "--from", "cs"], "článek\nchladná\n")), "чла́нек\nхладна́\n");
    assert!(!run(&["translit", "--from", "xx", "a"]).status.success());
}

#[test]
fn plan_blocks_prints_schedule() {
    let out = run(&["corpus", "plan-blocks", "--authentic", "120", "--synthetic", "60", "--block-size", "50", "--ratio", "2:1"]);
    assert_eq!(stdout(&out), "[A50, A50, S50, A20, S10]\n");
    assert!(!run(&["corpus", "plan-blocks", "--authentic", "1", "--block-size", "0"]).status.success());
}

#[test]
fn ingest_aligned_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let src = write(dir.path(), "a.cs", "Dobrý  den\nDěkuji\n");
    let tgt = write(dir.path(), "a.uk", "Добрий день\nДякую\n");
    let out = run(&["corpus", "ingest", "--src", &src, "--tgt", &tgt]);
    assert_eq!(stdout(&out), "Dobrý den\tДобрий день\nDěkuji\tДякую\n");

    let short = write(dir.path(), "b.uk", "Добрий день\n");
    let out = run(&["corpus", "ingest", "--src", &src, "--tgt", &short]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line count mismatch: 2 source lines, 1 target lines"));
}

#[test]
fn filter_report_counts_rules_from_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let mut corpus = String::new();
    let mut expected: BTreeMap<String, usize> = BTreeMap::new();
    let (mut pairs, mut kept) = (0, 0);
    for line in FIXTURE.lines().filter(|l| !l.starts_with('#') && !l.is_empty()) {
        let f: Vec<&str> = line.split('\t').collect();
        corpus += &format!("{}\t{}\n", f[0], f[1]);
        pairs += 1;
        if f[2] == "-" {
            kept += 1;
        } else {
            for rule in f[2].split(',') {
                *expected.entry(rule.to_string()).or_default() += 1;
            }
        }
    }
    let input = write(dir.path(), "c.tsv", &corpus);
    let kept_path = dir.path().join("kept.tsv");
    let report = stdout(&run(&["corpus", "filter", &input, "--report", "-o", kept_path.to_str().unwrap()]));
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some("rule\trejected"));
    let mut got = BTreeMap::new();
    for line in lines.by_ref().take_while(|l| !l.starts_with('#')) {
        let (rule, n) = line.split_once('\t').unwrap();
        let n: usize = n.parse().unwrap();
        if n > 0 {
            got.insert(rule.to_string(), n);
        }
    }
    assert_eq!(got, expected);
    assert!(report.ends_with(&format!("#pairs\t{pairs}\n#kept\t{kept}\n")), "{report}");
    assert_eq!(std::fs::read_to_string(&kept_path).unwrap().lines().count(), kept);

    let only_ratio = FIXTURE.lines().filter(|l| l.ends_with("\tlength-ratio")).count();
    assert!(only_ratio > 0);
    let rules = write(dir.path(), "r.toml", "disable = [\"length-ratio\"]\n");
    let report = stdout(&run(&["corpus", "filter", &input, "--rules", &rules, "--report"]));
    assert!(!report.contains("length-ratio"), "{report}");
    assert!(report.ends_with(&format!("#kept\t{}\n", kept + only_ratio)), "{report}");
    let bad = write(dir.path(), "bad.toml", "disable = 3\n");
    assert!(!run(&["corpus", "filter", &input, "--rules", &bad]).status.success());
}

#[test]
fn backtranslate_with_dictionary() {
    let dir = tempfile::tempdir().unwrap();
    let mono = write(dir.path(), "m.uk", "холодна зима\nЯ хвора.\n");
    let out = stdout(&run(&["corpus", "backtranslate", &mono]));
    assert_eq!(out, "chladná zima\tхолодна зима\nJsem nemocná.\tЯ хвора.\n");
    let out = stdout(&run(&["corpus", "backtranslate", &mono, "--start", "1"]));
    assert_eq!(out, "Jsem nemocná.\tЯ хвора.\n");
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

#[test]
fn backtranslate_interrupted_reports_cursor() {
    let dir = tempfile::tempdir().unwrap();
    let mono = write(dir.path(), "m.uk", "холодна зима\n");
    let url = format!("http://127.0.0.1:{}", free_port());
    let out = run(&["corpus", "backtranslate", &mono, "--endpoint", &url]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("resume with --start 0"));
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

#[test]
fn serve_honours_port_env_and_answers_backtranslation() {
    let port = free_port();
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "gw.toml", &format!("port = 1\n[log]\npath = \"{}\"\n", dir.path().join("u.jsonl").display()));
    let server = Server(
        prekladac(&["serve", "--config", &config])
            .env("PORT", port.to_string())
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap(),
    );
    let deadline = Instant::now() + Duration::from_secs(20);
    while TcpStream::connect(("127.0.0.1", port)).is_err() {
        assert!(Instant::now() < deadline, "gateway did not start");
        std::thread::sleep(Duration::from_millis(50));
    }
    let mono = write(dir.path(), "m.uk", "холодна зима\nДякую!\n");
    let url = format!("http://127.0.0.1:{port}");
    let out = stdout(&run(&["corpus", "backtranslate", &mono, "--endpoint", &url, "--batch-size", "1"]));
    assert_eq!(out, "chladná zima\tхолодна зима\nDěkuji!\tДякую!\n");
    drop(server);
}

#[test]
fn eval_scores_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let hyp = write(dir.path(), "h.txt", "the the the the the the the\n");
    let reference = write(dir.path(), "r.txt", "the cat is on the mat\n");
    assert_eq!(stdout(&run(&["eval", "bleu", "--hyp", &hyp, "--ref", &reference])), "0.00\n");
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["eval", "bleu", "--hyp", &hyp, "--ref", &reference, "--json"]))).unwrap();
    assert_eq!(json["components"]["matches"][0], 2);
    assert_eq!(json["components"]["totals"][0], 7);
    assert_eq!(stdout(&run(&["eval", "chrf", "--hyp", &reference, "--ref", &reference])), "100.00\n");

    let manifest = std::fs::read_to_string(MANIFEST).unwrap();
    let refs: String = manifest.lines().skip(1).map(|l| format!("{}\n", l.split('\t').nth(5).unwrap())).collect();
    let hyps = write(dir.path(), "refs.txt", &refs);
    let report: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["eval", "report", "--manifest", MANIFEST, "--hyp", &hyps, "--json"]))).unwrap();
    let text = report.to_string();
    assert!(text.contains("\"ALL\""), "{text}");
    let table = stdout(&run(&["eval", "report", "--manifest", MANIFEST, "--hyp", &hyps, "--by", "topic"]));
    assert!(table.lines().last().unwrap().starts_with("ALL"), "{table}");
    assert!(table.contains("100.0"), "{table}");
}

fn entry(day: u32, client: &str, text: &str) -> LogEntry {
    let timestamp = Utc.with_ymd_and_hms(2023, 5, day, 12, 0, 0).unwrap();
    LogEntry {
        record: UsageRecord::for_texts(timestamp, Lang::cs(), Lang::uk(), &[text.to_string()], 1),
        client_id: Some(client.to_string()),
        texts: vec![text.to_string()],
        spans: Vec::new(),
    }
}

#[test]
fn stats_and_delete_on_a_log() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("usage.jsonl");
    let log = UsageLog::new(&path, 0);
    log.append(entry(1, "a", "abcd")).unwrap();
    log.append(entry(1, "b", "ab")).unwrap();
    log.append(entry(2, "a", "abcdef")).unwrap();
    let p = path.to_str().unwrap();
    let mut file = std::fs::OpenOptions::new().append(true).open(&path).unwrap();
    writeln!(file, "not json").unwrap();

    let out = run(&["stats", "--log", p]);
    assert_eq!(
        stdout(&out),
        "date\tsrc\ttgt\trequests\tcharacters\tmean\n2023-05-01\tcs\tuk\t2\t6\t3.00\n2023-05-02\tcs\tuk\t1\t6\t6.00\n"
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("1 corrupt"));
    let out = stdout(&run(&["stats", "--log", p, "--from", "2023-05-02"]));
    assert_eq!(out.lines().count(), 2);

    assert_eq!(stdout(&run(&["privacy", "delete", "a", "--log", p])), "2\n");
    assert_eq!(stdout(&run(&["privacy", "delete", "a", "--log", p])), "0\n");
    let json: serde_json::Value = serde_json::from_str(&stdout(&run(&["stats", "--log", p, "--json"]))).unwrap();
    assert_eq!(json["days"][0]["requests"], 1);
}

#[test]
fn pseudonymize_is_seeded_and_flags_residue() {
    let out = run_with_stdin(&["privacy", "pseudonymize", "--seed", "7"], "Petr Svoboda a pan Svoboda\n");
    assert_eq!(stdout(&out), "Jiří Dvořák a pan Dvořák\n");
    let out = run_with_stdin(&["privacy", "pseudonymize", "--flag-for-review"], "Volejte na 777123456, ptá se Ondřejovice\n");
    assert_eq!(stdout(&out), "Volejte na [PHONE], ptá se Ondřejovice\n");
    assert_eq!(String::from_utf8_lossy(&out.stderr), "review\t1\t29\tOndřejovice\n");
}
