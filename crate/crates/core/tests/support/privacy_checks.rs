//! Seeded PII fixtures and consent interleavings for the privacy checks.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::Path;

use chrono::{TimeZone, Utc};
use prekladac_core::privacy::{Pseudonymizer, RequestInfo, UsageLog};
use prekladac_core::Lang;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct PiiCase {
    pub text: String,
    pub lang: Lang,
    /// Substrings that must not survive pseudonymization.
    pub names: Vec<String>,
    pub phone_digits: String,
    pub url: String,
}

fn phone(rng: &mut impl Rng) -> String {
    let d = |rng: &mut dyn rand::RngCore, n: usize| (0..n).map(|_| char::from(b'0' + rng.random_range(0..10u8))).collect::<String>();
    let (a, b, c) = (format!("{}{}", rng.random_range(6..8), d(rng, 2)), d(rng, 3), d(rng, 3));
    match rng.random_range(0..3) {
        0 => format!("{a} {b} {c}"),
        1 => format!("+420 {a} {b} {c}"),
        _ => format!("{a}{b}{c}"),
    }
}

fn url(rng: &mut impl Rng) -> String {
    let host = ["lindat.cz", "www.seznam.cz", "mvcr.gov.cz", "ukrajina.info", "pomoc.org"].choose(rng).unwrap();
    let path = ["", "/kontakt", "/a/b?x=1", "/cs/"].choose(rng).unwrap();
    match rng.random_range(0..3) {
        0 => format!("https://{host}{path}"),
        1 => format!("http://{host}{path}"),
        _ => format!("{host}{path}"),
    }
}

/// Texts embedding a pool name, a phone number and a URL.
pub fn pii_cases(seed: u64, n: usize) -> Vec<PiiCase> {
    let gazetteer = Pseudonymizer::shipped().gazetteer();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(n);
    while cases.len() < n {
        let lang = if rng.random_bool(0.5) { Lang::cs() } else { Lang::uk() };
        let pool = &gazetteer.pools[&lang];
        let first = pool.first_names.choose(&mut rng).unwrap().clone();
        let surname = pool.surnames.choose(&mut rng).unwrap().clone();
        if gazetteer.allowlist.contains(&format!("{first} {surname}")) {
            continue;
        }
        let (p, u) = (phone(&mut rng), url(&mut rng));
        let text = match (lang.as_str(), rng.random_range(0..3)) {
            ("cs", 0) => format!("{first} {surname} volal na číslo {p} a poslal odkaz {u} včera."),
            ("cs", 1) => format!("Napište na {u}, nebo zavolejte {p}. Ptejte se na {first} {surname}."),
            ("cs", _) => format!("Dobrý den, jsem {first} {surname}, moje číslo je {p}, web {u}"),
            (_, 0) => format!("{first} {surname} телефонував на {p} і надіслав {u} вчора."),
            (_, 1) => format!("Пишіть на {u} або дзвоніть {p}. Питайте {first} {surname}."),
            _ => format!("Добрий день, я {first} {surname}, мій номер {p}, сайт {u}"),
        };
        cases.push(PiiCase {
            text,
            lang,
            names: vec![first, surname],
            phone_digits: p.chars().filter(char::is_ascii_digit).collect(),
            url: u,
        });
    }
    cases
}

fn words(text: &str) -> BTreeSet<&str> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).collect()
}

/// Every name, phone and URL in every case is replaced.
pub fn check_replacement(cases: &[PiiCase], seed: u64) -> Result<(), String> {
    for case in cases {
        let (out, _) = Pseudonymizer::shipped().pseudonymize(&case.text, &case.lang, seed);
        let present = words(&out);
        if let Some(name) = case.names.iter().find(|n| present.contains(n.as_str())) {
            return Err(format!("name {name:?} survived: {out:?}"));
        }
        let digits: String = out.chars().filter(char::is_ascii_digit).collect();
        if digits.contains(&case.phone_digits) {
            return Err(format!("phone survived: {out:?}"));
        }
        if out.contains(&case.url) {
            return Err(format!("url survived: {out:?}"));
        }
    }
    Ok(())
}

pub fn check_reproducible(cases: &[PiiCase], seed: u64) -> Result<(), String> {
    for case in cases {
        let a = Pseudonymizer::shipped().pseudonymize(&case.text, &case.lang, seed);
        let b = Pseudonymizer::shipped().pseudonymize(&case.text, &case.lang, seed);
        if a != b {
            return Err(format!("seed {seed} not reproducible on {:?}", case.text));
        }
    }
    Ok(())
}

/// Several threads log requests with random consent while some clients
/// delete their data right after their request. Returns the number of
/// persisted entries, which must equal the consented, undeleted requests.
pub fn fuzz_consent(dir: &Path, seed: u64, threads: usize, per_thread: usize) -> Result<usize, String> {
    let log = UsageLog::new(dir.join(format!("fuzz-{seed}.jsonl")), seed);
    let expected: Vec<BTreeSet<String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let log = &log;
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (t as u64 + 1));
                    let mut survivors = BTreeSet::new();
                    for i in 0..per_thread {
                        let consent = rng.random_bool(0.5);
                        let client = format!("t{t}-r{i}-{}", if consent { "on" } else { "off" });
                        let info = RequestInfo {
                            timestamp: Utc.with_ymd_and_hms(2023, 6, 1, 12, 0, 0).unwrap(),
                            src: Lang::uk(),
                            tgt: Lang::cs(),
                            texts: vec![format!("Дзвоніть на 777 123 45{}", i % 10)],
                            segments: 1,
                            client_id: Some(client.clone()),
                        };
                        log.record_or_drop(&info, consent);
                        if consent && rng.random_bool(0.2) {
                            log.delete_client_data(&client).expect("delete");
                        } else if consent {
                            survivors.insert(client);
                        }
                    }
                    survivors
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let expected: BTreeSet<String> = expected.into_iter().flatten().collect();
    let entries = log.entries().map_err(|e| e.to_string())?;
    let persisted: BTreeSet<String> = entries.iter().filter_map(|e| e.client_id.clone()).collect();
    if persisted.len() != entries.len() {
        return Err("entries without a unique client id".into());
    }
    if let Some(bad) = persisted.iter().find(|c| c.ends_with("-off")) {
        return Err(format!("consent-off request persisted: {bad}"));
    }
    if persisted != expected {
        return Err(format!("{} persisted, {} expected", persisted.len(), expected.len()));
    }
    if entries.iter().any(|e| e.texts.iter().any(|t| t.contains("777"))) {
        return Err("phone number persisted".into());
    }
    Ok(entries.len())
}

pub fn check_delete_idempotent(dir: &Path) -> Result<(), String> {
    let log = UsageLog::new(dir.join("delete.jsonl"), 1);
    for client in ["x", "x", "y", "x", "x", "x"] {
        let info = RequestInfo {
            timestamp: Utc::now(),
            src: Lang::cs(),
            tgt: Lang::uk(),
            texts: vec!["zima".into()],
            segments: 1,
            client_id: Some(client.into()),
        };
        log.record_or_drop(&info, true);
    }
    let counts = [log.delete_client_data("x"), log.delete_client_data("x"), log.delete_client_data("nobody")];
    let counts: Vec<usize> = counts.into_iter().collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    if counts != [5, 0, 0] {
        return Err(format!("delete counts {counts:?}, expected [5, 0, 0]"));
    }
    let left = log.entries().map_err(|e| e.to_string())?;
    if left.len() != 1 || left[0].client_id.as_deref() != Some("y") {
        return Err("other clients' data was touched".into());
    }
    Ok(())
}
