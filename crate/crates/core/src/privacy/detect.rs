use std::collections::{HashMap, HashSet};
use std::io;
use std::path::Path;
use std::sync::LazyLock;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::lang::Lang;
use crate::textproc::script::is_cyrillic_letter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiiKind {
    PersonName,
    Address,
    Url,
    Institution,
    Phone,
    Place,
}

impl PiiKind {
    /// Placeholder used for every kind except person names, which get
    /// random pseudonyms instead.
    pub fn placeholder(self) -> Option<&'static str> {
        match self {
            PiiKind::PersonName => None,
            PiiKind::Address => Some("[ADDRESS]"),
            PiiKind::Url => Some("[URL]"),
            PiiKind::Institution => Some("[ORG]"),
            PiiKind::Phone => Some("[PHONE]"),
            PiiKind::Place => Some("[PLACE]"),
        }
    }

    /// Lower wins when candidate spans overlap.
    fn priority(self) -> u8 {
        match self {
            PiiKind::Url => 0,
            PiiKind::Phone => 1,
            PiiKind::Address => 2,
            PiiKind::Institution => 3,
            PiiKind::PersonName => 4,
            PiiKind::Place => 5,
        }
    }
}

/// A replaced stretch of the original text, in character offsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiiSpan {
    pub kind: PiiKind,
    pub start: usize,
    pub end: usize,
    pub replacement: String,
}

/// A capitalized token that no detector explained, left for a human to judge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualToken {
    pub token: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Default)]
pub struct NamePool {
    pub first_names: Vec<String>,
    pub surnames: Vec<String>,
}

/// Name pools and lists used for detection and for drawing pseudonyms.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    /// Pools by language; `cs` is used for Latin-script names and `uk` for
    /// Cyrillic ones.
    pub pools: HashMap<Lang, NamePool>,
    pub places: HashSet<String>,
    /// Institution keywords as word sequences.
    pub institutions: Vec<Vec<String>>,
    pub allowlist: HashSet<String>,
}

/// Parses a one-entry-per-line list; `#` starts a comment.
pub fn parse_list(source: &str) -> Vec<String> {
    source
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

impl Gazetteer {
    pub fn shipped() -> Self {
        let mut pools = HashMap::new();
        pools.insert(
            Lang::cs(),
            NamePool {
                first_names: parse_list(include_str!("../../data/privacy/cs_first_names.txt")),
                surnames: parse_list(include_str!("../../data/privacy/cs_surnames.txt")),
            },
        );
        pools.insert(
            Lang::uk(),
            NamePool {
                first_names: parse_list(include_str!("../../data/privacy/uk_first_names.txt")),
                surnames: parse_list(include_str!("../../data/privacy/uk_surnames.txt")),
            },
        );
        Gazetteer {
            pools,
            places: parse_list(include_str!("../../data/privacy/places.txt")).into_iter().collect(),
            institutions: institution_keywords(parse_list(include_str!("../../data/privacy/institutions.txt"))),
            allowlist: parse_list(include_str!("../../data/privacy/allowlist.txt")).into_iter().collect(),
        }
    }

    /// Reads a directory laid out like the shipped `data/privacy`.
    pub fn load_dir(dir: impl AsRef<Path>) -> io::Result<Self> {
        let dir = dir.as_ref();
        let read = |name: &str| -> io::Result<Vec<String>> {
            match std::fs::read_to_string(dir.join(name)) {
                Ok(s) => Ok(parse_list(&s)),
                Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Vec::new()),
                Err(e) => Err(e),
            }
        };
        let mut pools = HashMap::new();
        for lang in [Lang::cs(), Lang::uk()] {
            pools.insert(
                lang.clone(),
                NamePool {
                    first_names: read(&format!("{lang}_first_names.txt"))?,
                    surnames: read(&format!("{lang}_surnames.txt"))?,
                },
            );
        }
        Ok(Gazetteer {
            pools,
            places: read("places.txt")?.into_iter().collect(),
            institutions: institution_keywords(read("institutions.txt")?),
            allowlist: read("allowlist.txt")?.into_iter().collect(),
        })
    }

    fn pool_for(&self, token: &str) -> Option<&NamePool> {
        let lang = if token.chars().any(is_cyrillic_letter) { Lang::uk() } else { Lang::cs() };
        self.pools.get(&lang)
    }
}

fn institution_keywords(lines: Vec<String>) -> Vec<Vec<String>> {
    let mut keywords: Vec<Vec<String>> =
        lines.iter().map(|l| l.split_whitespace().map(str::to_string).collect()).collect();
    keywords.sort_by_key(|k| std::cmp::Reverse(k.len()));
    keywords
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NameRole {
    First,
    Surname,
}

/// Case endings and the nominative endings they may come from, tried in
/// order when an inflected name is looked up in the pools.
const NAME_FORMS: &[(&str, &[&str])] = &[
    ("ovou", &["ová"]),
    ("ové", &["ová"]),
    ("ovi", &["", "a"]),
    ("ého", &["ý"]),
    ("ému", &["ý"]),
    ("ým", &["ý"]),
    ("em", &[""]),
    ("ou", &["a", "á"]),
    ("é", &["á"]),
    ("y", &["a"]),
    ("u", &["", "a"]),
    ("ě", &["a"]),
    ("e", &["a", ""]),
    ("a", &[""]),
    ("ою", &["а", "я"]),
    ("ові", &["о", ""]),
    ("ом", &["о", ""]),
    ("ем", &["о", ""]),
    ("а", &["о", ""]),
    ("у", &["о", "а", ""]),
    ("ю", &["я", "й"]),
    ("і", &["а", "я"]),
    ("и", &["а"]),
    ("я", &["й"]),
];

const TITLES: &[&str] = &[
    "pan", "pana", "panu", "pane", "panem", "paní", "slečna", "slečno", "slečny", "Pan", "Paní", "пан", "пані",
    "пана", "пану", "панові", "пане", "Пан", "Пані",
];

const KNOWN_CAPITALIZED: &[&str] = &[
    "Vy", "Vás", "Vám", "Vámi", "Váš", "Vaše", "Vašeho", "Ви", "Вас", "Вам", "Вами", "Ваш", "Ваша", "Ваше", "I",
];

static URL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r#"(?i)\b(?:https?://|www\.)[^\s<>"«»]+|[\w.+-]+@[\w-]+(?:\.[\w-]+)+|\b[a-z0-9-]+(?:\.[a-z0-9-]+)*\.(?:cz|ua|sk|eu|com|org|net|info|gov)\b(?:/[^\s<>"«»]*)?"#,
    )
    .expect("url pattern")
});

static PHONE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?:\+\d{1,3}[ -]?)?\(?\d{2,4}\)?(?:[ -]?\d{2,4}){2,4}").expect("phone pattern")
});

static ADDRESS: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(concat!(
        r"(?:\b(?i:ulic[eií]|ul\.|náměstí|nám\.|tříd[aěuy]|tř\.|nábřeží|nábř\.)",
        r"|(?i:вулиця|вулиці|вул\.|проспект|просп\.|провулок|пров\.|бульвар|бульв\.|площа|пл\.))",
        r"\s*\p{Lu}[\p{L}.\-]*(?:\s+\p{Lu}[\p{L}.\-]*){0,3}(?:\s+\d+[\p{Ll}]?(?:/\d+[\p{Ll}]?)?\b)?",
        r"|\b\p{Lu}[\p{L}\-]+(?:\s+\p{Lu}[\p{L}\-]+){0,2}\s+\d+/\d+[\p{Ll}]?\b",
    ))
    .expect("address pattern")
});

static WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[\p{L}\p{M}][\p{L}\p{M}'’-]*").expect("word pattern"));

#[derive(Debug, Clone, Copy)]
struct Word<'t> {
    text: &'t str,
    start: usize,
    end: usize,
}

#[derive(Debug, Clone)]
struct Candidate {
    kind: PiiKind,
    start: usize,
    end: usize,
}

/// Pattern- and gazetteer-based PII detector and pseudonymizer.
#[derive(Debug, Clone)]
pub struct Pseudonymizer {
    gazetteer: Gazetteer,
}

static SHIPPED: LazyLock<Pseudonymizer> = LazyLock::new(|| Pseudonymizer::new(Gazetteer::shipped()));

/// Pseudonymizes with the shipped gazetteer; see [`Pseudonymizer::pseudonymize`].
pub fn pseudonymize(text: &str, lang: &Lang, seed: u64) -> (String, Vec<PiiSpan>) {
    SHIPPED.pseudonymize(text, lang, seed)
}

impl Pseudonymizer {
    pub fn new(gazetteer: Gazetteer) -> Self {
        Pseudonymizer { gazetteer }
    }

    pub fn shipped() -> &'static Pseudonymizer {
        &SHIPPED
    }

    pub fn gazetteer(&self) -> &Gazetteer {
        &self.gazetteer
    }

    /// Replaces detected person names with names drawn from the pools and
    /// other PII with category placeholders. The same name maps to the same
    /// pseudonym within one text; pseudonyms never coincide with a word of
    /// the input. `lang` is accepted for the interface; pools are chosen by
    /// the script of each name.
    pub fn pseudonymize(&self, text: &str, _lang: &Lang, seed: u64) -> (String, Vec<PiiSpan>) {
        let words: Vec<Word> = words(text);
        let accepted = self.resolve(text, &words);

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let present: HashSet<&str> = words.iter().map(|w| w.text).collect();
        let mut assigned: HashMap<(NameRoleKey, String), String> = HashMap::new();
        let mut used: HashSet<String> = HashSet::new();

        let mut spans = Vec::with_capacity(accepted.len());
        for candidate in &accepted {
            let replacement = match candidate.kind.placeholder() {
                Some(p) => p.to_string(),
                None => {
                    let mut out = String::new();
                    let mut cursor = candidate.start;
                    for word in words.iter().filter(|w| w.start >= candidate.start && w.end <= candidate.end) {
                        out.push_str(&text[cursor..word.start]);
                        let (role, base) = self.classify_in_span(word.text);
                        let key = (role, base);
                        let pseudonym = match assigned.get(&key) {
                            Some(p) => p.clone(),
                            None => {
                                let p = self.draw(&key, word.text, &present, &used, &mut rng);
                                used.insert(p.clone());
                                assigned.insert(key, p.clone());
                                p
                            }
                        };
                        if role == NameRoleKey::Initial {
                            out.extend(pseudonym.chars().next());
                        } else {
                            out.push_str(&pseudonym);
                        }
                        cursor = word.end;
                    }
                    out.push_str(&text[cursor..candidate.end]);
                    out
                }
            };
            spans.push((candidate.kind, candidate.start, candidate.end, replacement));
        }

        let mut output = text.to_string();
        for (_, start, end, replacement) in spans.iter().rev() {
            output.replace_range(*start..*end, replacement);
        }
        let offsets = CharOffsets::new(text);
        let spans = spans
            .into_iter()
            .map(|(kind, start, end, replacement)| PiiSpan {
                kind,
                start: offsets.of(start),
                end: offsets.of(end),
                replacement,
            })
            .collect();
        (output, spans)
    }

    /// Detects PII spans without replacing anything; `replacement` holds the
    /// placeholder, or the original text for person names.
    pub fn detect(&self, text: &str) -> Vec<PiiSpan> {
        let words = words(text);
        let offsets = CharOffsets::new(text);
        self.resolve(text, &words)
            .into_iter()
            .map(|c| PiiSpan {
                kind: c.kind,
                start: offsets.of(c.start),
                end: offsets.of(c.end),
                replacement: c.kind.placeholder().map(str::to_string).unwrap_or_else(|| text[c.start..c.end].to_string()),
            })
            .collect()
    }

    /// Capitalized, non-sentence-initial tokens outside every detected span
    /// and not on the allowlist. A non-empty result means the text should be
    /// reviewed by a person before it is kept.
    pub fn flag_for_review(&self, text: &str) -> Vec<ResidualToken> {
        let words = words(text);
        let accepted = self.resolve(text, &words);
        let offsets = CharOffsets::new(text);
        words
            .iter()
            .filter(|w| w.text.chars().next().is_some_and(char::is_uppercase))
            .filter(|w| !accepted.iter().any(|c| w.start < c.end && c.start < w.end))
            .filter(|w| !sentence_initial(text, w.start))
            .filter(|w| !KNOWN_CAPITALIZED.contains(&w.text) && !self.gazetteer.allowlist.contains(w.text))
            .map(|w| ResidualToken { token: w.text.to_string(), start: offsets.of(w.start), end: offsets.of(w.end) })
            .collect()
    }

    fn resolve(&self, text: &str, words: &[Word]) -> Vec<Candidate> {
        let mut candidates = Vec::new();
        for m in URL.find_iter(text) {
            let trimmed = m.as_str().trim_end_matches(['.', ',', ';', ':', '!', '?', ')', '"', '\'']);
            candidates.push(Candidate { kind: PiiKind::Url, start: m.start(), end: m.start() + trimmed.len() });
        }
        for m in PHONE.find_iter(text) {
            let digits = m.as_str().chars().filter(char::is_ascii_digit).count();
            let before = text[..m.start()].chars().next_back();
            let after = text[m.end()..].chars().next();
            let isolated = !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric);
            if (9..=13).contains(&digits) && isolated {
                candidates.push(Candidate { kind: PiiKind::Phone, start: m.start(), end: m.end() });
            }
        }
        for m in ADDRESS.find_iter(text) {
            candidates.push(Candidate { kind: PiiKind::Address, start: m.start(), end: m.end() });
        }
        self.institutions(text, words, &mut candidates);
        self.names(text, words, &mut candidates);
        for w in words {
            if self.gazetteer.places.contains(w.text) {
                candidates.push(Candidate { kind: PiiKind::Place, start: w.start, end: w.end });
            }
        }

        candidates.sort_by_key(|c| (c.kind.priority(), std::cmp::Reverse(c.end - c.start), c.start));
        let mut accepted: Vec<Candidate> = Vec::new();
        for c in candidates {
            if c.end > c.start && !accepted.iter().any(|a| c.start < a.end && a.start < c.end) {
                accepted.push(c);
            }
        }
        accepted.sort_by_key(|c| c.start);
        accepted
    }

    fn institutions(&self, text: &str, words: &[Word], out: &mut Vec<Candidate>) {
        let mut i = 0;
        while i < words.len() {
            let hit = self.gazetteer.institutions.iter().find(|keyword| {
                keyword.len() <= words.len() - i
                    && keyword.iter().zip(&words[i..]).all(|(k, w)| k == w.text)
                    && (1..keyword.len()).all(|j| adjacent(text, &words[i + j - 1], &words[i + j]))
            });
            let Some(keyword) = hit else {
                i += 1;
                continue;
            };
            let mut last = i + keyword.len() - 1;
            while last + 1 < words.len()
                && last + 1 - (i + keyword.len() - 1) <= 4
                && adjacent(text, &words[last], &words[last + 1])
                && words[last + 1].text.chars().next().is_some_and(char::is_uppercase)
            {
                last += 1;
            }
            out.push(Candidate { kind: PiiKind::Institution, start: words[i].start, end: words[last].end });
            i = last + 1;
        }
    }

    fn names(&self, text: &str, words: &[Word], out: &mut Vec<Candidate>) {
        let is_name = |idx: usize| -> bool {
            let w = &words[idx];
            if !w.text.chars().next().is_some_and(char::is_uppercase) || self.gazetteer.places.contains(w.text) {
                return false;
            }
            if self.lookup(w.text).is_some() {
                return true;
            }
            idx > 0 && TITLES.contains(&words[idx - 1].text) && adjacent(text, &words[idx - 1], w)
        };
        let mut i = 0;
        while i < words.len() {
            if !is_name(i) {
                i += 1;
                continue;
            }
            let mut last = i;
            while last + 1 < words.len() && adjacent(text, &words[last], &words[last + 1]) && is_name(last + 1) {
                last += 1;
            }
            let mut start = words[i].start;
            // a preceding initial such as "J." belongs to the name
            if i > 0 {
                let prev = &words[i - 1];
                let mut chars = prev.text.chars();
                let single_upper = matches!((chars.next(), chars.next()), (Some(c), None) if c.is_uppercase());
                if single_upper && text[prev.end..words[i].start] == *". " {
                    start = prev.start;
                }
            }
            let span_text = &text[start..words[last].end];
            let covered = text[words[i].start..words[last].end].to_string();
            if !self.gazetteer.allowlist.contains(span_text) && !self.gazetteer.allowlist.contains(&covered) {
                out.push(Candidate { kind: PiiKind::PersonName, start, end: words[last].end });
            }
            i = last + 1;
        }
    }

    /// Finds the pool entry a token is a form of.
    fn lookup(&self, token: &str) -> Option<(NameRole, String)> {
        let pool = self.gazetteer.pool_for(token)?;
        let find = |form: &str| -> Option<(NameRole, String)> {
            if pool.first_names.iter().any(|n| n == form) {
                return Some((NameRole::First, form.to_string()));
            }
            if pool.surnames.iter().any(|n| n == form) {
                return Some((NameRole::Surname, form.to_string()));
            }
            None
        };
        if let Some(hit) = find(token) {
            return Some(hit);
        }
        for (ending, nominatives) in NAME_FORMS {
            let Some(stem) = token.strip_suffix(ending) else {
                continue;
            };
            if stem.chars().count() < 2 {
                continue;
            }
            for nominative in *nominatives {
                if let Some(hit) = find(&format!("{stem}{nominative}")) {
                    return Some(hit);
                }
            }
        }
        None
    }

    fn classify_in_span(&self, token: &str) -> (NameRoleKey, String) {
        if token.chars().count() == 1 {
            return (NameRoleKey::Initial, token.to_string());
        }
        match self.lookup(token) {
            Some((NameRole::First, base)) => (NameRoleKey::First, base),
            Some((NameRole::Surname, base)) => (NameRoleKey::Surname, base),
            None => (NameRoleKey::Surname, token.to_string()),
        }
    }

    fn draw(
        &self,
        key: &(NameRoleKey, String),
        original: &str,
        present: &HashSet<&str>,
        used: &HashSet<String>,
        rng: &mut ChaCha8Rng,
    ) -> String {
        let Some(pool) = self.gazetteer.pool_for(original) else {
            return "[NAME]".into();
        };
        let (list, feminine) = match key.0 {
            NameRoleKey::First | NameRoleKey::Initial => (&pool.first_names, feminine_first(&key.1)),
            NameRoleKey::Surname => (&pool.surnames, feminine_surname(&key.1)),
        };
        let free: Vec<&String> =
            list.iter().filter(|n| !present.contains(n.as_str()) && !used.contains(*n) && **n != key.1).collect();
        let matching: Vec<&String> = free
            .iter()
            .copied()
            .filter(|n| match key.0 {
                NameRoleKey::Surname => feminine_surname(n) == feminine,
                _ => feminine_first(n) == feminine,
            })
            .collect();
        let choices = if matching.is_empty() { free } else { matching };
        choices.choose(rng).map(|s| s.to_string()).unwrap_or_else(|| "[NAME]".into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum NameRoleKey {
    First,
    Surname,
    Initial,
}

fn feminine_first(name: &str) -> bool {
    name.ends_with(['a', 'е', 'а', 'я']) || name.ends_with("ія")
}

fn feminine_surname(name: &str) -> bool {
    name.ends_with('á') || name.ends_with("ська") || name.ends_with("цька")
}

fn words(text: &str) -> Vec<Word<'_>> {
    WORD.find_iter(text).map(|m| Word { text: m.as_str(), start: m.start(), end: m.end() }).collect()
}

/// Two words separated by whitespace only.
fn adjacent(text: &str, a: &Word, b: &Word) -> bool {
    let gap = &text[a.end..b.start];
    !gap.is_empty() && gap.chars().all(char::is_whitespace)
}

fn sentence_initial(text: &str, start: usize) -> bool {
    let before = text[..start].trim_end_matches(|c: char| c.is_whitespace() || "\"'„“«‘‚([{-–".contains(c));
    before.is_empty() || before.ends_with(['.', '!', '?', '…', ':', '\n'])
}

/// Byte offset to character offset conversion.
struct CharOffsets {
    boundaries: Vec<usize>,
}

impl CharOffsets {
    fn new(text: &str) -> Self {
        let mut boundaries: Vec<usize> = text.char_indices().map(|(i, _)| i).collect();
        boundaries.push(text.len());
        CharOffsets { boundaries }
    }

    fn of(&self, byte: usize) -> usize {
        self.boundaries.binary_search(&byte).unwrap_or_else(|i| i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(text: &str, seed: u64) -> (String, Vec<PiiSpan>) {
        pseudonymize(text, &Lang::cs(), seed)
    }

    #[test]
    fn phone_and_url_placeholders() {
        assert_eq!(cs("Volejte na 777 123 456", 1).0, "Volejte na [PHONE]");
        assert_eq!(cs("https://lindat.cz je web", 1).0, "[URL] je web");
        assert_eq!(cs("Pište na info@example.com.", 1).0, "Pište na [URL].");
        assert_eq!(cs("Tel. +380 67 123 45 67, děkuji", 1).0, "Tel. [PHONE], děkuji");
        // dates and short numbers are not phones
        assert_eq!(cs("Dne 3. 5. 2022 v 10 hodin", 1).0, "Dne 3. 5. 2022 v 10 hodin");
    }

    #[test]
    fn places_addresses_institutions() {
        assert_eq!(cs("Bydlím v Praze na ulici Vinohradská 12/345.", 1).0, "Bydlím v [PLACE] na [ADDRESS].");
        assert_eq!(cs("Jsem z Харкова.", 1).0, "Jsem z [PLACE].");
        assert_eq!(cs("Šla jsem na Úřad práce v Brně.", 1).0, "Šla jsem na [ORG] v [PLACE].");
        assert_eq!(cs("Leží ve Fakultní nemocnice Motol.", 1).0, "Leží ve [ORG].");
        let (out, _) = pseudonymize("Живу на вул. Шевченка 5.", &Lang::uk(), 1);
        assert_eq!(out, "Живу на [ADDRESS].");
    }

    #[test]
    fn same_name_same_pseudonym() {
        let (out, spans) = cs("Petr Svoboda a pan Svoboda", 7);
        assert_eq!(spans.len(), 2);
        assert!(spans.iter().all(|s| s.kind == PiiKind::PersonName));
        let first_surname = spans[0].replacement.split(' ').nth(1).unwrap();
        assert_eq!(first_surname, spans[1].replacement);
        assert!(!out.contains("Svoboda") && !out.contains("Petr"));
        // golden value for seed 7
        assert_eq!(out, GOLDEN_SEED_7);
    }

    const GOLDEN_SEED_7: &str = "Jiří Dvořák a pan Dvořák";

    #[test]
    fn inflected_forms_share_pseudonym() {
        let (out, spans) = cs("Mluvila jsem s paní Novákovou. Paní Nováková přišla.", 3);
        assert_eq!(spans.len(), 2, "{out}");
        assert_eq!(spans[0].replacement, spans[1].replacement);
        assert!(spans[0].replacement.ends_with('á'), "{out}");
    }

    #[test]
    fn allowlisted_figures_are_kept() {
        let (out, spans) = cs("Prezident Petr Pavel navštívil Kyjev.", 2);
        assert_eq!(out, "Prezident Petr Pavel navštívil [PLACE].");
        assert_eq!(spans.len(), 1);
    }

    #[test]
    fn ukrainian_names_use_ukrainian_pool() {
        let (out, spans) = pseudonymize("Мене звати Олена Коваленко.", &Lang::uk(), 5);
        assert_eq!(spans.len(), 1);
        assert!(spans[0].replacement.chars().filter(|c| c.is_alphabetic()).all(is_cyrillic_letter), "{out}");
        assert!(!out.contains("Олена"));
    }

    #[test]
    fn spans_are_char_offsets_and_disjoint() {
        let text = "Čau, volej Janě na 602 111 222 nebo piš na www.příklad.cz";
        let (out, spans) = cs(text, 9);
        let chars: Vec<char> = text.chars().collect();
        for pair in spans.windows(2) {
            assert!(pair[0].end <= pair[1].start);
        }
        let phone: String = chars[spans[1].start..spans[1].end].iter().collect();
        assert_eq!(phone, "602 111 222");
        assert!(out.starts_with("Čau, volej "));
        assert!(out.ends_with("na [PHONE] nebo piš na [URL]"));
    }

    #[test]
    fn initials_are_replaced_with_names() {
        let (out, spans) = cs("Dopis podepsal J. Novák.", 4);
        assert_eq!(spans.len(), 1);
        assert!(!out.contains("J. Novák"));
        assert!(out.chars().nth(spans[0].start + 1) == Some('.'));
    }

    #[test]
    fn deterministic_per_seed() {
        let text = "Marie Dvořáková a Jan Novák z Brna, tel. 777 000 111";
        assert_eq!(cs(text, 11), cs(text, 11));
    }

    #[test]
    fn review_flags_residual_capitals() {
        let p = Pseudonymizer::shipped();
        let flags = p.flag_for_review("Včera jsem potkala Zbyňka Kratochvíla v Praze. A co Vy?");
        let tokens: Vec<&str> = flags.iter().map(|f| f.token.as_str()).collect();
        assert_eq!(tokens, ["Zbyňka", "Kratochvíla"]);
        assert!(p.flag_for_review("Jsem nemocná. A co Vy?").is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn piece() -> impl Strategy<Value = String> {
            prop_oneof![
                Just("Petr".to_string()),
                Just("Svoboda".to_string()),
                Just("pan".to_string()),
                Just("Praze".to_string()),
                Just("Олена".to_string()),
                Just("777 123 456".to_string()),
                Just("www.seznam.cz".to_string()),
                Just("ulice Dlouhá 5".to_string()),
                Just("ZŠ".to_string()),
                "[a-zá-ž]{1,6}",
                "[A-ZČŘ][a-zěř]{1,5}",
                "[0-9]{1,4}",
                Just(".".to_string()),
            ]
        }

        proptest! {
            #[test]
            fn spans_disjoint_and_untouched_text_kept(
                parts in prop::collection::vec(piece(), 0..14),
                seed in any::<u64>(),
            ) {
                let text = parts.join(" ");
                let (out, spans) = pseudonymize(&text, &Lang::cs(), seed);
                let chars: Vec<char> = text.chars().collect();
                let mut rebuilt = String::new();
                let mut cursor = 0;
                for span in &spans {
                    prop_assert!(span.end > span.start);
                    prop_assert!(span.start >= cursor);
                    rebuilt.extend(&chars[cursor..span.start]);
                    rebuilt.push_str(&span.replacement);
                    cursor = span.end;
                }
                rebuilt.extend(&chars[cursor..]);
                prop_assert_eq!(&rebuilt, &out);
                prop_assert_eq!(pseudonymize(&text, &Lang::cs(), seed), (out, spans));
            }
        }
    }
}
