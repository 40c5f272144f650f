use std::collections::{HashMap, HashSet};
use std::io;
use std::path::Path;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use super::normalize::normalize;
use super::script::{detect_script, Script};
use crate::lang::Lang;

/// One sentence of a request, the unit that is translated, transliterated
/// and scored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub text: String,
    pub lang: Lang,
    pub script: Script,
    /// Position within the originating request, contiguous from 0.
    pub index: usize,
}

impl Segment {
    pub fn new(text: impl Into<String>, lang: Lang, index: usize) -> Self {
        let text = text.into();
        let script = detect_script(&text);
        Segment {
            text,
            lang,
            script,
            index,
        }
    }
}

/// Abbreviations that do not terminate a sentence, stored lowercased and
/// without their trailing period.
#[derive(Debug, Clone, Default)]
pub struct AbbreviationList {
    entries: HashSet<String>,
}

impl AbbreviationList {
    /// Parses the data-file format: one entry per line, `#` starts a comment.
    pub fn parse(source: &str) -> Self {
        let entries = source
            .lines()
            .map(|line| line.split('#').next().unwrap_or("").trim())
            .filter(|line| !line.is_empty())
            .map(|line| line.trim_end_matches('.').to_lowercase())
            .filter(|line| !line.is_empty())
            .collect();
        AbbreviationList { entries }
    }

    pub fn load(path: impl AsRef<Path>) -> io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries
            .contains(&word.trim_end_matches('.').to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

const CLOSING: &[char] = &['"', '\'', '”', '“', '»', '’', ')', ']', '}'];
const OPENING: &[char] = &['"', '\'', '„', '“', '«', '‘', '‚', '(', '[', '{'];

/// Abbreviation-aware sentence splitter.
///
/// A token ending in `.`, `!`, `?` or `…` (optionally followed by closing
/// quotes or brackets) ends a sentence when the next token does not start
/// with a lowercase letter. Periods after known abbreviations, single-letter
/// initials, and ordinals followed by a number (dates such as `3. 5. 2022`)
/// do not end a sentence.
#[derive(Debug, Clone, Default)]
pub struct Segmenter {
    abbreviations: HashMap<Lang, AbbreviationList>,
}

static SHIPPED: LazyLock<Segmenter> = LazyLock::new(Segmenter::shipped);

impl Segmenter {
    /// The segmenter with the abbreviation lists bundled in the crate.
    pub fn shipped() -> Self {
        let mut segmenter = Segmenter::default();
        segmenter.insert(Lang::cs(), AbbreviationList::parse(include_str!("../../data/abbrev/cs.txt")));
        segmenter.insert(Lang::uk(), AbbreviationList::parse(include_str!("../../data/abbrev/uk.txt")));
        segmenter.insert(Lang::en(), AbbreviationList::parse(include_str!("../../data/abbrev/en.txt")));
        segmenter
    }

    pub fn insert(&mut self, lang: Lang, list: AbbreviationList) {
        self.abbreviations.insert(lang, list);
    }

    pub fn segment(&self, text: &str, lang: &Lang) -> Vec<Segment> {
        let normalized = normalize(text);
        let abbreviations = self.abbreviations.get(lang);
        let tokens: Vec<&str> = normalized.split(' ').filter(|t| !t.is_empty()).collect();

        let mut segments = Vec::new();
        let mut current: Vec<&str> = Vec::new();
        for (i, token) in tokens.iter().enumerate() {
            current.push(token);
            let boundary = match tokens.get(i + 1) {
                Some(next) => ends_sentence(token, next, abbreviations),
                None => true,
            };
            if boundary {
                segments.push(Segment::new(current.join(" "), lang.clone(), segments.len()));
                current.clear();
            }
        }
        segments
    }
}

/// Splits `text` into sentences using the shipped abbreviation lists.
pub fn segment_sentences(text: &str, lang: &Lang) -> Vec<Segment> {
    SHIPPED.segment(text, lang)
}

fn ends_sentence(token: &str, next: &str, abbreviations: Option<&AbbreviationList>) -> bool {
    let core = token.trim_end_matches(CLOSING);
    let Some(last) = core.chars().last() else {
        return false;
    };
    if !matches!(last, '.' | '!' | '?' | '…') {
        return false;
    }
    let next_start = next.trim_start_matches(OPENING).chars().next();
    if next_start.is_some_and(|c| c.is_lowercase()) {
        return false;
    }
    if last == '.' && !core.ends_with("..") {
        let word = core.trim_start_matches(OPENING).trim_end_matches('.');
        if abbreviations.is_some_and(|list| list.contains(word)) {
            return false;
        }
        let mut chars = word.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            if c.is_uppercase() {
                return false;
            }
        }
        let is_ordinal = !word.is_empty() && word.chars().all(|c| c.is_ascii_digit());
        if is_ordinal && next_start.is_some_and(|c| c.is_ascii_digit()) {
            return false;
        }
    }
    true
}
