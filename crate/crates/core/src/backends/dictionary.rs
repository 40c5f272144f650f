//! Toy dictionary backend whose tokens carry morphological features.
//!
//! Each lemma is a language-independent concept with per-language surface
//! forms. Translating a token keeps only the features the target language
//! can express for that lemma, so composing through English (which has no
//! gender or T–V politeness in the lexicon) loses them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use super::{BackendError, TranslationBackend};
use crate::lang::Lang;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKey {
    Gender,
    Politeness,
    Number,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureValue {
    #[serde(rename = "M")]
    Masculine,
    #[serde(rename = "F")]
    Feminine,
    #[serde(rename = "N")]
    Neuter,
    #[serde(rename = "formal")]
    Formal,
    #[serde(rename = "informal")]
    Informal,
    #[serde(rename = "sg")]
    Singular,
    #[serde(rename = "pl")]
    Plural,
}

impl FeatureValue {
    fn key(self) -> FeatureKey {
        match self {
            FeatureValue::Masculine | FeatureValue::Feminine | FeatureValue::Neuter => FeatureKey::Gender,
            FeatureValue::Formal | FeatureValue::Informal => FeatureKey::Politeness,
            FeatureValue::Singular | FeatureValue::Plural => FeatureKey::Number,
        }
    }
}

/// A set of morphological features with at most one value per key.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Features(BTreeMap<FeatureKey, FeatureValue>);

impl Features {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a feature; returns `false` (and keeps the old value) if the key
    /// is already present.
    pub fn insert(&mut self, value: FeatureValue) -> bool {
        match self.0.entry(value.key()) {
            std::collections::btree_map::Entry::Occupied(_) => false,
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(value);
                true
            }
        }
    }

    pub fn with(mut self, value: FeatureValue) -> Self {
        self.insert(value);
        self
    }

    pub fn get(&self, key: FeatureKey) -> Option<FeatureValue> {
        self.0.get(&key).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &Features) -> bool {
        self.0.iter().all(|(k, v)| other.0.get(k) == Some(v))
    }

    pub fn intersection(&self, other: &Features) -> Features {
        Features(self.0.iter().filter(|(k, v)| other.0.get(k) == Some(*v)).map(|(k, v)| (*k, *v)).collect())
    }

    pub fn restrict_to(&self, keys: &[FeatureKey]) -> Features {
        Features(self.0.iter().filter(|(k, _)| keys.contains(k)).map(|(k, v)| (*k, *v)).collect())
    }

    pub fn union(&self, other: &Features) -> Features {
        let mut merged = self.clone();
        for v in other.0.values() {
            merged.insert(*v);
        }
        merged
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatureKey, FeatureValue)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }
}

impl FromStr for Features {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut features = Features::new();
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(features);
        }
        for part in s.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(|| format!("feature {part:?} is not key=value"))?;
            let value = match (key.trim(), value.trim()) {
                ("gender", "M") => FeatureValue::Masculine,
                ("gender", "F") => FeatureValue::Feminine,
                ("gender", "N") => FeatureValue::Neuter,
                ("politeness", "formal") => FeatureValue::Formal,
                ("politeness", "informal") => FeatureValue::Informal,
                ("number", "sg") => FeatureValue::Singular,
                ("number", "pl") => FeatureValue::Plural,
                (k, v) => return Err(format!("unknown feature {k}={v}")),
            };
            if !features.insert(value) {
                return Err(format!("feature key {key:?} given twice"));
            }
        }
        Ok(features)
    }
}

impl fmt::Display for Features {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, v)| {
                let key = match k {
                    FeatureKey::Gender => "gender",
                    FeatureKey::Politeness => "politeness",
                    FeatureKey::Number => "number",
                };
                let value = match v {
                    FeatureValue::Masculine => "M",
                    FeatureValue::Feminine => "F",
                    FeatureValue::Neuter => "N",
                    FeatureValue::Formal => "formal",
                    FeatureValue::Informal => "informal",
                    FeatureValue::Singular => "sg",
                    FeatureValue::Plural => "pl",
                };
                format!("{key}={value}")
            })
            .collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub lemma: String,
    pub features: Features,
    pub surface: String,
    /// Set when the lemma is not in the lexicon; the surface passes through.
    #[serde(default)]
    pub unknown: bool,
}

impl TaggedToken {
    pub fn unknown(surface: &str) -> Self {
        TaggedToken {
            lemma: surface.to_string(),
            features: Features::new(),
            surface: surface.to_string(),
            unknown: true,
        }
    }
}

#[derive(Debug, Clone)]
struct Form {
    features: Features,
    surface: String,
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// The lexicon file: `lemma<TAB>lang<TAB>features<TAB>surface`.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    forms: HashMap<(String, Lang), Vec<Form>>,
    /// Lowercased surface (possibly multi-word) to the first (lemma, form index).
    analyses: HashMap<(Lang, String), (String, usize)>,
    longest_phrase: usize,
    lemma_count: usize,
}

static SHIPPED: LazyLock<Lexicon> =
    LazyLock::new(|| Lexicon::parse(include_str!("../../data/lexicon/toy.tsv")).expect("shipped lexicon parses"));

impl Lexicon {
    pub fn shipped() -> &'static Lexicon {
        &SHIPPED
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(source: &str) -> Result<Self, LexiconError> {
        let mut lexicon = Lexicon {
            longest_phrase: 1,
            ..Default::default()
        };
        let mut lemmas = std::collections::HashSet::new();
        for (i, raw) in source.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
            let [lemma, lang, features, surface] = fields[..] else {
                return Err(LexiconError::Parse {
                    line,
                    message: format!("expected 4 tab-separated fields, found {}", fields.len()),
                });
            };
            let lang = Lang::new(lang).map_err(|e| LexiconError::Parse { line, message: e.to_string() })?;
            let features: Features = features.parse().map_err(|message| LexiconError::Parse { line, message })?;
            if lemma.is_empty() || surface.is_empty() {
                return Err(LexiconError::Parse { line, message: "empty lemma or surface".into() });
            }
            lemmas.insert(lemma.to_string());
            let forms = lexicon.forms.entry((lemma.to_string(), lang.clone())).or_default();
            forms.push(Form {
                features,
                surface: surface.to_string(),
            });
            let index = forms.len() - 1;
            let words = surface.split_whitespace().count();
            lexicon.longest_phrase = lexicon.longest_phrase.max(words);
            lexicon
                .analyses
                .entry((lang, surface.to_lowercase()))
                .or_insert_with(|| (lemma.to_string(), index));
        }
        lexicon.lemma_count = lemmas.len();
        Ok(lexicon)
    }

    pub fn lemma_count(&self) -> usize {
        self.lemma_count
    }

    /// Looks up a surface form (case-insensitive); the first listed entry wins.
    pub fn analyze(&self, surface: &str, lang: &Lang) -> Option<TaggedToken> {
        let (lemma, index) = self.analyses.get(&(lang.clone(), surface.to_lowercase()))?;
        let form = &self.forms[&(lemma.clone(), lang.clone())][*index];
        Some(TaggedToken {
            lemma: lemma.clone(),
            features: form.features.clone(),
            surface: surface.to_string(),
            unknown: false,
        })
    }

    /// Feature keys `lang` expresses for `lemma`.
    pub fn expressible(&self, lemma: &str, lang: &Lang) -> Vec<FeatureKey> {
        let mut keys: Vec<FeatureKey> = self
            .forms
            .get(&(lemma.to_string(), lang.clone()))
            .into_iter()
            .flatten()
            .flat_map(|f| f.features.iter().map(|(k, _)| k))
            .collect();
        keys.sort();
        keys.dedup();
        keys
    }

    /// Realizes `token` in `tgt`. The result carries the source features
    /// restricted to what `tgt` expresses for the lemma; the surface is the
    /// first form agreeing with them, or the default form.
    pub fn lookup(&self, token: &TaggedToken, tgt: &Lang) -> TaggedToken {
        if token.unknown {
            return TaggedToken::unknown(&token.surface);
        }
        let Some(forms) = self.forms.get(&(token.lemma.clone(), tgt.clone())) else {
            return TaggedToken::unknown(&token.surface);
        };
        let wanted = token.features.restrict_to(&self.expressible(&token.lemma, tgt));
        let form = forms.iter().find(|f| wanted.is_subset(&f.features)).unwrap_or(&forms[0]);
        TaggedToken {
            lemma: token.lemma.clone(),
            features: wanted.intersection(&form.features),
            surface: form.surface.clone(),
            unknown: false,
        }
    }

    pub(crate) fn longest_phrase(&self) -> usize {
        self.longest_phrase
    }
}

/// A piece of translated text: either a word-level token or the separator
/// text (spaces, punctuation, digits) between tokens, copied verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TextPiece {
    Token(TaggedToken),
    Separator(String),
}

impl TextPiece {
    pub fn text(&self) -> &str {
        match self {
            TextPiece::Token(t) => &t.surface,
            TextPiece::Separator(s) => s,
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphabetic() || matches!(c, '\u{300}'..='\u{36f}' | '’' | 'ʼ')
}

/// Splits text into alternating word and separator runs.
fn split_runs(text: &str) -> Vec<(bool, &str)> {
    let mut runs = Vec::new();
    let mut start = 0;
    let mut current: Option<bool> = None;
    for (i, c) in text.char_indices() {
        let word = is_word_char(c);
        if current.is_some_and(|w| w != word) {
            runs.push((current.unwrap(), &text[start..i]));
            start = i;
        }
        current = Some(word);
    }
    if let Some(word) = current {
        runs.push((word, &text[start..]));
    }
    runs
}

/// Dictionary-backed translation over a [`Lexicon`].
#[derive(Debug, Clone)]
pub struct DictionaryBackend {
    lexicon: Lexicon,
}

impl DictionaryBackend {
    pub fn new(lexicon: Lexicon) -> Self {
        DictionaryBackend { lexicon }
    }

    pub fn shipped() -> Self {
        DictionaryBackend::new(Lexicon::shipped().clone())
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn lookup(&self, token: &TaggedToken, tgt: &Lang) -> TaggedToken {
        self.lexicon.lookup(token, tgt)
    }

    /// Source-side analysis: greedy longest match of multi-word lexicon
    /// entries over word runs separated by single spaces.
    pub fn analyze(&self, text: &str, src: &Lang) -> Vec<TextPiece> {
        let runs = split_runs(text);
        let mut pieces = Vec::new();
        let mut i = 0;
        while i < runs.len() {
            let (is_word, run) = runs[i];
            if !is_word {
                pieces.push(TextPiece::Separator(run.to_string()));
                i += 1;
                continue;
            }
            let mut matched = None;
            for words in (1..=self.lexicon.longest_phrase()).rev() {
                let end = i + 2 * (words - 1);
                if end >= runs.len() {
                    continue;
                }
                let joined_by_spaces = (i..end).step_by(2).all(|j| runs[j + 1].1 == " " && runs[j + 2].0);
                if !joined_by_spaces {
                    continue;
                }
                let phrase: String = runs[i..=end].iter().map(|(_, r)| *r).collect();
                if let Some(token) = self.lexicon.analyze(&phrase, src) {
                    matched = Some((token, end + 1));
                    break;
                }
            }
            match matched {
                Some((token, next)) => {
                    pieces.push(TextPiece::Token(token));
                    i = next;
                }
                None => {
                    pieces.push(TextPiece::Token(TaggedToken::unknown(run)));
                    i += 1;
                }
            }
        }
        pieces
    }

    /// Translates one segment token by token. Sentence-initial targets are
    /// capitalized; other targets keep their lexicon casing.
    pub fn translate_tagged(&self, text: &str, src: &Lang, tgt: &Lang) -> Vec<TextPiece> {
        let mut sentence_start = true;
        self.analyze(text, src)
            .into_iter()
            .map(|piece| match piece {
                TextPiece::Separator(sep) => {
                    if sep.contains(['.', '!', '?', '…']) {
                        sentence_start = true;
                    }
                    TextPiece::Separator(sep)
                }
                TextPiece::Token(token) => {
                    let mut out = self.lexicon.lookup(&token, tgt);
                    if sentence_start && !out.unknown && token.surface.chars().next().is_some_and(char::is_uppercase) {
                        out.surface = capitalize(&out.surface);
                    }
                    sentence_start = false;
                    TextPiece::Token(out)
                }
            })
            .collect()
    }

    pub fn translate_text(&self, text: &str, src: &Lang, tgt: &Lang) -> String {
        self.translate_tagged(text, src, tgt).iter().map(TextPiece::text).collect()
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

impl TranslationBackend for DictionaryBackend {
    fn translate_batch(&self, src: &Lang, tgt: &Lang, texts: &[String]) -> Result<Vec<String>, BackendError> {
        Ok(texts.iter().map(|t| self.translate_text(t, src, tgt)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fem() -> Features {
        Features::new().with(FeatureValue::Feminine)
    }

    #[test]
    fn shipped_lexicon_size() {
        assert!(Lexicon::shipped().lemma_count() >= 50);
    }

    #[test]
    fn lookup_keeps_expressible_features() {
        let lex = Lexicon::shipped();
        let token = lex.analyze("nemocná", &Lang::cs()).unwrap();
        assert_eq!(token.features, fem());
        let uk = lex.lookup(&token, &Lang::uk());
        assert_eq!(uk.surface, "хвора");
        assert_eq!(uk.features, fem());
        let en = lex.lookup(&token, &Lang::en());
        assert_eq!(en.surface, "sick");
        assert!(en.features.is_empty());
    }

    #[test]
    fn unknown_lemma_passes_through() {
        let out = Lexicon::shipped().lookup(&TaggedToken::unknown("xyzzy"), &Lang::uk());
        assert_eq!(out.surface, "xyzzy");
        assert!(out.unknown);
        let never_seen = TaggedToken {
            lemma: "xyzzy".into(),
            features: Features::new(),
            surface: "xyzzy".into(),
            unknown: false,
        };
        assert!(Lexicon::shipped().lookup(&never_seen, &Lang::uk()).unknown);
    }

    #[test]
    fn phrases_and_casing() {
        let backend = DictionaryBackend::shipped();
        assert_eq!(backend.translate_text("Jsem nemocná. A co Vy?", &Lang::cs(), &Lang::uk()), "Я хвора. А що Ви?");
        assert_eq!(backend.translate_text("Dobrý den, děkuji!", &Lang::cs(), &Lang::uk()), "Добрий день, дякую!");
        assert_eq!(backend.translate_text("холодна зима", &Lang::uk(), &Lang::cs()), "chladná zima");
        assert_eq!(backend.translate_text("mám 5 xyz", &Lang::cs(), &Lang::uk()), "маю 5 xyz");
    }

    #[test]
    fn features_parse_and_display() {
        let f: Features = "number=sg,gender=F".parse().unwrap();
        assert_eq!(f.to_string(), "gender=F,number=sg");
        assert!("gender=F,gender=M".parse::<Features>().is_err());
        assert!("gender=X".parse::<Features>().is_err());
        assert_eq!("-".parse::<Features>().unwrap(), Features::new());
    }

    #[test]
    fn lexicon_parse_errors() {
        let err = Lexicon::parse("a\tcs\t-\n").unwrap_err();
        assert!(matches!(err, LexiconError::Parse { line: 1, .. }));
        let err = Lexicon::parse("# c\na\tcs\tgender=Q\tx\n").unwrap_err();
        assert!(matches!(err, LexiconError::Parse { line: 2, .. }));
    }
}
