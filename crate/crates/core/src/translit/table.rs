use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::textproc::script::{is_cyrillic_letter, is_latin_letter};

/// Ukrainian alphabet in dictionary order.
pub const UK_ALPHABET: &[char] = &[
    'а', 'б', 'в', 'г', 'ґ', 'д', 'е', 'є', 'ж', 'з', 'и', 'і', 'ї', 'й', 'к', 'л', 'м', 'н', 'о',
    'п', 'р', 'с', 'т', 'у', 'ф', 'х', 'ц', 'ч', 'ш', 'щ', 'ь', 'ю', 'я',
];

/// Czech alphabet in dictionary order (the digraph `ch` is not a letter of
/// its own here).
pub const CS_ALPHABET: &[char] = &[
    'a', 'á', 'b', 'c', 'č', 'd', 'ď', 'e', 'é', 'ě', 'f', 'g', 'h', 'i', 'í', 'j', 'k', 'l', 'm',
    'n', 'ň', 'o', 'ó', 'p', 'q', 'r', 'ř', 's', 'š', 't', 'ť', 'u', 'ú', 'ů', 'v', 'w', 'x', 'y',
    'ý', 'z', 'ž',
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    UkToLatin,
    CsToCyrillic,
}

impl Direction {
    pub fn alphabet(self) -> &'static [char] {
        match self {
            Direction::UkToLatin => UK_ALPHABET,
            Direction::CsToCyrillic => CS_ALPHABET,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::UkToLatin => "uk_to_latin",
            Direction::CsToCyrillic => "cs_to_cyrillic",
        })
    }
}

/// Condition on the character immediately before the matched source.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ContextClass {
    /// No letter precedes (start of text or after a non-letter).
    WordInitial,
    AfterVowel,
    AfterConsonant,
    /// The preceding character, lowercased, is one of these.
    After(Vec<char>),
}

impl ContextClass {
    pub(crate) fn matches(&self, previous: Option<char>, vowels: &[char]) -> bool {
        let previous = previous.filter(|c| c.is_alphabetic()).map(|c| c.to_lowercase().next().unwrap_or(c));
        match (self, previous) {
            (ContextClass::WordInitial, prev) => prev.is_none(),
            (_, None) => false,
            (ContextClass::AfterVowel, Some(c)) => vowels.contains(&c),
            (ContextClass::AfterConsonant, Some(c)) => !vowels.contains(&c),
            (ContextClass::After(set), Some(c)) => set.contains(&c),
        }
    }
}

impl FromStr for ContextClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "initial" => Ok(ContextClass::WordInitial),
            "after-vowel" => Ok(ContextClass::AfterVowel),
            "after-consonant" => Ok(ContextClass::AfterConsonant),
            other => match other.strip_prefix("after:") {
                Some(chars) if !chars.is_empty() => {
                    Ok(ContextClass::After(chars.chars().flat_map(char::to_lowercase).collect()))
                }
                _ => Err(format!("unknown context class {other:?}")),
            },
        }
    }
}

impl fmt::Display for ContextClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextClass::WordInitial => f.write_str("initial"),
            ContextClass::AfterVowel => f.write_str("after-vowel"),
            ContextClass::AfterConsonant => f.write_str("after-consonant"),
            ContextClass::After(chars) => write!(f, "after:{}", chars.iter().collect::<String>()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    /// Lowercase source grapheme sequence.
    pub source: String,
    pub target: String,
    pub context: Option<ContextClass>,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{direction} table has no entry for letter {letter:?}")]
    Coverage { direction: Direction, letter: char },
    #[error("line {line}: duplicate entry for {grapheme:?}{}", context_suffix(.context))]
    Duplicate { line: usize, grapheme: String, context: Option<ContextClass> },
    #[error("cannot infer table direction: {0}")]
    Direction(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn context_suffix(context: &Option<ContextClass>) -> String {
    context.as_ref().map(|c| format!(" in context {c}")).unwrap_or_default()
}

/// A validated transliteration table.
#[derive(Debug, Clone)]
pub struct TranslitTable {
    pub direction: Direction,
    pub entries: Vec<TableEntry>,
}

impl TranslitTable {
    /// Reads a table file. The direction is inferred from the script of the
    /// source column.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, TableError> {
        Self::parse(&std::fs::read_to_string(path)?, None)
    }

    pub fn parse(source: &str, direction: Option<Direction>) -> Result<Self, TableError> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (i, raw) in source.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(TableError::Parse {
                    line,
                    message: format!("expected 2 or 3 tab-separated fields, found {}", fields.len()),
                });
            }
            let source = fields[0].trim();
            if source.is_empty() {
                return Err(TableError::Parse { line, message: "empty source".into() });
            }
            let lowered = source.to_lowercase();
            if lowered != source {
                return Err(TableError::Parse {
                    line,
                    message: format!("source {source:?} must be lowercase"),
                });
            }
            let context = match fields.get(2).map(|f| f.trim()).filter(|f| !f.is_empty()) {
                Some(raw) => Some(raw.parse().map_err(|message| TableError::Parse { line, message })?),
                None => None,
            };
            if !seen.insert((lowered.clone(), context.clone())) {
                return Err(TableError::Duplicate { line, grapheme: lowered, context });
            }
            entries.push(TableEntry {
                source: lowered,
                target: fields[1].trim().to_string(),
                context,
            });
        }

        let direction = match direction {
            Some(d) => d,
            None => infer_direction(&entries)?,
        };
        let table = TranslitTable { direction, entries };
        table.check_coverage()?;
        Ok(table)
    }

    fn check_coverage(&self) -> Result<(), TableError> {
        let covered: HashSet<&str> = self
            .entries
            .iter()
            .filter(|e| e.context.is_none())
            .map(|e| e.source.as_str())
            .collect();
        for &letter in self.direction.alphabet() {
            if !covered.contains(letter.encode_utf8(&mut [0; 4]) as &str) {
                return Err(TableError::Coverage { direction: self.direction, letter });
            }
        }
        Ok(())
    }
}

fn infer_direction(entries: &[TableEntry]) -> Result<Direction, TableError> {
    let (mut latin, mut cyrillic) = (0usize, 0usize);
    for c in entries.iter().flat_map(|e| e.source.chars()) {
        if is_latin_letter(c) {
            latin += 1;
        } else if is_cyrillic_letter(c) {
            cyrillic += 1;
        }
    }
    match latin.cmp(&cyrillic) {
        std::cmp::Ordering::Less => Ok(Direction::UkToLatin),
        std::cmp::Ordering::Greater => Ok(Direction::CsToCyrillic),
        std::cmp::Ordering::Equal => Err(TableError::Direction(format!(
            "{latin} Latin and {cyrillic} Cyrillic letters in the source column"
        ))),
    }
}
