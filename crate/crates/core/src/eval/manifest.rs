use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EvalError;

macro_rules! vocabulary {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = ();

            fn from_str(s: &str) -> Result<Self, ()> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(()),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

vocabulary!(Domain {
    News => "news",
    Voice => "voice",
    Personal => "personal",
    Official => "official",
    Games => "games",
});

vocabulary!(UserType {
    Formal => "formal",
    News => "news",
    Other => "other",
});

vocabulary!(Topic {
    Conversation => "general personal conversation",
    Work => "work",
    Housing => "housing",
    Travel => "transportation/travel",
    Education => "school and education",
    Health => "health",
    Politics => "politics",
});

/// One row of an annotated test set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSegment {
    pub id: String,
    pub domain: Domain,
    pub user_type: UserType,
    pub topic: Topic,
    pub src: String,
    #[serde(rename = "ref")]
    pub reference: String,
}

pub const MANIFEST_HEADER: [&str; 6] = ["id", "domain", "user_type", "topic", "src", "ref"];

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<AnnotatedSegment>, EvalError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| EvalError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_manifest(&text)
}

/// Parses the tab-separated manifest format; the first line must be the
/// header `id domain user_type topic src ref`.
pub fn parse_manifest(text: &str) -> Result<Vec<AnnotatedSegment>, EvalError> {
    let mut lines = text.lines().enumerate();
    let header: Vec<&str> = match lines.next() {
        Some((_, h)) => h.trim_end_matches('\r').split('\t').collect(),
        None => Vec::new(),
    };
    if header != MANIFEST_HEADER {
        return Err(EvalError::Manifest { line: 1, message: format!("expected header {}", MANIFEST_HEADER.join("\\t")) });
    }
    let mut segments = Vec::new();
    let mut ids = HashSet::new();
    for (i, raw) in lines {
        let line = i + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 6 {
            return Err(EvalError::Manifest { line, message: format!("expected 6 fields, found {}", fields.len()) });
        }
        let bad = |what: &str, value: &str| EvalError::Manifest { line, message: format!("unknown {what} {value:?}") };
        let domain = fields[1].parse().map_err(|()| bad("domain", fields[1]))?;
        let user_type = fields[2].parse().map_err(|()| bad("user type", fields[2]))?;
        let topic = fields[3].parse().map_err(|()| bad("topic", fields[3]))?;
        let id = fields[0].trim().to_string();
        if id.is_empty() || fields[4].trim().is_empty() || fields[5].trim().is_empty() {
            return Err(EvalError::Manifest { line, message: "id, src and ref must be non-empty".into() });
        }
        if !ids.insert(id.clone()) {
            return Err(EvalError::Manifest { line, message: format!("duplicate id {id:?}") });
        }
        segments.push(AnnotatedSegment {
            id,
            domain,
            user_type,
            topic,
            src: fields[4].to_string(),
            reference: fields[5].to_string(),
        });
    }
    Ok(segments)
}

/// Reads system outputs either as one line per manifest row, in order, or
/// as `id<TAB>text` lines in any order. The second form is used when every
/// line has a tab and the first fields are exactly the manifest ids.
pub fn parse_hypotheses(text: &str, test_set: &[AnnotatedSegment]) -> Result<Vec<(String, String)>, EvalError> {
    let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    let lines = match lines.last() {
        Some(last) if last.is_empty() && lines.len() == test_set.len() + 1 => &lines[..lines.len() - 1],
        _ => &lines[..],
    };
    let ids: HashSet<&str> = test_set.iter().map(|s| s.id.as_str()).collect();
    let keyed: Option<Vec<(String, String)>> = lines
        .iter()
        .map(|l| l.split_once('\t').filter(|(id, _)| ids.contains(id)).map(|(id, t)| (id.to_string(), t.to_string())))
        .collect();
    if let Some(keyed) = keyed {
        let seen: HashSet<&str> = keyed.iter().map(|(id, _)| id.as_str()).collect();
        if seen.len() == keyed.len() && seen.len() == ids.len() && !keyed.is_empty() {
            return Ok(keyed);
        }
    }
    if lines.len() != test_set.len() {
        return Err(EvalError::LengthMismatch { hypotheses: lines.len(), references: test_set.len() });
    }
    Ok(test_set.iter().zip(lines).map(|(seg, l)| (seg.id.clone(), l.to_string())).collect())
}
