use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::textproc::Script;

/// A lowercase language code such as `cs`, `uk` or `en`.
///
/// Codes are 2 to 8 ASCII lowercase letters; `unknown` is accepted for text
/// whose language the caller did not supply.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lang(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid language code {0:?}")]
pub struct InvalidLang(pub String);

impl Lang {
    pub fn new(code: &str) -> Result<Self, InvalidLang> {
        let code = code.trim().to_ascii_lowercase();
        if (2..=8).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_lowercase()) {
            Ok(Lang(code))
        } else {
            Err(InvalidLang(code))
        }
    }

    pub fn cs() -> Self {
        Lang("cs".into())
    }

    pub fn uk() -> Self {
        Lang("uk".into())
    }

    pub fn en() -> Self {
        Lang("en".into())
    }

    pub fn unknown() -> Self {
        Lang("unknown".into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The script the language is normally written in, when known.
    pub fn native_script(&self) -> Option<Script> {
        match self.0.as_str() {
            "uk" | "ru" | "be" | "bg" | "sr" | "mk" => Some(Script::Cyrillic),
            "unknown" => None,
            _ => Some(Script::Latin),
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Lang {
    type Err = InvalidLang;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lang::new(s)
    }
}

impl Serialize for Lang {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Lang {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Lang::new(&raw).map_err(serde::de::Error::custom)
    }
}
