use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tokenizer {
    /// The `13a` tokenizer of mteval-v13a, as used by WMT.
    #[default]
    #[serde(rename = "13a")]
    Mteval13a,
    Whitespace,
}

impl Tokenizer {
    pub fn tokenize(self, text: &str) -> Vec<String> {
        match self {
            Tokenizer::Mteval13a => tokenize_13a(text).split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect(),
            Tokenizer::Whitespace => text.split_whitespace().map(str::to_string).collect(),
        }
    }
}

impl std::str::FromStr for Tokenizer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "13a" => Ok(Tokenizer::Mteval13a),
            "whitespace" | "none" => Ok(Tokenizer::Whitespace),
            other => Err(format!("unknown tokenizer {other:?} (expected 13a or whitespace)")),
        }
    }
}

static PUNCT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"([\{-\~\[-\x60 -\&\(-\+:-@/])").expect("13a punctuation"));
static PERIOD_COMMA_BEFORE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([^0-9])([\.,])").expect("13a period"));
static PERIOD_COMMA_AFTER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([\.,])([^0-9])").expect("13a period"));
static DASH_AFTER_DIGIT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"([0-9])(-)").expect("13a dash"));

/// Tokenizes like mteval-v13a and returns tokens joined by single spaces.
pub fn tokenize_13a(text: &str) -> String {
    let mut line = text.replace("<skipped>", "").replace("-\n", "").replace('\n', " ");
    if line.contains('&') {
        line = line.replace("&quot;", "\"").replace("&amp;", "&").replace("&lt;", "<").replace("&gt;", ">");
    }
    let line = format!(" {line} ");
    let line = PUNCT.replace_all(&line, " $1 ");
    let line = PERIOD_COMMA_BEFORE.replace_all(&line, "$1 $2 ");
    let line = PERIOD_COMMA_AFTER.replace_all(&line, " $1 $2");
    let line = DASH_AFTER_DIGIT.replace_all(&line, "$1 $2 ");
    line.split_whitespace().collect::<Vec<_>>().join(" ")
}
