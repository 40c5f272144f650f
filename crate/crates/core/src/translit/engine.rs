use std::collections::HashMap;

use super::table::{ContextClass, Direction, TranslitTable};

const UK_VOWELS: &[char] = &['а', 'е', 'є', 'и', 'і', 'ї', 'о', 'у', 'ю', 'я'];
const CS_VOWELS: &[char] = &['a', 'á', 'e', 'é', 'ě', 'i', 'í', 'o', 'ó', 'u', 'ú', 'ů', 'y', 'ý'];

/// One step of a transliteration: a run of source characters and what it
/// became. Unmapped characters appear as single-character pieces with
/// `mapped == false` and identical output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub source: String,
    pub output: String,
    pub mapped: bool,
}

/// A compiled [`TranslitTable`]: longest-match lookup with optional left
/// context and derived casing.
#[derive(Debug, Clone)]
pub struct Transliterator {
    direction: Direction,
    rules: HashMap<String, Vec<(Option<ContextClass>, String)>>,
    longest: usize,
}

impl Transliterator {
    pub fn new(table: TranslitTable) -> Self {
        let mut rules: HashMap<String, Vec<(Option<ContextClass>, String)>> = HashMap::new();
        let mut longest = 1;
        for entry in table.entries {
            longest = longest.max(entry.source.chars().count());
            let slot = rules.entry(entry.source).or_default();
            slot.push((entry.context, entry.target));
            // context-specific rules are tried before the unconditional one
            slot.sort_by_key(|(ctx, _)| ctx.is_none());
        }
        Transliterator {
            direction: table.direction,
            rules,
            longest,
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn apply(&self, text: &str) -> String {
        self.trace(text).into_iter().map(|p| p.output).collect()
    }

    /// Transliterates `text`, returning every matched or passed-through piece.
    pub fn trace(&self, text: &str) -> Vec<Piece> {
        let chars: Vec<char> = text.chars().collect();
        let vowels = match self.direction {
            Direction::UkToLatin => UK_VOWELS,
            Direction::CsToCyrillic => CS_VOWELS,
        };
        let mut pieces = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let previous = i.checked_sub(1).map(|p| chars[p]);
            match self.longest_match(&chars[i..], previous, vowels) {
                Some((len, target)) => {
                    let source = &chars[i..i + len];
                    let output = apply_case(source, target, chars.get(i + len).copied(), previous);
                    pieces.push(Piece {
                        source: source.iter().collect(),
                        output,
                        mapped: true,
                    });
                    i += len;
                }
                None => {
                    pieces.push(Piece {
                        source: chars[i].to_string(),
                        output: chars[i].to_string(),
                        mapped: false,
                    });
                    i += 1;
                }
            }
        }
        pieces
    }

    fn longest_match(&self, rest: &[char], previous: Option<char>, vowels: &[char]) -> Option<(usize, &str)> {
        for len in (1..=self.longest.min(rest.len())).rev() {
            let key: String = rest[..len].iter().flat_map(|c| c.to_lowercase()).collect();
            let Some(candidates) = self.rules.get(&key) else {
                continue;
            };
            let hit = candidates.iter().find(|(ctx, _)| match ctx {
                Some(ctx) => ctx.matches(previous, vowels),
                None => true,
            });
            if let Some((_, target)) = hit {
                return Some((len, target.as_str()));
            }
        }
        None
    }
}

/// Casing of a mapped piece follows its source: lowercase stays lowercase,
/// a capitalized source gives a titlecased target, and an all-uppercase
/// source gives an uppercase target. A single uppercase letter with a
/// multi-character target is titlecased unless it sits inside an uppercase
/// run (next letter uppercase, or last letter after an uppercase letter).
fn apply_case(source: &[char], target: &str, next: Option<char>, previous: Option<char>) -> String {
    let first_upper = source.first().is_some_and(|c| c.is_uppercase());
    if !first_upper {
        return target.to_string();
    }
    let all_upper = source.iter().filter(|c| c.is_alphabetic()).all(|c| c.is_uppercase());
    let upper = if source.len() == 1 {
        match next.filter(|c| c.is_alphabetic()) {
            Some(n) => n.is_uppercase(),
            None => previous.is_some_and(|p| p.is_alphabetic() && p.is_uppercase()),
        }
    } else {
        all_upper
    };
    if upper {
        target.to_uppercase()
    } else {
        titlecase(target)
    }
}

fn titlecase(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
