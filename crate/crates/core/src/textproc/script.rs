use serde::{Deserialize, Serialize};

/// Script class of a piece of text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Script {
    Latin,
    Cyrillic,
    /// Letters from more than one script, or only from scripts other than
    /// Latin and Cyrillic.
    Mixed,
    /// No letters at all.
    Neutral,
}

pub(crate) fn is_latin_letter(c: char) -> bool {
    c.is_alphabetic()
        && matches!(c as u32,
            0x0041..=0x005A
            | 0x0061..=0x007A
            | 0x00AA | 0x00BA
            | 0x00C0..=0x00D6
            | 0x00D8..=0x00F6
            | 0x00F8..=0x024F
            | 0x1E00..=0x1EFF
            | 0x2C60..=0x2C7F
            | 0xA720..=0xA7FF
            | 0xAB30..=0xAB6F
            | 0xFF21..=0xFF3A
            | 0xFF41..=0xFF5A)
}

pub(crate) fn is_cyrillic_letter(c: char) -> bool {
    c.is_alphabetic()
        && matches!(c as u32,
            0x0400..=0x052F
            | 0x1C80..=0x1C8F
            | 0x2DE0..=0x2DFF
            | 0xA640..=0xA69F)
}

/// Classifies `text` by the scripts of its letters.
pub fn detect_script(text: &str) -> Script {
    let mut latin = false;
    let mut cyrillic = false;
    let mut other = false;
    for c in text.chars().filter(|c| c.is_alphabetic()) {
        if is_latin_letter(c) {
            latin = true;
        } else if is_cyrillic_letter(c) {
            cyrillic = true;
        } else {
            other = true;
        }
    }
    match (latin, cyrillic, other) {
        (false, false, false) => Script::Neutral,
        (true, false, false) => Script::Latin,
        (false, true, false) => Script::Cyrillic,
        _ => Script::Mixed,
    }
}
