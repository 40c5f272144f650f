//! Cyrillic ↔ Latin transliteration tuned for Czech and Ukrainian readers.
//!
//! Ukrainian is rendered in Czech orthography (`нашу` → `našu`, `х` → `ch`),
//! and Czech is rendered in Cyrillic with vowel length kept as a combining
//! acute (`článek` → `чла́нек`). The mappings are data files, see
//! [`TranslitTable`].

mod engine;
mod table;

use std::sync::LazyLock;

pub use engine::{Piece, Transliterator};
pub use table::{ContextClass, Direction, TableEntry, TableError, TranslitTable, CS_ALPHABET, UK_ALPHABET};

use crate::lang::Lang;

static UK_TO_LATIN: LazyLock<Transliterator> = LazyLock::new(|| {
    Transliterator::new(
        TranslitTable::parse(include_str!("../../data/translit/uk_to_latin.tsv"), Some(Direction::UkToLatin))
            .expect("shipped uk_to_latin table is valid"),
    )
});

static CS_TO_CYRILLIC: LazyLock<Transliterator> = LazyLock::new(|| {
    Transliterator::new(
        TranslitTable::parse(include_str!("../../data/translit/cs_to_cyrillic.tsv"), Some(Direction::CsToCyrillic))
            .expect("shipped cs_to_cyrillic table is valid"),
    )
});

/// The shipped transliterator for `direction`.
pub fn shipped(direction: Direction) -> &'static Transliterator {
    match direction {
        Direction::UkToLatin => &UK_TO_LATIN,
        Direction::CsToCyrillic => &CS_TO_CYRILLIC,
    }
}

pub fn translit_uk_to_latin(text: &str) -> String {
    UK_TO_LATIN.apply(text)
}

pub fn translit_cs_to_cyrillic(text: &str) -> String {
    CS_TO_CYRILLIC.apply(text)
}

/// Transliterates text written in `lang` into the other script, if a table
/// exists for that language.
pub fn for_language(text: &str, lang: &Lang) -> Option<String> {
    match lang.as_str() {
        "uk" => Some(translit_uk_to_latin(text)),
        "cs" => Some(translit_cs_to_cyrillic(text)),
        _ => None,
    }
}

pub fn load_table(path: impl AsRef<std::path::Path>) -> Result<TranslitTable, TableError> {
    TranslitTable::load(path)
}
