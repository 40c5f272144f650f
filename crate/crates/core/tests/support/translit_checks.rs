//! Seeded string generators and property checks for the transliterators,
//! written against the documented alphabets rather than the shipped tables.

#![allow(dead_code)]

use prekladac_core::translit::{shipped, Direction};
use rand::seq::IndexedRandom;
use rand::Rng;

const UK_LOWER: &str = "абвгґдеєжзиіїйклмнопрстуфхцчшщьюя";
const UK_UPPER: &str = "АБВГҐДЕЄЖЗИІЇЙКЛМНОПРСТУФХЦЧШЩЬЮЯ";
const CS_LOWER: &str = "aábcčdďeéěfghiíjklmnňoópqrřsštťuúůvwxyýzž";
const CS_UPPER: &str = "AÁBCČDĎEÉĚFGHIÍJKLMNŇOÓPQRŘSŠTŤUÚŮVWXYÝZŽ";
const CS_LONG: &str = "áéíóúůýÁÉÍÓÚŮÝ";
/// Characters outside both alphabets (no Latin or Cyrillic letters).
const OTHER: &[char] = &[' ', ' ', ',', '.', '!', '?', '-', '\'', '"', '0', '7', '9', 'α', 'Ω', '中', '😀', '\t', '«', '»'];
const APOSTROPHES: &[char] = &['’', 'ʼ'];

fn pick(rng: &mut impl Rng, alphabet: &str) -> char {
    let chars: Vec<char> = alphabet.chars().collect();
    *chars.choose(rng).unwrap()
}

pub fn uk_string(rng: &mut impl Rng) -> String {
    let len = rng.random_range(0..40);
    (0..len)
        .map(|_| match rng.random_range(0..10) {
            0..=5 => pick(rng, UK_LOWER),
            6 => pick(rng, UK_UPPER),
            7 => *APOSTROPHES.choose(rng).unwrap(),
            _ => *OTHER.choose(rng).unwrap(),
        })
        .collect()
}

pub fn cs_string(rng: &mut impl Rng) -> String {
    let len = rng.random_range(0..40);
    (0..len)
        .map(|_| match rng.random_range(0..10) {
            0..=5 => pick(rng, CS_LOWER),
            6 => pick(rng, CS_UPPER),
            7 => pick(rng, CS_LONG),
            _ => *OTHER.choose(rng).unwrap(),
        })
        .collect()
}

fn is_cyrillic_letter(c: char) -> bool {
    UK_LOWER.contains(c) || UK_UPPER.contains(c)
}

fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic() || (('\u{C0}'..='\u{24F}').contains(&c) && c.is_alphabetic())
}

/// Determinism, pass-through of everything outside the Ukrainian alphabet,
/// and no English-oriented digraph from any single letter.
pub fn check_uk(input: &str) -> Result<(), String> {
    let engine = shipped(Direction::UkToLatin);
    let out = engine.apply(input);
    if engine.apply(input) != out {
        return Err(format!("non-deterministic on {input:?}"));
    }
    let kept_in: String = input.chars().filter(|&c| !is_cyrillic_letter(c) && !APOSTROPHES.contains(&c)).collect();
    let kept_out: String = out.chars().filter(|&c| !is_latin_letter(c)).collect();
    if kept_in != kept_out {
        return Err(format!("pass-through broken: {input:?} -> {out:?}"));
    }
    if out.chars().any(is_cyrillic_letter) {
        return Err(format!("Cyrillic left in {out:?}"));
    }
    for piece in engine.trace(input) {
        if piece.source.chars().count() != 1 || !piece.mapped {
            continue;
        }
        let lower = piece.output.to_lowercase();
        for digraph in ["sh", "zh", "kh", "ts"] {
            if lower.contains(digraph) {
                return Err(format!("{:?} -> {:?} emits {digraph}", piece.source, piece.output));
            }
        }
        if lower.contains("ch") && !matches!(piece.source.as_str(), "х" | "Х") {
            return Err(format!("{:?} -> {:?} emits ch", piece.source, piece.output));
        }
    }
    Ok(())
}

/// One combining acute per long vowel, and pass-through of everything
/// outside the Czech alphabet.
pub fn check_cs(input: &str) -> Result<(), String> {
    let engine = shipped(Direction::CsToCyrillic);
    let out = engine.apply(input);
    if engine.apply(input) != out {
        return Err(format!("non-deterministic on {input:?}"));
    }
    let long = input.chars().filter(|&c| CS_LONG.contains(c)).count();
    let acutes = out.chars().filter(|&c| c == '\u{301}').count();
    if long != acutes {
        return Err(format!("{long} long vowels but {acutes} acutes: {input:?} -> {out:?}"));
    }
    let kept_in: String = input.chars().filter(|&c| !CS_LOWER.contains(c) && !CS_UPPER.contains(c)).collect();
    let kept_out: String = out.chars().filter(|&c| !is_cyrillic_letter(c) && c != '\u{301}').collect();
    if kept_in != kept_out {
        return Err(format!("pass-through broken: {input:?} -> {out:?}"));
    }
    Ok(())
}
