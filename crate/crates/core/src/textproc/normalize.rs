use unicode_normalization::UnicodeNormalization;

/// Canonical composition, control-character removal and whitespace collapse.
///
/// Whitespace (including tabs and newlines) becomes a single space; other
/// control characters are dropped. Leading and trailing whitespace is removed.
pub fn normalize(text: &str) -> String {
    let mut collapsed = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = true;
        } else if c.is_control() {
            continue;
        } else {
            if pending_space && !collapsed.is_empty() {
                collapsed.push(' ');
            }
            pending_space = false;
            collapsed.push(c);
        }
    }
    collapsed.nfc().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(normalize("a\u{301}"), "á");
        assert_eq!(normalize("  dva   slova "), "dva slova");
        assert_eq!(normalize("tab\there"), "tab here");
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("bell\u{7}less"), "bellless");
        assert_eq!(normalize("line\r\nbreak"), "line break");
    }

    #[test]
    fn control_between_base_and_mark_still_composes() {
        assert_eq!(normalize("a\u{7}\u{301}"), "á");
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC{0,40}|[ \t\n\u{7}a\u{301}\u{308}e ]{0,20}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once.clone());
            prop_assert!(!once.starts_with(' ') && !once.ends_with(' '));
            prop_assert!(!once.contains("  "));
        }
    }
}
