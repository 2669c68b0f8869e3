//! Mkhedruli ↔ Latin transliteration.
//!
//! Each of the 33 modern letters maps to one Latin letter, ejectives taking
//! a trailing apostrophe (`კ` → `k'`). The apostrophe never occurs alone,
//! so the mapping inverts by longest match.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot transliterate {ch:?} at index {index}")]
pub struct TranslitError {
    /// Character index (not byte offset) of the offending character.
    pub index: usize,
    pub ch: char,
}

/// The modern alphabet in traditional order.
pub const ALPHABET: [(char, &str); 33] = [
    ('ა', "a"),
    ('ბ', "b"),
    ('გ', "g"),
    ('დ', "d"),
    ('ე', "e"),
    ('ვ', "v"),
    ('ზ', "z"),
    ('თ', "t"),
    ('ი', "i"),
    ('კ', "k'"),
    ('ლ', "l"),
    ('მ', "m"),
    ('ნ', "n"),
    ('ო', "o"),
    ('პ', "p'"),
    ('ჟ', "ž"),
    ('რ', "r"),
    ('ს', "s"),
    ('ტ', "t'"),
    ('უ', "u"),
    ('ფ', "p"),
    ('ქ', "k"),
    ('ღ', "ǧ"),
    ('ყ', "q'"),
    ('შ', "š"),
    ('ჩ', "č"),
    ('ც', "c"),
    ('ძ', "ʒ"),
    ('წ', "c'"),
    ('ჭ', "č'"),
    ('ხ', "x"),
    ('ჯ', "ǯ"),
    ('ჰ', "h"),
];

fn latin_of(ch: char) -> Option<&'static str> {
    ALPHABET.iter().find(|(g, _)| *g == ch).map(|(_, l)| *l)
}

fn is_passthrough(ch: char) -> bool {
    ch.is_ascii() || ALPHABET.iter().any(|(_, l)| l.starts_with(ch))
}

/// Georgian script to Latin. Latin and ASCII input passes through, so
/// already-transliterated text is returned unchanged.
pub fn transliterate(text: &str) -> Result<String, TranslitError> {
    let mut out = String::with_capacity(text.len());
    for (index, ch) in text.chars().enumerate() {
        match latin_of(ch) {
            Some(latin) => out.push_str(latin),
            None if is_passthrough(ch) => out.push(ch),
            None => return Err(TranslitError { index, ch }),
        }
    }
    Ok(out)
}

/// Latin back to Georgian script. Only ASCII punctuation, digits and
/// whitespace may appear besides the transliteration letters.
pub fn detransliterate(text: &str) -> Result<String, TranslitError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() * 3);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let ejective = chars.get(i + 1) == Some(&'\'');
        let pick = |want_ejective: bool| {
            ALPHABET.iter().find(|(_, l)| {
                let mut lc = l.chars();
                lc.next() == Some(ch) && (lc.next() == Some('\'')) == want_ejective
            })
        };
        if let Some((g, _)) = ejective.then(|| pick(true)).flatten() {
            out.push(*g);
            i += 2;
        } else if let Some((g, _)) = pick(false) {
            out.push(*g);
            i += 1;
        } else if ch.is_ascii() && !ch.is_ascii_alphabetic() && ch != '\'' {
            out.push(ch);
            i += 1;
        } else {
            return Err(TranslitError { index: i, ch });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty() {
        assert_eq!(transliterate("").unwrap(), "");
        assert_eq!(detransliterate("").unwrap(), "");
    }

    #[test]
    fn flagship_headword() {
        assert_eq!(transliterate("გაგიშვებთ").unwrap(), "gagišvebt");
        assert_eq!(detransliterate("gagišvebt").unwrap(), "გაგიშვებთ");
    }

    #[test]
    fn alphabet_is_the_modern_block() {
        let letters: Vec<char> = ALPHABET.iter().map(|(g, _)| *g).collect();
        let block: Vec<char> = ('\u{10D0}'..='\u{10F0}').collect();
        assert_eq!(letters, block);
    }

    #[test]
    fn every_letter_round_trips() {
        for (g, _) in ALPHABET {
            let s = g.to_string();
            assert_eq!(detransliterate(&transliterate(&s).unwrap()).unwrap(), s);
        }
        let all: String = ALPHABET.iter().map(|(g, _)| *g).collect();
        assert_eq!(detransliterate(&transliterate(&all).unwrap()).unwrap(), all);
    }

    #[test]
    fn ejectives_and_plain_stops_differ() {
        assert_eq!(transliterate("კაქ").unwrap(), "k'ak");
        assert_eq!(detransliterate("k'ak").unwrap(), "კაქ");
        assert_eq!(detransliterate("c'ers").unwrap(), "წერს");
        assert_eq!(detransliterate("cers").unwrap(), "ცერს");
    }

    #[test]
    fn latin_passes_through() {
        assert_eq!(transliterate("gagišvebt").unwrap(), "gagišvebt");
        assert_eq!(transliterate("ga-გი").unwrap(), "ga-gi");
    }

    #[test]
    fn unmappable_reports_char_index() {
        assert_eq!(transliterate("გაЖ").unwrap_err(), TranslitError { index: 2, ch: 'Ж' });
        // archaic letter outside the modern block
        assert_eq!(transliterate("ჱ").unwrap_err().index, 0);
        assert_eq!(detransliterate("gaf").unwrap_err(), TranslitError { index: 2, ch: 'f' });
        assert_eq!(detransliterate("'a").unwrap_err().index, 0);
    }
}
