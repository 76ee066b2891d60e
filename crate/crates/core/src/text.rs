//! Tokenization of tutor responses and alignment of free-text phrases onto
//! token windows.
//!
//! A token is a maximal run of letters and digits. Apostrophes and hyphens
//! are kept when they sit between two alphanumeric characters, so `don't`
//! and `well-done` are single tokens. Everything else, including all
//! punctuation, separates tokens and never becomes a token itself.

use std::ops::Range;

use serde::{Deserialize, Serialize};

/// One word of a response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Original slice of the source text.
    pub surface: String,
    /// Lowercased form used for matching.
    pub normalized: String,
    /// Character (code point) offset of the first character, inclusive.
    pub char_start: usize,
    /// Character offset one past the last character.
    pub char_end: usize,
    /// Position within the response, starting at zero.
    pub index: usize,
    #[serde(skip)]
    byte_range: Range<usize>,
}

impl Token {
    /// Byte range of the token inside its source text.
    pub fn byte_range(&self) -> Range<usize> {
        self.byte_range.clone()
    }
}

/// Tokens of a single text, with the text they were cut from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenList {
    source_text: String,
    tokens: Vec<Token>,
}

impl TokenList {
    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Token> {
        self.tokens.get(index)
    }

    pub fn normalized(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.normalized.as_str())
    }

    /// Byte range of the source text covered by tokens `start..end`,
    /// including the separators between them.
    pub fn byte_range_of(&self, start: usize, end: usize) -> Option<Range<usize>> {
        if start >= end || end > self.tokens.len() {
            return None;
        }
        Some(self.tokens[start].byte_range.start..self.tokens[end - 1].byte_range.end)
    }

    /// Source text covered by tokens `start..end`.
    pub fn surface_of(&self, start: usize, end: usize) -> Option<&str> {
        self.byte_range_of(start, end).map(|r| &self.source_text[r])
    }
}

/// A token window that matched a phrase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseMatch {
    pub start: usize,
    pub end: usize,
    pub matched_phrase: String,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-' | '\u{2010}' | '\u{2011}')
}

/// Splits `text` into word tokens.
pub fn tokenize(text: &str) -> TokenList {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !is_word_char(chars[i].1) {
            i += 1;
            continue;
        }
        let start = i;
        let mut end = i + 1;
        loop {
            if end < chars.len() && is_word_char(chars[end].1) {
                end += 1;
            } else if end + 1 < chars.len()
                && is_joiner(chars[end].1)
                && is_word_char(chars[end + 1].1)
            {
                end += 2;
            } else {
                break;
            }
        }
        let byte_start = chars[start].0;
        let byte_end = chars.get(end).map_or(text.len(), |(b, _)| *b);
        let surface = &text[byte_start..byte_end];
        tokens.push(Token {
            surface: surface.to_string(),
            normalized: normalize_word(surface),
            char_start: start,
            char_end: end,
            index: tokens.len(),
            byte_range: byte_start..byte_end,
        });
        i = end;
    }
    TokenList {
        source_text: text.to_string(),
        tokens,
    }
}

fn normalize_word(surface: &str) -> String {
    surface
        .trim_matches(|c: char| !c.is_alphanumeric())
        .chars()
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .flat_map(char::to_lowercase)
        .collect()
}

/// Normalized token sequence of an arbitrary phrase.
pub fn normalize_phrase(phrase: &str) -> Vec<String> {
    tokenize(phrase)
        .tokens
        .into_iter()
        .map(|t| t.normalized)
        .collect()
}

/// Finds the leftmost window at or after `search_from` whose normalized
/// tokens equal those of `phrase`.
pub fn locate_phrase(tokens: &TokenList, phrase: &str, search_from: usize) -> Option<PhraseMatch> {
    let needle = normalize_phrase(phrase);
    if needle.is_empty() || search_from > tokens.len() {
        return None;
    }
    let hay = &tokens.tokens;
    let last_start = hay.len().checked_sub(needle.len())?;
    (search_from..=last_start)
        .find(|&start| {
            hay[start..start + needle.len()]
                .iter()
                .zip(&needle)
                .all(|(t, n)| t.normalized == *n)
        })
        .map(|start| PhraseMatch {
            start,
            end: start + needle.len(),
            matched_phrase: phrase.to_string(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(list: &TokenList) -> Vec<&str> {
        list.tokens().iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn punctuation_is_never_a_token() {
        let list = tokenize("Great job, Kevin!");
        assert_eq!(surfaces(&list), ["Great", "job", "Kevin"]);
        assert_eq!(
            list.normalized().collect::<Vec<_>>(),
            ["great", "job", "kevin"]
        );
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" ?! ...").is_empty());
    }

    #[test]
    fn period_separates_sentences() {
        let list = tokenize("Stick with this. We can finish it.");
        assert_eq!(list.len(), 7);
        let idx: Vec<_> = list.tokens().iter().map(|t| t.index).collect();
        assert_eq!(idx, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn joiners_stay_inside_words() {
        let list = tokenize("Don't stop, well-done! 'quoted' students' -x");
        assert_eq!(
            surfaces(&list),
            ["Don't", "stop", "well-done", "quoted", "students", "x"]
        );
        assert_eq!(list.get(0).unwrap().normalized, "don't");
        let curly = tokenize("don\u{2019}t");
        assert_eq!(curly.len(), 1);
        assert_eq!(curly.get(0).unwrap().normalized, "don't");
    }

    #[test]
    fn char_offsets_count_code_points() {
        let list = tokenize("Très bien, Zoë!");
        let t = list.get(1).unwrap();
        assert_eq!((t.char_start, t.char_end), (5, 9));
        let z = list.get(2).unwrap();
        assert_eq!((z.char_start, z.char_end), (11, 14));
        assert_eq!(&list.source_text()[z.byte_range()], "Zoë");
    }

    #[test]
    fn locate_exact() {
        let list = tokenize("Great job, Kevin!");
        let m = locate_phrase(&list, "great job", 0).unwrap();
        assert_eq!((m.start, m.end), (0, 2));
    }

    #[test]
    fn locate_respects_cursor() {
        let list = tokenize("Great job! Great job!");
        let m = locate_phrase(&list, "Great job", 2).unwrap();
        assert_eq!((m.start, m.end), (2, 4));
        assert!(locate_phrase(&list, "Great job", 3).is_none());
    }

    #[test]
    fn locate_missing_and_degenerate() {
        let list = tokenize("Great job, Kevin!");
        assert!(locate_phrase(&list, "excellent work", 0).is_none());
        assert!(locate_phrase(&list, "!!", 0).is_none());
        assert!(locate_phrase(&list, "great job", 9).is_none());
        assert!(locate_phrase(&list, "great job kevin and more", 0).is_none());
    }

    #[test]
    fn locate_ignores_case_and_punctuation() {
        let list = tokenize("You are doing GREAT. Keep going!");
        let m = locate_phrase(&list, "great, keep going", 0).unwrap();
        assert_eq!((m.start, m.end), (3, 6));
        assert_eq!(list.surface_of(m.start, m.end), Some("GREAT. Keep going"));
    }

    proptest! {
        #[test]
        fn surfaces_round_trip(text in "\\PC{0,60}") {
            let list = tokenize(&text);
            let mut prev_end = 0;
            for (i, tok) in list.tokens().iter().enumerate() {
                prop_assert_eq!(tok.index, i);
                prop_assert!(tok.char_start < tok.char_end);
                prop_assert!(tok.char_start >= prev_end);
                prop_assert!(!tok.normalized.is_empty());
                prop_assert_eq!(&text[tok.byte_range()], tok.surface.as_str());
                let by_chars: String = text
                    .chars()
                    .skip(tok.char_start)
                    .take(tok.char_end - tok.char_start)
                    .collect();
                prop_assert_eq!(by_chars, tok.surface.clone());
                prev_end = tok.char_end;
            }
        }

        #[test]
        fn retokenizing_joined_surfaces_is_stable(text in "[a-zA-Z0-9 ,.!?'-]{0,60}") {
            let list = tokenize(&text);
            let joined = list.tokens().iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ");
            let again = tokenize(&joined);
            prop_assert_eq!(
                list.normalized().collect::<Vec<_>>(),
                again.normalized().collect::<Vec<_>>()
            );
        }

        #[test]
        fn located_window_matches_phrase(
            words in proptest::collection::vec("[a-c]{1,2}", 1..12),
            start in 0usize..12,
            len in 1usize..4,
        ) {
            let text = words.join(" ");
            let list = tokenize(&text);
            let start = start.min(list.len() - 1);
            let end = (start + len).min(list.len());
            let phrase = words[start..end].join(" ");
            let m = locate_phrase(&list, &phrase, 0).expect("phrase is present");
            prop_assert!(m.start <= start);
            let window: Vec<_> = list.tokens()[m.start..m.end].iter().map(|t| t.normalized.clone()).collect();
            prop_assert_eq!(window, normalize_phrase(&phrase));
        }
    }
}
