use std::ops::Range;

use serde::{Deserialize, Serialize};

/// Token cap of the sentence encoder; longer inputs are truncated.
pub const MAX_TOKENS: usize = 512;

/// Lowercased word tokens of one text, capped at a maximum length.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenSequence {
    tokens: Vec<String>,
}

impl TokenSequence {
    pub fn new(tokens: Vec<String>) -> Self {
        TokenSequence { tokens }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn count(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Space-joined form; tokenizing it again reproduces `self`.
    pub fn join(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Byte ranges of the word tokens in `text`, in order, before any truncation.
///
/// A token is a maximal run of alphanumeric characters; whitespace and
/// punctuation are separators and never part of a token.
pub fn token_spans(text: &str) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_alphanumeric(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                spans.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push(s..text.len());
    }
    spans
}

/// Number of tokens [`tokenize_with_limit`] would produce with no cap.
pub fn count_tokens(text: &str) -> usize {
    token_spans(text)
        .into_iter()
        .filter(|r| !normalize_token(&text[r.clone()]).is_empty())
        .count()
}

fn normalize_token(raw: &str) -> String {
    // Lowercasing can emit combining marks (e.g. U+0130); dropping them keeps
    // tokenization idempotent on its own output.
    raw.chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric())
        .collect()
}

/// Tokenizes with the default [`MAX_TOKENS`] cap.
pub fn tokenize(text: &str) -> TokenSequence {
    tokenize_with_limit(text, MAX_TOKENS)
}

pub fn tokenize_with_limit(text: &str, max_tokens: usize) -> TokenSequence {
    let tokens = token_spans(text)
        .into_iter()
        .map(|r| normalize_token(&text[r]))
        .filter(|t| !t.is_empty())
        .take(max_tokens)
        .collect();
    TokenSequence { tokens }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text_has_no_tokens() {
        let t = tokenize("");
        assert_eq!(t.count(), 0);
        assert!(t.is_empty());
    }

    #[test]
    fn lowercases_and_splits_on_whitespace() {
        let t = tokenize("The program runs fast");
        assert_eq!(t.tokens(), ["the", "program", "runs", "fast"]);
    }

    #[test]
    fn punctuation_runs_are_dropped() {
        let t = tokenize("Hello,   world!!! -- it's (2024)...");
        assert_eq!(t.tokens(), ["hello", "world", "it", "s", "2024"]);
    }

    #[test]
    fn truncates_to_512_tokens() {
        let text: String = (0..600).map(|i| format!("w{i} ")).collect();
        // independent count: whitespace-separated words
        assert_eq!(text.split_whitespace().count(), 600);
        let t = tokenize(&text);
        assert_eq!(t.count(), 512);
        assert_eq!(t.tokens()[0], "w0");
        assert_eq!(t.tokens()[511], "w511");
        assert_eq!(count_tokens(&text), 600);
    }

    #[test]
    fn spans_index_original_text() {
        let text = "Ab, cD!e";
        let words: Vec<&str> = token_spans(text).into_iter().map(|r| &text[r]).collect();
        assert_eq!(words, ["Ab", "cD", "e"]);
    }

    proptest! {
        #[test]
        fn tokenize_is_idempotent_on_its_output(text in "\\PC{0,200}") {
            let first = tokenize(&text);
            let second = tokenize(&first.join());
            prop_assert_eq!(first, second);
        }

        #[test]
        fn count_never_exceeds_cap(text in "[a-z ,.]{0,400}", cap in 1usize..50) {
            prop_assert!(tokenize_with_limit(&text, cap).count() <= cap);
        }
    }
}
