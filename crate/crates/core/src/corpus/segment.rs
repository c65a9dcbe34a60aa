use std::ops::Range;

use super::Segment;
use crate::embed::{count_tokens, token_spans};

/// Byte ranges of sentences: a sentence ends at `.`, `!` or `?` followed by
/// whitespace or the end of text. Ranges exclude surrounding whitespace.
pub fn sentence_ranges(text: &str) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let at_boundary = chars.peek().is_none_or(|&(_, n)| n.is_whitespace());
            if at_boundary {
                let end = i + c.len_utf8();
                push_trimmed(text, start..end, &mut out);
                start = end;
            }
        }
    }
    push_trimmed(text, start..text.len(), &mut out);
    out
}

fn push_trimmed(text: &str, r: Range<usize>, out: &mut Vec<Range<usize>>) {
    let slice = &text[r.clone()];
    let lead = slice.len() - slice.trim_start().len();
    let trail = slice.len() - slice.trim_end().len();
    if lead + trail < slice.len() {
        out.push(r.start + lead..r.end - trail);
    }
}

pub fn split_sentences(text: &str) -> Vec<&str> {
    sentence_ranges(text).into_iter().map(|r| &text[r]).collect()
}

/// Paragraphs are runs of non-blank lines; ranges exclude the outer whitespace.
fn paragraph_ranges(text: &str) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut current: Option<Range<usize>> = None;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let line_range = offset..offset + line.len();
        offset += line.len();
        if line.trim().is_empty() {
            if let Some(r) = current.take() {
                push_trimmed(text, r, &mut out);
            }
        } else {
            current = Some(match current {
                Some(r) => r.start..line_range.end,
                None => line_range,
            });
        }
    }
    if let Some(r) = current {
        push_trimmed(text, r, &mut out);
    }
    out
}

/// Splits one document into segments of at most `max_tokens` tokens.
///
/// Paragraphs (separated by blank lines) that fit become one segment each.
/// Longer paragraphs are packed greedily sentence by sentence; a single
/// sentence over the cap is cut every `max_tokens` tokens. Segment ids are
/// `0..n` within the document.
pub fn segment_document(doc_id: &str, text: &str, max_tokens: usize) -> Vec<Segment> {
    assert!(max_tokens > 0, "max_tokens must be positive");
    let mut pieces: Vec<Range<usize>> = Vec::new();
    for para in paragraph_ranges(text) {
        if count_tokens(&text[para.clone()]) <= max_tokens {
            pieces.push(para);
            continue;
        }
        let mut group: Option<(Range<usize>, usize)> = None;
        for sent in sentence_ranges(&text[para.clone()]) {
            let sent = para.start + sent.start..para.start + sent.end;
            let n = count_tokens(&text[sent.clone()]);
            if n > max_tokens {
                if let Some((g, _)) = group.take() {
                    pieces.push(g);
                }
                hard_split(text, sent, max_tokens, &mut pieces);
                continue;
            }
            group = match group {
                Some((g, used)) if used + n <= max_tokens => Some((g.start..sent.end, used + n)),
                Some((g, _)) => {
                    pieces.push(g);
                    Some((sent, n))
                }
                None => Some((sent, n)),
            };
        }
        if let Some((g, _)) = group {
            pieces.push(g);
        }
    }

    pieces
        .into_iter()
        .enumerate()
        .map(|(i, r)| Segment::new(i as u64, doc_id, &text[r]))
        .collect()
}

/// Cuts `range` before every `max_tokens`-th token.
fn hard_split(text: &str, range: Range<usize>, max_tokens: usize, out: &mut Vec<Range<usize>>) {
    let slice = &text[range.clone()];
    let starts: Vec<usize> = token_spans(slice)
        .into_iter()
        .filter(|r| count_tokens(&slice[r.clone()]) > 0)
        .map(|r| r.start)
        .collect();
    let mut cut = 0;
    let mut idx = max_tokens;
    while idx < starts.len() {
        push_trimmed(text, range.start + cut..range.start + starts[idx], out);
        cut = starts[idx];
        idx += max_tokens;
    }
    push_trimmed(text, range.start + cut..range.end, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::tokenize_with_limit;

    fn words(n: usize, tag: &str) -> String {
        (0..n).map(|i| format!("{tag}{i}")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn sentences_split_on_terminal_punctuation() {
        let s = split_sentences("One two. Three?  Four!Five six... seven");
        assert_eq!(s, vec!["One two.", "Three?", "Four!Five six...", "seven"]);
        assert!(split_sentences("   ").is_empty());
        assert_eq!(split_sentences("Version 1.2 is out."), vec!["Version 1.2 is out."]);
    }

    #[test]
    fn empty_text_has_no_segments() {
        assert!(segment_document("d", "", 512).is_empty());
        assert!(segment_document("d", "\n\n  \n", 512).is_empty());
    }

    #[test]
    fn short_paragraph_is_one_segment() {
        let text = format!("{}.", words(100, "w"));
        let segs = segment_document("d", &text, 512);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].token_count, 100);
        assert_eq!(segs[0].text, text);
    }

    #[test]
    fn paragraphs_become_segments() {
        let text = format!("{}.\n\n{}.\n", words(300, "a"), words(300, "b"));
        let segs = segment_document("d", &text, 512);
        assert_eq!(segs.len(), 2);
        assert_eq!(segs.iter().map(|s| s.token_count).collect::<Vec<_>>(), vec![300, 300]);
        assert_eq!(segs[1].id, 1);
    }

    #[test]
    fn long_paragraph_packs_sentences() {
        let sentences: Vec<String> = (0..13).map(|i| format!("{}.", words(100, &format!("s{i}x")))).collect();
        let text = sentences.join(" ");
        let segs = segment_document("d", &text, 512);
        // independent count with the plain tokenizer
        let counts: Vec<usize> = segs
            .iter()
            .map(|s| tokenize_with_limit(&s.text, usize::MAX).count())
            .collect();
        assert_eq!(counts, vec![500, 500, 300]);
        assert_eq!(counts.iter().sum::<usize>(), 1300);
        let rejoined = segs.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join(" ");
        assert_eq!(rejoined, text);
    }

    #[test]
    fn oversized_sentence_is_hard_split() {
        let text = format!("{} end.", words(1100, "t"));
        let segs = segment_document("d", &text, 512);
        let counts: Vec<usize> = segs.iter().map(|s| s.token_count).collect();
        assert_eq!(counts, vec![512, 512, 77]);
        let rejoined = segs.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join(" ");
        assert_eq!(rejoined, text);
    }

    #[test]
    fn content_order_is_preserved() {
        let text = "Alpha beta. Gamma delta!\n\nEpsilon zeta? Eta.\n\n\nTheta";
        let segs = segment_document("d", text, 3);
        let joined: Vec<String> = segs
            .iter()
            .flat_map(|s| tokenize_with_limit(&s.text, 99).tokens().to_vec())
            .collect();
        assert_eq!(joined, tokenize_with_limit(text, 99).tokens().to_vec());
        assert!(segs.iter().all(|s| s.token_count <= 3));
    }
}
