//! Splitting normalized book text into reader pages.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub book_id: String,
    pub index: usize,
    pub text: String,
    pub total_pages: usize,
}

/// Byte ranges of the pages of `text`, at most `chars_per_page` characters
/// each. A page ends after the last line feed in the window, else after the
/// last whitespace, else at the hard limit. Empty text has one empty page.
pub fn page_ranges(text: &str, chars_per_page: usize) -> Vec<(usize, usize)> {
    assert!(chars_per_page > 0, "chars_per_page must be > 0");
    if text.is_empty() {
        return vec![(0, 0)];
    }
    let mut out = Vec::new();
    let mut start = 0;
    while start < text.len() {
        let rest = &text[start..];
        let Some((limit, _)) = rest.char_indices().nth(chars_per_page) else {
            out.push((start, text.len()));
            break;
        };
        let window = &rest[..limit];
        let cut = if let Some(p) = window.rfind('\n') {
            p + 1
        } else if let Some((p, c)) = window.char_indices().rev().find(|(_, c)| c.is_whitespace()) {
            p + c.len_utf8()
        } else {
            limit
        };
        out.push((start, start + cut));
        start += cut;
    }
    out
}

pub fn page_count(text: &str, chars_per_page: usize) -> usize {
    page_ranges(text, chars_per_page).len()
}

pub fn paginate_text(book_id: &str, text: &str, chars_per_page: usize) -> Vec<Page> {
    let ranges = page_ranges(text, chars_per_page);
    let total = ranges.len();
    ranges
        .into_iter()
        .enumerate()
        .map(|(index, (a, b))| Page {
            book_id: book_id.to_string(),
            index,
            text: text[a..b].to_string(),
            total_pages: total,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn joined(pages: &[Page]) -> String {
        pages.iter().map(|p| p.text.as_str()).collect()
    }

    #[test]
    fn line_text_breaks_on_line_feeds() {
        let line = format!("{}\n", "x".repeat(59));
        let text = line.repeat(60);
        assert_eq!(text.chars().count(), 3600);
        let pages = paginate_text("b", &text, 1800);
        assert_eq!(pages.len(), 2);
        assert!(pages.iter().all(|p| p.text.chars().count() == 1800));
        assert_eq!(joined(&pages), text);
    }

    #[test]
    fn empty_text_has_one_empty_page() {
        let pages = paginate_text("b", "", 1800);
        assert_eq!(pages.len(), 1);
        assert_eq!(pages[0].text, "");
        assert_eq!(pages[0].total_pages, 1);
    }

    #[test]
    fn long_line_is_hard_split() {
        let text = "y".repeat(5000);
        let sizes: Vec<usize> = paginate_text("b", &text, 1800).iter().map(|p| p.text.len()).collect();
        assert_eq!(sizes, [1800, 1800, 1400]);
    }

    #[test]
    fn falls_back_to_whitespace_and_counts_chars() {
        let text = "ää ää ää";
        let pages = paginate_text("b", text, 4);
        assert_eq!(joined(&pages), text);
        assert!(pages.iter().all(|p| p.text.chars().count() <= 4));
        assert_eq!(pages[0].text, "ää ");
    }
}
