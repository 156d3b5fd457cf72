use libraria_core::pagination::{page_ranges, paginate_text};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn pages_tile_the_text(text in "[a-zé \n]{0,3000}", cpp in 1usize..400) {
        let pages = paginate_text("b", &text, cpp);
        let joined: String = pages.iter().map(|p| p.text.as_str()).collect();
        prop_assert_eq!(&joined, &text);
        let total = pages.len();
        for (i, p) in pages.iter().enumerate() {
            prop_assert_eq!(p.index, i);
            prop_assert_eq!(p.total_pages, total);
            prop_assert!(p.text.chars().count() <= cpp);
            if !text.is_empty() {
                prop_assert!(!p.text.is_empty());
            }
        }
    }

    /// A page only breaks mid-word when its window held no whitespace.
    #[test]
    fn breaks_prefer_whitespace(text in "[a-z \n]{1,2000}", cpp in 2usize..200) {
        let ranges = page_ranges(&text, cpp);
        for &(a, b) in &ranges[..ranges.len() - 1] {
            let page = &text[a..b];
            let ends_clean = page.ends_with(' ') || page.ends_with('\n');
            prop_assert!(ends_clean || !page.contains([' ', '\n']));
            if page.contains('\n') {
                prop_assert!(page.ends_with('\n'));
            }
        }
    }
}

#[test]
fn empty_text_is_one_empty_page() {
    let pages = paginate_text("b", "", 1800);
    assert_eq!(pages.len(), 1);
    assert_eq!(pages[0].text, "");
}
