use libraria_core::catalog::{group_by_category, normalize_text, parse_catalog, serialize_catalog};
use libraria_core::{BookRecord, Catalog, CatalogFormat};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = String> {
    // Quotes, commas and newlines exercise CSV quoting; values are stored trimmed.
    "[a-zA-Z0-9 ,\"'éß\n]{0,12}".prop_map(|s| s.trim().to_string())
}

fn nonempty() -> impl Strategy<Value = String> {
    "[a-zA-Z][a-zA-Z0-9 ,\"]{0,10}".prop_map(|s| s.trim().to_string())
}

fn catalog() -> impl Strategy<Value = Catalog> {
    prop::collection::vec(
        (field(), field(), -3000i32..2100, prop::sample::select(vec!["A", "B b", "C, \"c\""]), nonempty()),
        0..25,
    )
    .prop_map(|rows| Catalog {
        source_name: "prop".into(),
        books: rows
            .into_iter()
            .enumerate()
            .map(|(i, (title, author, year, category, uri))| BookRecord {
                id: format!("id{i}"),
                title,
                author,
                year,
                category: category.to_string(),
                text_uri: uri,
                text_length: 0,
            })
            .collect(),
    })
}

proptest! {
    #[test]
    fn csv_round_trip(c in catalog()) {
        let bytes = serialize_catalog(&c, CatalogFormat::Csv);
        prop_assert_eq!(parse_catalog(&bytes, CatalogFormat::Csv, "prop").unwrap(), c);
    }

    #[test]
    fn jsonl_round_trip(c in catalog()) {
        let bytes = serialize_catalog(&c, CatalogFormat::Jsonl);
        prop_assert_eq!(parse_catalog(&bytes, CatalogFormat::Jsonl, "prop").unwrap(), c);
    }

    #[test]
    fn grouping_is_a_partition(c in catalog()) {
        prop_assume!(!c.books.is_empty());
        let groups = group_by_category(&c).unwrap();
        let mut ids: Vec<&str> = groups.iter().flat_map(|g| g.books.iter().map(|b| b.id.as_str())).collect();
        prop_assert_eq!(ids.len(), c.books.len());
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(ids.len(), c.books.len());
        for g in &groups {
            prop_assert!(!g.books.is_empty());
            prop_assert!(g.books.iter().all(|b| b.category == g.name));
            // Order inside a category follows the catalog.
            let pos: Vec<usize> = g.books.iter().map(|b| c.books.iter().position(|x| x.id == b.id).unwrap()).collect();
            prop_assert!(pos.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn parsing_is_deterministic(c in catalog()) {
        let bytes = serialize_catalog(&c, CatalogFormat::Csv);
        prop_assert_eq!(
            parse_catalog(&bytes, CatalogFormat::Csv, "x").unwrap(),
            parse_catalog(&bytes, CatalogFormat::Csv, "x").unwrap()
        );
    }

    #[test]
    fn normalized_text_is_a_fixed_point(s in "[a-z \t\r\n]{0,40}") {
        let once = normalize_text(&s);
        prop_assert!(!once.contains('\r') && !once.contains('\t'));
        prop_assert!(once.lines().all(|l| !l.ends_with(' ')));
        prop_assert_eq!(normalize_text(&once), once);
    }
}
