use libraria_core::catalog::Category;
use libraria_core::roomgen::{plan_shelves, required_shelves, room_dimensions, room_footprint, ShelfSpec};
use libraria_core::GenParams;
use libraria_testkit::{catalog_with_sizes, rng};
use proptest::prelude::*;
use rand::Rng;

fn shelves_for(n: usize) -> (Vec<String>, Vec<libraria_core::roomgen::ShelfPlacement>, (f64, f64)) {
    let p = GenParams::default();
    let cat = catalog_with_sizes(&[n]);
    let category = Category { name: "Category 000".into(), books: cat.books.iter().collect() };
    let spec = ShelfSpec::from(&p);
    let dims = room_footprint(required_shelves(n, &spec).unwrap(), &p);
    let shelves = plan_shelves(&category, dims, &spec, &p).unwrap();
    (cat.books.iter().map(|b| b.id.clone()).collect(), shelves, dims)
}

proptest! {
    #[test]
    fn every_book_is_shelved_once(n in 1usize..3000) {
        let (ids, shelves, _) = shelves_for(n);
        let mut placed: Vec<String> = shelves.iter().flat_map(|s| s.assigned.iter().map(|a| a.book_id.clone())).collect();
        let mut expected = ids.clone();
        placed.sort();
        expected.sort();
        prop_assert_eq!(placed, expected);
        prop_assert!(shelves.iter().all(|s| s.assigned.len() <= 100));
    }

    #[test]
    fn area_grows_with_book_count(a in 1usize..5000, b in 1usize..5000) {
        let p = GenParams::default();
        let spec = ShelfSpec::from(&p);
        let (lo, hi) = (a.min(b), a.max(b));
        let area = |n| { let (w, d) = room_dimensions(required_shelves(n, &spec).unwrap(), &p); w * d };
        let fp = |n| { let (w, d) = room_footprint(required_shelves(n, &spec).unwrap(), &p); w * d };
        prop_assert!(area(lo) <= area(hi));
        prop_assert!(fp(lo) <= fp(hi));
    }
}

/// Thousand random categories: shelves stay on their walls and never overlap.
#[test]
fn shelves_fit_their_walls() {
    let p = GenParams::default();
    let mut r = rng(11);
    for _ in 0..1000 {
        let n = r.random_range(1..=5000);
        let (_, shelves, (w, _)) = shelves_for(n);
        for (i, s) in shelves.iter().enumerate() {
            assert!(s.offset_m >= p.wall_margin_m - 1e-9);
            assert!(s.offset_m + p.unit_width_m <= w + 1e-9, "{n} books: shelf {i} past the wall");
            for t in &shelves[i + 1..] {
                if t.wall == s.wall {
                    let overlap =
                        (s.offset_m + p.unit_width_m).min(t.offset_m + p.unit_width_m) - s.offset_m.max(t.offset_m);
                    assert!(overlap <= 1e-9);
                }
            }
        }
    }
}
