//! The closed-form slide against a 1 mm stepping oracle and exact rationals.

use libraria_core::geom::{max_inward_slide, Rect};
use libraria_core::{Dir, Rational64, Rect64, RectQ};
use libraria_testkit::stepping_slide;
use proptest::prelude::*;

fn mm(v: i64) -> f64 {
    v as f64 / 1000.0
}

fn q(v: i64) -> Rational64 {
    Rational64::new(v, 1000)
}

fn rect_mm(x: i64, y: i64, w: i64, d: i64) -> (Rect64, RectQ) {
    (Rect::new(mm(x), mm(y), mm(w), mm(d)), Rect::new(q(x), q(y), q(w), q(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    /// A room east of `must_touch` sliding south past an obstacle band.
    #[test]
    fn slide_matches_stepping_and_rationals(
        w in 2000i64..9000,
        must_w in 2000i64..9000,
        must_y in -2000i64..2000,
        obs in prop::collection::vec((-4000i64..12000, -15000i64..-3000, 500i64..6000, 500i64..4000), 0..4),
        min_overlap in 1000i64..2500,
    ) {
        let depth = 3000;
        // Start from a legal contact: the shared wall already meets the minimum.
        let must_y = must_y.clamp(min_overlap - depth, depth - min_overlap);
        let (cand, cand_q) = rect_mm(must_w, must_y, w, depth);
        let (must, must_q) = rect_mm(0, 0, must_w, depth);
        // Obstacles strictly below the candidate so the start is free.
        let obstacles: Vec<(Rect64, RectQ)> = obs
            .iter()
            .map(|&(x, y, ow, od)| rect_mm(x, (y + must_y).min(must_y - od), ow, od))
            .collect();
        let (of, oq): (Vec<Rect64>, Vec<RectQ>) = obstacles.into_iter().unzip();
        let exact = max_inward_slide(&cand, &of, Dir::South, &must, mm(min_overlap));
        let rational = max_inward_slide(&cand_q, &oq, Dir::South, &must_q, q(min_overlap));
        let stepped = stepping_slide(&cand, &of, Dir::South, &must, mm(min_overlap), 0.001, 20_000);
        // All inputs are whole millimetres, so the answer is too.
        prop_assert!((exact - stepped).abs() < 1e-6, "exact {exact} stepped {stepped}");
        let r = *rational.numer() as f64 / *rational.denom() as f64;
        prop_assert!((exact - r).abs() < 1e-9);
    }
}

#[test]
fn obstacle_two_and_a_half_meters_away() {
    let must = Rect64::new(0.0, -10.0, 4.0, 20.0);
    let cand = Rect64::new(4.0, 0.0, 4.0, 3.0);
    let obstacle = Rect64::new(4.0, -5.5, 4.0, 3.0);
    let t = max_inward_slide(&cand, &[obstacle], Dir::South, &must, 1.4);
    assert!((t - 2.5).abs() < 1e-12);
    assert!((stepping_slide(&cand, &[obstacle], Dir::South, &must, 1.4, 0.001, 10_000) - 2.5).abs() < 1e-9);
}

#[test]
fn overlap_clamp_is_exact() {
    let must = Rect64::new(0.0, 0.0, 4.0, 3.0);
    let cand = Rect64::new(4.0, 0.0, 4.0, 3.0);
    let t = max_inward_slide(&cand, &[], Dir::South, &must, 1.4);
    let left = (must.y + must.depth).min(cand.y - t + cand.depth) - must.y.max(cand.y - t);
    assert!((left - 1.4).abs() < 1e-12);
    let q = |n| Rational64::new(n, 10);
    let tq = max_inward_slide(
        &Rect::new(q(40), q(0), q(40), q(30)),
        &[],
        Dir::South,
        &Rect::new(q(0), q(0), q(40), q(30)),
        q(14),
    );
    assert_eq!(tq, q(16));
}

#[test]
fn single_precision_agrees() {
    let must = Rect::new(0.0f32, 0.0, 4.0, 3.0);
    let cand = Rect::new(4.0f32, 0.0, 4.0, 3.0);
    let obstacle = Rect::new(4.0f32, -4.0, 4.0, 3.0);
    let t = max_inward_slide(&cand, &[obstacle], Dir::South, &must, 1.4);
    assert!((t - 1.0).abs() < 1e-4);
}
