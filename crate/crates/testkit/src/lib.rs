//! Independent oracles and fixture builders for the test suites.
//!
//! The checks here deliberately avoid the geometry helpers of the core crate:
//! they recompute everything from raw rectangles and door records.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::path::PathBuf;

use libraria_core::catalog::{parse_catalog, FsTextSource};
use libraria_core::layoutgen::{ConnectionKind, Layout};
use libraria_core::roomgen::{DoorKind, DoorLink, RoomPlan};
use libraria_core::{BookRecord, Catalog, CatalogFormat, Dir, Rect64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EPS: f64 = 1e-6;

/// Directory of the committed demo fixture.
pub fn demo_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/demo")
}

/// Demo catalog with its texts loaded and normalized.
pub fn load_demo() -> (Catalog, Vec<String>) {
    let dir = demo_dir();
    let bytes = std::fs::read(dir.join("catalog.csv")).expect("demo catalog is committed");
    let mut catalog = parse_catalog(&bytes, CatalogFormat::Csv, "catalog.csv").expect("demo catalog parses");
    let texts = catalog.load_texts(&FsTextSource::new(&dir)).expect("demo texts load");
    (catalog, texts)
}

pub fn book(id: String, category: String, i: usize) -> BookRecord {
    BookRecord {
        id,
        title: format!("Volume {i}"),
        author: format!("Author {}", i % 97),
        year: 1800 + (i % 200) as i32,
        category,
        text_uri: format!("texts/{i}.txt"),
        text_length: 0,
    }
}

/// Catalog whose categories have the given sizes, in order.
pub fn catalog_with_sizes(sizes: &[usize]) -> Catalog {
    let mut books = Vec::new();
    let mut n = 0;
    for (c, &size) in sizes.iter().enumerate() {
        for _ in 0..size {
            books.push(book(format!("c{c}-b{n}"), format!("Category {c:03}"), n));
            n += 1;
        }
    }
    Catalog { source_name: "synthetic".into(), books }
}

/// Random category sizes: 1 to `max_categories` categories of 1 to
/// `max_books` books each.
pub fn random_sizes(rng: &mut ChaCha8Rng, max_categories: usize, max_books: usize) -> Vec<usize> {
    let n = rng.random_range(1..=max_categories);
    (0..n).map(|_| rng.random_range(1..=max_books)).collect()
}

/// Short deterministic text for book `i`.
pub fn filler_text(i: usize, len: usize) -> String {
    let words = ["shelf", "reader", "light", "stair", "quiet", "page", "margin", "ink", "atlas", "index"];
    let mut s = String::with_capacity(len + 16);
    let mut k = i;
    while s.len() < len {
        s.push_str(words[k % words.len()]);
        k = k.wrapping_mul(31).wrapping_add(7);
        s.push(if k.is_multiple_of(11) { '\n' } else { ' ' });
    }
    s.truncate(len);
    s
}

/// Random normalized-looking text of up to `max_len` bytes, biased toward
/// awkward shapes: empty, one long line, whitespace runs, multibyte chars.
pub fn random_text(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    let len = match rng.random_range(0..10) {
        0 => 0,
        1 => max_len,
        _ => rng.random_range(0..=max_len),
    };
    let shape = rng.random_range(0..5);
    let mut s = String::with_capacity(len);
    let alphabet: &[char] = match shape {
        0 => &['x'],
        1 => &['a', 'b', ' ', '\n'],
        2 => &['é', 'ß', '中', ' ', 'z', '\n', '\n'],
        3 => &[' ', '\n'],
        _ => &['q', 'w', 'e', ' ', ' ', '\n', '\t'],
    };
    while s.len() < len {
        if shape == 4 && rng.random_range(0..50) == 0 {
            let run = rng.random_range(1..3000);
            s.extend(std::iter::repeat_n('w', run));
        } else {
            s.push(alphabet[rng.random_range(0..alphabet.len())]);
        }
    }
    while s.len() > len {
        s.pop();
    }
    s
}

fn overlap_1d(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    a1.min(b1) - a0.max(b0)
}

/// Interiors intersect by more than `EPS` on both axes.
pub fn rects_overlap(a: &Rect64, b: &Rect64) -> bool {
    overlap_1d(a.x, a.x + a.width, b.x, b.x + b.width) > EPS && overlap_1d(a.y, a.y + a.depth, b.y, b.y + b.depth) > EPS
}

/// Pairs of rooms whose interiors overlap (O(n^2)).
pub fn overlapping_pairs(rooms: &[RoomPlan]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..rooms.len() {
        for j in i + 1..rooms.len() {
            if rects_overlap(&rooms[i].rect, &rooms[j].rect) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Rooms reachable from room 0 through `edges`.
pub fn bfs_reachable(n: usize, edges: &[(usize, usize)]) -> usize {
    if n == 0 {
        return 0;
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut q = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                q.push_back(w);
            }
        }
    }
    count
}

/// Junction budget recomputed from the rectangle.
pub fn budget(rect: &Rect64) -> usize {
    let perimeter = 2.0 * (rect.width + rect.depth);
    let raw = (perimeter / 10.0 + 1e-9).floor() as i64 + 1;
    raw.clamp(2, 6) as usize
}

/// World point of a door's midpoint.
pub fn door_point(room: &RoomPlan, wall: Dir, offset: f64) -> (f64, f64) {
    let r = &room.rect;
    match wall {
        Dir::North => (r.x + offset, r.y + r.depth),
        Dir::South => (r.x + offset, r.y),
        Dir::East => (r.x + r.width, r.y + offset),
        Dir::West => (r.x, r.y + offset),
    }
}

fn wall_len(room: &RoomPlan, wall: Dir) -> f64 {
    match wall {
        Dir::North | Dir::South => room.rect.width,
        Dir::East | Dir::West => room.rect.depth,
    }
}

/// Shared-wall overlap of two rects if they touch along a wall line.
pub fn touching_overlap(a: &Rect64, b: &Rect64) -> Option<f64> {
    let (ax1, ay1, bx1, by1) = (a.x + a.width, a.y + a.depth, b.x + b.width, b.y + b.depth);
    if (ax1 - b.x).abs() <= EPS || (bx1 - a.x).abs() <= EPS {
        return Some(overlap_1d(a.y, ay1, b.y, by1));
    }
    if (ay1 - b.y).abs() <= EPS || (by1 - a.y).abs() <= EPS {
        return Some(overlap_1d(a.x, ax1, b.x, bx1));
    }
    None
}

/// Neighbors of `r` recomputed from geometry: rooms that carry a door at the
/// same world point as one of `r`'s doors.
pub fn geometric_neighbors(layout: &Layout, r: usize) -> BTreeSet<usize> {
    let room = &layout.rooms[r];
    let mut out = BTreeSet::new();
    for d in &room.doors {
        let p = door_point(room, d.wall, d.center_offset_m);
        for (s, other) in layout.rooms.iter().enumerate() {
            if s == r {
                continue;
            }
            let hit = other.doors.iter().any(|e| {
                let q = door_point(other, e.wall, e.center_offset_m);
                (p.0 - q.0).abs() <= EPS && (p.1 - q.1).abs() <= EPS && e.wall == d.wall.opposite()
            });
            if hit {
                out.insert(s);
            }
        }
    }
    out
}

/// Every layout invariant checked from scratch. Returns human-readable
/// violations; empty means the layout is sound.
pub fn layout_violations(layout: &Layout) -> Vec<String> {
    let mut v = Vec::new();
    let rooms = &layout.rooms;
    let p = &layout.params;
    let n = rooms.len();

    for (a, b) in overlapping_pairs(rooms) {
        v.push(format!("rooms {a} and {b} overlap"));
    }
    let edges: Vec<(usize, usize)> = layout.connections.iter().map(|c| (c.rooms[0], c.rooms[1])).collect();
    let reached = bfs_reachable(n, &edges);
    if reached != n {
        v.push(format!("only {reached} of {n} rooms reachable"));
    }

    let mut degree = vec![0usize; n];
    for c in &layout.connections {
        degree[c.rooms[0]] += 1;
        degree[c.rooms[1]] += 1;
        let (a, b) = (&rooms[c.rooms[0]], &rooms[c.rooms[1]]);
        match touching_overlap(&a.rect, &b.rect) {
            Some(len) if len >= p.door_width_m - EPS => {}
            other => v.push(format!("connection {} overlap {:?} below door width", c.id, other)),
        }
        if c.opening.lo < c.overlap.lo - EPS || c.opening.hi > c.overlap.hi + EPS {
            v.push(format!("connection {} opening outside the shared wall", c.id));
        }
        if ((c.opening.hi - c.opening.lo) - p.door_width_m).abs() > EPS {
            v.push(format!("connection {} opening is not door-wide", c.id));
        }
        // Both rooms carry the door at the same world point on opposite walls.
        let da = a.doors.iter().find(|d| d.connection == Some(c.id));
        let db = b.doors.iter().find(|d| d.connection == Some(c.id));
        match (da, db) {
            (Some(da), Some(db)) => {
                let pa = door_point(a, da.wall, da.center_offset_m);
                let pb = door_point(b, db.wall, db.center_offset_m);
                if (pa.0 - pb.0).abs() > EPS || (pa.1 - pb.1).abs() > EPS || da.wall != db.wall.opposite() {
                    v.push(format!("connection {} doors disagree", c.id));
                }
            }
            _ => v.push(format!("connection {} lacks a door record", c.id)),
        }
    }
    for i in 1..n {
        let chain =
            layout.connections.iter().filter(|c| c.kind == ConnectionKind::Chain && c.rooms == [i - 1, i]).count();
        if chain != 1 {
            v.push(format!("rooms {} and {i} have {chain} chain doors", i - 1));
        }
    }
    for (i, r) in rooms.iter().enumerate() {
        if degree[i] > budget(&r.rect) {
            v.push(format!("room {i} degree {} over budget {}", degree[i], budget(&r.rect)));
        }
    }
    for w in layout.placements.windows(2) {
        if w[0].direction == w[1].direction.opposite() {
            v.push("placement reverses direction".into());
        }
    }

    for r in rooms {
        if (r.height_m - rooms[0].height_m).abs() > 0.0 {
            v.push(format!("room {} height differs", r.id));
        }
        let entrance = r.doors.iter().find(|d| d.kind == DoorKind::ChainEntrance);
        let exit = r.doors.iter().find(|d| d.kind == DoorKind::ChainExit);
        if entrance.is_none() {
            v.push(format!("room {} has no entrance", r.id));
        }
        if let (Some(e), Some(x)) = (entrance, exit) {
            if e.wall == x.wall {
                v.push(format!("room {} entrance and exit share a wall", r.id));
            }
        }
        if r.id + 1 < n && exit.is_none() {
            v.push(format!("room {} has no exit", r.id));
        }
        for d in &r.doors {
            let (lo, hi) = (d.center_offset_m - d.width_m / 2.0, d.center_offset_m + d.width_m / 2.0);
            if lo < -EPS || hi > wall_len(r, d.wall) + EPS {
                v.push(format!("room {} door outside its wall", r.id));
            }
            if matches!(d.connects, DoorLink::WorldEntrance) && r.id != 0 {
                v.push(format!("room {} has a world entrance", r.id));
            }
        }
        let mut seen = HashSet::new();
        for (k, s) in r.shelves.iter().enumerate() {
            if !matches!(s.wall, Dir::North | Dir::South) {
                v.push(format!("room {} shelf {k} on a short wall", r.id));
            }
            let (lo, hi) = (s.offset_m, s.offset_m + p.unit_width_m);
            if lo < -EPS || hi > wall_len(r, s.wall) + EPS {
                v.push(format!("room {} shelf {k} outside its wall", r.id));
            }
            for (j, t) in r.shelves.iter().enumerate() {
                if j > k && t.wall == s.wall && overlap_1d(lo, hi, t.offset_m, t.offset_m + p.unit_width_m) > EPS {
                    v.push(format!("room {} shelves {k} and {j} overlap", r.id));
                }
            }
            for d in r.doors.iter().filter(|d| d.wall == s.wall) {
                let (a, b) = (d.center_offset_m - d.width_m / 2.0, d.center_offset_m + d.width_m / 2.0);
                if overlap_1d(lo, hi, a, b) > EPS {
                    v.push(format!("room {} shelf {k} blocks a door", r.id));
                }
            }
            if s.assigned.len() > p.shelf_capacity() {
                v.push(format!("room {} shelf {k} over capacity", r.id));
            }
            for a in &s.assigned {
                if !seen.insert((k, a.row, a.slot)) || a.row >= p.shelf_rows || a.slot >= p.slots_per_row {
                    v.push(format!("room {} shelf {k} slot clash or out of range", r.id));
                }
            }
        }
    }
    v
}

/// Largest slide found by stepping `step` at a time.
pub fn stepping_slide(
    candidate: &Rect64,
    obstacles: &[Rect64],
    inward: Dir,
    must_touch: &Rect64,
    min_overlap: f64,
    step: f64,
    max_steps: usize,
) -> f64 {
    let valid = |t: f64| {
        let moved = match inward {
            Dir::North => Rect64::new(candidate.x, candidate.y + t, candidate.width, candidate.depth),
            Dir::South => Rect64::new(candidate.x, candidate.y - t, candidate.width, candidate.depth),
            Dir::East => Rect64::new(candidate.x + t, candidate.y, candidate.width, candidate.depth),
            Dir::West => Rect64::new(candidate.x - t, candidate.y, candidate.width, candidate.depth),
        };
        let keeps = match inward {
            Dir::North | Dir::South => {
                overlap_1d(moved.y, moved.y + moved.depth, must_touch.y, must_touch.y + must_touch.depth)
            }
            Dir::East | Dir::West => {
                overlap_1d(moved.x, moved.x + moved.width, must_touch.x, must_touch.x + must_touch.width)
            }
        } >= min_overlap - EPS;
        keeps && !obstacles.iter().any(|o| rects_overlap(&moved, o))
    };
    let mut best = 0.0;
    for k in 1..=max_steps {
        let t = k as f64 * step;
        if !valid(t) {
            break;
        }
        best = t;
    }
    best
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
