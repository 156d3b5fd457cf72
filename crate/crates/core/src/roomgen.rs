//! Per-category room planning: room size from shelf demand, shelves along the
//! long walls, book-to-slot assignment and decor.
//!
//! Rooms are planned in a room-local frame whose origin is the south-west
//! corner. The long walls run east-west (north and south walls); their
//! offsets are measured from the west end. East and west wall offsets are
//! measured from the south end.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::Category;
use crate::error::RoomError;
use crate::geom::{Dir, Interval, Scalar};
use crate::params::GenParams;
use crate::{Interval64, Rect64};

/// Exhibit pedestal footprint (east-west by north-south).
pub const PEDESTAL_SIZE: (f64, f64) = (1.0, 0.6);
/// Free floor kept around an exhibit pedestal.
pub const PEDESTAL_CLEARANCE_M: f64 = 0.8;
pub const TABLE_SIZE: (f64, f64) = (0.8, 0.6);
pub const CHAIR_SIZE: (f64, f64) = (0.45, 0.45);
const CHAIR_GAP_M: f64 = 0.05;
/// Floor area that earns the exhibit pedestal.
pub const EXHIBIT_AREA_M2: f64 = 12.0;
/// Each further full block of this area earns a table and chair.
pub const TABLE_AREA_M2: f64 = 20.0;
/// Depth of the floor strip in front of a door that furniture must leave free.
pub const DOOR_APPROACH_M: f64 = 1.0;
const DECOR_GRID_M: f64 = 0.1;
const DECOR_ATTEMPTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShelfSpec {
    pub rows: u32,
    pub slots_per_row: u32,
    pub unit_width_m: f64,
    pub depth_m: f64,
}

impl ShelfSpec {
    pub fn capacity(&self) -> usize {
        self.rows as usize * self.slots_per_row as usize
    }
}

impl From<&GenParams> for ShelfSpec {
    fn from(p: &GenParams) -> Self {
        ShelfSpec {
            rows: p.shelf_rows,
            slots_per_row: p.slots_per_row,
            unit_width_m: p.unit_width_m,
            depth_m: p.shelf_depth_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotAssignment {
    pub book_id: String,
    pub row: u32,
    pub slot: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShelfPlacement {
    pub wall: Dir,
    pub offset_m: f64,
    pub assigned: Vec<SlotAssignment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoorKind {
    ChainEntrance,
    ChainExit,
    Extra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoorLink {
    Rooms { a: usize, b: usize },
    WorldEntrance,
}

impl DoorLink {
    /// The room on the other side of the door, seen from `room`.
    pub fn neighbor_of(&self, room: usize) -> Option<usize> {
        match *self {
            DoorLink::Rooms { a, b } if a == room => Some(b),
            DoorLink::Rooms { a, b } if b == room => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Door {
    pub wall: Dir,
    pub center_offset_m: f64,
    pub width_m: f64,
    pub kind: DoorKind,
    pub connects: DoorLink,
    /// Layout connection id; absent for the world entrance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<usize>,
}

impl Door {
    /// Opening along the wall, in wall offsets.
    pub fn span(&self) -> Interval64 {
        Interval::new(self.center_offset_m - self.width_m / 2.0, self.center_offset_m + self.width_m / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecorKind {
    ExhibitPedestal,
    Table,
    Chair,
    Plant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecorItem {
    pub kind: DecorKind,
    /// Footprint center in room-local meters.
    pub position: [f64; 2],
    /// Footprint extent (east-west, north-south) before rotation.
    pub size: [f64; 2],
    pub rotation_deg: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub info_text: String,
}

impl DecorItem {
    pub fn footprint(&self) -> Rect64 {
        let [w, d] = self.size;
        let (w, d) = if (self.rotation_deg.rem_euclid(180.0) - 90.0).abs() < 1e-9 { (d, w) } else { (w, d) };
        Rect64::new(self.position[0] - w / 2.0, self.position[1] - d / 2.0, w, d)
    }
}

/// A planned cuboid room.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomPlan {
    pub id: usize,
    pub category: String,
    /// World-space floor rectangle.
    pub rect: Rect64,
    pub height_m: f64,
    pub shelves: Vec<ShelfPlacement>,
    pub doors: Vec<Door>,
    pub decor: Vec<DecorItem>,
}

impl RoomPlan {
    pub fn book_count(&self) -> usize {
        self.shelves.iter().map(|s| s.assigned.len()).sum()
    }

    pub fn area(&self) -> f64 {
        self.rect.area()
    }

    /// Length of a wall.
    pub fn wall_length(&self, wall: Dir) -> f64 {
        match wall {
            Dir::North | Dir::South => self.rect.width,
            Dir::East | Dir::West => self.rect.depth,
        }
    }

    /// World coordinate where offsets along `wall` start.
    pub fn wall_origin(&self, wall: Dir) -> f64 {
        match wall {
            Dir::North | Dir::South => self.rect.x,
            Dir::East | Dir::West => self.rect.y,
        }
    }

    pub fn shelves_on(&self, wall: Dir) -> usize {
        self.shelves.iter().filter(|s| s.wall == wall).count()
    }

    /// Part of a wall, in wall offsets, where a door opening may go.
    ///
    /// Long walls are shelved from the west end, so only the stretch east of
    /// the last shelf is free.
    pub fn doorable_span(&self, wall: Dir, params: &GenParams) -> Interval64 {
        let len = self.wall_length(wall);
        match wall {
            Dir::North | Dir::South => {
                let used = self.shelves_on(wall);
                if used == 0 {
                    Interval::new(0.0, len)
                } else {
                    let start = params.wall_margin_m + used as f64 * params.unit_width_m;
                    Interval::new(start.min(len), len)
                }
            }
            Dir::East | Dir::West => Interval::new(0.0, len),
        }
    }

    /// Shelf footprints in room-local coordinates.
    pub fn shelf_footprints(&self, params: &GenParams) -> Vec<Rect64> {
        self.shelves.iter().map(|s| shelf_footprint(s, self.rect.width, self.rect.depth, params)).collect()
    }

    /// Door opening as a zero-depth segment on the room outline, room-local.
    pub fn door_opening_local(&self, door: &Door) -> Rect64 {
        door_zone(door, self.rect.width, self.rect.depth, 0.0)
    }

    /// Floor strip in front of a door, room-local.
    pub fn door_approach_local(&self, door: &Door) -> Rect64 {
        door_zone(door, self.rect.width, self.rect.depth, DOOR_APPROACH_M)
    }

    /// Local floor rectangle.
    pub fn local_floor(&self) -> Rect64 {
        Rect64::new(0.0, 0.0, self.rect.width, self.rect.depth)
    }
}

fn shelf_footprint(s: &ShelfPlacement, width: f64, depth: f64, params: &GenParams) -> Rect64 {
    let (u, d) = (params.unit_width_m, params.shelf_depth_m);
    match s.wall {
        Dir::North => Rect64::new(s.offset_m, depth - d, u, d),
        Dir::South => Rect64::new(s.offset_m, 0.0, u, d),
        Dir::West => Rect64::new(0.0, s.offset_m, d, u),
        Dir::East => Rect64::new(width - d, s.offset_m, d, u),
    }
}

fn door_zone(door: &Door, width: f64, depth: f64, reach: f64) -> Rect64 {
    let span = door.span();
    match door.wall {
        Dir::North => Rect64::new(span.lo, depth - reach, span.len(), reach),
        Dir::South => Rect64::new(span.lo, 0.0, span.len(), reach),
        Dir::West => Rect64::new(0.0, span.lo, reach, span.len()),
        Dir::East => Rect64::new(width - reach, span.lo, reach, span.len()),
    }
}

/// Shelf units needed for `book_count` books.
pub fn required_shelves(book_count: usize, spec: &ShelfSpec) -> Result<usize, RoomError> {
    if book_count == 0 {
        return Err(RoomError::EmptyCategory);
    }
    let cap = spec.capacity();
    if cap == 0 {
        return Err(RoomError::Contract("shelf capacity is zero".into()));
    }
    Ok(book_count.div_ceil(cap))
}

/// Room size for `shelf_count` shelves: the depth is fixed, the width grows
/// with the shelves on the longer wall.
pub fn room_dimensions(shelf_count: usize, params: &GenParams) -> (f64, f64) {
    let per_wall = shelf_count.div_ceil(2) as f64;
    let width = params.min_room_length_m.max(per_wall * params.unit_width_m + 2.0 * params.wall_margin_m);
    (width, params.room_depth())
}

/// Room size used by the generator: [`room_dimensions`] widened, when
/// needed, so each long wall keeps a free stretch for a door at its east end.
pub fn room_footprint(shelf_count: usize, params: &GenParams) -> (f64, f64) {
    let (width, depth) = room_dimensions(shelf_count, params);
    let per_wall = shelf_count.div_ceil(2) as f64;
    let with_bay = params.wall_margin_m + per_wall * params.unit_width_m + params.min_adjacency_overlap();
    (width.max(with_bay), depth)
}

/// Place `required_shelves` shelves alternately on the north and south walls
/// and assign the category's books row-major, shelf by shelf.
pub fn plan_shelves(
    category: &Category<'_>,
    dims: (f64, f64),
    spec: &ShelfSpec,
    params: &GenParams,
) -> Result<Vec<ShelfPlacement>, RoomError> {
    let count = required_shelves(category.books.len(), spec)?;
    let (width, _) = dims;
    let cap = spec.capacity();
    let mut shelves = Vec::with_capacity(count);
    for k in 0..count {
        let wall = if k % 2 == 0 { Dir::North } else { Dir::South };
        let offset = params.wall_margin_m + (k / 2) as f64 * spec.unit_width_m;
        if offset + spec.unit_width_m > width - params.wall_margin_m + f64::tolerance() {
            return Err(RoomError::Contract(format!("shelf {k} at offset {offset} does not fit a {width} m wall")));
        }
        let books = category.books.iter().skip(k * cap).take(cap);
        let assigned = books
            .enumerate()
            .map(|(i, b)| SlotAssignment {
                book_id: b.id.clone(),
                row: (i / spec.slots_per_row as usize) as u32,
                slot: (i % spec.slots_per_row as usize) as u32,
            })
            .collect();
        shelves.push(ShelfPlacement { wall, offset_m: offset, assigned });
    }
    Ok(shelves)
}

/// Plaque text shown on the exhibit.
pub fn exhibit_text(category: &str, books: usize) -> String {
    format!(
        "{category}. This room holds {books} books of the {category} collection. \
         Turn the exhibit to read more about the collection."
    )
}

fn fits(candidate: &Rect64, floor: &Rect64, shelves: &[Rect64], approaches: &[Rect64], others: &[Rect64]) -> bool {
    floor.contains_rect(candidate)
        && !shelves.iter().any(|s| s.interiors_overlap(candidate))
        && !approaches.iter().any(|a| a.interiors_overlap(candidate))
        && !others.iter().any(|o| o.interiors_overlap(candidate))
}

/// Decor for a finished room. Pure in `(room, params, rng_seed)`.
pub fn plan_decor(room: &RoomPlan, params: &GenParams, rng_seed: u64) -> Vec<DecorItem> {
    let mut out = Vec::new();
    let area = room.area();
    if area < EXHIBIT_AREA_M2 - f64::tolerance() {
        return out;
    }
    let (w, d) = (room.rect.width, room.rect.depth);
    let floor = room.local_floor();
    let shelves = room.shelf_footprints(params);
    let openings: Vec<Rect64> = room.doors.iter().map(|dr| room.door_opening_local(dr)).collect();
    let approaches: Vec<Rect64> = room.doors.iter().map(|dr| room.door_approach_local(dr)).collect();
    // Footprints the furniture must stay out of.
    let mut taken: Vec<Rect64> = Vec::new();

    let pedestal = DecorItem {
        kind: DecorKind::ExhibitPedestal,
        position: [w / 2.0, d / 2.0],
        size: [PEDESTAL_SIZE.0, PEDESTAL_SIZE.1],
        rotation_deg: 0.0,
        info_text: exhibit_text(&room.category, room.book_count()),
    };
    let fp = pedestal.footprint();
    let clear_of_walls = floor.contains_rect(&fp.inflated(PEDESTAL_CLEARANCE_M));
    let clear_of_things = shelves.iter().chain(&openings).all(|s| fp.gap_at_least(s, PEDESTAL_CLEARANCE_M));
    if clear_of_walls && clear_of_things {
        taken.push(fp.inflated(PEDESTAL_CLEARANCE_M));
        out.push(pedestal);
    }

    let pairs = ((area - EXHIBIT_AREA_M2) / TABLE_AREA_M2 + 1e-9).floor().max(0.0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (tw, td) = TABLE_SIZE;
    let (cw, cd) = CHAIR_SIZE;
    let lo = params.wall_margin_m + tw / 2.0;
    let hi = w - params.wall_margin_m - tw / 2.0;
    let steps = ((hi - lo) / DECOR_GRID_M + 1e-9).floor();
    for _ in 0..pairs {
        if steps < 0.0 {
            break;
        }
        for _ in 0..DECOR_ATTEMPTS {
            let k = rng.random_range(0..=steps as u64);
            let x = lo + k as f64 * DECOR_GRID_M;
            let table = DecorItem {
                kind: DecorKind::Table,
                position: [x, d / 2.0],
                size: [tw, td],
                rotation_deg: 0.0,
                info_text: String::new(),
            };
            let chair = DecorItem {
                kind: DecorKind::Chair,
                position: [x, d / 2.0 + td / 2.0 + CHAIR_GAP_M + cd / 2.0],
                size: [cw, cd],
                rotation_deg: 180.0,
                info_text: String::new(),
            };
            let (tf, cf) = (table.footprint(), chair.footprint());
            if fits(&tf, &floor, &shelves, &approaches, &taken) && fits(&cf, &floor, &shelves, &approaches, &taken) {
                taken.push(tf);
                taken.push(cf);
                out.push(table);
                out.push(chair);
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::BookRecord;

    fn books(n: usize) -> Vec<BookRecord> {
        (0..n)
            .map(|i| BookRecord {
                id: format!("b{i}"),
                title: format!("T{i}"),
                author: "A".into(),
                year: 1900,
                category: "C".into(),
                text_uri: format!("{i}.txt"),
                text_length: 0,
            })
            .collect()
    }

    fn category(books: &[BookRecord]) -> Category<'_> {
        Category { name: "C".into(), books: books.iter().collect() }
    }

    fn room(w: f64, d: f64) -> RoomPlan {
        RoomPlan {
            id: 0,
            category: "C".into(),
            rect: Rect64::new(0.0, 0.0, w, d),
            height_m: 3.0,
            shelves: vec![],
            doors: vec![],
            decor: vec![],
        }
    }

    #[test]
    fn shelf_count_is_ceiling() {
        let spec = ShelfSpec::from(&GenParams::default());
        assert_eq!(required_shelves(100, &spec).unwrap(), 1);
        assert_eq!(required_shelves(101, &spec).unwrap(), 2);
        assert_eq!(required_shelves(250, &spec).unwrap(), 3);
        assert!(matches!(required_shelves(0, &spec), Err(RoomError::EmptyCategory)));
    }

    #[test]
    fn dimensions_follow_formula() {
        let p = GenParams::default();
        assert_eq!(room_dimensions(2, &p), (4.0, 3.0));
        assert_eq!(room_dimensions(10, &p), (6.0, 3.0));
        assert_eq!(room_dimensions(1, &p), (4.0, 3.0));
    }

    #[test]
    fn footprint_reserves_a_door_bay() {
        let p = GenParams::default();
        assert_eq!(room_footprint(2, &p), (4.0, 3.0));
        let (w, _) = room_footprint(10, &p);
        assert!((w - 6.9).abs() < 1e-9);
        for n in 1..60 {
            let (w, _) = room_footprint(n, &p);
            let free = w - (p.wall_margin_m + n.div_ceil(2) as f64 * p.unit_width_m);
            assert!(free >= p.min_adjacency_overlap() - 1e-9);
        }
    }

    #[test]
    fn shelves_alternate_walls() {
        let p = GenParams::default();
        let spec = ShelfSpec::from(&p);
        let bs = books(250);
        let cat = category(&bs);
        let shelves = plan_shelves(&cat, room_footprint(3, &p), &spec, &p).unwrap();
        let north: Vec<f64> = shelves.iter().filter(|s| s.wall == Dir::North).map(|s| s.offset_m).collect();
        let south: Vec<f64> = shelves.iter().filter(|s| s.wall == Dir::South).map(|s| s.offset_m).collect();
        assert_eq!(north, [0.5, 1.5]);
        assert_eq!(south, [0.5]);
    }

    #[test]
    fn single_book_goes_to_first_slot() {
        let p = GenParams::default();
        let bs = books(1);
        let shelves = plan_shelves(&category(&bs), (4.0, 3.0), &ShelfSpec::from(&p), &p).unwrap();
        assert_eq!(shelves.len(), 1);
        assert_eq!(shelves[0].assigned, vec![SlotAssignment { book_id: "b0".into(), row: 0, slot: 0 }]);
    }

    #[test]
    fn hundred_twenty_books_fill_first_shelf() {
        let p = GenParams::default();
        let bs = books(120);
        let shelves = plan_shelves(&category(&bs), room_footprint(2, &p), &ShelfSpec::from(&p), &p).unwrap();
        assert_eq!(shelves[0].assigned.len(), 100);
        assert_eq!(shelves[1].assigned.len(), 20);
        let last = &shelves[0].assigned[99];
        assert_eq!((last.row, last.slot), (4, 19));
    }

    #[test]
    fn shelves_that_do_not_fit_are_a_contract_violation() {
        let p = GenParams::default();
        let bs = books(1000);
        let err = plan_shelves(&category(&bs), (4.0, 3.0), &ShelfSpec::from(&p), &p).unwrap_err();
        assert!(matches!(err, RoomError::Contract(_)));
    }

    #[test]
    fn exhibit_in_twelve_square_meter_room() {
        let p = GenParams::default();
        let decor = plan_decor(&room(4.0, 3.0), &p, 9);
        assert_eq!(decor.len(), 1);
        assert_eq!(decor[0].kind, DecorKind::ExhibitPedestal);
        assert_eq!(decor[0].position, [2.0, 1.5]);
    }

    #[test]
    fn small_room_gets_nothing() {
        assert!(plan_decor(&room(3.0, 3.0), &GenParams::default(), 1).is_empty());
    }

    #[test]
    fn decor_is_deterministic() {
        let p = GenParams::default();
        let r = room(30.0, 3.0);
        let a = plan_decor(&r, &p, 77);
        assert_eq!(a, plan_decor(&r, &p, 77));
        // 90 m2: exhibit plus three table/chair pairs.
        assert_eq!(a.iter().filter(|d| d.kind == DecorKind::Table).count(), 3);
        assert_eq!(a.iter().filter(|d| d.kind == DecorKind::Chair).count(), 3);
    }
}
