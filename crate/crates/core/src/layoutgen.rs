//! Spiral room placement with inward compression, adjacency detection and
//! extra connections under a per-room junction budget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::Category;
use crate::error::{LayoutError, RoomError};
use crate::geom::{
    blocked_shifts, is_blocked, obstacle_ahead, overlap_shift_range, shared_wall, slide_limit, Dir, Interval, Scalar,
};
use crate::params::{GenParams, DOOR_JAMB_M};
use crate::roomgen::{
    plan_decor, plan_shelves, required_shelves, room_footprint, Door, DoorKind, DoorLink, RoomPlan, ShelfSpec,
};
use crate::{Interval64, Rect64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionKind {
    Chain,
    Extra,
}

/// A door between two rooms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub id: usize,
    pub kind: ConnectionKind,
    /// `rooms[0] < rooms[1]`.
    pub rooms: [usize; 2],
    /// Wall of `rooms[0]` that carries the door.
    pub wall: Dir,
    /// World coordinate of the shared wall line.
    pub line: f64,
    /// Common part of the two walls, in world coordinates along the wall.
    pub overlap: Interval64,
    /// Door opening, in world coordinates along the wall.
    pub opening: Interval64,
}

impl Connection {
    /// World position of the opening's midpoint.
    pub fn position(&self) -> [f64; 2] {
        match self.wall {
            Dir::East | Dir::West => [self.line, self.opening.center()],
            Dir::North | Dir::South => [self.opening.center(), self.line],
        }
    }

    pub fn other(&self, room: usize) -> Option<usize> {
        match self.rooms {
            [a, b] if a == room => Some(b),
            [a, b] if b == room => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BBox {
    pub fn of(rect: &Rect64) -> Self {
        BBox { min_x: rect.min_x(), min_y: rect.min_y(), max_x: rect.max_x(), max_y: rect.max_y() }
    }

    pub fn include(&mut self, rect: &Rect64) {
        self.min_x = self.min_x.min(rect.min_x());
        self.min_y = self.min_y.min(rect.min_y());
        self.max_x = self.max_x.max(rect.max_x());
        self.max_y = self.max_y.max(rect.max_y());
    }

    pub fn area(&self) -> f64 {
        (self.max_x - self.min_x) * (self.max_y - self.min_y)
    }

    pub fn side(&self, dir: Dir) -> f64 {
        match dir {
            Dir::North => self.max_y,
            Dir::South => self.min_y,
            Dir::East => self.max_x,
            Dir::West => self.min_x,
        }
    }
}

/// How a room got where it is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementRecord {
    /// Travel direction from the previous room; room 0 counts as entered eastward.
    pub direction: Dir,
    pub slide_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub rooms: Vec<RoomPlan>,
    pub connections: Vec<Connection>,
    pub placements: Vec<PlacementRecord>,
    pub bbox: BBox,
    pub seed: u64,
    pub params: GenParams,
}

impl Layout {
    /// Neighbor room ids of `room`, ascending, one per connection.
    pub fn neighbors(&self, room: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.connections.iter().filter_map(|c| c.other(room)).collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, room: usize) -> usize {
        self.connections.iter().filter(|c| c.rooms.contains(&room)).count()
    }
}

/// Spiral state: which way to go next and when to turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementCursor {
    pub direction: Dir,
    pub rooms_in_arm: u32,
    pub arm_limit: u32,
    pub turns: u32,
    pub ccw: bool,
}

impl PlacementCursor {
    pub fn new(ccw: bool) -> Self {
        PlacementCursor { direction: Dir::East, rooms_in_arm: 0, arm_limit: 1, turns: 0, ccw }
    }

    /// The spiral's turn: clockwise, or counter-clockwise when `ccw`.
    pub fn turn(&self, d: Dir) -> Dir {
        if self.ccw {
            d.ccw()
        } else {
            d.cw()
        }
    }

    pub fn counter_turn(&self, d: Dir) -> Dir {
        if self.ccw {
            d.cw()
        } else {
            d.ccw()
        }
    }

    /// Toward the spiral interior when travelling `d`.
    pub fn inward(&self, d: Dir) -> Dir {
        self.turn(d)
    }

    /// Cursor after a room was placed travelling `actual`; `last` is the
    /// direction used for the room before it.
    pub fn advance(&self, actual: Dir, last: Dir) -> Self {
        let mut next = *self;
        if actual == self.direction {
            next.rooms_in_arm += 1;
        } else if actual == last {
            // The turn did not fit; keep extending the arm and retry next time.
            return next;
        } else {
            next.direction = actual;
            next.rooms_in_arm = 1;
        }
        if next.rooms_in_arm >= next.arm_limit {
            next.direction = next.turn(next.direction);
            next.rooms_in_arm = 0;
            next.turns += 1;
            if next.turns.is_multiple_of(2) {
                next.arm_limit += 1;
            }
        }
        next
    }
}

/// Outcome of placing one room.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub rect: Rect64,
    pub direction: Dir,
    pub slide_m: f64,
    /// Shared wall with the previous room.
    pub overlap: Interval64,
    /// Chain door opening on that wall.
    pub opening: Interval64,
    pub cursor: PlacementCursor,
}

fn nearest_free(start: f64, range: &Interval64, blocked: &[Interval64], outward: Dir) -> Option<f64> {
    let tol = f64::tolerance();
    let mut candidates = vec![range.lo, range.hi];
    for b in blocked {
        candidates.push(b.lo);
        candidates.push(b.hi);
    }
    let sign = if outward.is_positive() { 1.0 } else { -1.0 };
    candidates
        .into_iter()
        .filter(|&c| c >= range.lo - tol && c <= range.hi + tol && !is_blocked(blocked, c))
        .map(|c| c.clamp(range.lo, range.hi))
        .min_by(|a, b| {
            let da = (a - start).abs();
            let db = (b - start).abs();
            da.total_cmp(&db).then((b * sign).total_cmp(&(a * sign)))
        })
}

/// Try to put `next` against the previous room's `dir` side.
fn try_direction(
    placed: &[RoomPlan],
    next: &RoomPlan,
    dir: Dir,
    cursor: &PlacementCursor,
    jitter_m: f64,
    params: &GenParams,
) -> Option<(Rect64, f64, Interval64, Interval64)> {
    let prev = placed.last()?;
    let min_overlap = params.min_adjacency_overlap();
    let along = dir.axis();
    let lateral = along.other();
    let (w, d) = (next.rect.width, next.rect.depth);
    let size_along = next.rect.extent(along).len();
    let pos_along = if dir.is_positive() { prev.rect.side(dir) } else { prev.rect.side(dir) - size_along };
    let body = match along {
        crate::geom::Axis::X => Rect64::new(pos_along, 0.0, w, d),
        crate::geom::Axis::Y => Rect64::new(0.0, pos_along, w, d),
    };

    // Door spans: the previous room's in world coordinates, the new room's
    // relative to its own lateral minimum (the shift variable).
    let prev_span = prev.doorable_span(dir, params).shifted(prev.wall_origin(dir));
    let next_span = next.doorable_span(dir.opposite(), params);
    let range = overlap_shift_range(&next_span, &prev_span, min_overlap)?;

    let inward = cursor.inward(dir);
    let outward = inward.opposite();
    let aligned = if outward.is_positive() { prev_span.hi - next_span.hi } else { prev_span.lo - next_span.lo };
    let sign_out = if outward.is_positive() { 1.0 } else { -1.0 };
    let start = (aligned + sign_out * jitter_m).clamp(range.lo, range.hi);

    let obstacles: Vec<Rect64> = placed.iter().map(|r| r.rect).collect();
    let blocked = blocked_shifts(&body, &obstacles, lateral);
    let mut shift = if is_blocked(&blocked, start) { nearest_free(start, &range, &blocked, outward)? } else { start };

    let mut slide = 0.0;
    if params.compression {
        let rel: Vec<Interval64> = blocked.iter().map(|b| b.shifted(-shift)).collect();
        if obstacle_ahead(&rel, inward) {
            slide = slide_limit(Some(range.shifted(-shift)), &rel, inward);
            shift += if inward.is_positive() { slide } else { -slide };
        }
    }

    let rect = body.translated(lateral, shift);
    if obstacles.iter().any(|o| o.interiors_overlap(&rect)) {
        return None;
    }
    let usable = prev_span.intersect(&next_span.shifted(shift))?;
    if usable.len() < min_overlap - f64::tolerance() {
        return None;
    }
    let overlap = prev.rect.extent(lateral).intersect(&rect.extent(lateral))?;
    let c = usable.center();
    let opening = Interval::new(c - params.door_width_m / 2.0, c + params.door_width_m / 2.0);
    Some((rect, slide, overlap, opening))
}

fn extreme_in(rect: &Rect64, bbox: &BBox, dir: Dir) -> bool {
    let eps = 1e-9;
    if dir.is_positive() {
        rect.side(dir) >= bbox.side(dir) - eps
    } else {
        rect.side(dir) <= bbox.side(dir) + eps
    }
}

/// Place `next` wall-adjacent to the last placed room.
///
/// The cursor's direction is tried first, then straight ahead, the spiral
/// turn and the counter turn relative to `last`. A direction is taken only if
/// the new room ends up on the outer boundary in that direction or one of its
/// two perpendiculars, which keeps some direction free for the room after.
/// `next.rect` supplies only the size.
pub fn place_next_room(
    placed: &[RoomPlan],
    next: &RoomPlan,
    cursor: &PlacementCursor,
    last: Dir,
    jitter_m: f64,
    params: &GenParams,
) -> Result<Placement, LayoutError> {
    let Some(first) = placed.first() else {
        return Err(RoomError::Contract("place_next_room needs at least one placed room".into()).into());
    };
    let mut bbox = BBox::of(&first.rect);
    for r in placed {
        bbox.include(&r.rect);
    }
    let mut order = vec![cursor.direction];
    for d in [last, cursor.turn(last), cursor.counter_turn(last)] {
        if !order.contains(&d) {
            order.push(d);
        }
    }
    for dir in order {
        if dir == last.opposite() {
            continue;
        }
        let Some((rect, slide_m, overlap, opening)) = try_direction(placed, next, dir, cursor, jitter_m, params) else {
            continue;
        };
        let mut grown = bbox;
        grown.include(&rect);
        if [dir, dir.cw(), dir.ccw()].iter().any(|&e| extreme_in(&rect, &grown, e)) {
            return Ok(Placement {
                rect,
                direction: dir,
                slide_m,
                overlap,
                opening,
                cursor: cursor.advance(dir, last),
            });
        }
    }
    Err(RoomError::Contract(format!("no placement found for room {}", next.id)).into())
}

/// A shared wall between two rooms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adjacency {
    pub wall_of_a: Dir,
    pub wall_of_b: Dir,
    pub line: f64,
    pub overlap: Interval64,
}

pub fn detect_adjacency(a: &RoomPlan, b: &RoomPlan, min_overlap: f64) -> Option<Adjacency> {
    shared_wall(&a.rect, &b.rect, min_overlap).map(|w| Adjacency {
        wall_of_a: w.side_of_first,
        wall_of_b: w.side_of_first.opposite(),
        line: w.line,
        overlap: w.overlap,
    })
}

/// Junction budget of a room, growing with its perimeter.
pub fn max_connections(room: &RoomPlan) -> usize {
    let p = room.rect.perimeter();
    ((p / 10.0 + 1e-9).floor() as usize + 1).clamp(2, 6)
}

/// World-coordinate spans on `wall` already taken by doors and their jambs.
fn door_zones(room: &RoomPlan, wall: Dir) -> Vec<Interval64> {
    let origin = room.wall_origin(wall);
    room.doors
        .iter()
        .filter(|d| d.wall == wall)
        .map(|d| {
            let s = d.span().shifted(origin);
            Interval { lo: s.lo - DOOR_JAMB_M, hi: s.hi + DOOR_JAMB_M }
        })
        .collect()
}

/// Longest piece of `span` left after removing `zones` (ties: westmost/southmost).
fn longest_free(span: Interval64, zones: &[Interval64]) -> Option<Interval64> {
    let mut pieces = vec![span];
    for z in zones {
        let mut next = Vec::new();
        for p in pieces {
            if z.hi <= p.lo || z.lo >= p.hi {
                next.push(p);
                continue;
            }
            if z.lo > p.lo {
                next.push(Interval { lo: p.lo, hi: z.lo });
            }
            if z.hi < p.hi {
                next.push(Interval { lo: z.hi, hi: p.hi });
            }
        }
        pieces = next;
    }
    pieces.into_iter().fold(None, |best: Option<Interval64>, p| match best {
        Some(b) if b.len() >= p.len() - 1e-12 => Some(b),
        _ => Some(p),
    })
}

/// Add doors between non-consecutive wall-adjacent rooms while both stay
/// within [`max_connections`].
pub fn assign_extra_connections(mut layout: Layout) -> Layout {
    let params = layout.params.clone();
    let min_overlap = params.min_adjacency_overlap();
    let n = layout.rooms.len();
    let mut candidates = Vec::new();
    for a in 0..n {
        for b in a + 2..n {
            if let Some(adj) = detect_adjacency(&layout.rooms[a], &layout.rooms[b], min_overlap) {
                candidates.push((a, b, adj));
            }
        }
    }
    candidates.sort_by(|x, y| y.2.overlap.len().total_cmp(&x.2.overlap.len()).then((x.0, x.1).cmp(&(y.0, y.1))));
    let mut degree: Vec<usize> = (0..n).map(|r| layout.degree(r)).collect();
    for (a, b, adj) in candidates {
        if degree[a] >= max_connections(&layout.rooms[a]) || degree[b] >= max_connections(&layout.rooms[b]) {
            continue;
        }
        let (ra, rb) = (&layout.rooms[a], &layout.rooms[b]);
        let da = ra.doorable_span(adj.wall_of_a, &params).shifted(ra.wall_origin(adj.wall_of_a));
        let db = rb.doorable_span(adj.wall_of_b, &params).shifted(rb.wall_origin(adj.wall_of_b));
        let Some(usable) = adj.overlap.intersect(&da).and_then(|i| i.intersect(&db)) else {
            continue;
        };
        let mut zones = door_zones(ra, adj.wall_of_a);
        zones.extend(door_zones(rb, adj.wall_of_b));
        let Some(free) = longest_free(usable, &zones) else {
            continue;
        };
        if free.len() < min_overlap - f64::tolerance() {
            continue;
        }
        let c = free.center();
        let opening = Interval::new(c - params.door_width_m / 2.0, c + params.door_width_m / 2.0);
        let id = layout.connections.len();
        for (room, wall) in [(a, adj.wall_of_a), (b, adj.wall_of_b)] {
            let r = &mut layout.rooms[room];
            let offset = c - r.wall_origin(wall);
            r.doors.push(Door {
                wall,
                center_offset_m: offset,
                width_m: params.door_width_m,
                kind: DoorKind::Extra,
                connects: DoorLink::Rooms { a, b },
                connection: Some(id),
            });
        }
        layout.connections.push(Connection {
            id,
            kind: ConnectionKind::Extra,
            rooms: [a, b],
            wall: adj.wall_of_a,
            line: adj.line,
            overlap: adj.overlap,
            opening,
        });
        degree[a] += 1;
        degree[b] += 1;
    }
    layout
}

/// Seed for a room's decor, derived from the world seed.
pub fn decor_seed(seed: u64, room: usize) -> u64 {
    seed ^ (room as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Lay out one room per non-empty category.
pub fn generate_layout(categories: &[Category<'_>], params: &GenParams, seed: u64) -> Result<Layout, LayoutError> {
    params.validate()?;
    let spec = ShelfSpec::from(params);
    let cats: Vec<&Category<'_>> = categories
        .iter()
        .filter(|c| {
            if c.books.is_empty() {
                log::warn!("dropping empty category {:?}", c.name);
            }
            !c.books.is_empty()
        })
        .collect();
    if cats.is_empty() {
        return Err(LayoutError::NoCategories);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rooms: Vec<RoomPlan> = Vec::with_capacity(cats.len());
    let mut connections = Vec::new();
    let mut placements = Vec::with_capacity(cats.len());
    let mut cursor = PlacementCursor::new(params.ccw);
    let mut last = Dir::East;

    for (id, cat) in cats.iter().enumerate() {
        let dims = room_footprint(required_shelves(cat.books.len(), &spec)?, params);
        let shelves = plan_shelves(cat, dims, &spec, params)?;
        let mut room = RoomPlan {
            id,
            category: cat.name.clone(),
            rect: Rect64::new(0.0, 0.0, dims.0, dims.1),
            height_m: params.room_height_m,
            shelves,
            doors: Vec::new(),
            decor: Vec::new(),
        };
        if id == 0 {
            room.doors.push(Door {
                wall: Dir::West,
                center_offset_m: dims.1 / 2.0,
                width_m: params.door_width_m,
                kind: DoorKind::ChainEntrance,
                connects: DoorLink::WorldEntrance,
                connection: None,
            });
            placements.push(PlacementRecord { direction: Dir::East, slide_m: 0.0 });
            rooms.push(room);
            continue;
        }

        let jitter = rng.random::<f64>() * params.placement_jitter_m;
        let p = place_next_room(&rooms, &room, &cursor, last, jitter, params)?;
        room.rect = p.rect;
        let cid = connections.len();
        let c = p.opening.center();
        let prev = &mut rooms[id - 1];
        prev.doors.push(Door {
            wall: p.direction,
            center_offset_m: c - prev.wall_origin(p.direction),
            width_m: params.door_width_m,
            kind: DoorKind::ChainExit,
            connects: DoorLink::Rooms { a: id - 1, b: id },
            connection: Some(cid),
        });
        let back = p.direction.opposite();
        room.doors.push(Door {
            wall: back,
            center_offset_m: c - room.wall_origin(back),
            width_m: params.door_width_m,
            kind: DoorKind::ChainEntrance,
            connects: DoorLink::Rooms { a: id - 1, b: id },
            connection: Some(cid),
        });
        connections.push(Connection {
            id: cid,
            kind: ConnectionKind::Chain,
            rooms: [id - 1, id],
            wall: p.direction,
            line: prev.rect.side(p.direction),
            overlap: p.overlap,
            opening: p.opening,
        });
        placements.push(PlacementRecord { direction: p.direction, slide_m: p.slide_m });
        cursor = p.cursor;
        last = p.direction;
        rooms.push(room);
    }

    let mut bbox = BBox::of(&rooms[0].rect);
    for r in &rooms {
        bbox.include(&r.rect);
    }
    let mut layout =
        assign_extra_connections(Layout { rooms, connections, placements, bbox, seed, params: params.clone() });
    for room in &mut layout.rooms {
        room.decor = plan_decor(room, params, decor_seed(seed, room.id));
    }
    Ok(layout)
}
