//! Renderable room chunks, room-level visibility and text sizing.
//!
//! Primitive coordinates are world meters with `x` east, `y` north and `z`
//! up. Positions are box centers; sizes are full extents.

use std::collections::{BTreeSet, HashMap};

use num_traits::Float;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::BookRecord;
use crate::error::NavError;
use crate::geom::Dir;
use crate::layoutgen::Layout;
use crate::navmap::ENTRANCE_LABEL;
use crate::params::GenParams;
use crate::roomgen::{DecorKind, RoomPlan};

/// Physical height of a shelf unit.
pub const SHELF_HEIGHT_M: f64 = 2.0;
pub const DOOR_HEIGHT_M: f64 = 2.1;
/// Floor area served by one ceiling light.
pub const LIGHT_AREA_M2: f64 = 12.0;
/// Distance a door sign is designed to be read from.
pub const SIGN_VIEW_DISTANCE_M: f64 = 3.0;
/// Distance an exhibit plaque is designed to be read from.
pub const PLAQUE_VIEW_DISTANCE_M: f64 = 1.0;
/// Arm's length, for titles on book spines.
pub const SPINE_VIEW_DISTANCE_M: f64 = 0.6;
const WALL_THICKNESS_M: f64 = 0.1;
const ID_HEX_LEN: usize = 16;

/// Height in meters of text of `dmm` distance-independent millimetres seen
/// from `viewing_distance_m`. One dmm is 1 mm at 1 m.
pub fn compute_text_height<T: Float>(dmm: T, viewing_distance_m: T) -> T {
    dmm / T::from(1000).expect("1000 is representable") * viewing_distance_m
}

/// Reading-comfort constants for signs, plaques and the reading panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgonomicsConfig {
    pub body_text_dmm: f64,
    pub min_text_dmm: f64,
    pub font_style: String,
    pub panel_curvature_deg: f64,
    pub content_zone_fov_deg: f64,
    pub head_yaw_deg: f64,
    pub head_pitch_up_deg: f64,
    pub head_pitch_down_deg: f64,
    /// Downward tilt of the reading panel.
    pub panel_pitch_deg: f64,
}

impl Default for ErgonomicsConfig {
    fn default() -> Self {
        ErgonomicsConfig {
            body_text_dmm: 32.0,
            min_text_dmm: 23.0,
            font_style: "sans-serif".into(),
            panel_curvature_deg: 60.0,
            content_zone_fov_deg: 90.0,
            head_yaw_deg: 30.0,
            head_pitch_up_deg: 20.0,
            head_pitch_down_deg: 12.0,
            panel_pitch_deg: 10.0,
        }
    }
}

impl ErgonomicsConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.body_text_dmm < self.min_text_dmm {
            return Err(format!("body_text_dmm {} below min_text_dmm {}", self.body_text_dmm, self.min_text_dmm));
        }
        if !(50.0..=70.0).contains(&self.panel_curvature_deg) {
            return Err(format!("panel_curvature_deg {} outside 50..=70", self.panel_curvature_deg));
        }
        Ok(())
    }

    pub fn text_height(&self, viewing_distance_m: f64) -> f64 {
        compute_text_height(self.body_text_dmm, viewing_distance_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveRole {
    Floor,
    Ceiling,
    Wall,
    Light,
    DoorSign,
    Shelf,
    BookSpine,
    Decor,
    ExhibitPlaque,
}

impl PrimitiveRole {
    pub fn as_str(self) -> &'static str {
        match self {
            PrimitiveRole::Floor => "floor",
            PrimitiveRole::Ceiling => "ceiling",
            PrimitiveRole::Wall => "wall",
            PrimitiveRole::Light => "light",
            PrimitiveRole::DoorSign => "door_sign",
            PrimitiveRole::Shelf => "shelf",
            PrimitiveRole::BookSpine => "book_spine",
            PrimitiveRole::Decor => "decor",
            PrimitiveRole::ExhibitPlaque => "exhibit_plaque",
        }
    }

    pub fn is_structure(self) -> bool {
        matches!(
            self,
            PrimitiveRole::Floor
                | PrimitiveRole::Ceiling
                | PrimitiveRole::Wall
                | PrimitiveRole::Light
                | PrimitiveRole::DoorSign
        )
    }
}

/// Door hole in a wall quad, in wall offsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallHole {
    pub lo: f64,
    pub hi: f64,
    pub height_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextLabel {
    pub text: String,
    pub height_m: f64,
    pub view_distance_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub id: String,
    pub role: PrimitiveRole,
    pub position: [f64; 3],
    pub size: [f64; 3],
    pub rotation_deg: f64,
    pub color: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall: Option<Dir>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<WallHole>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<TextLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub book_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decor: Option<DecorKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneChunk {
    pub room: usize,
    pub structure: Vec<Primitive>,
    pub interior: Vec<Primitive>,
}

impl SceneChunk {
    pub fn spine_book_ids(&self) -> impl Iterator<Item = &str> {
        self.interior.iter().filter(|p| p.role == PrimitiveRole::BookSpine).filter_map(|p| p.book_id.as_deref())
    }

    pub fn all(&self) -> impl Iterator<Item = &Primitive> {
        self.structure.iter().chain(&self.interior)
    }
}

/// Deterministic primitive id from `(room, role, index)`.
pub fn primitive_id(room: usize, role: PrimitiveRole, index: usize) -> String {
    let digest = Sha256::digest(format!("{room}:{}:{index}", role.as_str()).as_bytes());
    hex::encode(digest)[..ID_HEX_LEN].to_string()
}

/// Stable color for a category, kept in a mid brightness band.
pub fn category_color(category: &str) -> String {
    let d = Sha256::digest(category.as_bytes());
    let c = |b: u8| 60 + (b as u32 * 150 / 255) as u8;
    format!("#{:02x}{:02x}{:02x}", c(d[0]), c(d[1]), c(d[2]))
}

struct Builder {
    room: usize,
    counters: HashMap<PrimitiveRole, usize>,
    structure: Vec<Primitive>,
    interior: Vec<Primitive>,
}

impl Builder {
    fn push(&mut self, role: PrimitiveRole, position: [f64; 3], size: [f64; 3], color: &str) -> &mut Primitive {
        let n = self.counters.entry(role).or_insert(0);
        let p = Primitive {
            id: primitive_id(self.room, role, *n),
            role,
            position,
            size,
            rotation_deg: 0.0,
            color: color.to_string(),
            wall: None,
            holes: Vec::new(),
            label: None,
            book_id: None,
            decor: None,
        };
        *n += 1;
        let list = if role.is_structure() { &mut self.structure } else { &mut self.interior };
        list.push(p);
        list.last_mut().expect("just pushed")
    }
}

/// Rotation that turns a sign on `wall` to face into the room.
fn facing_into_room(wall: Dir) -> f64 {
    match wall {
        Dir::North => 180.0,
        Dir::East => 270.0,
        Dir::South => 0.0,
        Dir::West => 90.0,
    }
}

/// World point on `wall` at offset `along`, pushed `inset` into the room.
fn wall_point(room: &RoomPlan, wall: Dir, along: f64, inset: f64) -> (f64, f64) {
    let r = &room.rect;
    match wall {
        Dir::North => (r.x + along, r.max_y() - inset),
        Dir::South => (r.x + along, r.y + inset),
        Dir::East => (r.max_x() - inset, r.y + along),
        Dir::West => (r.x + inset, r.y + along),
    }
}

/// Build the scene chunk of a finished room. `rooms` resolves door
/// neighbors; `books` resolves spine titles.
pub fn instantiate_room(
    room: &RoomPlan,
    rooms: &[RoomPlan],
    books: &HashMap<&str, &BookRecord>,
    params: &GenParams,
) -> SceneChunk {
    let ergo = ErgonomicsConfig::default();
    let mut b = Builder { room: room.id, counters: HashMap::new(), structure: Vec::new(), interior: Vec::new() };
    let r = room.rect;
    let h = room.height_m;
    let (cx, cy) = r.center();

    b.push(PrimitiveRole::Floor, [cx, cy, 0.0], [r.width, r.depth, 0.0], "#8a7a66");
    b.push(PrimitiveRole::Ceiling, [cx, cy, h], [r.width, r.depth, 0.0], "#f2efe8");
    for wall in Dir::ALL {
        let len = room.wall_length(wall);
        let (mx, my) = wall_point(room, wall, len / 2.0, 0.0);
        let size = match wall {
            Dir::North | Dir::South => [len, WALL_THICKNESS_M, h],
            Dir::East | Dir::West => [WALL_THICKNESS_M, len, h],
        };
        let holes = room
            .doors
            .iter()
            .filter(|d| d.wall == wall)
            .map(|d| WallHole { lo: d.span().lo, hi: d.span().hi, height_m: DOOR_HEIGHT_M })
            .collect();
        let p = b.push(PrimitiveRole::Wall, [mx, my, h / 2.0], size, "#d9d2c5");
        p.wall = Some(wall);
        p.holes = holes;
    }

    let lights = ((room.area() / LIGHT_AREA_M2 + 1e-9).floor() as usize).max(1);
    for i in 0..lights {
        let x = r.x + r.width * (i as f64 + 0.5) / lights as f64;
        b.push(PrimitiveRole::Light, [x, cy, h - 0.05], [0.4, 0.4, 0.05], "#fff6d8");
    }

    let sign_h = compute_text_height(ergo.body_text_dmm, SIGN_VIEW_DISTANCE_M);
    for d in &room.doors {
        let label = match d.connects.neighbor_of(room.id) {
            Some(n) => rooms.get(n).map(|n| n.category.clone()).unwrap_or_else(|| format!("Room {n}")),
            None => ENTRANCE_LABEL.to_string(),
        };
        let (x, y) = wall_point(room, d.wall, d.center_offset_m, 0.06);
        let width = (label.chars().count() as f64 * sign_h * 0.6 + 0.2).clamp(0.6, d.width_m + 0.4);
        let p = b.push(PrimitiveRole::DoorSign, [x, y, DOOR_HEIGHT_M + 0.25], [width, 0.02, sign_h * 2.0], "#2f3b48");
        p.wall = Some(d.wall);
        p.rotation_deg = facing_into_room(d.wall);
        p.label = Some(TextLabel { text: label, height_m: sign_h, view_distance_m: SIGN_VIEW_DISTANCE_M });
    }

    let spec_rows = params.shelf_rows as f64;
    let slot_w = params.unit_width_m / params.slots_per_row as f64;
    let row_h = SHELF_HEIGHT_M / spec_rows;
    let spine_color = category_color(&room.category);
    let spine_text = compute_text_height(ergo.body_text_dmm, SPINE_VIEW_DISTANCE_M);
    for shelf in &room.shelves {
        let (sx, sy) =
            wall_point(room, shelf.wall, shelf.offset_m + params.unit_width_m / 2.0, params.shelf_depth_m / 2.0);
        let p = b.push(
            PrimitiveRole::Shelf,
            [sx, sy, SHELF_HEIGHT_M / 2.0],
            [params.unit_width_m, params.shelf_depth_m, SHELF_HEIGHT_M],
            "#6b4a2b",
        );
        p.wall = Some(shelf.wall);
        p.rotation_deg = facing_into_room(shelf.wall);
        for a in &shelf.assigned {
            let along = shelf.offset_m + (a.slot as f64 + 0.5) * slot_w;
            let (x, y) = wall_point(room, shelf.wall, along, params.shelf_depth_m / 2.0);
            // Row 0 is the top row.
            let z = SHELF_HEIGHT_M - (a.row as f64 + 0.5) * row_h;
            let title = books.get(a.book_id.as_str()).map(|bk| bk.title.clone()).unwrap_or_else(|| a.book_id.clone());
            let p = b.push(
                PrimitiveRole::BookSpine,
                [x, y, z],
                [slot_w * 0.9, params.shelf_depth_m * 0.8, row_h * 0.85],
                &spine_color,
            );
            p.wall = Some(shelf.wall);
            p.rotation_deg = facing_into_room(shelf.wall);
            p.book_id = Some(a.book_id.clone());
            p.label = Some(TextLabel { text: title, height_m: spine_text, view_distance_m: SPINE_VIEW_DISTANCE_M });
        }
    }

    let plaque_h = compute_text_height(ergo.body_text_dmm, PLAQUE_VIEW_DISTANCE_M);
    for item in &room.decor {
        let fp = item.footprint();
        let (x, y) = (r.x + item.position[0], r.y + item.position[1]);
        let height = match item.kind {
            DecorKind::ExhibitPedestal => 1.0,
            DecorKind::Table => 0.75,
            DecorKind::Chair => 0.9,
            DecorKind::Plant => 1.2,
        };
        let p = b.push(PrimitiveRole::Decor, [x, y, height / 2.0], [fp.width, fp.depth, height], "#7d7468");
        p.decor = Some(item.kind);
        p.rotation_deg = item.rotation_deg;
        if item.kind == DecorKind::ExhibitPedestal {
            let p = b.push(PrimitiveRole::ExhibitPlaque, [x, y, height + 0.01], [0.6, 0.4, 0.01], "#c8b27a");
            p.label = Some(TextLabel {
                text: item.info_text.clone(),
                height_m: plaque_h,
                view_distance_m: PLAQUE_VIEW_DISTANCE_M,
            });
        }
    }

    SceneChunk { room: room.id, structure: b.structure, interior: b.interior }
}

/// Rooms whose structure or interior should be rendered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibleSet {
    pub current: usize,
    pub structure: Vec<usize>,
    pub interior: Vec<usize>,
}

pub fn visible_set(layout: &Layout, current: usize) -> Result<VisibleSet, NavError> {
    if current >= layout.rooms.len() {
        return Err(NavError::UnknownRoom(current));
    }
    let mut structure: BTreeSet<usize> = layout.neighbors(current).into_iter().collect();
    structure.insert(current);
    Ok(VisibleSet { current, structure: structure.into_iter().collect(), interior: vec![current] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rect64;

    fn room(w: f64) -> RoomPlan {
        RoomPlan {
            id: 0,
            category: "Poetry".into(),
            rect: Rect64::new(0.0, 0.0, w, 3.0),
            height_m: 3.0,
            shelves: vec![],
            doors: vec![],
            decor: vec![],
        }
    }

    #[test]
    fn text_height_examples() {
        assert_eq!(compute_text_height(32.0, 1.0), 0.032);
        assert_eq!(compute_text_height(0.0, 5.0), 0.0);
        assert!((compute_text_height(23.0, 2.0) - 0.046).abs() < 1e-15);
        assert!((compute_text_height(32.0f32, 1.0f32) - 0.032).abs() < 1e-7);
    }

    #[test]
    fn ergonomics_defaults_hold() {
        ErgonomicsConfig::default().validate().unwrap();
        let bad = ErgonomicsConfig { panel_curvature_deg: 80.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn one_light_for_twelve_square_meters() {
        let chunk = instantiate_room(&room(4.0), &[], &HashMap::new(), &GenParams::default());
        assert_eq!(chunk.structure.iter().filter(|p| p.role == PrimitiveRole::Light).count(), 1);
        let big = instantiate_room(&room(12.0), &[], &HashMap::new(), &GenParams::default());
        assert_eq!(big.structure.iter().filter(|p| p.role == PrimitiveRole::Light).count(), 3);
    }

    #[test]
    fn ids_are_stable_and_distinct() {
        let a = primitive_id(3, PrimitiveRole::Wall, 0);
        assert_eq!(a, primitive_id(3, PrimitiveRole::Wall, 0));
        assert_ne!(a, primitive_id(3, PrimitiveRole::Wall, 1));
        assert_ne!(a, primitive_id(4, PrimitiveRole::Wall, 0));
        assert_eq!(a.len(), 16);
    }
}
