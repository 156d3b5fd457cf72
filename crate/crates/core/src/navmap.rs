//! Navigation graph, shortest paths, teleport spawns, signboards and the
//! top-down map model.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::NavError;
use crate::geom::Dir;
use crate::layoutgen::{ConnectionKind, Layout};
use crate::params::GenParams;
use crate::roomgen::{DoorLink, RoomPlan};
use crate::Rect64;

/// Clearance a spawn point keeps from walls, shelves and decor.
pub const SPAWN_CLEARANCE_M: f64 = 0.4;
const SPAWN_STEP_M: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavEdge {
    pub a: usize,
    pub b: usize,
    /// Connection id of the door.
    pub door: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavGraph {
    pub nodes: Vec<usize>,
    pub edges: Vec<NavEdge>,
}

impl NavGraph {
    /// `(neighbor, weight)` lists per node.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.weight));
            adj[e.b].push((e.a, e.weight));
        }
        adj
    }

    pub fn path_weight(&self, path: &[usize]) -> Option<f64> {
        let adj = self.adjacency();
        path.windows(2).try_fold(0.0, |acc, w| {
            adj.get(w[0])?
                .iter()
                .filter(|(n, _)| *n == w[1])
                .map(|(_, wt)| *wt)
                .min_by(f64::total_cmp)
                .map(|wt| acc + wt)
        })
    }
}

fn center(r: &RoomPlan) -> (f64, f64) {
    r.rect.center()
}

pub fn build_navgraph(layout: &Layout) -> NavGraph {
    let nodes = (0..layout.rooms.len()).collect();
    let edges = layout
        .connections
        .iter()
        .map(|c| {
            let (ax, ay) = center(&layout.rooms[c.rooms[0]]);
            let (bx, by) = center(&layout.rooms[c.rooms[1]]);
            NavEdge { a: c.rooms[0], b: c.rooms[1], door: c.id, weight: (ax - bx).hypot(ay - by) }
        })
        .collect();
    NavGraph { nodes, edges }
}

/// Dijkstra label: total weight, then the path itself for tie-breaking.
#[derive(Debug, PartialEq)]
struct Label {
    cost: f64,
    path: Vec<usize>,
}

impl Eq for Label {}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for the max-heap.
        other.cost.total_cmp(&self.cost).then_with(|| other.path.cmp(&self.path))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const COST_EPS: f64 = 1e-9;

fn better(cost: f64, path: &[usize], best: &Option<(f64, Vec<usize>)>) -> bool {
    match best {
        None => true,
        Some((c, p)) => cost < c - COST_EPS || ((cost - c).abs() <= COST_EPS && path < p.as_slice()),
    }
}

/// Minimal-weight path; among equal weights the lexicographically smallest
/// room sequence.
pub fn shortest_path(g: &NavGraph, from: usize, to: usize) -> Result<Vec<usize>, NavError> {
    let n = g.nodes.len();
    for id in [from, to] {
        if id >= n {
            return Err(NavError::UnknownRoom(id));
        }
    }
    let adj = g.adjacency();
    let mut best: Vec<Option<(f64, Vec<usize>)>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    best[from] = Some((0.0, vec![from]));
    heap.push(Label { cost: 0.0, path: vec![from] });
    while let Some(Label { cost, path }) = heap.pop() {
        let node = *path.last().expect("paths are non-empty");
        if best[node].as_ref().is_some_and(|(c, p)| (cost, &path) != (*c, p)) {
            continue;
        }
        if node == to {
            return Ok(path);
        }
        for &(next, w) in &adj[node] {
            if path.contains(&next) {
                continue;
            }
            let c = cost + w;
            let mut p = path.clone();
            p.push(next);
            if better(c, &p, &best[next]) {
                best[next] = Some((c, p.clone()));
                heap.push(Label { cost: c, path: p });
            }
        }
    }
    // The connectivity invariant makes this unreachable for valid layouts.
    Err(NavError::UnknownRoom(to))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomOutline {
    pub room: usize,
    pub rect: Rect64,
    pub category: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoorMarkerKind {
    Chain,
    Extra,
    Entrance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoorMarker {
    /// Connection id; absent for the world entrance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub door: Option<usize>,
    pub kind: DoorMarkerKind,
    pub position: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeleportTarget {
    pub room: usize,
    pub spawn: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryEntry {
    pub category: String,
    pub room: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapModel {
    pub outlines: Vec<RoomOutline>,
    pub doors: Vec<DoorMarker>,
    pub teleports: Vec<TeleportTarget>,
    pub category_index: Vec<CategoryEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignEntry {
    /// Room behind the door; absent for the world entrance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbor: Option<usize>,
    pub label: String,
    pub wall: Dir,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signboard {
    pub room: usize,
    pub entries: Vec<SignEntry>,
}

/// Label for the world entrance on signs.
pub const ENTRANCE_LABEL: &str = "Entrance";

fn point_rect_distance(p: (f64, f64), r: &Rect64) -> f64 {
    let dx = (r.min_x() - p.0).max(0.0).max(p.0 - r.max_x());
    let dy = (r.min_y() - p.1).max(0.0).max(p.1 - r.max_y());
    dx.hypot(dy)
}

fn spawn_ok(p: (f64, f64), floor: &Rect64, blockers: &[Rect64]) -> bool {
    let c = SPAWN_CLEARANCE_M - 1e-9;
    p.0 - floor.min_x() >= c
        && floor.max_x() - p.0 >= c
        && p.1 - floor.min_y() >= c
        && floor.max_y() - p.1 >= c
        && blockers.iter().all(|b| point_rect_distance(p, b) >= c)
}

/// Teleport spawn in room-local meters: the room center, moved east in
/// 0.1 m steps (then to the next row north) until the clearance holds.
pub fn spawn_point_local(room: &RoomPlan, params: &GenParams) -> [f64; 2] {
    let floor = room.local_floor();
    let mut blockers = room.shelf_footprints(params);
    blockers.extend(room.decor.iter().map(|d| d.footprint()));
    let (cx, cy) = (floor.width / 2.0, floor.depth / 2.0);
    let cols = (floor.width / SPAWN_STEP_M).ceil() as i64;
    let rows = (floor.depth / SPAWN_STEP_M).ceil() as i64;
    let at = |i: i64, j: i64| (cx + i as f64 * SPAWN_STEP_M, cy + j as f64 * SPAWN_STEP_M);
    for j in 0..=rows {
        for i in 0..=cols {
            let p = at(i, j);
            if p.0 > floor.max_x() {
                break;
            }
            if spawn_ok(p, &floor, &blockers) {
                return [p.0, p.1];
            }
        }
    }
    // Nothing north-east of the center: take the closest free grid point.
    let mut best: Option<((f64, f64), i64)> = None;
    for j in -rows..=rows {
        for i in -cols..=cols {
            let p = at(i, j);
            if spawn_ok(p, &floor, &blockers) && best.is_none_or(|(_, d)| i * i + j * j < d) {
                best = Some((p, i * i + j * j));
            }
        }
    }
    let p = best.map(|(p, _)| p).unwrap_or((cx, cy));
    [p.0, p.1]
}

pub fn spawn_point(room: &RoomPlan, params: &GenParams) -> [f64; 2] {
    let [x, y] = spawn_point_local(room, params);
    [room.rect.x + x, room.rect.y + y]
}

pub fn build_signboards(layout: &Layout) -> Vec<Signboard> {
    layout
        .rooms
        .iter()
        .map(|room| Signboard {
            room: room.id,
            entries: room
                .doors
                .iter()
                .map(|d| {
                    let neighbor = d.connects.neighbor_of(room.id);
                    let label = match (d.connects, neighbor) {
                        (DoorLink::WorldEntrance, _) | (_, None) => ENTRANCE_LABEL.to_string(),
                        (_, Some(n)) => layout.rooms[n].category.clone(),
                    };
                    SignEntry { neighbor, label, wall: d.wall }
                })
                .collect(),
        })
        .collect()
}

pub fn build_map(layout: &Layout) -> (MapModel, Vec<Signboard>) {
    let params = &layout.params;
    let outlines =
        layout.rooms.iter().map(|r| RoomOutline { room: r.id, rect: r.rect, category: r.category.clone() }).collect();
    let mut doors: Vec<DoorMarker> = Vec::new();
    if let Some(first) = layout.rooms.first() {
        for d in first.doors.iter().filter(|d| d.connects == DoorLink::WorldEntrance) {
            let c = d.center_offset_m + first.wall_origin(d.wall);
            let line = first.rect.side(d.wall);
            let position = match d.wall {
                Dir::East | Dir::West => [line, c],
                Dir::North | Dir::South => [c, line],
            };
            doors.push(DoorMarker { door: None, kind: DoorMarkerKind::Entrance, position });
        }
    }
    doors.extend(layout.connections.iter().map(|c| DoorMarker {
        door: Some(c.id),
        kind: match c.kind {
            ConnectionKind::Chain => DoorMarkerKind::Chain,
            ConnectionKind::Extra => DoorMarkerKind::Extra,
        },
        position: c.position(),
    }));
    let teleports = layout.rooms.iter().map(|r| TeleportTarget { room: r.id, spawn: spawn_point(r, params) }).collect();
    let mut category_index: Vec<CategoryEntry> =
        layout.rooms.iter().map(|r| CategoryEntry { category: r.category.clone(), room: r.id }).collect();
    category_index.sort_by(|a, b| a.category.cmp(&b.category).then(a.room.cmp(&b.room)));
    (MapModel { outlines, doors, teleports, category_index }, build_signboards(layout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layoutgen::{BBox, Connection};
    use crate::Interval64;

    fn room(id: usize, x: f64) -> RoomPlan {
        RoomPlan {
            id,
            category: format!("c{id}"),
            rect: Rect64::new(x, 0.0, 4.0, 3.0),
            height_m: 3.0,
            shelves: vec![],
            doors: vec![],
            decor: vec![],
        }
    }

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> NavGraph {
        NavGraph {
            nodes: (0..n).collect(),
            edges: edges.iter().enumerate().map(|(i, &(a, b, weight))| NavEdge { a, b, door: i, weight }).collect(),
        }
    }

    #[test]
    fn trivial_paths() {
        let g = graph(3, &[(0, 1, 4.0), (1, 2, 4.0)]);
        assert_eq!(shortest_path(&g, 1, 1).unwrap(), vec![1]);
        assert_eq!(shortest_path(&g, 0, 2).unwrap(), vec![0, 1, 2]);
        assert!(matches!(shortest_path(&g, 0, 7), Err(NavError::UnknownRoom(7))));
    }

    #[test]
    fn shortcut_wins() {
        let g = graph(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.5)]);
        assert_eq!(shortest_path(&g, 0, 3).unwrap(), vec![0, 3]);
    }

    #[test]
    fn ties_take_smallest_sequence() {
        let g = graph(4, &[(0, 2, 1.0), (2, 3, 1.0), (0, 1, 1.0), (1, 3, 1.0)]);
        assert_eq!(shortest_path(&g, 0, 3).unwrap(), vec![0, 1, 3]);
    }

    #[test]
    fn chain_graph_is_a_path() {
        let rooms = vec![room(0, 0.0), room(1, 4.0), room(2, 8.0)];
        let conn = |id: usize, a: usize| Connection {
            id,
            kind: ConnectionKind::Chain,
            rooms: [a, a + 1],
            wall: Dir::East,
            line: 4.0 * (a + 1) as f64,
            overlap: Interval64 { lo: 0.0, hi: 3.0 },
            opening: Interval64 { lo: 0.9, hi: 2.1 },
        };
        let layout = Layout {
            rooms,
            connections: vec![conn(0, 0), conn(1, 1)],
            placements: vec![],
            bbox: BBox { min_x: 0.0, min_y: 0.0, max_x: 12.0, max_y: 3.0 },
            seed: 0,
            params: GenParams::default(),
        };
        let g = build_navgraph(&layout);
        assert_eq!(g.edges.len(), 2);
        assert!(g.edges.iter().all(|e| (e.weight - 4.0).abs() < 1e-12));
        let (map, signs) = build_map(&layout);
        assert_eq!(map.outlines.len(), 3);
        assert_eq!(map.teleports.len(), 3);
        assert_eq!(map.category_index.len(), 3);
        assert_eq!(signs.len(), 3);
    }

    #[test]
    fn spawn_moves_off_the_pedestal() {
        let p = GenParams::default();
        let mut r = room(0, 0.0);
        r.decor = crate::roomgen::plan_decor(&r, &p, 1);
        let [x, y] = spawn_point_local(&r, &p);
        assert!((x - 2.9).abs() < 1e-9, "{x}");
        assert!((y - 1.5).abs() < 1e-9);
        let empty = room(0, 0.0);
        assert_eq!(spawn_point_local(&empty, &p), [2.0, 1.5]);
    }
}
