//! Axis-aligned rectangle kernel used by room placement.
//!
//! Everything here is generic over [`Scalar`] so that the same interval
//! arithmetic runs on `f32`, `f64` and exact rationals. Comparisons go through
//! [`Scalar::tolerance`], which is zero for rationals.

use std::fmt::Debug;

use num_rational::Rational64;
use num_traits::{FromPrimitive, Num, Signed};
use serde::{Deserialize, Serialize};

/// Numeric type usable by the geometry kernel.
pub trait Scalar: Copy + PartialOrd + Debug + Num + Signed + FromPrimitive {
    /// Slack used when deciding whether two coordinates coincide.
    fn tolerance() -> Self;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn approx_eq(a: Self, b: Self) -> bool {
        (a - b).abs() <= Self::tolerance()
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-4
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-6
    }
}

impl Scalar for Rational64 {
    fn tolerance() -> Self {
        Rational64::from_integer(0)
    }
}

/// Compass side of a room, also used as a placement direction.
///
/// `+x` is east and `+y` is north.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    North,
    East,
    South,
    West,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::North, Dir::East, Dir::South, Dir::West];

    /// 90 degrees clockwise.
    pub fn cw(self) -> Dir {
        match self {
            Dir::North => Dir::East,
            Dir::East => Dir::South,
            Dir::South => Dir::West,
            Dir::West => Dir::North,
        }
    }

    /// 90 degrees counter-clockwise.
    pub fn ccw(self) -> Dir {
        match self {
            Dir::North => Dir::West,
            Dir::West => Dir::South,
            Dir::South => Dir::East,
            Dir::East => Dir::North,
        }
    }

    pub fn opposite(self) -> Dir {
        self.cw().cw()
    }

    /// Axis along which a move in this direction happens.
    pub fn axis(self) -> Axis {
        match self {
            Dir::East | Dir::West => Axis::X,
            Dir::North | Dir::South => Axis::Y,
        }
    }

    /// `true` when moving this way increases the coordinate on [`Dir::axis`].
    pub fn is_positive(self) -> bool {
        matches!(self, Dir::East | Dir::North)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

/// Closed interval `[lo, hi]` on one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        debug_assert!(lo <= hi + T::tolerance(), "inverted interval {lo:?}..{hi:?}");
        Interval { lo, hi }
    }

    pub fn len(&self) -> T {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn center(&self) -> T {
        (self.lo + self.hi) / T::two()
    }

    pub fn shifted(&self, by: T) -> Self {
        Interval { lo: self.lo + by, hi: self.hi + by }
    }

    /// Intersection, or `None` when the intervals do not meet.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = T::max_of(self.lo, other.lo);
        let hi = T::min_of(self.hi, other.hi);
        if hi >= lo {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    /// Length of the common part; zero when disjoint.
    pub fn overlap_len(&self, other: &Self) -> T {
        self.intersect(other).map(|i| i.len()).unwrap_or_else(T::zero)
    }

    /// Open-interval overlap with more than tolerance of penetration.
    pub fn interiors_overlap(&self, other: &Self) -> bool {
        T::min_of(self.hi, other.hi) - T::max_of(self.lo, other.lo) > T::tolerance()
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.lo >= self.lo - T::tolerance() && other.hi <= self.hi + T::tolerance()
    }
}

/// Axis-aligned rectangle anchored at its south-west corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect<T> {
    pub x: T,
    pub y: T,
    pub width: T,
    pub depth: T,
}

impl<T: Scalar> Rect<T> {
    pub fn new(x: T, y: T, width: T, depth: T) -> Self {
        Rect { x, y, width, depth }
    }

    pub fn min_x(&self) -> T {
        self.x
    }
    pub fn max_x(&self) -> T {
        self.x + self.width
    }
    pub fn min_y(&self) -> T {
        self.y
    }
    pub fn max_y(&self) -> T {
        self.y + self.depth
    }

    pub fn area(&self) -> T {
        self.width * self.depth
    }

    pub fn perimeter(&self) -> T {
        T::two() * (self.width + self.depth)
    }

    pub fn center(&self) -> (T, T) {
        (self.x + self.width / T::two(), self.y + self.depth / T::two())
    }

    pub fn extent(&self, axis: Axis) -> Interval<T> {
        match axis {
            Axis::X => Interval { lo: self.min_x(), hi: self.max_x() },
            Axis::Y => Interval { lo: self.min_y(), hi: self.max_y() },
        }
    }

    /// Coordinate of the given side on its normal axis.
    pub fn side(&self, dir: Dir) -> T {
        match dir {
            Dir::North => self.max_y(),
            Dir::South => self.min_y(),
            Dir::East => self.max_x(),
            Dir::West => self.min_x(),
        }
    }

    pub fn translated(&self, axis: Axis, by: T) -> Self {
        match axis {
            Axis::X => Rect { x: self.x + by, ..*self },
            Axis::Y => Rect { y: self.y + by, ..*self },
        }
    }

    /// Interiors intersect by more than the tolerance on both axes.
    pub fn interiors_overlap(&self, other: &Self) -> bool {
        self.extent(Axis::X).interiors_overlap(&other.extent(Axis::X))
            && self.extent(Axis::Y).interiors_overlap(&other.extent(Axis::Y))
    }

    /// `true` when every point of `other` is at least `clearance` away.
    pub fn gap_at_least(&self, other: &Self, clearance: T) -> bool {
        let dx = T::max_of(T::zero(), T::max_of(other.min_x() - self.max_x(), self.min_x() - other.max_x()));
        let dy = T::max_of(T::zero(), T::max_of(other.min_y() - self.max_y(), self.min_y() - other.max_y()));
        let tol = T::tolerance();
        dx * dx + dy * dy >= clearance * clearance - tol
    }

    pub fn inflated(&self, by: T) -> Self {
        Rect { x: self.x - by, y: self.y - by, width: self.width + T::two() * by, depth: self.depth + T::two() * by }
    }

    pub fn contains_rect(&self, other: &Self) -> bool {
        self.extent(Axis::X).contains(&other.extent(Axis::X)) && self.extent(Axis::Y).contains(&other.extent(Axis::Y))
    }

    /// Union bounding box.
    pub fn union(&self, other: &Self) -> Self {
        let min_x = T::min_of(self.min_x(), other.min_x());
        let min_y = T::min_of(self.min_y(), other.min_y());
        let max_x = T::max_of(self.max_x(), other.max_x());
        let max_y = T::max_of(self.max_y(), other.max_y());
        Rect::new(min_x, min_y, max_x - min_x, max_y - min_y)
    }
}

/// Two rectangles sharing a wall line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharedWall<T> {
    /// Side of the first rectangle that carries the shared wall.
    pub side_of_first: Dir,
    /// Coordinate of the wall line on the side's normal axis.
    pub line: T,
    /// Common part of both walls along the wall direction.
    pub overlap: Interval<T>,
}

/// Shared wall between `a` and `b` of at least `min_overlap`, if any.
///
/// Symmetric: swapping the arguments flips `side_of_first` and keeps
/// `line` and `overlap`.
pub fn shared_wall<T: Scalar>(a: &Rect<T>, b: &Rect<T>, min_overlap: T) -> Option<SharedWall<T>> {
    for side in [Dir::East, Dir::West, Dir::North, Dir::South] {
        if T::approx_eq(a.side(side), b.side(side.opposite())) {
            let along = side.axis().other();
            let overlap = a.extent(along).intersect(&b.extent(along))?;
            if overlap.len() >= min_overlap - T::tolerance() {
                return Some(SharedWall { side_of_first: side, line: a.side(side), overlap });
            }
            return None;
        }
    }
    None
}

/// Range of shifts `s` (along the axis of the two intervals) for which
/// `moving.shifted(s)` overlaps `anchor` by at least `min_overlap`.
pub fn overlap_shift_range<T: Scalar>(
    moving: &Interval<T>,
    anchor: &Interval<T>,
    min_overlap: T,
) -> Option<Interval<T>> {
    if moving.len() < min_overlap - T::tolerance() || anchor.len() < min_overlap - T::tolerance() {
        return None;
    }
    let lo = anchor.lo - moving.hi + min_overlap;
    let hi = anchor.hi - moving.lo - min_overlap;
    if hi >= lo - T::tolerance() {
        Some(Interval { lo, hi: T::max_of(lo, hi) })
    } else {
        None
    }
}

/// Shift intervals along `axis` at which `body` would touch or overlap an
/// obstacle. Shifts strictly inside an interval overlap; the endpoints are
/// exact contact positions.
///
/// Obstacles that do not overlap `body` on the perpendicular axis never block.
pub fn blocked_shifts<T: Scalar>(body: &Rect<T>, obstacles: &[Rect<T>], axis: Axis) -> Vec<Interval<T>> {
    let cross = axis.other();
    let mut out: Vec<Interval<T>> = obstacles
        .iter()
        .filter(|o| body.extent(cross).interiors_overlap(&o.extent(cross)))
        .map(|o| {
            let b = body.extent(axis);
            let e = o.extent(axis);
            Interval { lo: e.lo - b.hi, hi: e.hi - b.lo }
        })
        .collect();
    out.sort_by(|a, b| a.lo.partial_cmp(&b.lo).expect("comparable shift bounds"));
    out
}

/// Whether shift `s` penetrates one of the blocked intervals by more than
/// the tolerance.
pub fn is_blocked<T: Scalar>(blocked: &[Interval<T>], s: T) -> bool {
    let tol = T::tolerance();
    blocked.iter().any(|i| s > i.lo + tol && s < i.hi - tol)
}

/// Whether some blocked interval lies ahead of shift zero toward `inward`.
pub fn obstacle_ahead<T: Scalar>(blocked: &[Interval<T>], inward: Dir) -> bool {
    let tol = T::tolerance();
    if inward.is_positive() {
        blocked.iter().any(|i| i.hi > tol)
    } else {
        blocked.iter().any(|i| i.lo < -tol)
    }
}

/// Largest distance `candidate` can slide toward `inward` without entering an
/// obstacle while keeping a shared-wall overlap of at least `min_overlap`
/// with `must_touch`.
///
/// The overlap is measured along the slide axis, i.e. along the wall the two
/// rectangles share. Exact interval arithmetic; the result is never negative.
pub fn max_inward_slide<T: Scalar>(
    candidate: &Rect<T>,
    obstacles: &[Rect<T>],
    inward: Dir,
    must_touch: &Rect<T>,
    min_overlap: T,
) -> T {
    let axis = inward.axis();
    let range = overlap_shift_range(&candidate.extent(axis), &must_touch.extent(axis), min_overlap);
    let blocked = blocked_shifts(candidate, obstacles, axis);
    slide_limit(range, &blocked, inward)
}

/// Distance reachable from shift zero toward `inward` inside `range`
/// without crossing a blocked interval.
pub fn slide_limit<T: Scalar>(range: Option<Interval<T>>, blocked: &[Interval<T>], inward: Dir) -> T {
    let Some(range) = range else {
        return T::zero();
    };
    let tol = T::tolerance();
    let (cap, block) = if inward.is_positive() {
        let block = blocked
            .iter()
            .filter(|i| i.hi > tol)
            .map(|i| i.lo)
            .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| T::min_of(a, v))));
        (range.hi, block)
    } else {
        let block = blocked
            .iter()
            .filter(|i| i.lo < -tol)
            .map(|i| -i.hi)
            .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| T::min_of(a, v))));
        (-range.lo, block)
    };
    let limit = match block {
        Some(b) => T::min_of(cap, b),
        None => cap,
    };
    T::max_of(T::zero(), limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64, y: f64, w: f64, d: f64) -> Rect<f64> {
        Rect::new(x, y, w, d)
    }

    #[test]
    fn directions_cycle_clockwise() {
        assert_eq!(Dir::East.cw(), Dir::South);
        assert_eq!(Dir::South.cw(), Dir::West);
        assert_eq!(Dir::West.cw(), Dir::North);
        assert_eq!(Dir::North.cw(), Dir::East);
        for d in Dir::ALL {
            assert_eq!(d.cw().ccw(), d);
            assert_ne!(d.cw(), d.opposite());
        }
    }

    #[test]
    fn touching_rects_do_not_overlap() {
        let a = r(0.0, 0.0, 4.0, 3.0);
        let b = r(4.0, 0.0, 4.0, 3.0);
        assert!(!a.interiors_overlap(&b));
        assert!(a.interiors_overlap(&r(3.9, 1.0, 1.0, 1.0)));
    }

    #[test]
    fn shared_wall_requires_min_overlap() {
        let a = r(0.0, 0.0, 4.0, 3.0);
        let b = r(4.0, 1.0, 4.0, 3.0);
        let w = shared_wall(&a, &b, 1.4).unwrap();
        assert_eq!(w.side_of_first, Dir::East);
        assert!((w.overlap.len() - 2.0).abs() < 1e-12);
        let back = shared_wall(&b, &a, 1.4).unwrap();
        assert_eq!(back.side_of_first, Dir::West);
        assert_eq!(back.overlap, w.overlap);

        let c = r(4.0, 2.0, 4.0, 3.0);
        assert!(shared_wall(&a, &c, 1.4).is_none());
        let gap = r(4.2, 0.0, 4.0, 3.0);
        assert!(shared_wall(&a, &gap, 1.4).is_none());
    }

    #[test]
    fn slide_blocked_when_flush() {
        let must = r(0.0, 0.0, 4.0, 3.0);
        let cand = r(4.0, 0.0, 4.0, 3.0);
        let obstacle = r(4.0, -3.0, 4.0, 3.0);
        assert_eq!(max_inward_slide(&cand, &[obstacle], Dir::South, &must, 1.4), 0.0);
    }

    #[test]
    fn slide_capped_by_overlap_without_obstacles() {
        let must = r(0.0, 0.0, 4.0, 3.0);
        let cand = r(4.0, 0.0, 4.0, 3.0);
        let t = max_inward_slide(&cand, &[], Dir::South, &must, 1.4);
        assert!((t - 1.6).abs() < 1e-12);
    }

    #[test]
    fn rational_slide_is_exact() {
        let q = |n: i64, d: i64| Rational64::new(n, d);
        let must = Rect::new(q(0, 1), q(0, 1), q(4, 1), q(3, 1));
        let cand = Rect::new(q(4, 1), q(0, 1), q(4, 1), q(3, 1));
        let t = max_inward_slide(&cand, &[], Dir::South, &must, q(7, 5));
        assert_eq!(t, q(8, 5));
    }
}
