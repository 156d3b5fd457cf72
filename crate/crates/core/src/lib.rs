//! Procedural library worlds: a book catalog becomes a spiral of cuboid
//! rooms with shelves, doors and decor, plus navigation data, scene chunks
//! and paginated texts bundled into one canonical JSON world file.
//!
//! The rectangle kernel in [`geom`] is generic over the scalar type; the
//! generator itself works in `f64` meters. The aliases below name the
//! instantiations used across the crate and its tests.

pub mod canonical;
pub mod catalog;
pub mod context;
pub mod error;
pub mod geom;
pub mod layoutgen;
pub mod navmap;
pub mod pagination;
pub mod params;
pub mod roomgen;
pub mod scene;
pub mod world;

pub use num_rational::Rational64;

pub type Rect64 = geom::Rect<f64>;
pub type Interval64 = geom::Interval<f64>;
pub type Rect32 = geom::Rect<f32>;
pub type RectQ = geom::Rect<Rational64>;
pub type IntervalQ = geom::Interval<Rational64>;

pub use catalog::{BookRecord, Catalog, CatalogFormat, Category};
pub use geom::{Dir, Scalar};
pub use layoutgen::{generate_layout, Connection, ConnectionKind, Layout};
pub use params::GenParams;
pub use roomgen::RoomPlan;
pub use world::{export_world, generate_world, WorldFile};
