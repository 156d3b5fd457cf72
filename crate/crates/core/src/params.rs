//! Generation parameters and their `key=value` config-file form.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Clear wall length on each side of a door opening.
pub const DOOR_JAMB_M: f64 = 0.1;

/// Narrowest corridor a visitor can comfortably walk.
pub const MIN_CORRIDOR_WIDTH_M: f64 = 1.5;

/// Free parameters of library generation. All lengths are in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub shelf_rows: u32,
    pub slots_per_row: u32,
    pub unit_width_m: f64,
    pub shelf_depth_m: f64,
    pub corridor_width_m: f64,
    pub wall_margin_m: f64,
    pub min_room_length_m: f64,
    pub room_height_m: f64,
    pub door_width_m: f64,
    /// Counter-clockwise spiral instead of clockwise.
    pub ccw: bool,
    /// Slide new rooms toward the spiral interior.
    pub compression: bool,
    /// Largest seeded lateral offset applied before compression.
    pub placement_jitter_m: f64,
    pub chars_per_page: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            shelf_rows: 5,
            slots_per_row: 20,
            unit_width_m: 1.0,
            shelf_depth_m: 0.3,
            corridor_width_m: 2.4,
            wall_margin_m: 0.5,
            min_room_length_m: 4.0,
            room_height_m: 3.0,
            door_width_m: 1.2,
            ccw: false,
            compression: true,
            placement_jitter_m: 1.0,
            chars_per_page: 1800,
        }
    }
}

impl GenParams {
    /// Books one shelf unit holds.
    pub fn shelf_capacity(&self) -> usize {
        self.shelf_rows as usize * self.slots_per_row as usize
    }

    /// Shortest shared wall that can hold a door including its frame.
    pub fn min_adjacency_overlap(&self) -> f64 {
        self.door_width_m + 2.0 * DOOR_JAMB_M
    }

    /// The fixed room dimension: two shelf rows plus the corridor between them.
    pub fn room_depth(&self) -> f64 {
        2.0 * self.shelf_depth_m + self.corridor_width_m
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let lengths = [
            ("unit_width_m", self.unit_width_m),
            ("shelf_depth_m", self.shelf_depth_m),
            ("corridor_width_m", self.corridor_width_m),
            ("wall_margin_m", self.wall_margin_m),
            ("min_room_length_m", self.min_room_length_m),
            ("room_height_m", self.room_height_m),
            ("door_width_m", self.door_width_m),
        ];
        for (name, v) in lengths {
            if !(v.is_finite() && v > 0.0) {
                return Err(ParamError::Invariant(format!("{name} must be a finite length > 0, got {v}")));
            }
        }
        if self.shelf_rows == 0 {
            return Err(ParamError::Invariant("shelf_rows must be > 0".into()));
        }
        if self.slots_per_row == 0 {
            return Err(ParamError::Invariant("slots_per_row must be > 0".into()));
        }
        if self.corridor_width_m < MIN_CORRIDOR_WIDTH_M {
            return Err(ParamError::Invariant(format!(
                "corridor_width_m must be >= {MIN_CORRIDOR_WIDTH_M} (walkability floor), got {}",
                self.corridor_width_m
            )));
        }
        if !(self.placement_jitter_m.is_finite() && self.placement_jitter_m >= 0.0) {
            return Err(ParamError::Invariant(format!(
                "placement_jitter_m must be >= 0, got {}",
                self.placement_jitter_m
            )));
        }
        if self.chars_per_page == 0 {
            return Err(ParamError::Invariant("chars_per_page must be > 0".into()));
        }
        if self.min_adjacency_overlap() > self.room_depth() {
            return Err(ParamError::Invariant(format!(
                "door_width_m plus jambs ({}) must fit the fixed room depth ({})",
                self.min_adjacency_overlap(),
                self.room_depth()
            )));
        }
        if self.room_height_m < 2.2 {
            return Err(ParamError::Invariant(format!(
                "room_height_m must be >= 2.2 to fit doors, got {}",
                self.room_height_m
            )));
        }
        Ok(())
    }

    /// Apply one `key=value` pair. Keys are the field names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ParamError> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ParamError> {
            value.trim().parse().map_err(|_| ParamError::Value { key: key.to_string(), value: value.to_string() })
        }
        match key {
            "shelf_rows" => self.shelf_rows = num(key, value)?,
            "slots_per_row" => self.slots_per_row = num(key, value)?,
            "unit_width_m" => self.unit_width_m = num(key, value)?,
            "shelf_depth_m" => self.shelf_depth_m = num(key, value)?,
            "corridor_width_m" => self.corridor_width_m = num(key, value)?,
            "wall_margin_m" => self.wall_margin_m = num(key, value)?,
            "min_room_length_m" => self.min_room_length_m = num(key, value)?,
            "room_height_m" => self.room_height_m = num(key, value)?,
            "door_width_m" => self.door_width_m = num(key, value)?,
            "ccw" => self.ccw = num(key, value)?,
            "compression" => self.compression = num(key, value)?,
            "placement_jitter_m" => self.placement_jitter_m = num(key, value)?,
            "chars_per_page" => self.chars_per_page = num(key, value)?,
            _ => return Err(ParamError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Overlay a `key=value` config file onto `self`.
    ///
    /// Blank lines and lines starting with `#` are ignored. Returns the
    /// non-parameter keys (for example `seed`) for the caller to interpret.
    pub fn apply_config(&mut self, text: &str) -> Result<Vec<(String, String)>, ParamError> {
        let mut extra = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ParamError::Syntax { line: idx + 1, text: line.to_string() });
            };
            let (k, v) = (k.trim(), v.trim());
            match self.set(k, v) {
                Err(ParamError::UnknownKey(_)) => extra.push((k.to_string(), v.to_string())),
                other => other?,
            }
        }
        Ok(extra)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = GenParams::default();
        p.validate().unwrap();
        assert_eq!(p.shelf_capacity(), 100);
        assert!((p.room_depth() - 3.0).abs() < 1e-12);
        assert!((p.min_adjacency_overlap() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn narrow_corridor_names_the_invariant() {
        let p = GenParams { corridor_width_m: 0.5, ..Default::default() };
        let msg = p.validate().unwrap_err().to_string();
        assert!(msg.contains("corridor_width_m"), "{msg}");
        assert!(msg.contains("walkability"), "{msg}");
    }

    #[test]
    fn config_file_overlay() {
        let mut p = GenParams::default();
        let extra = p.apply_config("# comment\nshelf_rows = 6\n\nccw=true\nseed=7\n").unwrap();
        assert_eq!(p.shelf_rows, 6);
        assert!(p.ccw);
        assert_eq!(extra, vec![("seed".to_string(), "7".to_string())]);
        assert!(p.apply_config("shelf_rows=abc").is_err());
        assert!(p.apply_config("nonsense").is_err());
    }
}
