//! 2.5D house model: rooms, walls with openings, furniture, and materials.

mod format;
mod generate;
mod validate;
mod variation;

use serde::{Deserialize, Serialize};

use crate::geom::{oriented_rect_corners, Rect, Vec2};

pub use format::{house_from_json, house_to_json, load_house, save_house};
pub use generate::{generate_house, GenParams};
pub use validate::{validate_house, Entity, Violation};
pub(crate) use validate::door_links;
pub use variation::{apply_variation, VariationSpec, PALETTE};

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("reading scene file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scene document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid house: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("house generation failed for seed {seed}: {reason}")]
    Generation { seed: u64, reason: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Flat semantic vocabulary. Semantic frames store `index()`, reserving 0 for "no hit".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Wall,
    Floor,
    Ceiling,
    Door,
    Window,
    Chair,
    Table,
    Sofa,
    Bed,
    Shelf,
    Lamp,
    Toilet,
    Sink,
    Tv,
    Plant,
    Misc,
}

impl Category {
    pub const ALL: [Category; 16] = [
        Category::Wall,
        Category::Floor,
        Category::Ceiling,
        Category::Door,
        Category::Window,
        Category::Chair,
        Category::Table,
        Category::Sofa,
        Category::Bed,
        Category::Shelf,
        Category::Lamp,
        Category::Toilet,
        Category::Sink,
        Category::Tv,
        Category::Plant,
        Category::Misc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Wall => "wall",
            Category::Floor => "floor",
            Category::Ceiling => "ceiling",
            Category::Door => "door",
            Category::Window => "window",
            Category::Chair => "chair",
            Category::Table => "table",
            Category::Sofa => "sofa",
            Category::Bed => "bed",
            Category::Shelf => "shelf",
            Category::Lamp => "lamp",
            Category::Toilet => "toilet",
            Category::Sink => "sink",
            Category::Tv => "tv",
            Category::Plant => "plant",
            Category::Misc => "misc",
        }
    }

    pub fn from_name(s: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Position in the vocabulary, 0-based.
    pub fn ordinal(self) -> usize {
        self as usize
    }

    /// Semantic label, 1-based.
    pub fn index(self) -> u8 {
        self as u8 + 1
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoomClass {
    Kitchen,
    Bedroom,
    LivingRoom,
    Toilet,
    Bathroom,
    DiningRoom,
    Office,
    Hallway,
    #[serde(rename = "miscellaneous")]
    Miscellaneous,
}

impl RoomClass {
    pub const ALL: [RoomClass; 9] = [
        RoomClass::Kitchen,
        RoomClass::Bedroom,
        RoomClass::LivingRoom,
        RoomClass::Toilet,
        RoomClass::Bathroom,
        RoomClass::DiningRoom,
        RoomClass::Office,
        RoomClass::Hallway,
        RoomClass::Miscellaneous,
    ];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            RoomClass::Kitchen => "kitchen",
            RoomClass::Bedroom => "bedroom",
            RoomClass::LivingRoom => "living_room",
            RoomClass::Toilet => "toilet",
            RoomClass::Bathroom => "bathroom",
            RoomClass::DiningRoom => "dining_room",
            RoomClass::Office => "office",
            RoomClass::Hallway => "hallway",
            RoomClass::Miscellaneous => "miscellaneous",
        }
    }

    pub fn from_name(s: &str) -> Option<RoomClass> {
        RoomClass::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub palette_id: u32,
    pub albedo: u8,
}

/// Oriented rectangle: center, half-extents along the local x/z axes, yaw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Footprint {
    pub center: Vec2,
    pub half_extents: Vec2,
    pub yaw: f64,
}

impl Footprint {
    pub fn corners(&self) -> [Vec2; 4] {
        oriented_rect_corners(self.center, self.half_extents, self.yaw)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneObject {
    pub id: u32,
    pub category: Category,
    pub footprint: Footprint,
    pub base_height: f64,
    pub height: f64,
    pub material: Material,
}

impl SceneObject {
    pub fn top(&self) -> f64 {
        self.base_height + self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpeningKind {
    Door,
    Window,
}

/// A hole cut into a wall between fractions `span[0]..span[1]` of its length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Opening {
    pub wall_ref: u32,
    pub span: [f64; 2],
    pub bottom: f64,
    pub top: f64,
    pub kind: OpeningKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Room {
    pub id: u32,
    pub category: RoomClass,
    pub floor_polygon: Vec<Vec2>,
    pub ceiling_height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wall {
    pub id: u32,
    pub a: Vec2,
    pub b: Vec2,
    pub thickness: f64,
    pub height: f64,
    pub material: Material,
}

impl Wall {
    pub fn point_at(&self, t: f64) -> Vec2 {
        self.a + (self.b - self.a) * t
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct House {
    pub id: String,
    pub bounds: Rect,
    pub rooms: Vec<Room>,
    pub walls: Vec<Wall>,
    pub openings: Vec<Opening>,
    pub objects: Vec<SceneObject>,
}

impl House {
    pub fn wall(&self, id: u32) -> Option<&Wall> {
        self.walls.iter().find(|w| w.id == id)
    }

    /// Door openings with their index in `openings`.
    pub fn doors(&self) -> impl Iterator<Item = (usize, &Opening)> {
        self.openings
            .iter()
            .enumerate()
            .filter(|(_, o)| o.kind == OpeningKind::Door)
    }

    /// Door opening as a segment on the wall centerline.
    pub fn opening_segment(&self, opening: &Opening) -> Option<(Vec2, Vec2)> {
        let w = self.wall(opening.wall_ref)?;
        Some((w.point_at(opening.span[0]), w.point_at(opening.span[1])))
    }

    pub fn room_at(&self, p: Vec2) -> Option<&Room> {
        self.rooms
            .iter()
            .find(|r| crate::geom::point_in_polygon(p, &r.floor_polygon))
    }
}

/// Albedo used when a surface carries no explicit material.
pub fn default_albedo(c: Category) -> u8 {
    match c {
        Category::Wall => 200,
        Category::Floor => 110,
        Category::Ceiling => 235,
        Category::Door => 150,
        Category::Window => 180,
        Category::Chair => 90,
        Category::Table => 130,
        Category::Sofa => 70,
        Category::Bed => 210,
        Category::Shelf => 120,
        Category::Lamp => 245,
        Category::Toilet => 250,
        Category::Sink => 240,
        Category::Tv => 30,
        Category::Plant => 60,
        Category::Misc => 160,
    }
}

pub fn default_material(c: Category) -> Material {
    Material {
        palette_id: 0,
        albedo: default_albedo(c),
    }
}
