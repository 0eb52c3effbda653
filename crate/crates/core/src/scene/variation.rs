use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed;

use super::{Category, House, Material, SceneError};

/// Gray levels a retextured surface can take; `palette_id` indexes this table.
pub const PALETTE: [u8; 16] = [
    40, 52, 66, 80, 95, 110, 124, 138, 152, 166, 180, 194, 208, 222, 236, 250,
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationSpec {
    pub retexture_seed: Option<u64>,
    pub remove_categories: BTreeSet<String>,
}

impl VariationSpec {
    pub fn is_identity(&self) -> bool {
        self.retexture_seed.is_none() && self.remove_categories.is_empty()
    }
}

/// Material drawn for `category` under a retexture seed. Independent of which
/// other categories exist in the house.
pub fn retexture_material(seed: u64, category: Category) -> Material {
    let mut rng = seed::rng_for(seed, &[0x7e7_u64, category.ordinal() as u64]);
    let palette_id = rng.random_range(0..PALETTE.len() as u32);
    Material {
        palette_id: palette_id + 1,
        albedo: PALETTE[palette_id as usize],
    }
}

/// Remove categories and/or retexture surfaces. Geometry, ids and poses are untouched.
pub fn apply_variation(h: &House, v: &VariationSpec) -> Result<House, SceneError> {
    let mut remove = BTreeSet::new();
    for name in &v.remove_categories {
        let c = Category::from_name(name).ok_or_else(|| SceneError::UnknownCategory(name.clone()))?;
        remove.insert(c);
    }

    let mut out = h.clone();
    out.objects.retain(|o| !remove.contains(&o.category));
    if let Some(seed) = v.retexture_seed {
        let wall = retexture_material(seed, Category::Wall);
        for w in &mut out.walls {
            w.material = wall;
        }
        for o in &mut out.objects {
            o.material = retexture_material(seed, o.category);
        }
    }
    Ok(out)
}
