use std::fs;
use std::path::Path;

use super::{validate_house, House, SceneError};

/// Parse a scene document and validate it.
pub fn house_from_json(text: &str) -> Result<House, SceneError> {
    let house: House = serde_json::from_str(text)?;
    let violations = validate_house(&house);
    if violations.is_empty() {
        Ok(house)
    } else {
        Err(SceneError::Invalid(violations))
    }
}

pub fn house_to_json(house: &House) -> String {
    serde_json::to_string_pretty(house).expect("house serializes")
}

pub fn load_house(path: impl AsRef<Path>) -> Result<House, SceneError> {
    let text = fs::read_to_string(path)?;
    house_from_json(&text)
}

pub fn save_house(house: &House, path: impl AsRef<Path>) -> Result<(), SceneError> {
    fs::write(path, house_to_json(house))?;
    Ok(())
}
