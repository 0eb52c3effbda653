use serde::{Deserialize, Serialize};

use crate::geom::Vec2;
use crate::scene::{Category, RoomClass};

/// Which instance of an object category counts as the goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ObjectSelect {
    #[default]
    Any,
    Random,
    Closest,
}

fn default_success_radius() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GoalSpec {
    /// A fixed point, or a sampled free point when `point` is absent.
    PointGoal {
        #[serde(default)]
        point: Option<Vec2>,
        #[serde(default = "default_success_radius")]
        success_radius: f64,
    },
    ObjectGoal {
        category: Category,
        #[serde(default)]
        select: ObjectSelect,
    },
    RoomGoal { room: RoomClass },
}

impl Default for GoalSpec {
    fn default() -> Self {
        GoalSpec::PointGoal {
            point: None,
            success_radius: default_success_radius(),
        }
    }
}

/// Length of the one-hot goal vector: room classes followed by object categories.
pub const GOAL_ONE_HOT_LEN: usize = RoomClass::ALL.len() + Category::ALL.len();

impl GoalSpec {
    pub fn describe(&self) -> String {
        match self {
            GoalSpec::PointGoal { point: Some(p), .. } => format!("point({}, {})", p.x, p.z),
            GoalSpec::PointGoal { point: None, .. } => "point(sampled)".to_string(),
            GoalSpec::ObjectGoal { category, select } => format!("object({}, {select:?})", category.name()),
            GoalSpec::RoomGoal { room } => format!("room({})", room.name()),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            GoalSpec::PointGoal { point, success_radius } => {
                if !(success_radius.is_finite() && *success_radius > 0.0) {
                    return Err(format!("success_radius must be positive, got {success_radius}"));
                }
                if point.is_some_and(|p| !p.is_finite()) {
                    return Err("goal point must be finite".to_string());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// One-hot encoding: room classes first, then object categories. Point
    /// goals encode as all zeros.
    pub fn one_hot(&self) -> [f32; GOAL_ONE_HOT_LEN] {
        let mut v = [0.0; GOAL_ONE_HOT_LEN];
        match self {
            GoalSpec::RoomGoal { room } => v[room.ordinal()] = 1.0,
            GoalSpec::ObjectGoal { category, .. } => v[RoomClass::ALL.len() + category.ordinal()] = 1.0,
            GoalSpec::PointGoal { .. } => {}
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_format() {
        let g: GoalSpec = serde_json::from_str(r#"{"type":"room_goal","room":"living_room"}"#).unwrap();
        assert_eq!(g, GoalSpec::RoomGoal { room: RoomClass::LivingRoom });
        let g: GoalSpec = serde_json::from_str(r#"{"type":"object_goal","category":"door","select":"closest"}"#).unwrap();
        assert_eq!(
            g,
            GoalSpec::ObjectGoal {
                category: Category::Door,
                select: ObjectSelect::Closest
            }
        );
        let g: GoalSpec = serde_json::from_str(r#"{"type":"point_goal","point":[1.0,2.0]}"#).unwrap();
        assert_eq!(
            g,
            GoalSpec::PointGoal {
                point: Some(Vec2::new(1.0, 2.0)),
                success_radius: 0.5
            }
        );
        assert!(serde_json::from_str::<GoalSpec>(r#"{"type":"room_goal","room":"garage"}"#).is_err());
    }

    #[test]
    fn one_hot_has_single_bit() {
        let g = GoalSpec::RoomGoal { room: RoomClass::Kitchen };
        let v = g.one_hot();
        assert_eq!(v.iter().filter(|&&x| x == 1.0).count(), 1);
        assert_eq!(v[RoomClass::Kitchen.ordinal()], 1.0);
        assert!(GoalSpec::default().one_hot().iter().all(|&x| x == 0.0));
    }
}
