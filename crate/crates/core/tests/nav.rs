mod common;

use navsim::geom::{point_in_polygon, Vec2};
use navsim::nav::{
    build_grid, distance_field, door_cells, doors_and_rooms_connected, is_navigable, resolve_goal, sample_start_goal,
    GoalInstance, GoalRegion, GridSpec, NavError, OccupancyGrid, RegionPart, SampleOptions,
};
use navsim::physics::{AgentConfig, CollisionWorld};
use navsim::scene::{generate_house, Category, GenParams, House, RoomClass};
use navsim::task::{GoalSpec, ObjectSelect};

fn house(seed: u64, rooms: usize) -> House {
    generate_house(seed, rooms, true, &GenParams::default()).unwrap()
}

#[test]
fn grid_matches_clearance_oracle() {
    for seed in 0..8 {
        let h = house(seed, 1 + seed as usize % 4);
        let world = CollisionWorld::from_house(&h, AgentConfig::default().height);
        for (radius, res) in [(0.1, 0.1), (0.25, 0.1), (0.2, 0.05)] {
            let g = build_grid(&h, radius, res).unwrap();
            for i in 0..g.len() {
                let expect = world.clearance(g.spec.center(i)) < radius;
                assert_eq!(g.is_blocked(i), expect, "seed {seed} r {radius} cell {i}");
            }
        }
    }
}

#[test]
fn bad_resolution_is_rejected() {
    let h = house(0, 1);
    assert!(matches!(build_grid(&h, 0.1, 0.2), Err(NavError::BadResolution { .. })));
    assert!(matches!(build_grid(&h, 0.1, 0.0), Err(NavError::BadResolution { .. })));
}

#[test]
fn field_matches_relaxation_on_house_grids() {
    for seed in 0..4 {
        let h = house(seed, 2 + seed as usize % 3);
        let g = build_grid(&h, 0.1, 0.1).unwrap();
        let free: Vec<usize> = g.free_cells().collect();
        let goals = [free[free.len() / 3], free[2 * free.len() / 3]];
        let field = distance_field(&g, &goals);
        assert_eq!(field.values(), &common::bellman_ford(&g, &goals)[..], "seed {seed}");
    }
}

#[test]
fn no_corner_cutting() {
    // free cells (0,0) and (1,1) touch only diagonally through blocked corners
    let spec = GridSpec {
        resolution: 1.0,
        origin: Vec2::ZERO,
        width: 2,
        height: 2,
    };
    let g = OccupancyGrid::from_cells(spec, vec![false, true, true, false]);
    assert!(distance_field(&g, &[0]).get(3).is_infinite());
    assert!(!is_navigable(&g, 3, &[0]));
    let open = OccupancyGrid::from_cells(spec, vec![false; 4]);
    assert_eq!(distance_field(&open, &[0]).get(3), std::f64::consts::SQRT_2);
}

#[test]
fn sampling_interpolates_cell_values() {
    let h = house(3, 2);
    let g = build_grid(&h, 0.1, 0.1).unwrap();
    let start = g.free_cells().next().unwrap();
    let f = distance_field(&g, &[start]);
    for i in g.free_cells().step_by(37) {
        if f.get(i).is_finite() {
            assert!((f.sample(g.spec.center(i)) - f.get(i)).abs() < 1e-9);
        }
    }
    assert!(f.sample(Vec2::new(1e6, 1e6)).is_infinite());
}

#[test]
fn doors_connect_every_room() {
    for seed in 0..30 {
        let h = house(seed, 1 + seed as usize % 5);
        let g = build_grid(&h, 0.1, 0.1).unwrap();
        assert!(doors_and_rooms_connected(&h, &g), "seed {seed}");
        for c in door_cells(&h, &g) {
            assert!(g.is_free(c.expect("door inside grid")));
        }
    }
}

#[test]
fn point_goals_respect_sampling_options() {
    let h = house(2, 3);
    let g = build_grid(&h, 0.1, 0.1).unwrap();
    let opts = SampleOptions {
        min_geodesic: 2.0,
        ..SampleOptions::default()
    };
    let goal = GoalSpec::default();
    for seed in 0..200 {
        let sg = sample_start_goal(&h, &g, &goal, seed, &opts).unwrap();
        let cell = g.spec.cell_at(sg.start.position).unwrap();
        assert!(g.is_free(cell));
        let d = sg.goal.field.get(cell);
        assert!(d.is_finite() && d >= 2.0 - 1e-9, "seed {seed}: geodesic {d}");
        assert!(sg.goal.region.distance(sg.start.position) > sg.goal.threshold);
        let again = sample_start_goal(&h, &g, &goal, seed, &opts).unwrap();
        assert_eq!(again.start, sg.start);
        assert_eq!(again.goal.region, sg.goal.region);
    }
}

#[test]
fn closest_object_is_geodesically_closest() {
    let opts = SampleOptions::default();
    let mut checked = 0;
    for seed in 0..10 {
        let h = house(seed, 3);
        let g = build_grid(&h, 0.1, 0.1).unwrap();
        let mut counts = std::collections::HashMap::new();
        for o in &h.objects {
            *counts.entry(o.category).or_insert(0) += 1;
        }
        let Some((&category, _)) = counts.iter().filter(|(_, &n)| n >= 2).min_by_key(|(c, _)| c.index()) else {
            continue;
        };
        let goal = GoalSpec::ObjectGoal {
            category,
            select: ObjectSelect::Closest,
        };
        for trial in 0..10 {
            let sg = sample_start_goal(&h, &g, &goal, trial, &opts).unwrap();
            let from_start = distance_field(&g, &[g.spec.cell_at(sg.start.position).unwrap()]);
            let chosen = sg.goal.cells.iter().map(|&c| from_start.get(c)).fold(f64::INFINITY, f64::min);
            for o in h.objects.iter().filter(|o| o.category == category) {
                let region = GoalRegion {
                    parts: vec![RegionPart::Polygon(o.footprint.corners().to_vec())],
                };
                let d = region.goal_cells(&g, sg.goal.threshold).iter().map(|&c| from_start.get(c)).fold(f64::INFINITY, f64::min);
                assert!(chosen <= d + 1e-9, "seed {seed}: chose {chosen}, object {} at {d}", o.id);
            }
            assert!(matches!(sg.goal.instance, GoalInstance::Object(_)));
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn room_goals_cover_the_room() {
    let h = house(6, 4);
    let g = build_grid(&h, 0.1, 0.1).unwrap();
    let class: RoomClass = h.rooms[0].category;
    let rooms: Vec<_> = h.rooms.iter().filter(|r| r.category == class).collect();
    let r = resolve_goal(&h, &g, &GoalSpec::RoomGoal { room: class }, &SampleOptions::default()).unwrap();
    for &c in &r.cells {
        let p = g.spec.center(c);
        assert!(r.region.distance(p) <= 0.1);
    }
    for room in rooms {
        let inside = g.free_cells().find(|&c| point_in_polygon(g.spec.center(c), &room.floor_polygon)).unwrap();
        assert_eq!(r.field.get(inside), 0.0);
    }
}

#[test]
fn missing_categories_are_reported() {
    let h = generate_house(1, 2, false, &GenParams::default()).unwrap();
    let g = build_grid(&h, 0.1, 0.1).unwrap();
    let goal = GoalSpec::ObjectGoal {
        category: Category::Bed,
        select: ObjectSelect::Random,
    };
    let err = sample_start_goal(&h, &g, &goal, 0, &SampleOptions::default()).unwrap_err();
    assert!(matches!(err, NavError::NoInstances(_)));
}
