use std::collections::BTreeSet;

use navsim::geom::{point_in_polygon, Vec2};
use navsim::physics::CollisionWorld;
use navsim::scene::{
    apply_variation, generate_house, house_from_json, house_to_json, load_house, save_house, validate_house, Category,
    Entity, GenParams, OpeningKind, VariationSpec,
};
use proptest::prelude::*;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/one_room.house.json");

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn generated_houses_are_valid_and_roundtrip(seed in 0u64..100, rooms in 1usize..6, furnished: bool) {
        let h = generate_house(seed, rooms, furnished, &GenParams::default()).unwrap();
        prop_assert_eq!(validate_house(&h), vec![]);
        prop_assert_eq!(h.rooms.len(), rooms);
        prop_assert_eq!(furnished, !h.objects.is_empty());
        let back = house_from_json(&house_to_json(&h)).unwrap();
        prop_assert_eq!(&back, &h);
        prop_assert_eq!(house_to_json(&back), house_to_json(&h));
    }
}

#[test]
fn generation_is_deterministic() {
    let p = GenParams::default();
    for seed in 0..20 {
        assert_eq!(generate_house(seed, 3, true, &p).unwrap(), generate_house(seed, 3, true, &p).unwrap());
    }
    assert_ne!(generate_house(1, 3, true, &p).unwrap(), generate_house(2, 3, true, &p).unwrap());
}

#[test]
fn clutter_levels_share_a_floor_plan() {
    let p = GenParams::default();
    for seed in 0..30 {
        let e = generate_house(seed, 4, false, &p).unwrap();
        let f = generate_house(seed, 4, true, &p).unwrap();
        assert_eq!(e.rooms, f.rooms, "seed {seed}");
        assert_eq!(e.walls, f.walls, "seed {seed}");
        assert_eq!(e.openings, f.openings, "seed {seed}");
        assert!(e.objects.is_empty() && !f.objects.is_empty());
    }
}

#[test]
fn every_room_has_a_door_and_furniture_stays_indoors() {
    for seed in 0..40 {
        let h = generate_house(seed, 1 + (seed % 5) as usize, true, &GenParams::default()).unwrap();
        assert!(h.openings.iter().any(|o| o.kind == OpeningKind::Door));
        for o in &h.objects {
            let inside = h.rooms.iter().any(|r| point_in_polygon(o.footprint.center, &r.floor_polygon));
            assert!(inside, "seed {seed}: object {} outside every room", o.id);
        }
    }
}

#[test]
fn fixture_loads_and_saves() {
    let h = load_house(FIXTURE).unwrap();
    assert_eq!(validate_house(&h), vec![]);
    assert_eq!(h.rooms.len(), 1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("copy.json");
    save_house(&h, &path).unwrap();
    assert_eq!(load_house(&path).unwrap(), h);
}

#[test]
fn malformed_scenes_are_rejected() {
    assert!(house_from_json("{").is_err());
    assert!(house_from_json(r#"{"id":"x"}"#).is_err());
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(FIXTURE).unwrap()).unwrap();
    v["walls"][0]["unknown_field"] = 1.into();
    assert!(house_from_json(&v.to_string()).is_err());
    assert!(load_house("/nonexistent/house.json").is_err());
}

#[test]
fn validation_names_the_offender() {
    let base = load_house(FIXTURE).unwrap();

    let mut h = base.clone();
    h.walls[1].id = h.walls[0].id;
    assert!(validate_house(&h).iter().any(|v| v.entity == Entity::Wall(h.walls[0].id)));

    let mut h = base.clone();
    h.openings[0].span = [0.8, 0.2];
    assert!(validate_house(&h).iter().any(|v| v.entity == Entity::Opening(0)));

    let mut h = base.clone();
    h.objects[0].footprint.center = Vec2::new(1e4, 0.0);
    let id = h.objects[0].id;
    assert!(validate_house(&h).iter().any(|v| v.entity == Entity::Object(id)));

    let mut h = base.clone();
    h.rooms[0].floor_polygon.swap(0, 1);
    assert!(validate_house(&h).iter().any(|v| v.entity == Entity::Room(h.rooms[0].id)));

    let mut h = base;
    h.rooms.clear();
    assert!(validate_house(&h).iter().any(|v| v.entity == Entity::House));
}

#[test]
fn variation_keeps_geometry() {
    let h = generate_house(9, 3, true, &GenParams::default()).unwrap();
    let spec = VariationSpec {
        retexture_seed: Some(4),
        remove_categories: BTreeSet::new(),
    };
    let v = apply_variation(&h, &spec).unwrap();
    assert_eq!(v.walls.len(), h.walls.len());
    for (a, b) in v.walls.iter().zip(&h.walls) {
        assert_eq!((a.id, a.a, a.b, a.thickness, a.height), (b.id, b.a, b.b, b.thickness, b.height));
    }
    for (a, b) in v.objects.iter().zip(&h.objects) {
        assert_eq!((a.id, a.category, a.footprint), (b.id, b.category, b.footprint));
    }
    // same category, same material
    let mut by_cat = std::collections::HashMap::new();
    for o in &v.objects {
        assert_eq!(*by_cat.entry(o.category).or_insert(o.material), o.material);
    }
    assert_eq!(apply_variation(&h, &VariationSpec::default()).unwrap(), h);
}

#[test]
fn removing_a_category_frees_its_footprint() {
    let h = generate_house(5, 2, true, &GenParams::default()).unwrap();
    let cat = h.objects[0].category;
    let spec = VariationSpec {
        retexture_seed: None,
        remove_categories: [cat.name().to_string()].into(),
    };
    let v = apply_variation(&h, &spec).unwrap();
    assert!(v.objects.iter().all(|o| o.category != cat));
    assert_eq!(v.objects.len(), h.objects.iter().filter(|o| o.category != cat).count());
    let before = CollisionWorld::from_house(&h, 1.0).obstacles.len();
    let after = CollisionWorld::from_house(&v, 1.0).obstacles.len();
    assert!(after < before);

    let bad = VariationSpec {
        retexture_seed: None,
        remove_categories: ["not_a_category".to_string()].into(),
    };
    assert!(apply_variation(&h, &bad).is_err());
    assert!(Category::from_name("not_a_category").is_none());
}
