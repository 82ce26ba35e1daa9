//! The polar depth buffer must agree exactly with the exhaustive per-ray
//! enumerator on randomized scenes.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use world_sim::lidar::reference::raycast_points_brute;
use world_sim::{raycast_points, LidarSpec, Pedestrian, Rect, Target, Vec2, VehicleState, WorldFrame};

fn random_scene(rng: &mut ChaCha12Rng) -> WorldFrame {
    let n_vehicles = rng.random_range(2..8usize);
    let mut vehicles = Vec::new();
    for id in 0..n_vehicles as u64 {
        vehicles.push(VehicleState {
            id,
            center: Vec2::new(rng.random_range(-60.0..60.0), rng.random_range(-60.0..60.0)),
            heading: rng.random_range(0.0..std::f64::consts::TAU),
            length_m: rng.random_range(3.5..6.0),
            width_m: rng.random_range(1.5..2.2),
            is_cov: id == 0,
            is_ego: id == 0,
        });
    }
    let n_buildings = rng.random_range(0..4usize);
    let buildings: Vec<Rect> = (0..n_buildings)
        .map(|_| {
            let x = rng.random_range(-80.0..60.0);
            let y = rng.random_range(-80.0..60.0);
            Rect::new(x, y, x + rng.random_range(5.0..30.0), y + rng.random_range(5.0..30.0))
        })
        .collect();
    let n_peds = rng.random_range(0..3usize);
    let pedestrians: Vec<Pedestrian> = (0..n_peds as u64)
        .map(|id| Pedestrian {
            id,
            pos: Vec2::new(rng.random_range(-60.0..60.0), rng.random_range(-60.0..60.0)),
        })
        .collect();
    WorldFrame {
        slot: 1,
        vehicles,
        pedestrians,
        buildings: Arc::new(buildings),
    }
}

#[test]
fn fast_path_equals_brute_force_on_100_scenes() {
    let spec = LidarSpec::default();
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    let mut nonzero = 0usize;
    for scene_idx in 0..100 {
        let frame = random_scene(&mut rng);
        // Skip degenerate scenes where the sensor sits inside another
        // footprint or a building.
        let sensor = frame.vehicles[0];
        let overlapped = frame
            .vehicles
            .iter()
            .skip(1)
            .any(|v| v.footprint().contains(sensor.center))
            || frame.buildings.iter().any(|b| b.contains(sensor.center));
        if overlapped {
            continue;
        }
        for v in frame.vehicles.iter().skip(1) {
            let fast = raycast_points(&frame, 0, &spec, Target::Vehicle(v.id));
            let brute = raycast_points_brute(&frame, 0, &spec, Target::Vehicle(v.id));
            assert_eq!(fast, brute, "scene {} vehicle {}", scene_idx, v.id);
            if fast > 0 {
                nonzero += 1;
            }
        }
        for p in &frame.pedestrians {
            let fast = raycast_points(&frame, 0, &spec, Target::Pedestrian(p.pos));
            let brute = raycast_points_brute(&frame, 0, &spec, Target::Pedestrian(p.pos));
            assert_eq!(fast, brute, "scene {} ped {}", scene_idx, p.id);
        }
    }
    assert!(nonzero > 50, "too few visible targets ({nonzero}) to be meaningful");
}

#[test]
fn varying_channel_counts_agree_too() {
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    for channels in [16u32, 32, 64] {
        let spec = LidarSpec {
            channels,
            ..LidarSpec::default()
        };
        let frame = random_scene(&mut rng);
        for v in frame.vehicles.iter().skip(1) {
            let fast = raycast_points(&frame, 0, &spec, Target::Vehicle(v.id));
            let brute = raycast_points_brute(&frame, 0, &spec, Target::Vehicle(v.id));
            assert_eq!(fast, brute, "channels {} vehicle {}", channels, v.id);
        }
    }
}
