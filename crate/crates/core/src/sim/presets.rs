//! Built-in floors: a walled office (41.5 x 11.3 m) and an open hall
//! (30.5 x 11.3 m), origin at the bottom-left corner.
//!
//! Office layout: a corridor along the middle (y 4.6 to 6.7) bounded by two
//! 12 dB walls, five rooms on each side separated by 10 dB partitions every
//! 8.3 m, and five beacons mounted alternately on the south and north outer
//! walls at room centres.

use super::floorplan::{Floorplan, Wall};
use super::propagation::PropagationParams;
use super::scenario::{Placement, Scenario};
use crate::fingerprint::BeaconNode;
use crate::geometry::{Point, Rect};
use crate::segmentation::SegmentationParams;

pub const PRESET_NAMES: [&str; 2] = ["office", "hall"];

const OFFICE_W: f64 = 41.5;
const OFFICE_H: f64 = 11.3;
const CORRIDOR: (f64, f64) = (4.6, 6.7);
const PARTITIONS: [f64; 4] = [8.3, 16.6, 24.9, 33.2];
const BEACON_X: [f64; 5] = [4.15, 12.45, 20.75, 29.05, 37.35];

fn wall(x0: f64, y0: f64, x1: f64, y1: f64, attenuation: f64) -> Wall {
    Wall {
        from: Point::new(x0, y0),
        to: Point::new(x1, y1),
        attenuation,
    }
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect {
    Rect::new(x0, y0, x1, y1).expect("preset rectangles are valid")
}

pub fn preset_office() -> Scenario {
    let (c0, c1) = CORRIDOR;
    let mut walls = vec![
        wall(0.0, c0, OFFICE_W, c0, 12.0),
        wall(0.0, c1, OFFICE_W, c1, 12.0),
    ];
    for x in PARTITIONS {
        walls.push(wall(x, 0.0, x, c0, 10.0));
        walls.push(wall(x, c1, x, OFFICE_H, 10.0));
    }

    let beacons = BEACON_X
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let (y, side) = if k % 2 == 0 { (0.0, "south") } else { (OFFICE_H, "north") };
            BeaconNode::new(format!("b{}", k + 1), x, y, format!("{side} wall, room {}", k + 1))
        })
        .collect();

    let mut edges = vec![0.0];
    edges.extend(PARTITIONS);
    edges.push(OFFICE_W);
    let mut manual_regions = Vec::new();
    for w in edges.windows(2) {
        manual_regions.push(rect(w[0], 0.0, w[1], c0));
    }
    for w in edges.windows(2) {
        manual_regions.push(rect(w[0], c1, w[1], OFFICE_H));
    }
    let seg = OFFICE_W / 4.0;
    for k in 0..4 {
        manual_regions.push(rect(k as f64 * seg, c0, (k + 1) as f64 * seg, c1));
    }

    let mid = (c0 + c1) / 2.0;
    Scenario {
        name: "office".into(),
        floorplan: Floorplan {
            name: "office".into(),
            bounds: rect(0.0, 0.0, OFFICE_W, OFFICE_H),
            walls,
        },
        beacons,
        propagation: PropagationParams {
            rss_at_d0: 90.0,
            path_loss_exponent: 3.0,
            shadowing_sigma: 2.0,
            floor_value: 0.0,
            samples_per_reading: 10,
        },
        reference_grid: Placement::Grid { count: 70 },
        test_points: Placement::Random { count: 25 },
        seed: 1,
        segmentation: SegmentationParams::default(),
        manual_regions,
        walk: vec![Point::new(1.0, mid), Point::new(40.5, mid)],
    }
}

pub fn preset_hall() -> Scenario {
    let (w, h) = (30.5, 11.3);
    let inset = 0.5;
    let beacons = vec![
        BeaconNode::new("b1", inset, inset, "south-west corner"),
        BeaconNode::new("b2", w - inset, inset, "south-east corner"),
        BeaconNode::new("b3", w - inset, h - inset, "north-east corner"),
        BeaconNode::new("b4", inset, h - inset, "north-west corner"),
        BeaconNode::new("b5", w / 2.0, h / 2.0, "centre"),
    ];
    Scenario {
        name: "hall".into(),
        floorplan: Floorplan {
            name: "hall".into(),
            bounds: rect(0.0, 0.0, w, h),
            walls: Vec::new(),
        },
        beacons,
        propagation: PropagationParams {
            rss_at_d0: 90.0,
            path_loss_exponent: 2.0,
            shadowing_sigma: 1.0,
            floor_value: 0.0,
            samples_per_reading: 10,
        },
        reference_grid: Placement::Grid { count: 60 },
        test_points: Placement::Random { count: 25 },
        seed: 1,
        segmentation: SegmentationParams::default(),
        manual_regions: Vec::new(),
        walk: vec![
            Point::new(2.0, 2.0),
            Point::new(28.5, 2.0),
            Point::new(28.5, 9.3),
            Point::new(2.0, 9.3),
        ],
    }
}

pub fn preset(name: &str) -> Option<Scenario> {
    match name {
        "office" => Some(preset_office()),
        "hall" => Some(preset_hall()),
        _ => None,
    }
}
