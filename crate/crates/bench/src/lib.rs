//! Shared fixtures for the benchmarks.

use fingerzone_core::sim::{self, preset_hall, preset_office, Scenario};
use fingerzone_core::{segment_auto, FingerprintDatabase};

/// Hall survey at the preset seed, segmented automatically.
pub fn segmented_hall() -> (Scenario, FingerprintDatabase) {
    let scen = preset_hall();
    let mut db = sim::survey(&scen).expect("hall survey");
    segment_auto(&mut db, &scen.segmentation, scen.seed).expect("hall segmentation");
    (scen, db)
}

pub fn office() -> Scenario {
    preset_office()
}
