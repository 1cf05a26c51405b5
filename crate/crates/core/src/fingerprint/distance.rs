use std::collections::BTreeSet;

use super::{BeaconId, RawSampleBatch, RssVector};
use crate::error::{Error, Result};

/// Arithmetic mean of each beacon's sample list, summed in ascending order
/// so the result does not depend on sample order.
pub fn average_samples(batch: &RawSampleBatch) -> Result<RssVector> {
    if batch.is_empty() {
        return Err(Error::invalid("sample batch has no readings"));
    }
    let readings = batch
        .samples()
        .iter()
        .map(|(b, list)| {
            let mut sorted = list.clone();
            sorted.sort_by(f64::total_cmp);
            (b.clone(), sorted.iter().sum::<f64>() / sorted.len() as f64)
        })
        .collect();
    RssVector::new(readings)
}

pub fn common_beacons<'a>(a: &'a RssVector, b: &RssVector) -> BTreeSet<&'a BeaconId> {
    a.beacons().filter(|k| b.get(k).is_some()).collect()
}

/// Euclidean distance over the beacons both vectors observe.
pub fn rss_distance(e: &RssVector, r: &RssVector) -> Result<f64> {
    let mut sum = 0.0;
    let mut shared = 0usize;
    for (k, ve) in e.iter() {
        if let Some(vr) = r.get(k) {
            let d = ve - vr;
            sum += d * d;
            shared += 1;
        }
    }
    if shared == 0 {
        return Err(Error::NoOverlap);
    }
    Ok(sum.sqrt())
}
