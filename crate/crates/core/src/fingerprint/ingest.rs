//! Line-oriented raw sample files: `x y beacon_id rss`, `#` starts a comment.

use std::collections::BTreeMap;

use super::{BeaconId, RawSampleBatch};
use crate::error::{Error, Result};
use crate::geometry::Point;

fn field_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Groups readings by exact point coordinates, in order of first appearance.
pub fn parse_samples(text: &str) -> Result<Vec<RawSampleBatch>> {
    let mut batches: Vec<RawSampleBatch> = Vec::new();
    let mut index: BTreeMap<(u64, u64), usize> = BTreeMap::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut fields = Vec::with_capacity(4);
        let mut offset = 0;
        for tok in content.split_whitespace() {
            let col = content[offset..].find(tok).map(|i| i + offset).unwrap_or(offset);
            offset = col + tok.len();
            fields.push((col + 1, tok));
        }
        if fields.len() != 4 {
            return Err(field_error(
                line_no,
                1,
                format!("expected 4 fields `x y beacon_id rss`, found {}", fields.len()),
            ));
        }
        let num = |(col, tok): (usize, &str), what: &str| -> Result<f64> {
            let v: f64 = tok
                .parse()
                .map_err(|_| field_error(line_no, col, format!("{what} `{tok}` is not a number")))?;
            if !v.is_finite() {
                return Err(field_error(line_no, col, format!("{what} must be finite")));
            }
            Ok(v)
        };
        let x = num(fields[0], "x")?;
        let y = num(fields[1], "y")?;
        let beacon = BeaconId::from(fields[2].1);
        let rss = num(fields[3], "rss")?;
        if rss < 0.0 {
            return Err(field_error(line_no, fields[3].0, "rss must be non-negative"));
        }

        let key = (x.to_bits(), y.to_bits());
        let slot = *index.entry(key).or_insert_with(|| {
            batches.push(
                RawSampleBatch::new(Point::new(x, y), BTreeMap::new())
                    .expect("finite point with no samples is valid"),
            );
            batches.len() - 1
        });
        batches[slot].push(beacon, rss)?;
    }
    Ok(batches)
}
