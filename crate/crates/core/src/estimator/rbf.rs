//! Gaussian radial-basis network mapping RSS vectors to coordinates.
//!
//! One kernel per training point, width = median distance to its three
//! nearest training vectors (at least `min_width`). Output weights and bias
//! minimise `|Phi w + b - y|^2 + lambda |w|^2`. The bias is eliminated by
//! centring, and the centred system is solved through its SVD, which at
//! `lambda = 0` gives the minimum-norm exact interpolant.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{EstimationResult, Method};
use crate::error::{Error, Result};
use crate::fingerprint::{BeaconId, FingerprintDatabase, RssVector};
use crate::geometry::{Point, Rect};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbfParams {
    pub lambda: f64,
    pub width_neighbors: usize,
    pub min_width: f64,
}

impl Default for RbfParams {
    fn default() -> Self {
        RbfParams {
            lambda: 1e-3,
            width_neighbors: 3,
            min_width: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RbfModel {
    /// Input axis: readings are laid out in this beacon order, missing ones as 0.
    pub beacons: Vec<BeaconId>,
    pub centers: Vec<Vec<f64>>,
    pub widths: Vec<f64>,
    /// One `[wx, wy]` per center followed by the bias row.
    pub weights: Vec<[f64; 2]>,
    pub regularization: f64,
    pub bounds: Option<Rect>,
}

fn dense(beacons: &[BeaconId], v: &RssVector) -> Vec<f64> {
    beacons.iter().map(|b| v.get(b).unwrap_or(0.0)).collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

impl RbfModel {
    fn activations(&self, x: &[f64]) -> Vec<f64> {
        self.centers
            .iter()
            .zip(&self.widths)
            .map(|(c, w)| (-sq_dist(x, c) / (2.0 * w * w)).exp())
            .collect()
    }

    pub fn predict_raw(&self, v: &RssVector) -> Point {
        let phi = self.activations(&dense(&self.beacons, v));
        let bias = self.weights[self.centers.len()];
        let (mut x, mut y) = (bias[0], bias[1]);
        for (a, w) in phi.iter().zip(&self.weights) {
            x += a * w[0];
            y += a * w[1];
        }
        Point::new(x, y)
    }

    /// Kernel matrix over the training centers: `phi[i][j]` is kernel `j`
    /// evaluated at center `i`.
    pub fn design_matrix(&self) -> Vec<Vec<f64>> {
        self.centers.iter().map(|c| self.activations(c)).collect()
    }
}

pub fn train_rbf(db: &FingerprintDatabase, params: &RbfParams) -> Result<RbfModel> {
    let pts = db.reference_points();
    let m = pts.len();
    if m < 4 {
        return Err(Error::invalid(format!("RBF training needs at least 4 reference points, found {m}")));
    }
    if !(params.lambda.is_finite() && params.lambda >= 0.0) {
        return Err(Error::invalid("lambda must be finite and non-negative"));
    }
    if params.width_neighbors == 0 || !(params.min_width > 0.0) {
        return Err(Error::invalid("width rule needs at least one neighbour and a positive floor"));
    }

    let beacons: Vec<BeaconId> = if db.beacons().is_empty() {
        let mut all: Vec<BeaconId> = pts.iter().flat_map(|p| p.vector.beacons().cloned()).collect();
        all.sort();
        all.dedup();
        all
    } else {
        db.beacons().iter().map(|b| b.id.clone()).collect()
    };
    let centers: Vec<Vec<f64>> = pts.iter().map(|p| dense(&beacons, &p.vector)).collect();

    let k = params.width_neighbors.min(m - 1);
    let widths: Vec<f64> = (0..m)
        .map(|i| {
            let mut d: Vec<f64> = (0..m)
                .filter(|&j| j != i)
                .map(|j| sq_dist(&centers[i], &centers[j]).sqrt())
                .collect();
            d.sort_by(f64::total_cmp);
            d.truncate(k);
            median(d).max(params.min_width)
        })
        .collect();

    let mut model = RbfModel {
        beacons,
        centers,
        widths,
        weights: Vec::new(),
        regularization: params.lambda,
        bounds: db.bounds(),
    };
    let phi = DMatrix::from_fn(m, m, |i, j| {
        let w = model.widths[j];
        (-sq_dist(&model.centers[i], &model.centers[j]) / (2.0 * w * w)).exp()
    });
    let col_mean: DVector<f64> = DVector::from_fn(m, |j, _| phi.column(j).mean());
    let mut centred = phi.clone();
    for j in 0..m {
        let mu = col_mean[j];
        centred.column_mut(j).add_scalar_mut(-mu);
    }
    let targets = DMatrix::from_fn(m, 2, |i, c| if c == 0 { pts[i].position.x } else { pts[i].position.y });
    let y_mean = [targets.column(0).mean(), targets.column(1).mean()];
    let mut yc = targets.clone();
    for c in 0..2 {
        yc.column_mut(c).add_scalar_mut(-y_mean[c]);
    }

    let svd = centred.svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let s = &svd.singular_values;
    let s_max = s.max();
    let tol = s_max * m as f64 * f64::EPSILON;
    let lambda = params.lambda;
    if lambda == 0.0 {
        let rank = s.iter().filter(|&&x| x > tol).count();
        if rank < m - 1 {
            return Err(Error::Numerical(format!(
                "kernel system is singular (rank {rank} < {}); train with lambda > 0",
                m - 1
            )));
        }
    }
    let gain = DVector::from_fn(s.len(), |i, _| {
        let si = s[i];
        if lambda == 0.0 {
            if si > tol {
                1.0 / si
            } else {
                0.0
            }
        } else {
            si / (si * si + lambda)
        }
    });
    let uty = u.transpose() * &yc;
    let scaled = DMatrix::from_fn(uty.nrows(), 2, |i, c| gain[i] * uty[(i, c)]);
    let w = vt.transpose() * scaled;

    let mut weights: Vec<[f64; 2]> = (0..m).map(|i| [w[(i, 0)], w[(i, 1)]]).collect();
    let bias = [
        y_mean[0] - col_mean.dot(&w.column(0)),
        y_mean[1] - col_mean.dot(&w.column(1)),
    ];
    if !(bias[0].is_finite() && bias[1].is_finite()) || weights.iter().any(|r| !(r[0].is_finite() && r[1].is_finite())) {
        return Err(Error::Numerical("RBF weights are not finite; increase lambda".into()));
    }
    weights.push(bias);
    model.weights = weights;
    Ok(model)
}

/// Predicts a position, clamped to the floor bounds; clamping sets the
/// fallback flag.
pub fn estimate_rbf(model: &RbfModel, v: &RssVector) -> EstimationResult {
    let raw = model.predict_raw(v);
    let (position, clamped) = match model.bounds {
        Some(b) => {
            let p = Point::new(raw.x.clamp(b.x0, b.x1), raw.y.clamp(b.y0, b.y1));
            (p, p != raw)
        }
        None => (raw, false),
    };
    EstimationResult {
        position,
        subarea: None,
        neighbors: Vec::new(),
        method: Method::Rbf,
        fallback_used: clamped,
        candidates: model.centers.len(),
    }
}
