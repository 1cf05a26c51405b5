use std::convert::Infallible;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::response::sse::Event;
use fingerzone_core::estimator::{estimate_3nnf, estimate_tracked, EstimatorParams, TrackingParams};
use fingerzone_core::sim::WalkStep;
use fingerzone_core::{EstimationResult, FingerprintDatabase, Point, SubareaId};
use futures::Stream;
use serde::Serialize;
use tokio::sync::watch;

#[derive(Debug, Clone, Serialize)]
pub struct StepEvent {
    pub step: usize,
    pub estimate: Option<Point>,
    pub subarea: Option<SubareaId>,
    pub candidates: usize,
    pub fallback: bool,
    pub true_position: Point,
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WalkSummary {
    pub steps: usize,
    pub located: usize,
    pub mean_error: Option<f64>,
    pub candidates_mean: Option<f64>,
}

#[derive(Debug, Clone)]
enum Item {
    Step(StepEvent),
    Summary(WalkSummary),
}

impl Item {
    fn to_event(&self, debug: bool) -> Event {
        let (name, mut data) = match self {
            Item::Step(s) => ("step", serde_json::to_value(s).expect("event serializes")),
            Item::Summary(s) => ("summary", serde_json::to_value(s).expect("summary serializes")),
        };
        if !debug {
            if let Some(obj) = data.as_object_mut() {
                obj.remove("true_position");
                obj.remove("error");
            }
        }
        Event::default().event(name).data(data.to_string())
    }
}

/// Events of one walk, appended by the stepper and replayed to every subscriber.
pub struct WalkFeed {
    pub id: u64,
    items: Mutex<Vec<Item>>,
    done: AtomicBool,
    tick: watch::Sender<usize>,
}

impl WalkFeed {
    pub fn new(id: u64) -> Self {
        WalkFeed {
            id,
            items: Mutex::new(Vec::new()),
            done: AtomicBool::new(false),
            tick: watch::channel(0).0,
        }
    }

    pub fn is_done(&self) -> bool {
        self.done.load(Ordering::SeqCst)
    }

    fn push(&self, item: Item, last: bool) {
        let len = {
            let mut items = self.items.lock().unwrap_or_else(|e| e.into_inner());
            items.push(item);
            items.len()
        };
        if last {
            self.done.store(true, Ordering::SeqCst);
        }
        self.tick.send_replace(len);
    }

    fn get(&self, i: usize) -> Option<Item> {
        self.items.lock().unwrap_or_else(|e| e.into_inner()).get(i).cloned()
    }
}

/// Snapshot of the database taken when the walk starts, plus the sampled path.
pub struct WalkPlan {
    db: FingerprintDatabase,
    steps: Vec<WalkStep>,
}

impl WalkPlan {
    pub fn new(db: FingerprintDatabase, steps: Vec<WalkStep>) -> Self {
        WalkPlan { db, steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

fn estimate(plan: &WalkPlan, tp: &TrackingParams, prev: &Option<EstimationResult>, s: &WalkStep) -> fingerzone_core::Result<EstimationResult> {
    match prev {
        Some(p) => estimate_tracked(&plan.db, &s.vector, p, tp),
        None => {
            let mut r = estimate_3nnf(&plan.db, &s.vector, &EstimatorParams { margin: tp.margin })?;
            r.candidates = plan.db.reference_points().len();
            Ok(r)
        }
    }
}

/// Steps the walk at `cadence`, estimating each position with tracking.
pub async fn run(feed: Arc<WalkFeed>, plan: WalkPlan, cadence: Duration) {
    let tp = TrackingParams::for_database(&plan.db, EstimatorParams::default().margin);
    let mut prev: Option<EstimationResult> = None;
    let (mut errors, mut cands) = (Vec::new(), Vec::new());
    for (i, s) in plan.steps.iter().enumerate() {
        if i > 0 && !cadence.is_zero() {
            tokio::time::sleep(cadence).await;
        }
        let event = match estimate(&plan, &tp, &prev, s) {
            Ok(r) => {
                let err = r.position.distance(&s.position);
                errors.push(err);
                cands.push(r.candidates as f64);
                let ev = StepEvent {
                    step: s.t,
                    estimate: Some(r.position),
                    subarea: r.subarea.clone(),
                    candidates: r.candidates,
                    fallback: r.fallback_used,
                    true_position: s.position,
                    error: Some(err),
                    message: None,
                };
                prev = Some(r);
                ev
            }
            Err(e) => {
                prev = None;
                StepEvent {
                    step: s.t,
                    estimate: None,
                    subarea: None,
                    candidates: 0,
                    fallback: false,
                    true_position: s.position,
                    error: None,
                    message: Some(e.to_string()),
                }
            }
        };
        feed.push(Item::Step(event), false);
    }
    let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    let summary = WalkSummary {
        steps: plan.steps.len(),
        located: errors.len(),
        mean_error: mean(&errors),
        candidates_mean: mean(&cands),
    };
    feed.push(Item::Summary(summary), true);
}

/// Server-sent events for `feed`, from its first event to the summary.
pub fn events(feed: Arc<WalkFeed>, debug: bool) -> impl Stream<Item = Result<Event, Infallible>> {
    let rx = feed.tick.subscribe();
    futures::stream::unfold((feed, 0usize, rx), move |(feed, i, mut rx)| async move {
        loop {
            rx.borrow_and_update();
            if let Some(item) = feed.get(i) {
                return Some((Ok(item.to_event(debug)), (feed, i + 1, rx)));
            }
            if feed.is_done() || rx.changed().await.is_err() {
                return None;
            }
        }
    })
}
