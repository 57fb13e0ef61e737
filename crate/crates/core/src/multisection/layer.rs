//! One hierarchy layer at a time with a barrier between layers.
//!
//! `min(p, |S|)` workers claim graphs of the current layer through a shared
//! fetch-and-add cursor. Graph `j` of `m` is partitioned with the budget
//! [`share`](super::share)`(p, m, j)`, and its children go into slot `j` of
//! the pre-allocated next layer, so no two workers ever write the same slot.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use super::{share, Driver, LayerTrace, Outcome, PartitionTask};

pub(crate) fn run(driver: &Driver<'_>, root: PartitionTask) -> Outcome {
    let p = driver.threads;
    let mut layer = vec![root];
    while layer.first().is_some_and(|t| t.depth > 0) {
        let m = layer.len();
        let workers = p.min(m);
        let cursor = AtomicUsize::new(0);
        let claims = AtomicUsize::new(0);
        let slots: Vec<OnceLock<Vec<PartitionTask>>> = (0..m).map(|_| OnceLock::new()).collect();
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let j = cursor.fetch_add(1, Ordering::AcqRel);
                    claims.fetch_add(1, Ordering::Relaxed);
                    if j >= m {
                        break;
                    }
                    let children = driver.split(&layer[j], share(p, m, j + 1));
                    slots[j].set(children).expect("each slot is claimed once");
                });
            }
        });
        driver.probe.layer(LayerTrace { tasks: m, workers, claims: claims.into_inner() });
        layer = slots.into_iter().flat_map(|slot| slot.into_inner().unwrap_or_default()).collect();
    }
    Outcome { leaves: layer, final_idle: None, final_queue_len: None }
}
