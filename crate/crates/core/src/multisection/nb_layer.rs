//! Layers without a global barrier.
//!
//! A group of threads drains a set of sibling graphs through a cursor it
//! shares with the other groups working on the same set. Before each
//! partition call the group takes every idle thread from the global pool
//! with one atomic swap. Blocks it produces stay in a group-local set. On
//! the last layer the blocks become leaves and the group's threads go back
//! to the pool; otherwise the group splits into `min(p, |R|)` child groups
//! with budgets from [`share`](super::share), which drain the local set
//! through a fresh cursor.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::Scope;

use super::{share, Driver, Outcome, PartitionTask};

struct Shared<'d, 'a> {
    driver: &'d Driver<'a>,
    idle: AtomicUsize,
    solutions: Mutex<Vec<PartitionTask>>,
}

pub(crate) fn run(driver: &Driver<'_>, root: PartitionTask) -> Outcome {
    if root.depth == 0 {
        return Outcome { leaves: vec![root], final_idle: Some(driver.threads), final_queue_len: None };
    }
    let shared = Shared { driver, idle: AtomicUsize::new(0), solutions: Mutex::new(Vec::new()) };
    std::thread::scope(|s| {
        let set = Arc::new(vec![root]);
        let cursor = Arc::new(AtomicUsize::new(0));
        let shared = &shared;
        s.spawn(move || group(s, shared, set, cursor, driver.threads));
    });
    Outcome {
        final_idle: Some(shared.idle.into_inner()),
        final_queue_len: None,
        leaves: shared.solutions.into_inner().unwrap(),
    }
}

fn group<'scope, 'env>(
    s: &'scope Scope<'scope, 'env>,
    shared: &'env Shared<'env, 'env>,
    set: Arc<Vec<PartitionTask>>,
    cursor: Arc<AtomicUsize>,
    mut threads: usize,
) {
    let mut produced = Vec::new();
    let mut j = cursor.fetch_add(1, Ordering::AcqRel);
    while j < set.len() {
        threads += shared.idle.swap(0, Ordering::AcqRel);
        produced.extend(shared.driver.split(&set[j], threads));
        j = cursor.fetch_add(1, Ordering::AcqRel);
    }

    let last_layer = set.first().is_some_and(|t| t.depth == 1);
    if last_layer || produced.is_empty() {
        shared.solutions.lock().unwrap().extend(produced);
        shared.idle.fetch_add(threads, Ordering::AcqRel);
        return;
    }
    let m = threads.min(produced.len());
    let set = Arc::new(produced);
    let cursor = Arc::new(AtomicUsize::new(0));
    for i in 0..m {
        let (set, cursor) = (Arc::clone(&set), Arc::clone(&cursor));
        let budget = share(threads, m, i + 1);
        s.spawn(move || group(s, shared, set, cursor, budget));
    }
}
