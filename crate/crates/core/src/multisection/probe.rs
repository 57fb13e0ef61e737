//! Counters shared by all strategies. They observe scheduling without
//! influencing it.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// One partition call as seen by the driver.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CallRecord {
    pub depth: usize,
    pub block_offset: usize,
    pub budget: usize,
}

/// Claims made on one layer cursor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerTrace {
    pub tasks: usize,
    pub workers: usize,
    pub claims: usize,
}

#[derive(Debug, Default)]
pub struct Probe {
    active_threads: AtomicUsize,
    max_active_threads: AtomicUsize,
    active_calls: AtomicUsize,
    max_active_calls: AtomicUsize,
    balance_risks: AtomicUsize,
    calls: Mutex<Vec<CallRecord>>,
    layers: Mutex<Vec<LayerTrace>>,
}

pub(crate) struct CallGuard<'p> {
    probe: &'p Probe,
    budget: usize,
}

impl Drop for CallGuard<'_> {
    fn drop(&mut self) {
        self.probe.active_threads.fetch_sub(self.budget, Ordering::SeqCst);
        self.probe.active_calls.fetch_sub(1, Ordering::SeqCst);
    }
}

impl Probe {
    pub(crate) fn enter(&self, record: CallRecord) -> CallGuard<'_> {
        let budget = record.budget;
        let threads = self.active_threads.fetch_add(budget, Ordering::SeqCst) + budget;
        self.max_active_threads.fetch_max(threads, Ordering::SeqCst);
        let calls = self.active_calls.fetch_add(1, Ordering::SeqCst) + 1;
        self.max_active_calls.fetch_max(calls, Ordering::SeqCst);
        self.calls.lock().unwrap().push(record);
        CallGuard { probe: self, budget }
    }

    pub(crate) fn balance_risk(&self) {
        self.balance_risks.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn layer(&self, trace: LayerTrace) {
        self.layers.lock().unwrap().push(trace);
    }

    pub fn max_active_threads(&self) -> usize {
        self.max_active_threads.load(Ordering::SeqCst)
    }

    pub fn max_active_calls(&self) -> usize {
        self.max_active_calls.load(Ordering::SeqCst)
    }

    pub fn balance_risks(&self) -> usize {
        self.balance_risks.load(Ordering::SeqCst)
    }

    /// Calls sorted by (depth, block offset).
    pub fn calls(&self) -> Vec<CallRecord> {
        let mut calls = self.calls.lock().unwrap().clone();
        calls.sort();
        calls
    }

    pub fn layers(&self) -> Vec<LayerTrace> {
        self.layers.lock().unwrap().clone()
    }
}
