//! A master thread hands pending graphs, largest first, to spawned tasks.
//!
//! The queue and the idle-thread count `p_A` live under one mutex. The
//! master waits until a graph is queued and a thread is idle, then in one
//! critical section computes `p_t = ceil(p_A / |Q|)`, pops the largest
//! graph and subtracts `p_t` from `p_A`. The spawned task partitions its
//! graph and, under the same mutex, pushes the children (or records the
//! leaves) and returns its `p_t` threads. The master spawns one task per
//! round and stops once the queue is empty and all `p` threads are idle.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::sync::{Condvar, Mutex};

use super::{Driver, Outcome, PartitionTask};

/// What "largest graph" means for queue ordering.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QueueOrder {
    #[default]
    Vertices,
    Edges,
}

struct Entry {
    size: usize,
    /// Insertion sequence; earlier entries win ties.
    seq: Reverse<u64>,
    task: PartitionTask,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.size, self.seq).cmp(&(other.size, other.seq))
    }
}

/// Size-ordered queue of pending graphs.
pub(crate) struct TaskQueue {
    heap: BinaryHeap<Entry>,
    next_seq: u64,
    order: QueueOrder,
}

impl TaskQueue {
    pub fn new(order: QueueOrder) -> Self {
        TaskQueue { heap: BinaryHeap::new(), next_seq: 0, order }
    }

    pub fn push(&mut self, task: PartitionTask) {
        let size = match self.order {
            QueueOrder::Vertices => task.graph.n(),
            QueueOrder::Edges => task.graph.num_edges(),
        };
        self.heap.push(Entry { size, seq: Reverse(self.next_seq), task });
        self.next_seq += 1;
    }

    pub fn pop(&mut self) -> Option<PartitionTask> {
        self.heap.pop().map(|e| e.task)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

struct State {
    queue: TaskQueue,
    idle: usize,
    solutions: Vec<PartitionTask>,
}

pub(crate) fn run(driver: &Driver<'_>, root: PartitionTask, order: QueueOrder) -> Outcome {
    let p = driver.threads;
    let mut queue = TaskQueue::new(order);
    let mut solutions = Vec::new();
    if root.depth == 0 {
        solutions.push(root);
    } else {
        queue.push(root);
    }
    let state = Mutex::new(State { queue, idle: p, solutions });
    let changed = Condvar::new();

    std::thread::scope(|s| loop {
        let mut st = state.lock().unwrap();
        while !(st.queue.is_empty() && st.idle == p) && (st.queue.is_empty() || st.idle == 0) {
            st = changed.wait(st).unwrap();
        }
        if st.queue.is_empty() && st.idle == p {
            break;
        }
        let threads = st.idle.div_ceil(st.queue.len());
        let task = st.queue.pop().expect("queue is non-empty");
        st.idle -= threads;
        drop(st);

        let (state, changed) = (&state, &changed);
        s.spawn(move || {
            let children = driver.split(&task, threads);
            let mut st = state.lock().unwrap();
            if task.depth == 1 {
                st.solutions.extend(children);
            } else {
                for child in children {
                    st.queue.push(child);
                }
            }
            st.idle += threads;
            drop(st);
            changed.notify_all();
        });
    });

    let st = state.into_inner().unwrap();
    Outcome { final_idle: Some(st.idle), final_queue_len: Some(st.queue.len()), leaves: st.solutions }
}
