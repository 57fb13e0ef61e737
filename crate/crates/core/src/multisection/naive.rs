//! All `p` threads go to one partition call at a time, depth first.

use super::{Driver, Outcome, PartitionTask};

pub(crate) fn run(driver: &Driver<'_>, root: PartitionTask) -> Outcome {
    let mut leaves = Vec::new();
    let mut stack = vec![root];
    while let Some(task) = stack.pop() {
        if task.depth == 0 {
            leaves.push(task);
            continue;
        }
        let children = driver.split(&task, driver.threads);
        stack.extend(children.into_iter().rev());
    }
    Outcome { leaves, final_idle: None, final_queue_len: None }
}
