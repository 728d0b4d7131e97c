//! Parallel execution of independent checks with a deterministic merge.
//!
//! SIGMA_FORGE_THREADS caps the worker count; results are collected in job
//! order regardless of scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use sigma_forge_core::report::CheckRecord;

pub type Job = Box<dyn FnOnce() -> Vec<CheckRecord> + Send>;

pub fn thread_cap() -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("SIGMA_FORGE_THREADS") {
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => n.min(available.max(1)),
            _ => available,
        },
        Err(_) => available,
    }
}

pub fn run_jobs(jobs: Vec<Job>) -> Vec<CheckRecord> {
    let threads = thread_cap().min(jobs.len()).max(1);
    if threads == 1 {
        return jobs.into_iter().flat_map(|j| j()).collect();
    }
    let slots: Vec<Mutex<Option<Vec<CheckRecord>>>> =
        jobs.iter().map(|_| Mutex::new(None)).collect();
    let queue: Vec<Mutex<Option<Job>>> = jobs.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= queue.len() {
                    break;
                }
                let job = queue[idx].lock().unwrap().take();
                if let Some(job) = job {
                    let result = job();
                    *slots[idx].lock().unwrap() = Some(result);
                }
            });
        }
    });
    slots
        .into_iter()
        .flat_map(|slot| slot.into_inner().unwrap().unwrap_or_default())
        .collect()
}
