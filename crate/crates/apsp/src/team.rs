//! A fixed team of workers sharing one barrier for the duration of a solve.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Barrier;

/// Handle given to each team member.
pub(crate) struct Worker<'a> {
    pub id: usize,
    pub threads: usize,
    barrier: &'a Barrier,
}

impl Worker<'_> {
    /// Full synchronization point: returns once every member has arrived.
    #[inline]
    pub fn sync(&self) {
        if self.threads > 1 {
            self.barrier.wait();
        }
    }

    /// Contiguous share `[lo, hi)` of `len` items for this worker.
    pub fn static_share(&self, len: usize) -> (usize, usize) {
        (self.id * len / self.threads, (self.id + 1) * len / self.threads)
    }
}

/// Runs `body` on `threads` workers (the caller's thread is worker 0) and
/// returns when all of them have finished.
pub(crate) fn run_team<F>(threads: usize, body: F)
where
    F: Fn(&Worker<'_>) + Sync,
{
    assert!(threads >= 1);
    let barrier = Barrier::new(threads);
    std::thread::scope(|scope| {
        for id in 1..threads {
            let (body, barrier) = (&body, &barrier);
            scope.spawn(move || body(&Worker { id, threads, barrier }));
        }
        body(&Worker {
            id: 0,
            threads,
            barrier: &barrier,
        });
    });
}

/// Shared work counter: workers claim item indices one at a time until the
/// wave is exhausted.
#[derive(Default)]
pub(crate) struct WorkQueue {
    next: AtomicUsize,
}

impl WorkQueue {
    #[inline]
    pub fn claim(&self, len: usize) -> Option<usize> {
        let idx = self.next.fetch_add(1, Ordering::Relaxed);
        (idx < len).then_some(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    #[test]
    fn every_item_claimed_exactly_once() {
        for threads in [1, 2, 4, 7] {
            let queue = WorkQueue::default();
            let seen = Mutex::new(vec![0u32; 500]);
            run_team(threads, |_| {
                while let Some(i) = queue.claim(500) {
                    seen.lock().unwrap()[i] += 1;
                }
            });
            assert!(seen.into_inner().unwrap().iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn barrier_orders_phases() {
        let counter = AtomicUsize::new(0);
        run_team(4, |w| {
            counter.fetch_add(1, Ordering::SeqCst);
            w.sync();
            assert_eq!(counter.load(Ordering::SeqCst), 4);
        });
    }

    #[test]
    fn static_shares_partition() {
        let barrier = Barrier::new(1);
        let mut covered = Vec::new();
        for id in 0..3 {
            let w = Worker {
                id,
                threads: 3,
                barrier: &barrier,
            };
            let (lo, hi) = w.static_share(10);
            covered.extend(lo..hi);
        }
        assert_eq!(covered, (0..10).collect::<Vec<_>>());
    }
}
