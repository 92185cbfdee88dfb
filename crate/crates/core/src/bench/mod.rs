//! Benchmark harness: suite runs, performance profiles, Pareto frontiers,
//! CG phase histograms and the `α_bal` sensitivity sweep.

mod pareto;
mod profile;
mod suite;
mod sweep;

pub use pareto::{cg_phase_histogram, pareto_frontier, pareto_points, write_pareto_csv};
pub use profile::{dolan_more, dolan_more_matrix, write_profile_csv, Metric, Profile, ProfileCurve};
pub use suite::{read_bench_csv, run_problems, run_suite, write_bench_csv, BenchRow, SuiteOptions, SuiteResult};
pub use sweep::{alpha_sweep, alpha_sweep_problems, write_sweep_csv, SweepCell, SweepResult, SweepRow};

/// Runs `f` over `items` on up to `threads` worker threads; results keep the
/// input order.
pub(crate) fn parallel_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let results = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("worker finished every item")).collect()
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
