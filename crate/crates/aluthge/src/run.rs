//! Parallel drivers for suites, grid scans and Mellin grids.

use std::io::Write;
use std::path::Path;

use aluthge_core::families::{family_instance, FamilyGrid, ScanResult};
use aluthge_core::measure::AtomicCharge;
use aluthge_core::mellin::{grid_scan, GridSample, Rect};
use aluthge_core::suites::{trial, SuiteKind, SuiteReport};
use rayon::prelude::*;

/// Runs `f` on a pool with `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}

/// Same report as the sequential runner, computed in parallel.
pub fn run_suite(kind: SuiteKind, trials: u64, seed: u64) -> SuiteReport {
    let outcomes: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|i| trial(kind, seed, i))
        .collect();
    SuiteReport::aggregate(kind, seed, outcomes)
}

pub fn run_scan(grid: &FamilyGrid) -> ScanResult {
    let outcomes: Vec<_> = grid
        .points()
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| (i, family_instance(p)))
        .collect();
    ScanResult::collect(outcomes)
}

/// Row-parallel grid evaluation; same layout as the sequential scan.
pub fn mellin_grid(mu: &AtomicCharge, rect: &Rect, nx: usize, ny: usize) -> Vec<GridSample> {
    if ny <= 1 {
        return grid_scan(mu, rect, nx, ny);
    }
    (0..ny)
        .into_par_iter()
        .flat_map_iter(|iy| {
            let im = rect.im_min + (rect.im_max - rect.im_min) * iy as f64 / (ny - 1) as f64;
            let row = Rect {
                im_min: im,
                im_max: im,
                ..*rect
            };
            grid_scan(mu, &row, nx, 1)
        })
        .collect()
}

/// CSV with header `re,im,abs,arg`.
pub fn write_csv<W: Write>(out: W, samples: &[GridSample]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im", "abs", "arg"])?;
    for s in samples {
        w.write_record([
            s.re.to_string(),
            s.im.to_string(),
            s.abs.to_string(),
            s.arg.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, samples: &[GridSample]) -> csv::Result<()> {
    write_csv(std::fs::File::create(path)?, samples)
}
