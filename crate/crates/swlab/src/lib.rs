//! Check suites, ledgers, snapshot IO and configuration for the `swlab`
//! command line. The numerics live in `swlab-core`.

pub mod config;
pub mod ledger;
pub mod record;
pub mod snapshot;
pub mod suites;

use std::fs;
use std::io;
use std::path::PathBuf;
use std::time::Instant;

use config::{RunConfig, Suite};
use ledger::{LedgerFiles, SuiteOutput};
use record::CheckRecord;
use snapshot::{Snapshot, SnapshotError};
use suites::{SuiteContext, SuiteRun};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("snapshot {path}: {source}")]
    Snapshot { path: PathBuf, source: SnapshotError },
}

/// Runs the selected suites and appends their records to the configured
/// ledger. Suites run on separate threads; their output is merged in
/// dependency order, so the ledger does not depend on scheduling.
pub fn run_suite(cfg: &RunConfig) -> Result<SuiteOutput, RunError> {
    let mut files = match &cfg.out {
        Some(path) => {
            let kinds: Vec<&str> = cfg
                .suites
                .iter()
                .flat_map(|s| s.report_kinds().iter().copied())
                .collect();
            Some(LedgerFiles::open(path, &kinds).map_err(|source| RunError::Io {
                path: path.clone(),
                source,
            })?)
        }
        None => None,
    };
    if let Some(dir) = &cfg.snapshot {
        fs::create_dir_all(dir).map_err(|source| RunError::Io {
            path: dir.clone(),
            source,
        })?;
    }

    let ctx = SuiteContext {
        grid: cfg.grid,
        seeds: cfg.seeds.clone(),
        tol: cfg.tol,
        h_mode: cfg.h_mode,
    };
    let selected: Vec<Suite> = Suite::ALL
        .into_iter()
        .filter(|s| cfg.suites.contains(s))
        .collect();
    let runs: Vec<SuiteRun> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&s| {
                let ctx = &ctx;
                scope.spawn(move || suites::run(s, ctx))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    });

    let mut total = SuiteOutput::default();
    for (suite, run) in selected.iter().zip(runs) {
        total.extend(run.output);
        if let Some(dir) = &cfg.snapshot {
            for (name, snap) in &run.snapshots {
                let path = dir.join(format!("{name}.swrd"));
                let start = Instant::now();
                let back = snap
                    .save(&path)
                    .and_then(|_| Snapshot::load(&path))
                    .map_err(|source| RunError::Snapshot {
                        path: path.clone(),
                        source,
                    })?;
                total.push(
                    CheckRecord::flag(&format!("{suite}.snapshot_roundtrip"), back.bit_identical(snap))
                        .param("name", name.as_str())
                        .timed(start),
                );
            }
        }
    }

    if let (Some(files), Some(path)) = (files.as_mut(), &cfg.out) {
        files.append(&total).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(total)
}
