//! Fixed record set shared by the harness tests and the acceptance suite.

#![allow(dead_code)]

use std::path::PathBuf;

use univec::parallel::PinStatus;
use univec_bench::{BenchRecord, BenchVariant, CellOutcome, Timing, Workload};

fn timed(workload: Workload, variant: BenchVariant, min_time: f64) -> BenchRecord {
    BenchRecord {
        workload,
        variant,
        repetitions: 3,
        outcome: CellOutcome::Timed(Timing {
            min_time,
            samples: vec![min_time * 1.1, min_time, min_time * 1.3],
            loops: 1,
        }),
        emulated: false,
        pinning: PinStatus::Disabled,
    }
}

/// A fixed record set covering both resolutions, all three variant
/// columns, a failed cell and a missing cell.
pub fn fixture() -> Vec<BenchRecord> {
    let times = [
        (1920, 1080, 3, [1.26, 0.69, 0.76]),
        (1920, 1080, 5, [2.61, 1.42, 1.79]),
        (3840, 2160, 3, [5.42, 2.97, 3.27]),
        (3840, 2160, 13, [25.10, 23.33, 22.48]),
    ];
    let mut out = Vec::new();
    for (w, h, k, t) in times {
        let vs = [BenchVariant::SeqScalar, BenchVariant::SeqVector, BenchVariant::Optim];
        for (v, time) in vs.into_iter().zip(t) {
            out.push(timed(Workload::filter(w, h, k), v, time));
        }
    }
    out[4].outcome = CellOutcome::Failed("first mismatch at (x=1, y=2, c=0): expected 3, got 4".into());
    out.remove(8);
    out
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}
