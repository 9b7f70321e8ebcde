//! Success probability, time to solution and benchmark suites.

mod suite;
mod tts;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use suite::{
    best_of_k, run_suite, success_probability, write_results_csv, BenchEntry, BenchResult, GroupSummary, Readout,
    Steps, SuccessStats, SuiteOptions, SuiteReport, SuiteSummary, RESULTS_HEADER,
};
pub use tts::{all_hit_lower_bound, median, time_to_solution};

/// A best-known Max-Cut value for a G-set graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublishedTarget {
    pub instance: String,
    pub n: usize,
    /// Random / toroidal / planar and weight signs, e.g. `"R,+"`.
    pub graph_type: String,
    pub best_known_cut: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetFile {
    #[allow(dead_code)]
    objective: String,
    targets: Vec<PublishedTarget>,
}

/// Best-known G-set cuts shipped with the crate, keyed by graph name (`"G1"`, …).
pub fn published_targets() -> &'static BTreeMap<String, PublishedTarget> {
    static CELL: OnceLock<BTreeMap<String, PublishedTarget>> = OnceLock::new();
    CELL.get_or_init(|| {
        let file: TargetFile =
            serde_json::from_str(include_str!("../../data/gset_targets.json")).expect("bundled targets parse");
        file.targets.into_iter().map(|t| (t.instance.clone(), t)).collect()
    })
}
