//! Built-in inputs so every subcommand can run without external data.

use stiefelgen::dmd::{benchmark_snapshots, SnapshotMatrix};
use stiefelgen::signal::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fixture {
    /// 2000-sample quasi-periodic series with sparse spikes.
    Steam,
    /// 400×200 complex two-mode spatio-temporal field on t ∈ [0, 4π].
    Spatiotemporal,
}

pub fn steam_series() -> TimeSeries {
    let values = (0..2000)
        .map(|i| {
            let t = i as f64;
            let spike = if i % 97 == 0 { 2.0 } else { 0.0 };
            3.0 * (t / 40.0).sin() + 0.8 * (t / 7.0).cos() + 0.3 * (t / 3.1).sin() + spike
        })
        .collect();
    TimeSeries::new(values).expect("fixture is finite")
}

pub fn spatiotemporal() -> SnapshotMatrix {
    benchmark_snapshots()
}
