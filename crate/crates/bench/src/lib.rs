//! Shared fixtures for the benchmarks.

use pbr_core::dataio::{synth_dirichlet, SynthParams};
use pbr_core::Dataset;

/// Normalized synthetic histograms, `per_class` rows in each of three classes.
pub fn histograms(dims: usize, per_class: usize) -> Dataset {
    synth_dirichlet(&SynthParams {
        classes: 3,
        dims,
        per_class,
        concentration: 20.0,
        separation: 1.0,
        seed: 1,
    })
    .and_then(|d| d.normalized())
    .expect("valid synthetic parameters")
}
