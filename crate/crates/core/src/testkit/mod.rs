//! Test support shipped with the library: reference fixtures, a seeded
//! generator of valid instances and an end-to-end decoding simulator.

mod fixtures;
mod random;
mod simulate;

pub use fixtures::{
    edges_digest, fixture_names, load_fixture, load_fixtures, parse_fixture, run_fixture, Expected, ExpectedRow,
    Fixture, FixtureOutcome, Structure,
};
pub use random::{random_oic, GeneratedOic, Profile};
pub use simulate::{
    simulate, DecodeFailure, SimulationMode, SimulationReport, EXHAUSTIVE_MAX_K, MAX_RECORDED_FAILURES,
};
