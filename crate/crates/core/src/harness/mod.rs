//! Scenarios, parameter sweeps and the acceptance battery.
//!
//! A [`Scenario`] is a JSON document naming the perturbation, the frequency,
//! the `ħ` and `t` grids and the truncations. Its SHA-256 hash identifies every
//! artifact produced from it. Sweeps run their `(ħ, t)` cells on the rayon
//! pool and return rows in grid order, so output is independent of the
//! number of workers.

mod battery;
mod scenario;
mod sweeps;

pub use battery::{
    control_perturbation, criterion_ids, run_acceptance, run_criterion, AcceptanceSummary, CriterionResult, Status,
};
pub use scenario::{MeasureSettings, Scenario, SymbolSource, Tolerances, Truncations};
pub use sweeps::{
    classical_sweep, loglog_slope, measure_sweep, residual_sweep, spectrum_sweep, standard_test_symbols, ClassicalRow,
    MeasureRow, ResidualRow, SpectrumRow,
};

#[cfg(test)]
mod tests;
