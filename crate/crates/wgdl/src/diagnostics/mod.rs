//! Functionals monitored along a run: conserved quantities, localized and
//! `L^q` norms, the interaction Morawetz action and its derivative, mixed
//! spacetime norms, decay statistics and scattering residuals.

mod conserved;
mod cube;
mod decay;
mod morawetz;
mod record;
mod scattering;
mod spacetime;

pub use conserved::{energy, energy_parts, mass, power_integral, EnergyParts};
pub use cube::{cube_half_cells, sup_cube_mass, CubeMass};
pub use decay::{
    decay_report, focusing_h2_bound, gn_ratio, kendall_trend, morawetz_lhs_accumulate, DecayReport, FocusingBound, MorawetzLhs,
    QSeries,
};
pub use morawetz::{
    marginal_density, marginals, morawetz_action, morawetz_action_bruteforce, morawetz_rhs_terms, Convolver,
    Marginals, MorawetzKernel, MorawetzRhsTerms, BRUTEFORCE_MAX_EUCLID, BRUTEFORCE_MAX_POINTS,
};
pub use record::{csv_header, csv_row, DiagnosticsPlan, DiagnosticsRecord, KeyedValues, Monitor};
pub use scattering::{pullback, scattering_residual};
pub use spacetime::{spacetime_norm_accumulate, Snapshot, SpacetimeAccumulator};
