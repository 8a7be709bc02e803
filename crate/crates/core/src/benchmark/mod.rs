//! Manufactured bang-bang benchmark, its convergence study and the
//! measure-condition diagnostic.

mod kappa;
mod norms;
mod output;
mod problem;
mod study;

pub use kappa::{analytic_bstar_pbar, default_alphas, inactive_set_measure, measure_diagnostic, KappaReport};
pub use norms::{control_error_norms, field_error_norms, Factors, FieldView, Pointwise, Separable, SpaceTimeFunction};
pub use output::{
    csv_header, read_table, table_from_csv, table_to_csv, table_to_markdown, trajectory_csv, write_file,
};
pub use problem::{g1, BenchmarkProblem, DataPairing, G1_NORM_SQ};
pub use study::{
    coupled_alpha, coupled_time_steps, eoc, run_convergence_study, run_level, run_study, EocRow, EocTable,
    LevelErrors, LevelOutcome, StudyConfig, ERROR_COLUMNS,
};
