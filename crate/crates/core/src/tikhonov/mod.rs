//! Convergence of each model level to its reductions, and the qualitative
//! reproduction runs.

mod figures;
mod permutation;
mod sweep;

pub use figures::{
    run_figure, Expectation, Figure, FigureParameters, FigureRun, FigureVerdicts, VariantVerdict,
    FIGURE_SAMPLE_DT, FIGURE_TRANSIENT_FRACTION,
};
pub use permutation::{aggregate, rhs_permutation, PermutationState, PermutationSystem, MAX_PERMUTATION_SITES};
pub use sweep::{eps_sweep, Epsilon, FullState, Reduction, SweepResult, SweepSpec, T_LAYER_FACTOR};
