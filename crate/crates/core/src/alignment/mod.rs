//! Segments, guess enumeration, per-component scale factors and
//! representative selection.
//!
//! Everything here works in multiplier space: a value `x` stands for the
//! interval `x · tmin`, so the same guesses serve every `tmin` candidate.

mod components;
mod guesses;
mod representatives;
mod segments;

pub use components::{
    betas_within_bound, feasibility_interval, propagate_betas, solve_components, Betas,
    ComponentSolution,
};
pub use guesses::{
    admissible_labels, enumerate_guesses, AlignmentGuess, GuessStream, LabeledEdge,
    MAX_ENUMERATED_SEGMENTS,
};
pub use representatives::{choose_representatives, is_aligned, RepresentativeSet};
pub use segments::{
    build_segments, enumerate_tmin, psi_value, validate_epsilon, PsiBound, SegmentLadder,
};
