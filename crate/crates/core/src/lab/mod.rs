//! Numerical experiments composed from the other modules. Every experiment is
//! a pure function of its configuration; ensemble members draw their data from
//! member seeds derived from the configured base seed.

mod continuity;
mod embedding;
mod ensemble;
mod smoothing;
mod strichartz;

pub use continuity::{uniform_continuity_experiment, ContinuityReport, ContinuityRow};
pub use embedding::{embedding_experiment, EmbeddingReport};
pub use ensemble::{
    highlow_experiment, HighLowExperimentConfig, HighLowExperimentReport, MemberOutcome,
    StepQuantiles, SweepPoint,
};
pub use smoothing::{
    smoothing_experiment, ModeProfile, SmoothingConfig, SmoothingReport, SobolevMean,
};
pub use strichartz::{
    free_trajectory, strichartz_experiment, StrichartzConfig, StrichartzReport, StrichartzSample,
    STRICHARTZ_B,
};
