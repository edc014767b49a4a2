//! Exhaustive Furstenberg checks, incidence counting with strong sets, and
//! a small-scale replay of the projective-transform pipeline.

mod check;
mod hyperplanar;
mod pipeline;
mod system;

pub use check::{
    check_points, count_incidences, direction_maxima, furstenberg_check, pair_count_certificate,
    FurstenbergReport, PairCountReport,
};
pub use hyperplanar::{classify_hyperplanar, max_coplanar, Hyperplanarity};
pub use pipeline::{
    run_pipeline, Check, PairReport, PipelineConfig, PipelineReport, ProjectionReport, Sizes,
    TransportReport, Triples,
};
pub use system::{refine_s1, refine_s2, IncidenceSystem, S1Report, S2Report};
