//! Distance matrices over sentence-embedding spaces (word Levenshtein,
//! Rips persistence + bottleneck, cosine) and the cross-matrix analyses
//! that compare them (classical MDS, CCA, scaled Hausdorff).

pub mod corpus;
pub mod correlation;
pub mod demo;
pub mod diagram;
pub mod matrices;
pub mod numerics;
pub mod pipeline;
pub mod render;
pub mod report;
pub mod textdist;
pub mod topology;
pub mod vecdist;
