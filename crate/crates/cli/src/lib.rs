//! Model files, the analysis pipeline and report emission for the
//! `ssgraph` command line tool.

pub mod analysis;
pub mod format;

pub use analysis::{run_analysis, AnalysisParams, AnalysisReport, ElementSpec};
pub use format::{emit_model, parse_model, LoadError, Model, ModelFile};
