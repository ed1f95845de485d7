//! Browser bindings for the analysis pipeline.
