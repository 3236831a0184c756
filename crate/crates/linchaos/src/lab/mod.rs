//! Experiment harness placeholder.
