//! Ground-truth machinery for checking selections: a linear SVM, metrics,
//! the all-subsets wrapper oracle, and synthetic data.

pub mod metrics;
pub mod svm;
pub mod synth;
pub mod wrapper;

pub use metrics::{ConfusionCounts, Metrics};
pub use svm::{train_svm, LinearModel, SvmParams};
pub use synth::{augment_random_columns, generate_synthetic, SynthSpec, RANDOM_BLOCK};
pub use wrapper::{
    parse_labels, selection_quality, wrapper_label, write_labels, LabelRecord, SelectionQuality, SubsetLabel,
};
