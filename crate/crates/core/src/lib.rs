//! Filter-style feature selection for linear SVMs from the affine geometry
//! of class-separated point clouds.
//!
//! For every binary split of the label set and every nonempty combination of
//! feature types, six ratios of affine to ambient dimension (plus the share
//! of samples lying in both class hulls) are computed, z-standardized within
//! the split, and scored by a fixed linear and logistic model. Subsets that
//! pass both models are reported as likely optimal.
//!
//! The [`harness`] module holds the machinery used to check selections
//! against a train-and-test wrapper oracle.

pub mod cli;
pub mod dataio;
pub mod enumeration;
pub mod error;
pub mod format;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod refit;
pub mod report;
pub mod selector;
pub mod stats;

pub use dataio::{
    parse_dataset, project, split_by_partition, FeatureSubset, FeatureTypeLayout, SparseDataset, SparseRow,
};
pub use enumeration::{enumerate_partitions, enumerate_subsets, ClassPartition};
pub use error::{Error, Result};
pub use geometry::{build_clouds, compute_profile, standardize_profiles, F6Mode, GeometryProfile, PointClouds};
pub use linalg::{affine_dimension, ambient_dimension, exact_rank, in_affine_hull, numerical_rank, RankTolerance};
pub use selector::{default_coefficients, predict, select, ModelCoefficients, SelectOptions, SelectionReport, Verdict};
