//! Point clouds per (partition, subset) and the six affine-geometry ratios.
//!
//! | ratio | numerator                      | denominator            |
//! |-------|--------------------------------|------------------------|
//! | f1    | affine dim of positive cloud   | ambient dim of positive|
//! | f2    | affine dim of negative cloud   | ambient dim of negative|
//! | f3    | affine dim of positive cloud   | ambient dim of full    |
//! | f4    | affine dim of negative cloud   | ambient dim of full    |
//! | f5    | affine dim of full cloud       | ambient dim of full    |
//! | f6    | samples inside both hulls      | total samples          |
//!
//! A ratio with a zero denominator is 0.

use std::fmt;
use std::str::FromStr;

use crate::dataio::{project, split_by_partition, FeatureSubset, SparseDataset};
use crate::enumeration::ClassPartition;
use crate::error::{Error, Result};
use crate::linalg::{ambient_dimension, AffineHull, RankTolerance};
use crate::stats::zscores;

/// Which pair of hulls the f6 numerator intersects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum F6Mode {
    /// Samples lying in both the positive and the negative class hull.
    #[default]
    ClassVsClass,
    /// Samples lying in the positive hull and the full hull.
    Table1Literal,
}

impl fmt::Display for F6Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            F6Mode::ClassVsClass => "class",
            F6Mode::Table1Literal => "table1",
        })
    }
}

impl FromStr for F6Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "class" | "class_vs_class" => Ok(F6Mode::ClassVsClass),
            "table1" | "table1_literal" => Ok(F6Mode::Table1Literal),
            _ => Err(Error::InvalidParameter(format!("unknown f6 mode `{s}` (class|table1)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointClouds {
    pub positive: Vec<Vec<f64>>,
    pub negative: Vec<Vec<f64>>,
    /// Union of both classes in original row order.
    pub full: Vec<Vec<f64>>,
}

impl PointClouds {
    pub fn new(positive: Vec<Vec<f64>>, negative: Vec<Vec<f64>>, full: Vec<Vec<f64>>) -> Result<Self> {
        if positive.is_empty() {
            return Err(Error::EmptyClass("positive"));
        }
        if negative.is_empty() {
            return Err(Error::EmptyClass("negative"));
        }
        if full.len() != positive.len() + negative.len() {
            return Err(Error::DimensionMismatch {
                expected: positive.len() + negative.len(),
                found: full.len(),
            });
        }
        let n = full[0].len();
        if let Some(p) = positive.iter().chain(&negative).chain(&full).find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        Ok(Self {
            positive,
            negative,
            full,
        })
    }

    /// Clouds for two classes given directly; the full cloud is positives then negatives.
    pub fn from_classes(positive: Vec<Vec<f64>>, negative: Vec<Vec<f64>>) -> Result<Self> {
        let full = positive.iter().chain(&negative).cloned().collect();
        Self::new(positive, negative, full)
    }

    pub fn n_columns(&self) -> usize {
        self.full[0].len()
    }
}

pub fn build_clouds(ds: &SparseDataset, part: &ClassPartition, subset: &FeatureSubset) -> Result<PointClouds> {
    let projected = project(ds, subset)?;
    let (pos, neg) = split_by_partition(&projected, part)?;
    let full: Vec<Vec<f64>> = (0..projected.n_rows()).map(|i| projected.dense_row(i)).collect();
    let positive = pos.iter().map(|&i| full[i].clone()).collect();
    let negative = neg.iter().map(|&i| full[i].clone()).collect();
    PointClouds::new(positive, negative, full)
}

/// Affine and ambient dimensions behind one profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CloudDimensions {
    pub affine_positive: usize,
    pub affine_negative: usize,
    pub affine_full: usize,
    pub ambient_positive: usize,
    pub ambient_negative: usize,
    pub ambient_full: usize,
    /// Numerator of f6.
    pub intersecting: usize,
    pub samples: usize,
}

impl CloudDimensions {
    pub fn ratios(&self) -> [f64; 6] {
        let r = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        [
            r(self.affine_positive, self.ambient_positive),
            r(self.affine_negative, self.ambient_negative),
            r(self.affine_positive, self.ambient_full),
            r(self.affine_negative, self.ambient_full),
            r(self.affine_full, self.ambient_full),
            r(self.intersecting, self.samples),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryProfile {
    /// f1..f6
    pub raw: [f64; 6],
    /// z1..z6, filled by [`standardize_profiles`].
    pub z: Option<[f64; 6]>,
    pub f6_mode: F6Mode,
    pub dims: CloudDimensions,
}

impl GeometryProfile {
    pub fn from_dimensions(dims: CloudDimensions, f6_mode: F6Mode) -> Self {
        Self {
            raw: dims.ratios(),
            z: None,
            f6_mode,
            dims,
        }
    }
}

pub fn compute_profile(clouds: &PointClouds, tol: RankTolerance, f6_mode: F6Mode) -> Result<GeometryProfile> {
    let hull_p = AffineHull::new(&clouds.positive, tol)?;
    let hull_n = AffineHull::new(&clouds.negative, tol)?;
    let hull_f = AffineHull::new(&clouds.full, tol)?;

    // Membership of a point in the hull of a set containing it holds by
    // construction, so only cross-class tests are evaluated.
    let intersecting = match f6_mode {
        F6Mode::ClassVsClass => {
            let mut count = 0;
            for x in &clouds.positive {
                count += usize::from(hull_n.contains(x)?);
            }
            for x in &clouds.negative {
                count += usize::from(hull_p.contains(x)?);
            }
            count
        }
        F6Mode::Table1Literal => {
            let mut count = clouds.positive.len();
            for x in &clouds.negative {
                count += usize::from(hull_p.contains(x)?);
            }
            count
        }
    };

    let dims = CloudDimensions {
        affine_positive: hull_p.dim(),
        affine_negative: hull_n.dim(),
        affine_full: hull_f.dim(),
        ambient_positive: ambient_dimension(&clouds.positive)?,
        ambient_negative: ambient_dimension(&clouds.negative)?,
        ambient_full: ambient_dimension(&clouds.full)?,
        intersecting,
        samples: clouds.full.len(),
    };
    Ok(GeometryProfile::from_dimensions(dims, f6_mode))
}

/// Z-standardizes each ratio across the profiles of one partition.
pub fn standardize_profiles(mut profiles: Vec<GeometryProfile>) -> Result<Vec<GeometryProfile>> {
    if profiles.is_empty() {
        return Err(Error::InvalidParameter("no profiles to standardize".into()));
    }
    let mut z = vec![[0.0; 6]; profiles.len()];
    for i in 0..6 {
        let column: Vec<f64> = profiles.iter().map(|p| p.raw[i]).collect();
        for (zj, v) in z.iter_mut().zip(zscores(&column)) {
            zj[i] = v;
        }
    }
    for (p, zj) in profiles.iter_mut().zip(z) {
        p.z = Some(zj);
    }
    Ok(profiles)
}
