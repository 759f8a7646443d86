//! Fixed regression models over standardized geometry profiles, and the
//! end-to-end selection pass.

use std::io::{BufRead, Write};
use std::time::Duration;

use rayon::prelude::*;

use crate::dataio::{FeatureSubset, SparseDataset};
use crate::enumeration::{enumerate_partitions, enumerate_subsets, ClassPartition};
use crate::error::{Error, Result};
use crate::format::fmt_value;
use crate::geometry::{build_clouds, compute_profile, standardize_profiles, F6Mode, GeometryProfile};
use crate::linalg::RankTolerance;

/// Intercept plus one weight per ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub intercept: f64,
    pub weights: [f64; 6],
}

impl Coefficients {
    pub fn eval(&self, z: &[f64; 6]) -> f64 {
        self.intercept + self.weights.iter().zip(z).map(|(b, x)| b * x).sum::<f64>()
    }

    fn as_array(&self) -> [f64; 7] {
        let mut out = [0.0; 7];
        out[0] = self.intercept;
        out[1..].copy_from_slice(&self.weights);
        out
    }

    fn from_slice(v: &[f64]) -> Self {
        let mut weights = [0.0; 6];
        weights.copy_from_slice(&v[1..7]);
        Self {
            intercept: v[0],
            weights,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelCoefficients {
    pub logistic: Coefficients,
    pub linear: Coefficients,
}

/// The built-in models: a logistic classifier for optimal/suboptimal and a
/// linear model of standardized accuracy. The linear model has no f1, f2 or
/// f6 term.
pub fn default_coefficients() -> ModelCoefficients {
    ModelCoefficients {
        logistic: Coefficients {
            intercept: -0.64063267,
            weights: [0.15706603, 0.1327297, -0.03350878, -0.15182902, 0.19548473, -0.68787718],
        },
        linear: Coefficients {
            intercept: -1.039011e-12,
            weights: [0.0, 0.0, 0.09114375, -0.01223389, -0.0200644, 0.0],
        },
    }
}

impl Default for ModelCoefficients {
    fn default() -> Self {
        default_coefficients()
    }
}

impl ModelCoefficients {
    /// Reads `logistic|linear<TAB>b0<TAB>...<TAB>b6` lines. Both models must
    /// be present.
    pub fn parse(reader: impl BufRead) -> Result<Self> {
        let mut logistic = None;
        let mut linear = None;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 8 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!(
                        "expected a model name and 7 coefficients, found {} fields",
                        fields.len()
                    ),
                });
            }
            let values = fields[1..]
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::Parse {
                            line: lineno,
                            msg: format!("invalid coefficient `{s}`"),
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            let slot = match fields[0] {
                "logistic" => &mut logistic,
                "linear" => &mut linear,
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("unknown model `{other}`"),
                    });
                }
            };
            if slot.is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("duplicate `{}` line", fields[0]),
                });
            }
            *slot = Some(Coefficients::from_slice(&values));
        }
        match (logistic, linear) {
            (Some(logistic), Some(linear)) => Ok(Self { logistic, linear }),
            _ => Err(Error::Parse {
                line: 0,
                msg: "coefficients file needs both `logistic` and `linear` lines".into(),
            }),
        }
    }

    pub fn write(&self, mut w: impl Write) -> std::io::Result<()> {
        for (name, c) in [("logistic", &self.logistic), ("linear", &self.linear)] {
            let vals: Vec<String> = c.as_array().iter().map(|&v| fmt_value(v)).collect();
            writeln!(w, "{name}\t{}", vals.join("\t"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub lin_pred: f64,
    pub log_pred: f64,
    pub optimal: bool,
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Evaluates both models on a z-score vector. A subset is optimal only when
/// the linear prediction is strictly positive and the logistic prediction is
/// at least one half.
pub fn predict_z(z: &[f64; 6], coeffs: &ModelCoefficients) -> Verdict {
    let lin_pred = coeffs.linear.eval(z);
    let log_pred = sigmoid(coeffs.logistic.eval(z));
    Verdict {
        lin_pred,
        log_pred,
        optimal: lin_pred > 0.0 && log_pred >= 0.5,
    }
}

pub fn predict(profile: &GeometryProfile, coeffs: &ModelCoefficients) -> Result<Verdict> {
    let z = profile.z.as_ref().ok_or(Error::Unstandardized)?;
    Ok(predict_z(z, coeffs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectOptions {
    pub tolerance: RankTolerance,
    pub f6_mode: F6Mode,
}

impl Default for SelectOptions {
    fn default() -> Self {
        Self {
            tolerance: RankTolerance::default(),
            f6_mode: F6Mode::ClassVsClass,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetResult {
    pub subset: FeatureSubset,
    pub profile: GeometryProfile,
    pub verdict: Verdict,
    /// Time spent building clouds and computing the profile.
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    pub partition: ClassPartition,
    pub results: Vec<SubsetResult>,
}

impl PartitionReport {
    pub fn selected(&self) -> impl Iterator<Item = &SubsetResult> {
        self.results.iter().filter(|r| r.verdict.optimal)
    }

    pub fn elapsed(&self) -> Duration {
        self.results.iter().map(|r| r.elapsed).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelectionReport {
    pub partitions: Vec<PartitionReport>,
}

impl SelectionReport {
    pub fn verdict_count(&self) -> usize {
        self.partitions.iter().map(|p| p.results.len()).sum()
    }
}

/// Wall clock that reads zero on targets without one (browser wasm).
struct Stopwatch {
    #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Self {
            #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> Duration {
        #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
        return self.start.elapsed();
        #[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
        Duration::ZERO
    }
}

/// Profiles every (partition, subset) pair, standardizes within each
/// partition and applies both models.
///
/// Profiles are computed in parallel on the current rayon pool; output order
/// follows the enumeration order regardless.
pub fn select(ds: &SparseDataset, coeffs: &ModelCoefficients, opts: SelectOptions) -> Result<SelectionReport> {
    let partitions = enumerate_partitions(&ds.label_set())?;
    let subsets = enumerate_subsets(ds.layout())?;
    let jobs: Vec<(usize, usize)> = (0..partitions.len())
        .flat_map(|p| (0..subsets.len()).map(move |s| (p, s)))
        .collect();
    let mut profiles = jobs
        .par_iter()
        .map(|&(p, s)| {
            let watch = Stopwatch::start();
            let clouds = build_clouds(ds, &partitions[p], &subsets[s])?;
            let profile = compute_profile(&clouds, opts.tolerance, opts.f6_mode)?;
            Ok((profile, watch.elapsed()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter();

    let mut report = SelectionReport::default();
    for partition in partitions {
        let chunk: Vec<(GeometryProfile, Duration)> = profiles.by_ref().take(subsets.len()).collect();
        let (raw, elapsed): (Vec<_>, Vec<_>) = chunk.into_iter().unzip();
        let standardized = standardize_profiles(raw)?;
        let results = standardized
            .into_iter()
            .zip(elapsed)
            .zip(&subsets)
            .map(|((profile, elapsed), subset)| {
                let verdict = predict(&profile, coeffs)?;
                Ok(SubsetResult {
                    subset: subset.clone(),
                    profile,
                    verdict,
                    elapsed,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        report.partitions.push(PartitionReport { partition, results });
    }
    Ok(report)
}
