//! Binary classifiers over a label set and nonempty feature-type subsets.

use std::collections::BTreeSet;
use std::fmt;

use crate::dataio::{FeatureSubset, FeatureTypeLayout};
use crate::error::{Error, Result};

/// A split of the label set into a positive and a negative group.
///
/// Partitions produced by [`enumerate_partitions`] are canonical: the side
/// holding the smallest label is the negative one. Emptiness of either side
/// is rejected where rows are split, not at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassPartition {
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
}

impl ClassPartition {
    pub fn new<P, N>(positive: P, negative: N) -> Result<Self>
    where
        P: IntoIterator,
        P::Item: Into<String>,
        N: IntoIterator,
        N::Item: Into<String>,
    {
        let positive: BTreeSet<String> = positive.into_iter().map(Into::into).collect();
        let negative: BTreeSet<String> = negative.into_iter().map(Into::into).collect();
        if let Some(l) = positive.intersection(&negative).next() {
            return Err(Error::Partition(format!("label `{l}` is on both sides")));
        }
        Ok(Self { positive, negative })
    }

    /// Recovers a partition from `pos=<labels>` given the full label set.
    pub fn from_canonical_name(name: &str, labels: &BTreeSet<String>) -> Result<Self> {
        let list = name
            .strip_prefix("pos=")
            .ok_or_else(|| Error::Partition(format!("`{name}` does not start with `pos=`")))?;
        let positive: BTreeSet<String> = list.split(',').filter(|s| !s.is_empty()).map(String::from).collect();
        if let Some(l) = positive.iter().find(|l| !labels.contains(*l)) {
            return Err(Error::Partition(format!("unknown label `{l}` in `{name}`")));
        }
        let negative: BTreeSet<String> = labels.difference(&positive).cloned().collect();
        Self::new(positive, negative)
    }

    pub fn positive(&self) -> &BTreeSet<String> {
        &self.positive
    }

    pub fn negative(&self) -> &BTreeSet<String> {
        &self.negative
    }

    /// `pos=<comma-joined sorted positive labels>`
    pub fn canonical_name(&self) -> String {
        let labels: Vec<&str> = self.positive.iter().map(String::as_str).collect();
        format!("pos={}", labels.join(","))
    }
}

impl fmt::Display for ClassPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_name())
    }
}

/// All `2^(l-1) - 1` binary classifiers, one per mirror pair, sorted by name.
pub fn enumerate_partitions(labels: &BTreeSet<String>) -> Result<Vec<ClassPartition>> {
    let l = labels.len();
    if l < 2 {
        return Err(Error::Partition(format!("need at least 2 labels, got {l}")));
    }
    if l > 31 {
        return Err(Error::Partition(format!("{l} labels is too many to enumerate")));
    }
    let mut iter = labels.iter();
    let smallest = iter.next().expect("nonempty");
    let others: Vec<&String> = iter.collect();
    let mut parts: Vec<ClassPartition> = (1u64..1 << others.len())
        .map(|mask| {
            let mut positive = BTreeSet::new();
            let mut negative = BTreeSet::from([smallest.clone()]);
            for (i, label) in others.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    positive.insert((*label).clone());
                } else {
                    negative.insert((*label).clone());
                }
            }
            ClassPartition { positive, negative }
        })
        .collect();
    parts.sort_by_cached_key(ClassPartition::canonical_name);
    Ok(parts)
}

/// All `2^k - 1` nonempty subsets, by ascending bitmask over layout order.
pub fn enumerate_subsets(layout: &FeatureTypeLayout) -> Result<Vec<FeatureSubset>> {
    let k = layout.len();
    if k == 0 {
        return Err(Error::Layout("no feature types".into()));
    }
    if k > 24 {
        return Err(Error::Layout(format!("{k} feature types is too many to enumerate")));
    }
    (1u64..1 << k)
        .map(|mask| FeatureSubset::from_mask(mask, layout))
        .collect()
}
