//! Seeded synthetic corpora: low-rank binary class clouds and random
//! column augmentation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataio::{FeatureBlock, FeatureTypeLayout, SparseDataset, SparseRow};
use crate::error::{Error, Result};

pub const RANDOM_BLOCK: &str = "random";

/// Appends `max(1, round(fraction * n_columns))` random binary columns as a
/// new feature type named `random`. Each entry is 1 with probability
/// `density`; a row left empty in the new block gets one 1 at a uniformly
/// chosen column of it.
pub fn augment_random_columns(ds: &SparseDataset, fraction: f64, density: f64, seed: u64) -> Result<SparseDataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fraction must be in (0, 1], got {fraction}"
        )));
    }
    if !(density > 0.0 && density < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "density must be in (0, 1), got {density}"
        )));
    }
    if ds.layout().position(RANDOM_BLOCK).is_some() {
        return Err(Error::Layout(format!("feature type `{RANDOM_BLOCK}` already exists")));
    }
    let n = ds.n_columns();
    let extra = ((fraction * n as f64).round() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = ds
        .rows()
        .iter()
        .map(|row| {
            let mut added: Vec<usize> = (n..n + extra).filter(|_| rng.gen_bool(density)).collect();
            if added.is_empty() {
                added.push(n + rng.gen_range(0..extra));
            }
            let pairs = row.iter().chain(added.into_iter().map(|c| (c, 1.0))).collect();
            SparseRow::from_pairs(pairs).expect("new columns are disjoint from existing ones")
        })
        .collect();
    let mut blocks = ds.layout().blocks().to_vec();
    blocks.push(FeatureBlock {
        name: RANDOM_BLOCK.to_string(),
        start: n,
        end: n + extra,
    });
    SparseDataset::new(rows, ds.labels().to_vec(), FeatureTypeLayout::new(blocks)?)
}

/// Parameters for [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Number of class labels; labels are `c0`, `c1`, ...
    pub classes: usize,
    /// Column count of each feature type; types are `t1`, `t2`, ...
    pub block_columns: Vec<usize>,
    pub rows_per_class: usize,
    /// Affine rank target per class (a single entry applies to every class).
    pub rank_targets: Vec<usize>,
    /// Probability of flipping each bit after construction.
    pub noise: f64,
    /// Probability that a template column is active in a class's vocabulary.
    pub template_density: f64,
    /// Every class draws from the same template.
    pub shared_templates: bool,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            classes: 2,
            block_columns: vec![20, 20],
            rows_per_class: 20,
            rank_targets: vec![3],
            noise: 0.0,
            template_density: 0.5,
            shared_templates: false,
            seed: 0,
        }
    }
}

impl SynthSpec {
    pub fn n_columns(&self) -> usize {
        self.block_columns.iter().sum()
    }

    fn rank_for(&self, class: usize) -> usize {
        if self.rank_targets.len() == 1 {
            self.rank_targets[0]
        } else {
            self.rank_targets[class]
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.classes < 2 {
            return bad(format!("need at least 2 classes, got {}", self.classes));
        }
        if self.block_columns.is_empty() || self.block_columns.contains(&0) {
            return bad("every feature type needs at least one column".into());
        }
        if self.rows_per_class < 2 {
            return bad("need at least 2 rows per class".into());
        }
        if self.rank_targets.len() != 1 && self.rank_targets.len() != self.classes {
            return bad(format!(
                "expected 1 or {} rank targets, got {}",
                self.classes,
                self.rank_targets.len()
            ));
        }
        // one column per block is reserved for the always-on base pattern
        let free_columns = self.n_columns() - self.block_columns.len();
        let limit = free_columns.min(self.rows_per_class - 1);
        for c in 0..self.classes {
            let r = self.rank_for(c);
            if r > limit {
                return bad(format!(
                    "rank target {r} for class {c} exceeds min(rows - 1, free columns) = {limit}"
                ));
            }
        }
        if !(0.0..1.0).contains(&self.noise) {
            return bad(format!("noise must be in [0, 1), got {}", self.noise));
        }
        if !(self.template_density > 0.0 && self.template_density <= 1.0) {
            return bad(format!(
                "template density must be in (0, 1], got {}",
                self.template_density
            ));
        }
        Ok(())
    }
}

/// Disjoint column supports: a base pattern (nonempty in every block) and
/// `rank` direction patterns (each nonempty).
struct Template {
    base: Vec<usize>,
    directions: Vec<Vec<usize>>,
}

fn draw_template(spec: &SynthSpec, layout: &FeatureTypeLayout, rank: usize, rng: &mut ChaCha8Rng) -> Template {
    let mut base = Vec::new();
    let mut free = Vec::new();
    for b in layout.blocks() {
        let mut cols: Vec<usize> = (b.start..b.end).collect();
        cols.shuffle(rng);
        base.push(cols[0]);
        free.extend_from_slice(&cols[1..]);
    }
    free.shuffle(rng);
    let mut directions: Vec<Vec<usize>> = free[..rank].iter().map(|&c| vec![c]).collect();
    for &c in &free[rank..] {
        if rng.gen_bool(spec.template_density) {
            // slot 0 is the base, 1..=rank the directions
            let slot = rng.gen_range(0..=rank);
            if slot == 0 {
                base.push(c);
            } else {
                directions[slot - 1].push(c);
            }
        }
    }
    Template { base, directions }
}

/// Binary dataset whose class clouds are `base + sum(c_i * direction_i)` with
/// random `c_i` in {0, 1}, so a noise-free class has affine dimension at most
/// its rank target. Bit-flip noise is applied afterwards and any block left
/// empty in a row gets one random bit back.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<SparseDataset> {
    spec.validate()?;
    let layout = FeatureTypeLayout::from_widths(
        spec.block_columns
            .iter()
            .enumerate()
            .map(|(i, &w)| (format!("t{}", i + 1), w)),
    )?;
    let n = layout.n_columns();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let shared = spec
        .shared_templates
        .then(|| draw_template(spec, &layout, spec.rank_for(0), &mut rng));

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for class in 0..spec.classes {
        let own;
        let template = match &shared {
            Some(t) => t,
            None => {
                own = draw_template(spec, &layout, spec.rank_for(class), &mut rng);
                &own
            }
        };
        for _ in 0..spec.rows_per_class {
            let mut dense = vec![false; n];
            for &c in &template.base {
                dense[c] = true;
            }
            for dir in &template.directions {
                if rng.gen_bool(0.5) {
                    for &c in dir {
                        dense[c] = true;
                    }
                }
            }
            if spec.noise > 0.0 {
                for bit in dense.iter_mut() {
                    if rng.gen_bool(spec.noise) {
                        *bit = !*bit;
                    }
                }
            }
            for b in layout.blocks() {
                if !dense[b.start..b.end].iter().any(|&x| x) {
                    dense[rng.gen_range(b.start..b.end)] = true;
                }
            }
            let pairs = dense
                .iter()
                .enumerate()
                .filter(|(_, &x)| x)
                .map(|(c, _)| (c, 1.0))
                .collect();
            rows.push(SparseRow::from_pairs(pairs).expect("distinct columns"));
            labels.push(format!("c{class}"));
        }
    }
    SparseDataset::new(rows, labels, layout)
}
