//! CART regression tree with exhaustive variance-reduction split search.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{FeatureSampling, ForestError, ForestHyperparams};

/// Gains closer than this (relative to the larger one) count as ties, which
/// are broken towards the lower feature index, then the lower threshold.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// Minimum gain for a split to be taken.
pub const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
        n: usize,
    },
    Split {
        feature: usize,
        /// rows with `x[feature] <= threshold` go left
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    /// nodes[0] is the root
    nodes: Vec<Node>,
    n_features: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Whether `gain` beats `best` under the tie rule.
pub fn improves(gain: f64, best: f64) -> bool {
    gain > best + TIE_TOLERANCE * best.abs().max(gain.abs()).max(1.0)
}

/// Sum in ascending order of value, so the result does not depend on the
/// order the samples arrive in.
fn sorted_mean(ys: &mut [f64]) -> f64 {
    ys.sort_by(f64::total_cmp);
    ys.iter().sum::<f64>() / ys.len() as f64
}

/// Best split of the samples `idx` over `features` (ascending), honouring
/// `min_leaf` on both sides.
pub fn best_split(x: &[Vec<f64>], y: &[f64], idx: &[usize], features: &[usize], min_leaf: usize) -> Option<SplitChoice> {
    let n = idx.len();
    if n < 2 * min_leaf.max(1) {
        return None;
    }
    let mut best: Option<SplitChoice> = None;
    let mut order: Vec<usize> = idx.to_vec();
    for &f in features {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(y[a].total_cmp(&y[b])));
        let total: f64 = {
            let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
            ys.sort_by(f64::total_cmp);
            ys.iter().sum()
        };
        let parent = total * total / n as f64;
        let mut left = 0.0;
        for k in 1..n {
            left += y[order[k - 1]];
            let (lo, hi) = (x[order[k - 1]][f], x[order[k]][f]);
            if lo == hi || k < min_leaf || n - k < min_leaf {
                continue;
            }
            let right = total - left;
            let gain = left * left / k as f64 + right * right / (n - k) as f64 - parent;
            let mid = lo + (hi - lo) / 2.0;
            let threshold = if mid < hi { mid } else { lo };
            if gain > MIN_GAIN && best.is_none_or(|b| improves(gain, b.gain)) {
                best = Some(SplitChoice {
                    feature: f,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

/// Features that take more than one value over `idx`.
fn varying_features(x: &[Vec<f64>], idx: &[usize], p: usize) -> Vec<usize> {
    (0..p)
        .filter(|&f| {
            let first = x[idx[0]][f];
            idx.iter().any(|&i| x[i][f] != first)
        })
        .collect()
}

struct Builder<'a, R: Rng> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    hp: &'a ForestHyperparams,
    rng: &'a mut R,
    nodes: Vec<Node>,
}

impl<R: Rng> Builder<'_, R> {
    fn leaf(&mut self, idx: &[usize]) -> usize {
        let mut ys: Vec<f64> = idx.iter().map(|&i| self.y[i]).collect();
        self.nodes.push(Node::Leaf {
            value: sorted_mean(&mut ys),
            n: idx.len(),
        });
        self.nodes.len() - 1
    }

    fn candidate_features(&mut self, idx: &[usize]) -> Vec<usize> {
        let varying = varying_features(self.x, idx, self.x[0].len());
        let k = match self.hp.features_per_split {
            FeatureSampling::All => varying.len(),
            FeatureSampling::Third => varying.len().div_ceil(3),
            FeatureSampling::Count(m) => m.min(varying.len()),
        };
        if k >= varying.len() {
            return varying;
        }
        let mut picked: Vec<usize> = sample(self.rng, varying.len(), k).into_iter().map(|j| varying[j]).collect();
        picked.sort_unstable();
        picked
    }

    fn grow(&mut self, idx: &[usize], depth: usize) -> usize {
        let first = self.y[idx[0]];
        let pure = idx.iter().all(|&i| self.y[i] == first);
        if pure || self.hp.max_depth.is_some_and(|d| depth >= d) {
            return self.leaf(idx);
        }
        let features = self.candidate_features(idx);
        let Some(split) = best_split(self.x, self.y, idx, &features, self.hp.min_samples_leaf) else {
            return self.leaf(idx);
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][split.feature] <= split.threshold);
        let at = self.nodes.len();
        self.nodes.push(Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: 0,
            right: 0,
        });
        let left = self.grow(&l, depth + 1);
        let right = self.grow(&r, depth + 1);
        if let Node::Split { left: ls, right: rs, .. } = &mut self.nodes[at] {
            *ls = left;
            *rs = right;
        }
        at
    }
}

pub(crate) fn check_inputs(x: &[Vec<f64>], y: &[f64]) -> Result<usize, ForestError> {
    if x.is_empty() {
        return Err(ForestError::Empty);
    }
    if x.len() != y.len() {
        return Err(ForestError::DimensionMismatch(format!("{} rows but {} targets", x.len(), y.len())));
    }
    let p = x[0].len();
    for (r, row) in x.iter().enumerate() {
        if row.len() != p {
            return Err(ForestError::DimensionMismatch(format!("row {r} has {} columns, expected {p}", row.len())));
        }
        if let Some(c) = row.iter().position(|v| !v.is_finite()) {
            return Err(ForestError::NonFinite { row: r, column: Some(c) });
        }
    }
    if let Some(r) = y.iter().position(|v| !v.is_finite()) {
        return Err(ForestError::NonFinite { row: r, column: None });
    }
    Ok(p)
}

impl RegressionTree {
    /// Fits a tree on the rows `sample_idx` of `x` (repeats allowed).
    pub(crate) fn fit_indices<R: Rng>(
        x: &[Vec<f64>],
        y: &[f64],
        sample_idx: &[usize],
        hp: &ForestHyperparams,
        rng: &mut R,
    ) -> Self {
        let mut b = Builder {
            x,
            y,
            hp,
            rng,
            nodes: Vec::new(),
        };
        b.grow(sample_idx, 0);
        Self {
            nodes: b.nodes,
            n_features: x[0].len(),
        }
    }

    pub fn fit<R: Rng>(x: &[Vec<f64>], y: &[f64], hp: &ForestHyperparams, rng: &mut R) -> Result<Self, ForestError> {
        let p = check_inputs(x, y)?;
        hp.validate(p)?;
        let all: Vec<usize> = (0..x.len()).collect();
        Ok(Self::fit_indices(x, y, &all, hp, rng))
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub(crate) fn check_structure(&self) -> Result<(), String> {
        if self.nodes.is_empty() {
            return Err("empty tree".into());
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let Node::Split {
                feature, left, right, ..
            } = n
            {
                if *feature >= self.n_features || *left <= i || *right <= i || *left >= self.nodes.len() || *right >= self.nodes.len() {
                    return Err(format!("node {i} has invalid links"));
                }
            }
        }
        Ok(())
    }
}

/// Fits one CART tree on all rows of `x`.
pub fn fit_tree<R: Rng>(x: &[Vec<f64>], y: &[f64], hp: &ForestHyperparams, rng: &mut R) -> Result<RegressionTree, ForestError> {
    RegressionTree::fit(x, y, hp, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hp_memorize() -> ForestHyperparams {
        ForestHyperparams {
            min_samples_leaf: 1,
            features_per_split: FeatureSampling::All,
            ..ForestHyperparams::default()
        }
    }

    #[test]
    fn single_sample_is_a_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = fit_tree(&[vec![1.0, 2.0]], &[0.7], &ForestHyperparams::default(), &mut rng).unwrap();
        assert_eq!(t.nodes().len(), 1);
        assert_eq!(t.predict(&[5.0, 5.0]), 0.7);
    }

    #[test]
    fn memorizes_distinct_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![(i * 7 % 30) as f64, (i % 4) as f64]).collect();
        let y: Vec<f64> = (0..30).map(|i| ((i * 13) % 17) as f64 / 17.0).collect();
        let t = fit_tree(&x, &y, &hp_memorize(), &mut rng).unwrap();
        for (row, target) in x.iter().zip(&y) {
            assert_eq!(t.predict(row), *target);
        }
    }

    #[test]
    fn constant_target_or_features_give_a_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let t = fit_tree(&x, &[0.5; 10], &hp_memorize(), &mut rng).unwrap();
        assert_eq!(t.nodes().len(), 1);
        let x = vec![vec![1.0]; 10];
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let t = fit_tree(&x, &y, &hp_memorize(), &mut rng).unwrap();
        assert_eq!(t.predict(&[1.0]), 4.5);
    }

    #[test]
    fn depth_limit_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<Vec<f64>> = (0..64).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..64).map(|i| (i as f64).sin()).collect();
        let hp = ForestHyperparams {
            max_depth: Some(3),
            ..hp_memorize()
        };
        assert!(fit_tree(&x, &y, &hp, &mut rng).unwrap().depth() <= 3);
        assert!(matches!(fit_tree(&x, &y[1..], &hp, &mut rng), Err(ForestError::DimensionMismatch(_))));
        let mut bad = x.clone();
        bad[3][0] = f64::NAN;
        assert!(matches!(fit_tree(&bad, &y, &hp, &mut rng), Err(ForestError::NonFinite { row: 3, .. })));
    }

    #[test]
    fn row_order_does_not_matter() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![(i % 5) as f64, ((i * 3) % 7) as f64]).collect();
        let y: Vec<f64> = (0..40).map(|i| ((i * 11) % 13) as f64).collect();
        let mut perm: Vec<usize> = (0..40).collect();
        perm.reverse();
        perm.swap(3, 17);
        let xp: Vec<Vec<f64>> = perm.iter().map(|&i| x[i].clone()).collect();
        let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let hp = hp_memorize();
        let a = fit_tree(&x, &y, &hp, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let b = fit_tree(&xp, &yp, &hp, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(a, b);
    }
}
