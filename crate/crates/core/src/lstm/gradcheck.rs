//! Finite-difference check of the backpropagated gradient.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::{Layout, Shape};
use super::{LstmError, LstmModel};

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub max_rel_error: f64,
    /// parameter index with the largest error
    pub worst: usize,
    pub n_coords: usize,
}

/// Denominator floor of the relative error, so that coordinates with
/// vanishing gradients compare on an absolute scale.
const REL_FLOOR: f64 = 1e-6;

fn coordinates(model: &LstmModel, ids: &[u32], n: usize, seed: u64) -> Vec<usize> {
    let l = model.layout();
    let e = model.shape.embed;
    let mut rows: Vec<usize> = ids.iter().filter(|&&i| i != 0).map(|&i| i as usize).collect();
    rows.sort_unstable();
    rows.dedup();
    let emb: Vec<usize> = rows.iter().flat_map(|&r| r * e..(r + 1) * e).collect();
    let forget: Vec<usize> = (l.w.start..l.b.end).filter(|&k| l.is_forget_gate(k, &model.shape)).collect();
    let groups: Vec<Vec<usize>> = vec![
        emb,
        l.w.clone().collect(),
        l.u.clone().collect(),
        l.b.clone().collect(),
        l.head_w.clone().collect(),
        vec![l.head_b],
        forget,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quota = n / groups.len() + 1;
    let mut picked: Vec<usize> = Vec::new();
    for g in &groups {
        let k = quota.min(g.len());
        picked.extend(sample(&mut rng, g.len(), k).into_iter().map(|j| g[j]));
    }
    picked.sort_unstable();
    picked.dedup();
    if picked.len() < n {
        let mut rest: Vec<usize> = groups.concat();
        rest.sort_unstable();
        rest.dedup();
        rest.retain(|k| picked.binary_search(k).is_err());
        rest.shuffle(&mut rng);
        picked.extend(rest.into_iter().take(n - picked.len()));
        picked.sort_unstable();
    }
    picked
}

/// Compares analytic and central-difference gradients of the absolute
/// error on `n_coords` parameters drawn from every group (embedding rows of
/// `ids`, input and recurrent weights, biases, head, forget gate). Dropout is
/// off and the target sits one unit below the prediction, away from the
/// kink of |r|.
pub fn gradient_check(model: &LstmModel, ids: &[u32], epsilon: f64, n_coords: usize, seed: u64) -> Result<GradCheck, LstmError> {
    gradient_check_with(model, ids, epsilon, n_coords, seed, |_, _, _| {})
}

/// As [`gradient_check`], with `tamper` applied to the analytic gradient
/// before comparison.
pub fn gradient_check_with<F>(
    model: &LstmModel,
    ids: &[u32],
    epsilon: f64,
    n_coords: usize,
    seed: u64,
    tamper: F,
) -> Result<GradCheck, LstmError>
where
    F: Fn(&Layout, &Shape, &mut [f64]),
{
    if !(epsilon > 0.0) {
        return Err(LstmError::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let target = model.predict_ids(ids)? - 1.0;
    let (_, mut analytic) = model.loss_gradient(ids, target, None)?;
    tamper(&model.layout(), &model.shape, &mut analytic);
    let coords = coordinates(model, ids, n_coords, seed);
    let mut probe = model.clone();
    let mut worst = (0.0, 0);
    for &k in &coords {
        let orig = probe.params[k];
        probe.params[k] = orig + epsilon;
        let up = probe.loss(ids, target)?;
        probe.params[k] = orig - epsilon;
        let down = probe.loss(ids, target)?;
        probe.params[k] = orig;
        let numeric = (up - down) / (2.0 * epsilon);
        let a = analytic[k];
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(REL_FLOOR);
        if rel > worst.0 {
            worst = (rel, k);
        }
    }
    Ok(GradCheck {
        max_rel_error: worst.0,
        worst: worst.1,
        n_coords: coords.len(),
    })
}
