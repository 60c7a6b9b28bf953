use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{sign, Masks, SampleGrad};
use super::{LstmError, LstmModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// Adamax step size α
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 32,
            learning_rate: 0.002,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            validation_fraction: 0.3,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), LstmError> {
        let bad = |m: &str| Err(LstmError::Config(m.to_string()));
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad("validation fraction must lie in (0, 1)");
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1");
        }
        if !(self.learning_rate >= 0.0) || !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("optimizer constants out of range");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        Ok(())
    }
}

/// (train, validation) sizes: the first ⌊n·(1−f)⌋ samples train, the tail
/// validates.
pub fn validation_split_sizes(n: usize, validation_fraction: f64) -> (usize, usize) {
    let n_train = (n as f64 * (1.0 - validation_fraction)) as usize;
    (n_train, n - n_train)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// mean loss over the epoch's batches, dropout on
    pub train_mae: f64,
    /// dropout off; `None` without validation samples
    pub val_mae: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub n_train: usize,
    pub n_val: usize,
    pub epochs: Vec<EpochStats>,
}

impl TrainHistory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_mae,val_mae\n");
        for e in &self.epochs {
            let val = e.val_mae.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{}\n", e.epoch, e.train_mae, val));
        }
        out
    }
}

struct Adamax {
    m: Vec<f64>,
    u: Vec<f64>,
    t: i32,
}

impl Adamax {
    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            u: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], cfg: &TrainConfig) {
        self.t += 1;
        let lr = cfg.learning_rate / (1.0 - cfg.beta1.powi(self.t));
        for k in 0..params.len() {
            self.m[k] = cfg.beta1 * self.m[k] + (1.0 - cfg.beta1) * grad[k];
            self.u[k] = (cfg.beta2 * self.u[k]).max(grad[k].abs());
            params[k] -= lr * self.m[k] / (self.u[k] + cfg.epsilon);
        }
    }
}

fn mask_rng(seed: u64, epoch: usize, position: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((epoch as u64) << 32) | position as u64);
    rng
}

/// Trains with Adamax on mean absolute error. Samples after the first
/// ⌊n·(1−validation_fraction)⌋ are held out for validation. Training
/// samples are reshuffled every epoch; per-sample gradients are computed in
/// parallel and summed in batch order, so results are deterministic.
pub fn train(model: &mut LstmModel, data: &[(Vec<u32>, f64)], cfg: &TrainConfig) -> Result<TrainHistory, LstmError> {
    cfg.validate()?;
    for (ids, y) in data {
        model.check_ids(ids)?;
        if !y.is_finite() {
            return Err(LstmError::Config("non-finite target".into()));
        }
    }
    let (n_train, n_val) = validation_split_sizes(data.len(), cfg.validation_fraction);
    if n_train == 0 {
        return Err(LstmError::EmptyDataset);
    }
    let (train_set, val_set) = data.split_at(n_train);
    let layout = model.layout();
    let e = model.shape.embed;
    let mut opt = Adamax::new(model.params.len());
    let mut order: Vec<usize> = (0..n_train).collect();
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut grad = vec![0.0; model.params.len()];
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0;
        for (batch_no, batch) in order.chunks(cfg.batch_size).enumerate() {
            let m: &LstmModel = model;
            let per_sample: Vec<(f64, SampleGrad)> = batch
                .par_iter()
                .enumerate()
                .map(|(k, &i)| {
                    let (ids, y) = &train_set[i];
                    let position = batch_no * cfg.batch_size + k;
                    let masks = Masks::sample(&mut mask_rng(cfg.seed, epoch, position), &m.shape, m.dropout, m.recurrent_dropout);
                    let tr = m.forward_trace(ids, Some(&masks));
                    let r = tr.y - y;
                    (r.abs(), m.backward(&tr, sign(r), Some(&masks)))
                })
                .collect();
            grad.fill(0.0);
            let mut batch_loss = 0.0;
            for (loss, g) in &per_sample {
                batch_loss += loss;
                g.add_into(&mut grad, &layout, e);
            }
            if !batch_loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(LstmError::NonFinite {
                    epoch,
                    batch: batch_no,
                    detail: format!("batch loss {batch_loss}"),
                });
            }
            let scale = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            opt.step(&mut model.params, &grad, cfg);
            loss_sum += batch_loss;
        }
        let val_mae = (n_val > 0).then(|| {
            let m: &LstmModel = model;
            let total: f64 = val_set.par_iter().map(|(ids, y)| (m.run(ids, None, None).1 - y).abs()).collect::<Vec<_>>().iter().sum();
            total / n_val as f64
        });
        let stats = EpochStats {
            epoch,
            train_mae: loss_sum / n_train as f64,
            val_mae,
        };
        log::debug!("epoch {epoch}: train {:.5} val {:?}", stats.train_mae, stats.val_mae);
        history.push(stats);
    }
    Ok(TrainHistory {
        n_train,
        n_val,
        epochs: history,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{Shape, Vocabulary};
    use super::*;

    fn tiny() -> LstmModel {
        let vocab = Vocabulary::from_words((0..6).map(|i| format!("w{i}")).collect()).unwrap();
        LstmModel::with_shape(vocab, Shape { vocab: 6, embed: 5, hidden: 4 }, 3)
    }

    fn data() -> Vec<(Vec<u32>, f64)> {
        (0..10).map(|i| (vec![1 + i % 6, 1 + (i / 2) % 6, 0, 0], 0.3 + 0.05 * i as f64)).collect()
    }

    #[test]
    fn split_sizes() {
        assert_eq!(validation_split_sizes(1872, 0.3), (1310, 562));
        assert_eq!(validation_split_sizes(200, 0.3), (140, 60));
        assert_eq!(validation_split_sizes(1, 0.3), (0, 1));
    }

    #[test]
    fn zero_learning_rate_keeps_parameters() {
        let mut m = tiny();
        let before = m.params.clone();
        let cfg = TrainConfig { epochs: 1, learning_rate: 0.0, ..Default::default() };
        train(&mut m, &data(), &cfg).unwrap();
        assert_eq!(m.params, before);
    }

    #[test]
    fn memorizes_a_small_task() {
        let mut m = tiny();
        m.dropout = 0.0;
        m.recurrent_dropout = 0.0;
        let cfg = TrainConfig { epochs: 200, batch_size: 4, validation_fraction: 0.01, ..Default::default() };
        let h = train(&mut m, &data(), &cfg).unwrap();
        assert_eq!((h.n_train, h.n_val), (9, 1));
        let first = h.epochs[0].train_mae;
        let last = h.epochs.last().unwrap().train_mae;
        assert!(last < 0.2 * first, "{first} -> {last}");
    }

    #[test]
    fn deterministic_and_errors() {
        let cfg = TrainConfig { epochs: 3, ..Default::default() };
        let (mut a, mut b) = (tiny(), tiny());
        let ha = train(&mut a, &data(), &cfg).unwrap();
        let hb = train(&mut b, &data(), &cfg).unwrap();
        assert_eq!(ha, hb);
        assert_eq!(a.params, b.params);
        assert!(matches!(train(&mut a, &[], &cfg), Err(LstmError::EmptyDataset)));
        let bad = TrainConfig { validation_fraction: 1.0, ..Default::default() };
        assert!(matches!(train(&mut a, &data(), &bad), Err(LstmError::Config(_))));
        assert!(ha.to_csv().starts_with("epoch,train_mae,val_mae\n1,"));
    }
}
