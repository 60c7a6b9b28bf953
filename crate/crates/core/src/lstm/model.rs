//! Embedding, one LSTM layer and a linear head, all in one flat parameter
//! vector so the optimizer and the gradient check can treat it uniformly.
//!
//! Layout: `[emb (V+1)×E | W 4H×E | U 4H×H | b 4H | head_w H | head_b]`,
//! gate blocks in the order input, forget, cell, output.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LstmError, Vocabulary};

pub const EMBED_DIM: usize = 50;
pub const HIDDEN_UNITS: usize = 87;
pub const DROPOUT: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    /// known lemmas; the embedding has one more row for id 0
    pub vocab: usize,
    pub embed: usize,
    pub hidden: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub emb: Range<usize>,
    pub w: Range<usize>,
    pub u: Range<usize>,
    pub b: Range<usize>,
    pub head_w: Range<usize>,
    pub head_b: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamGroup {
    Embedding,
    InputWeights,
    RecurrentWeights,
    Bias,
    HeadWeights,
    HeadBias,
}

impl Shape {
    pub fn layout(&self) -> Layout {
        let (e, h) = (self.embed, self.hidden);
        let emb = 0..(self.vocab + 1) * e;
        let w = emb.end..emb.end + 4 * h * e;
        let u = w.end..w.end + 4 * h * h;
        let b = u.end..u.end + 4 * h;
        let head_w = b.end..b.end + h;
        let head_b = head_w.end;
        Layout {
            emb,
            w,
            u,
            b,
            head_w,
            head_b,
            len: head_b + 1,
        }
    }
}

impl Layout {
    pub fn group_of(&self, k: usize) -> ParamGroup {
        if self.emb.contains(&k) {
            ParamGroup::Embedding
        } else if self.w.contains(&k) {
            ParamGroup::InputWeights
        } else if self.u.contains(&k) {
            ParamGroup::RecurrentWeights
        } else if self.b.contains(&k) {
            ParamGroup::Bias
        } else if self.head_w.contains(&k) {
            ParamGroup::HeadWeights
        } else {
            ParamGroup::HeadBias
        }
    }

    /// Whether parameter `k` feeds the forget gate.
    pub fn is_forget_gate(&self, k: usize, shape: &Shape) -> bool {
        let h = shape.hidden;
        let row = if self.w.contains(&k) {
            (k - self.w.start) / shape.embed
        } else if self.u.contains(&k) {
            (k - self.u.start) / h
        } else if self.b.contains(&k) {
            k - self.b.start
        } else {
            return false;
        };
        (h..2 * h).contains(&row)
    }
}

/// Inverted-dropout masks drawn once per sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Masks {
    pub input: Vec<f64>,
    pub recurrent: Vec<f64>,
}

impl Masks {
    pub fn sample<R: Rng>(rng: &mut R, shape: &Shape, p_in: f64, p_rec: f64) -> Self {
        let mut draw = |n: usize, p: f64| -> Vec<f64> {
            (0..n)
                .map(|_| if p > 0.0 && rng.gen::<f64>() < p { 0.0 } else { 1.0 / (1.0 - p) })
                .collect()
        };
        let input = draw(shape.embed, p_in);
        let recurrent = draw(shape.hidden, p_rec);
        Self { input, recurrent }
    }
}

/// Activations of one unmasked time step, kept for backpropagation.
#[derive(Debug, Clone)]
pub(crate) struct Step {
    id: usize,
    x: Vec<f64>,
    hd: Vec<f64>,
    /// i, f, g, o after their nonlinearities
    gates: Vec<f64>,
    c_prev: Vec<f64>,
    tanh_c: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Trace {
    steps: Vec<Step>,
    h: Vec<f64>,
    pub(crate) y: f64,
}

/// Gradient of one sample: dense over everything but the embedding, which
/// is kept as (row id, row gradient) pairs.
#[derive(Debug, Clone)]
pub(crate) struct SampleGrad {
    pub(crate) dense: Vec<f64>,
    pub(crate) emb: Vec<(usize, Vec<f64>)>,
}

impl SampleGrad {
    pub(crate) fn add_into(&self, full: &mut [f64], layout: &Layout, e: usize) {
        for (g, d) in full[layout.w.start..].iter_mut().zip(&self.dense) {
            *g += d;
        }
        for (id, row) in &self.emb {
            for (g, d) in full[id * e..(id + 1) * e].iter_mut().zip(row) {
                *g += d;
            }
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmModel {
    pub vocab: Vocabulary,
    pub shape: Shape,
    pub dropout: f64,
    pub recurrent_dropout: f64,
    pub seed: u64,
    pub(crate) params: Vec<f64>,
}

impl LstmModel {
    /// Freshly initialised model with the default sizes.
    pub fn new(vocab: Vocabulary, seed: u64) -> Self {
        let shape = Shape {
            vocab: vocab.len(),
            embed: EMBED_DIM,
            hidden: HIDDEN_UNITS,
        };
        Self::with_shape(vocab, shape, seed)
    }

    /// Uniform embeddings in ±0.05, Glorot-uniform input and head weights,
    /// uniform ±1/√H recurrent weights, zero biases except the forget gate
    /// at 1.
    pub fn with_shape(vocab: Vocabulary, shape: Shape, seed: u64) -> Self {
        assert_eq!(vocab.len(), shape.vocab, "vocabulary size differs from shape");
        let l = shape.layout();
        let (e, h) = (shape.embed as f64, shape.hidden as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = vec![0.0; l.len];
        let mut fill = |r: Range<usize>, lim: f64, p: &mut [f64]| {
            for v in &mut p[r] {
                *v = rng.gen_range(-lim..lim);
            }
        };
        fill(l.emb.clone(), 0.05, &mut params);
        fill(l.w.clone(), (6.0 / (e + 4.0 * h)).sqrt(), &mut params);
        fill(l.u.clone(), 1.0 / h.sqrt(), &mut params);
        fill(l.head_w.clone(), (6.0 / (h + 1.0)).sqrt(), &mut params);
        let fb = l.b.start + shape.hidden;
        params[fb..fb + shape.hidden].fill(1.0);
        Self {
            vocab,
            shape,
            dropout: DROPOUT,
            recurrent_dropout: DROPOUT,
            seed,
            params,
        }
    }

    /// All parameters zero.
    pub fn zeros(vocab: Vocabulary, shape: Shape) -> Self {
        let mut m = Self::with_shape(vocab, shape, 0);
        m.params.fill(0.0);
        m
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn layout(&self) -> Layout {
        self.shape.layout()
    }

    pub(crate) fn check_ids(&self, ids: &[u32]) -> Result<(), LstmError> {
        match ids.iter().find(|&&id| id as usize > self.shape.vocab) {
            Some(id) => Err(LstmError::Shape(format!("id {id} outside vocabulary of {}", self.shape.vocab))),
            None => Ok(()),
        }
    }

    /// Runs the recurrence over the nonzero ids of `ids`. Zero ids (padding
    /// and unknown lemmas) are skipped, so padding never changes the output.
    pub(crate) fn run(&self, ids: &[u32], masks: Option<&Masks>, mut trace: Option<&mut Vec<Step>>) -> (Vec<f64>, f64) {
        let (e, hn) = (self.shape.embed, self.shape.hidden);
        let l = self.layout();
        let p = &self.params;
        let (w, u, b) = (&p[l.w.clone()], &p[l.u.clone()], &p[l.b.clone()]);
        let mut h = vec![0.0; hn];
        let mut c = vec![0.0; hn];
        let mut z = vec![0.0; 4 * hn];
        let mut x = vec![0.0; e];
        let mut hd = vec![0.0; hn];
        for &id in ids {
            let id = id as usize;
            if id == 0 {
                continue;
            }
            x.copy_from_slice(&p[id * e..(id + 1) * e]);
            hd.copy_from_slice(&h);
            if let Some(m) = masks {
                x.iter_mut().zip(&m.input).for_each(|(v, k)| *v *= k);
                hd.iter_mut().zip(&m.recurrent).for_each(|(v, k)| *v *= k);
            }
            for r in 0..4 * hn {
                let wr = &w[r * e..(r + 1) * e];
                let ur = &u[r * hn..(r + 1) * hn];
                let mut acc = b[r];
                for k in 0..e {
                    acc += wr[k] * x[k];
                }
                for j in 0..hn {
                    acc += ur[j] * hd[j];
                }
                z[r] = acc;
            }
            for j in 0..hn {
                z[j] = sigmoid(z[j]);
                z[hn + j] = sigmoid(z[hn + j]);
                z[2 * hn + j] = z[2 * hn + j].tanh();
                z[3 * hn + j] = sigmoid(z[3 * hn + j]);
            }
            let c_prev = trace.as_ref().map(|_| c.clone());
            let mut tanh_c = vec![0.0; hn];
            for j in 0..hn {
                c[j] = z[hn + j] * c[j] + z[j] * z[2 * hn + j];
                tanh_c[j] = c[j].tanh();
                h[j] = z[3 * hn + j] * tanh_c[j];
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(Step {
                    id,
                    x: x.clone(),
                    hd: hd.clone(),
                    gates: z.clone(),
                    c_prev: c_prev.unwrap_or_default(),
                    tanh_c,
                });
            }
        }
        let hw = &p[l.head_w.clone()];
        let y = p[l.head_b] + hw.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>();
        (h, y)
    }

    /// Raw (unclamped) output with dropout off.
    pub fn predict_ids(&self, ids: &[u32]) -> Result<f64, LstmError> {
        self.check_ids(ids)?;
        Ok(self.run(ids, None, None).1)
    }

    /// Prediction on the hardness scale, clamped to `[0, 1]`.
    pub fn predict_hardness(&self, ids: &[u32]) -> Result<f64, LstmError> {
        Ok(self.predict_ids(ids)?.clamp(0.0, 1.0))
    }

    pub(crate) fn forward_trace(&self, ids: &[u32], masks: Option<&Masks>) -> Trace {
        let mut steps = Vec::with_capacity(ids.len());
        let (h, y) = self.run(ids, masks, Some(&mut steps));
        Trace { steps, h, y }
    }

    /// Backpropagation through time of `dy` (the loss derivative with
    /// respect to the output). Masks must be the ones used in the forward
    /// pass.
    pub(crate) fn backward(&self, tr: &Trace, dy: f64, masks: Option<&Masks>) -> SampleGrad {
        let (e, hn) = (self.shape.embed, self.shape.hidden);
        let l = self.layout();
        let p = &self.params;
        let (w, u) = (&p[l.w.clone()], &p[l.u.clone()]);
        let off = l.w.start;
        let mut dense = vec![0.0; l.len - off];
        let (dw0, du0, db0, dhw0) = (0, l.u.start - off, l.b.start - off, l.head_w.start - off);
        for j in 0..hn {
            dense[dhw0 + j] = dy * tr.h[j];
        }
        dense[l.head_b - off] = dy;

        let mut dh: Vec<f64> = p[l.head_w.clone()].iter().map(|v| v * dy).collect();
        let mut dc = vec![0.0; hn];
        let mut dz = vec![0.0; 4 * hn];
        let mut emb: Vec<(usize, Vec<f64>)> = Vec::new();
        for s in tr.steps.iter().rev() {
            let g = &s.gates;
            for j in 0..hn {
                let (i, f, gg, o) = (g[j], g[hn + j], g[2 * hn + j], g[3 * hn + j]);
                let tc = s.tanh_c[j];
                let d_o = dh[j] * tc;
                dc[j] += dh[j] * o * (1.0 - tc * tc);
                dz[j] = dc[j] * gg * i * (1.0 - i);
                dz[hn + j] = dc[j] * s.c_prev[j] * f * (1.0 - f);
                dz[2 * hn + j] = dc[j] * i * (1.0 - gg * gg);
                dz[3 * hn + j] = d_o * o * (1.0 - o);
                dc[j] *= f;
            }
            let mut dx = vec![0.0; e];
            let mut dhd = vec![0.0; hn];
            for r in 0..4 * hn {
                let d = dz[r];
                dense[db0 + r] += d;
                if d == 0.0 {
                    continue;
                }
                let wr = &w[r * e..(r + 1) * e];
                let dwr = &mut dense[dw0 + r * e..dw0 + (r + 1) * e];
                for k in 0..e {
                    dwr[k] += d * s.x[k];
                    dx[k] += d * wr[k];
                }
                let ur = &u[r * hn..(r + 1) * hn];
                let dur = &mut dense[du0 + r * hn..du0 + (r + 1) * hn];
                for j in 0..hn {
                    dur[j] += d * s.hd[j];
                    dhd[j] += d * ur[j];
                }
            }
            if let Some(m) = masks {
                dx.iter_mut().zip(&m.input).for_each(|(v, k)| *v *= k);
                dhd.iter_mut().zip(&m.recurrent).for_each(|(v, k)| *v *= k);
            }
            match emb.iter_mut().find(|(id, _)| *id == s.id) {
                Some((_, row)) => row.iter_mut().zip(&dx).for_each(|(a, b)| *a += b),
                None => emb.push((s.id, dx)),
            }
            dh = dhd;
        }
        SampleGrad { dense, emb }
    }

    /// Full gradient vector of `|y - target|` for one sequence.
    pub fn loss_gradient(&self, ids: &[u32], target: f64, masks: Option<&Masks>) -> Result<(f64, Vec<f64>), LstmError> {
        self.check_ids(ids)?;
        let tr = self.forward_trace(ids, masks);
        let r = tr.y - target;
        let sg = self.backward(&tr, sign(r), masks);
        let mut full = vec![0.0; self.params.len()];
        sg.add_into(&mut full, &self.layout(), self.shape.embed);
        Ok((r.abs(), full))
    }

    /// Loss with dropout off, used by finite differences.
    pub fn loss(&self, ids: &[u32], target: f64) -> Result<f64, LstmError> {
        Ok((self.predict_ids(ids)? - target).abs())
    }
}

/// Subgradient of |r| with 0 at the kink.
pub(crate) fn sign(r: f64) -> f64 {
    if r > 0.0 {
        1.0
    } else if r < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(n: usize) -> Vocabulary {
        Vocabulary::from_words((0..n).map(|i| format!("w{i}")).collect()).unwrap()
    }

    fn small(seed: u64) -> LstmModel {
        LstmModel::with_shape(vocab(9), Shape { vocab: 9, embed: 4, hidden: 3 }, seed)
    }

    /// Independent scalar recurrence over nested vectors.
    fn reference(m: &LstmModel, ids: &[u32]) -> f64 {
        let (e, h) = (m.shape.embed, m.shape.hidden);
        let l = m.layout();
        let p = &m.params;
        let wm = |r: usize, k: usize| p[l.w.start + r * e + k];
        let um = |r: usize, j: usize| p[l.u.start + r * h + j];
        let sig = |z: f64| 1.0 / (1.0 + (-z).exp());
        let (mut hs, mut cs) = (vec![0.0; h], vec![0.0; h]);
        for &id in ids.iter().filter(|&&i| i != 0) {
            let x: Vec<f64> = (0..e).map(|k| p[id as usize * e + k]).collect();
            let pre = |gate: usize, j: usize| {
                let r = gate * h + j;
                p[l.b.start + r] + (0..e).map(|k| wm(r, k) * x[k]).sum::<f64>() + (0..h).map(|q| um(r, q) * hs[q]).sum::<f64>()
            };
            let mut nh = vec![0.0; h];
            for j in 0..h {
                let (i, f, g, o) = (sig(pre(0, j)), sig(pre(1, j)), pre(2, j).tanh(), sig(pre(3, j)));
                cs[j] = f * cs[j] + i * g;
                nh[j] = o * cs[j].tanh();
            }
            hs = nh;
        }
        p[l.head_b] + (0..h).map(|j| p[l.head_w.start + j] * hs[j]).sum::<f64>()
    }

    #[test]
    fn layout_is_contiguous() {
        let s = Shape { vocab: 9, embed: 4, hidden: 3 };
        let l = s.layout();
        assert_eq!(l.emb, 0..40);
        assert_eq!(l.w, 40..88);
        assert_eq!(l.u, 88..124);
        assert_eq!(l.b, 124..136);
        assert_eq!(l.len, 136 + 3 + 1);
        assert!(l.is_forget_gate(l.b.start + 3, &s) && !l.is_forget_gate(l.b.start + 6, &s));
        assert!(l.is_forget_gate(l.w.start + 3 * 4, &s));
    }

    #[test]
    fn forget_bias_starts_at_one() {
        let m = small(1);
        let l = m.layout();
        assert_eq!(&m.params[l.b.clone()], &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn matches_reference_recurrence() {
        for seed in 0..5 {
            let m = small(seed);
            let ids = [3, 1, 0, 9, 4, 4, 0, 0];
            assert!((m.predict_ids(&ids).unwrap() - reference(&m, &ids)).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_model_predicts_zero() {
        let m = LstmModel::zeros(vocab(9), Shape { vocab: 9, embed: 4, hidden: 3 });
        assert_eq!(m.predict_hardness(&[1, 2, 3]).unwrap(), 0.0);
    }

    #[test]
    fn rejects_out_of_range_ids() {
        assert!(matches!(small(0).predict_ids(&[10]), Err(LstmError::Shape(_))));
    }
}
