use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Vertex};
use crate::skeleton::{SkeletonConfig, SkeletonLabels};

use super::features::{raw_features, Normalizer};
use super::propagation::Propagation;

/// Shape of an SGNN: one message-passing layer per skeleton tier, then two
/// MLP heads over the concatenated pair embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Architecture {
    pub feature_dim: usize,
    pub embedding_dim: usize,
    pub layers: usize,
    pub head_hidden: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpec {
    pub name: String,
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

impl Architecture {
    /// Parameter tensors in storage order: per layer `self`, `msg`, `bias`;
    /// then each head's `weight`/`bias` pairs (distance head first).
    pub fn layout(&self) -> Vec<TensorSpec> {
        let mut specs = Vec::new();
        let mut offset = 0;
        let mut push = |name: String, rows: usize, cols: usize| {
            specs.push(TensorSpec {
                name,
                offset,
                rows,
                cols,
            });
            offset += rows * cols;
        };
        for l in 0..self.layers {
            let d_in = if l == 0 { self.feature_dim } else { self.embedding_dim };
            push(format!("mp{l}.self"), d_in, self.embedding_dim);
            push(format!("mp{l}.msg"), d_in, self.embedding_dim);
            push(format!("mp{l}.bias"), 1, self.embedding_dim);
        }
        for head in ["dist", "hop"] {
            let dims = self.head_dims();
            for i in 0..dims.len() - 1 {
                push(format!("{head}.{i}.weight"), dims[i], dims[i + 1]);
                push(format!("{head}.{i}.bias"), 1, dims[i + 1]);
            }
        }
        specs
    }

    pub fn head_dims(&self) -> Vec<usize> {
        let mut dims = vec![2 * self.embedding_dim];
        dims.extend_from_slice(&self.head_hidden);
        dims.push(1);
        dims
    }

    pub fn param_count(&self) -> usize {
        self.layout().last().map_or(0, |t| t.offset + t.len())
    }

    fn head_dense_count(&self) -> usize {
        self.head_hidden.len() + 1
    }

    fn head_tensor(&self, head: usize, dense: usize) -> usize {
        3 * self.layers + head * 2 * self.head_dense_count() + 2 * dense
    }
}

/// Maximum absolute test-set errors of the two heads, in original units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBuffers {
    pub distance: f64,
    pub hop: f64,
}

/// Normalized features and per-tier propagation operators of one graph.
#[derive(Debug, Clone)]
pub struct GraphContext {
    pub features: Array2<f64>,
    pub propagation: Propagation,
}

impl GraphContext {
    pub fn new(g: &Graph, labels: &SkeletonLabels, normalizer: &Normalizer) -> Self {
        GraphContext {
            features: normalizer.apply(&raw_features(g, labels)),
            propagation: Propagation::from_labels(labels),
        }
    }
}

/// A training or evaluation pair with its ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingPair {
    pub source: Vertex,
    pub target: Vertex,
    pub distance: f64,
    pub hops: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossParts {
    pub total: f64,
    pub distance: f64,
    pub hop: f64,
}

/// Precomputed first-layer head products so one pair prediction is a row
/// add plus the remaining small dense layers.
#[derive(Debug, Clone)]
struct HeadCache {
    left: [Array2<f64>; 2],
    right: [Array2<f64>; 2],
}

#[derive(Debug, Clone)]
pub struct SgnnModel {
    pub arch: Architecture,
    pub skeleton: SkeletonConfig,
    pub params: Vec<f64>,
    pub normalizer: Normalizer,
    /// Targets are trained divided by these and multiplied back at inference.
    pub dist_scale: f64,
    pub hop_scale: f64,
    pub gamma: f64,
    pub error_buffers: ErrorBuffers,
    embeddings: Option<Array2<f64>>,
    cache: Option<HeadCache>,
    specs: Vec<TensorSpec>,
}

struct Forward {
    /// `h[0]` is the input; `h[l + 1]` the output of layer `l`.
    h: Vec<Array2<f64>>,
    m: Vec<Array2<f64>>,
}

struct HeadForward {
    /// Input of each dense layer; `acts[0]` is the pair embedding.
    acts: Vec<Array2<f64>>,
    out: Array1<f64>,
}

impl SgnnModel {
    /// Fresh model with uniform `±sqrt(6 / (fan_in + fan_out))` weights and
    /// zero biases.
    pub fn new(arch: Architecture, skeleton: SkeletonConfig, normalizer: Normalizer, gamma: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arch_specs = arch.layout();
        let mut params = vec![0.0; arch.param_count()];
        for spec in arch_specs.iter() {
            if spec.name.ends_with("bias") {
                continue;
            }
            let limit = (6.0 / (spec.rows + spec.cols) as f64).sqrt();
            for p in &mut params[spec.range()] {
                *p = rng.gen_range(-limit..=limit);
            }
        }
        SgnnModel {
            arch,
            skeleton,
            params,
            normalizer,
            dist_scale: 1.0,
            hop_scale: 1.0,
            gamma,
            error_buffers: ErrorBuffers {
                distance: f64::INFINITY,
                hop: f64::INFINITY,
            },
            embeddings: None,
            cache: None,
            specs: arch_specs,
        }
    }

    pub fn layout(&self) -> Vec<TensorSpec> {
        self.specs.clone()
    }

    fn tensor<'a>(&self, params: &'a [f64], specs: &[TensorSpec], idx: usize) -> ArrayView2<'a, f64> {
        let spec = &specs[idx];
        ArrayView2::from_shape((spec.rows, spec.cols), &params[spec.range()]).expect("layout shape")
    }

    fn bias<'a>(&self, params: &'a [f64], specs: &[TensorSpec], idx: usize) -> ArrayView1<'a, f64> {
        ArrayView1::from(&params[specs[idx].range()])
    }

    fn forward(&self, ctx: &GraphContext, specs: &[TensorSpec]) -> Forward {
        assert_eq!(ctx.features.ncols(), self.arch.feature_dim, "feature width mismatch");
        assert_eq!(ctx.propagation.tiers(), self.arch.layers, "tier count mismatch");
        let mut h = vec![ctx.features.clone()];
        let mut m = Vec::with_capacity(self.arch.layers);
        for l in 0..self.arch.layers {
            let prev = &h[l];
            let msg = ctx.propagation.apply(l, prev);
            let w_self = self.tensor(&self.params, specs, 3 * l);
            let w_msg = self.tensor(&self.params, specs, 3 * l + 1);
            let b = self.bias(&self.params, specs, 3 * l + 2);
            let mut z = prev.dot(&w_self) + msg.dot(&w_msg);
            z += &b;
            z.mapv_inplace(relu);
            m.push(msg);
            h.push(z);
        }
        Forward { h, m }
    }

    /// Final-layer embeddings, one row per vertex.
    pub fn embed(&self, ctx: &GraphContext) -> Array2<f64> {
        let specs = self.layout();
        self.forward(ctx, &specs).h.pop().expect("at least the input")
    }

    fn pair_input(emb: &Array2<f64>, batch: &[TrainingPair]) -> Array2<f64> {
        let d = emb.ncols();
        let mut x = Array2::zeros((batch.len(), 2 * d));
        for (r, p) in batch.iter().enumerate() {
            x.slice_mut(s![r, ..d]).assign(&emb.row(p.source));
            x.slice_mut(s![r, d..]).assign(&emb.row(p.target));
        }
        x
    }

    fn head_forward(&self, specs: &[TensorSpec], head: usize, input: Array2<f64>) -> HeadForward {
        let dense = self.arch.head_dense_count();
        let mut acts = vec![input];
        let mut out = None;
        for i in 0..dense {
            let w = self.tensor(&self.params, specs, self.arch.head_tensor(head, i));
            let b = self.bias(&self.params, specs, self.arch.head_tensor(head, i) + 1);
            let mut a = acts[i].dot(&w);
            a += &b;
            if i + 1 < dense {
                a.mapv_inplace(relu);
                acts.push(a);
            } else {
                out = Some(a.column(0).to_owned());
            }
        }
        HeadForward {
            acts,
            out: out.expect("head has an output layer"),
        }
    }

    /// Raw (normalized-space) head outputs for a batch under embeddings `emb`.
    pub fn head_outputs(&self, emb: &Array2<f64>, batch: &[TrainingPair]) -> (Array1<f64>, Array1<f64>) {
        let specs = self.layout();
        let x = Self::pair_input(emb, batch);
        let d = self.head_forward(&specs, 0, x.clone()).out;
        let h = self.head_forward(&specs, 1, x).out;
        (d, h)
    }

    fn targets(&self, batch: &[TrainingPair]) -> (Array1<f64>, Array1<f64>) {
        let yd = batch.iter().map(|p| p.distance / self.dist_scale).collect();
        let yh = batch.iter().map(|p| p.hops / self.hop_scale).collect();
        (yd, yh)
    }

    fn loss_parts(&self, pd: &Array1<f64>, ph: &Array1<f64>, batch: &[TrainingPair]) -> LossParts {
        let (yd, yh) = self.targets(batch);
        let n = batch.len() as f64;
        let distance = (pd - &yd).mapv(|e| e * e).sum() / n;
        let hop = (ph - &yh).mapv(|e| e * e).sum() / n;
        LossParts {
            total: self.gamma * distance + (1.0 - self.gamma) * hop,
            distance,
            hop,
        }
    }

    /// Joint loss `gamma * MSE_d + (1 - gamma) * MSE_h` on normalized targets.
    pub fn loss(&self, ctx: &GraphContext, batch: &[TrainingPair]) -> LossParts {
        assert!(!batch.is_empty(), "empty batch");
        let emb = self.embed(ctx);
        let (pd, ph) = self.head_outputs(&emb, batch);
        self.loss_parts(&pd, &ph, batch)
    }

    /// Loss and its gradient with respect to every parameter, laid out like
    /// `self.params`. Gradients flow through both heads and all
    /// message-passing layers.
    pub fn loss_and_grads(&self, ctx: &GraphContext, batch: &[TrainingPair]) -> (LossParts, Vec<f64>) {
        assert!(!batch.is_empty(), "empty batch");
        let specs = self.layout();
        let mut grads = vec![0.0; self.params.len()];
        let fwd = self.forward(ctx, &specs);
        let emb = fwd.h.last().expect("embeddings");
        let x = Self::pair_input(emb, batch);
        let heads = [self.head_forward(&specs, 0, x.clone()), self.head_forward(&specs, 1, x)];
        let parts = self.loss_parts(&heads[0].out, &heads[1].out, batch);
        let (yd, yh) = self.targets(batch);
        let n = batch.len() as f64;
        let d_out = [
            (&heads[0].out - &yd) * (2.0 * self.gamma / n),
            (&heads[1].out - &yh) * (2.0 * (1.0 - self.gamma) / n),
        ];

        let d = self.arch.embedding_dim;
        let mut d_input = Array2::<f64>::zeros((batch.len(), 2 * d));
        for head in 0..2 {
            let fwd_head = &heads[head];
            let dense = self.arch.head_dense_count();
            let mut delta = d_out[head].clone().insert_axis(Axis(1));
            for i in (0..dense).rev() {
                let wi = self.arch.head_tensor(head, i);
                let act = &fwd_head.acts[i];
                grad_view(&mut grads, &specs[wi]).scaled_add(1.0, &act.t().dot(&delta));
                grad_view(&mut grads, &specs[wi + 1])
                    .row_mut(0)
                    .scaled_add(1.0, &delta.sum_axis(Axis(0)));
                let w = self.tensor(&self.params, &specs, wi);
                let mut d_act = delta.dot(&w.t());
                if i > 0 {
                    d_act.zip_mut_with(act, |g, &a| {
                        if a <= 0.0 {
                            *g = 0.0
                        }
                    });
                    delta = d_act;
                } else {
                    d_input += &d_act;
                }
            }
        }

        let nv = emb.nrows();
        let mut d_h = Array2::<f64>::zeros((nv, d));
        for (r, p) in batch.iter().enumerate() {
            let row = d_input.row(r);
            d_h.row_mut(p.source).scaled_add(1.0, &row.slice(s![..d]));
            d_h.row_mut(p.target).scaled_add(1.0, &row.slice(s![d..]));
        }

        for l in (0..self.arch.layers).rev() {
            let out = &fwd.h[l + 1];
            let mut dz = d_h;
            dz.zip_mut_with(out, |g, &a| {
                if a <= 0.0 {
                    *g = 0.0
                }
            });
            let h_in = &fwd.h[l];
            grad_view(&mut grads, &specs[3 * l]).scaled_add(1.0, &h_in.t().dot(&dz));
            grad_view(&mut grads, &specs[3 * l + 1]).scaled_add(1.0, &fwd.m[l].t().dot(&dz));
            grad_view(&mut grads, &specs[3 * l + 2])
                .row_mut(0)
                .scaled_add(1.0, &dz.sum_axis(Axis(0)));
            if l == 0 {
                break;
            }
            let w_self = self.tensor(&self.params, &specs, 3 * l);
            let w_msg = self.tensor(&self.params, &specs, 3 * l + 1);
            let d_msg = dz.dot(&w_msg.t());
            d_h = dz.dot(&w_self.t()) + ctx.propagation.apply_transpose(l, &d_msg);
        }
        (parts, grads)
    }

    /// Computes and stores embeddings for `ctx`'s graph, enabling
    /// [`predict_pair`](Self::predict_pair).
    pub fn attach_embeddings(&mut self, ctx: &GraphContext) {
        let emb = self.embed(ctx);
        self.set_embeddings(emb);
    }

    pub fn set_embeddings(&mut self, emb: Array2<f64>) {
        assert_eq!(emb.ncols(), self.arch.embedding_dim, "embedding width mismatch");
        let specs = self.layout();
        let d = self.arch.embedding_dim;
        let mut left: [Array2<f64>; 2] = [Array2::zeros((0, 0)), Array2::zeros((0, 0))];
        let mut right = left.clone();
        for head in 0..2 {
            let w = self.tensor(&self.params, &specs, self.arch.head_tensor(head, 0));
            left[head] = emb.dot(&w.slice(s![..d, ..]));
            right[head] = emb.dot(&w.slice(s![d.., ..]));
        }
        self.cache = Some(HeadCache { left, right });
        self.embeddings = Some(emb);
    }

    pub fn embeddings(&self) -> Option<&Array2<f64>> {
        self.embeddings.as_ref()
    }

    fn predict_head(&self, specs: &[TensorSpec], head: usize, s: Vertex, t: Vertex) -> f64 {
        let cache = self.cache.as_ref().expect("embeddings not attached");
        let dense = self.arch.head_dense_count();
        let b0 = self.bias(&self.params, specs, self.arch.head_tensor(head, 0) + 1);
        let mut act: Vec<f64> = cache.left[head]
            .row(s)
            .iter()
            .zip(cache.right[head].row(t))
            .zip(b0)
            .map(|((a, b), c)| a + b + c)
            .collect();
        if dense == 1 {
            return act[0];
        }
        act.iter_mut().for_each(|a| *a = relu(*a));
        for i in 1..dense {
            let w = self.tensor(&self.params, specs, self.arch.head_tensor(head, i));
            let b = self.bias(&self.params, specs, self.arch.head_tensor(head, i) + 1);
            let mut next: Vec<f64> = b.to_vec();
            for (k, &a) in act.iter().enumerate() {
                if a != 0.0 {
                    for (o, &wk) in next.iter_mut().zip(w.row(k)) {
                        *o += a * wk;
                    }
                }
            }
            if i + 1 < dense {
                next.iter_mut().for_each(|a| *a = relu(*a));
            }
            act = next;
        }
        act[0]
    }

    /// Predicted `(distance, hops)` in original units, clamped at zero.
    /// The pair is ordered: `(s, t)` and `(t, s)` may differ.
    pub fn predict_pair(&self, s: Vertex, t: Vertex) -> (f64, f64) {
        (self.predict_distance(s, t), self.predict_hop(s, t))
    }

    pub fn predict_distance(&self, s: Vertex, t: Vertex) -> f64 {
        (self.predict_head(&self.specs, 0, s, t) * self.dist_scale).max(0.0)
    }

    pub fn predict_hop(&self, s: Vertex, t: Vertex) -> f64 {
        (self.predict_head(&self.specs, 1, s, t) * self.hop_scale).max(0.0)
    }
}

fn grad_view<'a>(grads: &'a mut [f64], spec: &TensorSpec) -> ArrayViewMut2<'a, f64> {
    ArrayViewMut2::from_shape((spec.rows, spec.cols), &mut grads[spec.range()]).expect("layout shape")
}

#[inline]
fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}
