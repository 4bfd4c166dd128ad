//! Linear-chain CRF numerics over an arbitrary label count.
//!
//! The weight vector holds emission weights `(feature, label)` followed by
//! transition weights `(previous label, label)`. A path scores
//! `sum_t sum_k v_tk * w[f_tk, y_t] + sum_{t>0} w[y_{t-1}, y_t]`; there are no
//! separate start or stop weights.

use rayon::prelude::*;

/// Sparse real-valued features per position.
pub type Positions = Vec<Vec<(usize, f64)>>;

#[derive(Clone, Debug, PartialEq)]
pub struct Sequence {
    pub positions: Positions,
    pub labels: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub num_features: usize,
    pub num_labels: usize,
}

impl Layout {
    pub fn new(num_features: usize, num_labels: usize) -> Layout {
        Layout {
            num_features,
            num_labels,
        }
    }

    pub fn len(&self) -> usize {
        self.num_features * self.num_labels + self.num_labels * self.num_labels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn emission(&self, feature: usize, label: usize) -> usize {
        feature * self.num_labels + label
    }

    #[inline]
    pub fn transition(&self, prev: usize, label: usize) -> usize {
        self.num_features * self.num_labels + prev * self.num_labels + label
    }
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Emission score table, `T x L`, row-major.
pub fn emission_scores(layout: &Layout, w: &[f64], positions: &[Vec<(usize, f64)>]) -> Vec<f64> {
    let l = layout.num_labels;
    let mut em = vec![0.0; positions.len() * l];
    for (t, feats) in positions.iter().enumerate() {
        let row = &mut em[t * l..(t + 1) * l];
        for &(f, v) in feats {
            let base = layout.emission(f, 0);
            for (y, cell) in row.iter_mut().enumerate() {
                *cell += v * w[base + y];
            }
        }
    }
    em
}

/// Forward log-potentials `alpha` (`T x L`) and `log Z`.
pub fn forward(layout: &Layout, w: &[f64], em: &[f64]) -> (Vec<f64>, f64) {
    let l = layout.num_labels;
    let t_len = em.len() / l;
    if t_len == 0 {
        return (Vec::new(), 0.0);
    }
    let mut alpha = vec![0.0; em.len()];
    alpha[..l].copy_from_slice(&em[..l]);
    for t in 1..t_len {
        for y in 0..l {
            let prev = &alpha[(t - 1) * l..t * l];
            let lse = log_sum_exp(
                (0..l).map(|a| prev[a] + w[layout.transition(a, y)]),
            );
            alpha[t * l + y] = lse + em[t * l + y];
        }
    }
    let log_z = log_sum_exp(alpha[(t_len - 1) * l..].iter().copied());
    (alpha, log_z)
}

/// Backward log-potentials `beta` (`T x L`) and `log Z`.
pub fn backward(layout: &Layout, w: &[f64], em: &[f64]) -> (Vec<f64>, f64) {
    let l = layout.num_labels;
    let t_len = em.len() / l;
    if t_len == 0 {
        return (Vec::new(), 0.0);
    }
    let mut beta = vec![0.0; em.len()];
    for t in (0..t_len - 1).rev() {
        for a in 0..l {
            beta[t * l + a] = log_sum_exp((0..l).map(|y| {
                w[layout.transition(a, y)] + em[(t + 1) * l + y] + beta[(t + 1) * l + y]
            }));
        }
    }
    let log_z = log_sum_exp((0..l).map(|y| em[y] + beta[y]));
    (beta, log_z)
}

pub fn path_score(layout: &Layout, w: &[f64], em: &[f64], labels: &[usize]) -> f64 {
    let l = layout.num_labels;
    labels
        .iter()
        .enumerate()
        .map(|(t, &y)| {
            let trans = if t > 0 {
                w[layout.transition(labels[t - 1], y)]
            } else {
                0.0
            };
            em[t * l + y] + trans
        })
        .sum()
}

/// Negative log-likelihood of one sequence. When `grad` is given, adds
/// `expected - empirical` feature counts into it.
pub fn sequence_nll(layout: &Layout, w: &[f64], seq: &Sequence, grad: Option<&mut [f64]>) -> f64 {
    let l = layout.num_labels;
    let t_len = seq.labels.len();
    if t_len == 0 {
        return 0.0;
    }
    let em = emission_scores(layout, w, &seq.positions);
    let (alpha, log_z) = forward(layout, w, &em);
    let nll = log_z - path_score(layout, w, &em, &seq.labels);

    if let Some(grad) = grad {
        let (beta, _) = backward(layout, w, &em);
        let mut marginal = vec![0.0; l];
        for t in 0..t_len {
            for y in 0..l {
                marginal[y] = (alpha[t * l + y] + beta[t * l + y] - log_z).exp();
            }
            marginal[seq.labels[t]] -= 1.0;
            for &(f, v) in &seq.positions[t] {
                let base = layout.emission(f, 0);
                for y in 0..l {
                    grad[base + y] += v * marginal[y];
                }
            }
            if t > 0 {
                for a in 0..l {
                    let left = alpha[(t - 1) * l + a];
                    for y in 0..l {
                        let idx = layout.transition(a, y);
                        let p = (left + w[idx] + em[t * l + y] + beta[t * l + y] - log_z).exp();
                        grad[idx] += p;
                    }
                }
                grad[layout.transition(seq.labels[t - 1], seq.labels[t])] -= 1.0;
            }
        }
    }
    nll
}

/// Sequences per work unit. Partial results are reduced in chunk order, so
/// the objective is bit-identical regardless of thread count.
const CHUNK: usize = 32;

/// Regularized objective `sum NLL + lambda/2 |w|^2` and its gradient.
pub fn objective(layout: &Layout, w: &[f64], data: &[Sequence], lambda: f64) -> (f64, Vec<f64>) {
    let partials: Vec<(f64, Vec<f64>)> = data
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut g = vec![0.0; layout.len()];
            let f: f64 = chunk
                .iter()
                .map(|s| sequence_nll(layout, w, s, Some(&mut g)))
                .sum();
            (f, g)
        })
        .collect();
    let mut value = 0.0;
    let mut grad = vec![0.0; layout.len()];
    for (f, g) in partials {
        value += f;
        for (a, b) in grad.iter_mut().zip(&g) {
            *a += b;
        }
    }
    if lambda > 0.0 {
        let mut sq = 0.0;
        for (gi, wi) in grad.iter_mut().zip(w) {
            *gi += lambda * wi;
            sq += wi * wi;
        }
        value += 0.5 * lambda * sq;
    }
    (value, grad)
}

/// Highest-scoring label path and its score. Ties go to the lower label
/// index, both for back-pointers and for the final label.
pub fn viterbi(layout: &Layout, w: &[f64], em: &[f64]) -> (Vec<usize>, f64) {
    let l = layout.num_labels;
    let t_len = em.len() / l;
    if t_len == 0 {
        return (Vec::new(), 0.0);
    }
    let mut delta = em[..l].to_vec();
    let mut back = vec![0usize; t_len * l];
    for t in 1..t_len {
        let mut next = vec![0.0; l];
        for y in 0..l {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for (a, d) in delta.iter().enumerate() {
                let s = d + w[layout.transition(a, y)];
                if s > best {
                    best = s;
                    arg = a;
                }
            }
            next[y] = best + em[t * l + y];
            back[t * l + y] = arg;
        }
        delta = next;
    }
    let mut best = f64::NEG_INFINITY;
    let mut last = 0;
    for (y, &d) in delta.iter().enumerate() {
        if d > best {
            best = d;
            last = y;
        }
    }
    let mut path = vec![0; t_len];
    path[t_len - 1] = last;
    for t in (1..t_len).rev() {
        path[t - 1] = back[t * l + path[t]];
    }
    (path, best)
}
