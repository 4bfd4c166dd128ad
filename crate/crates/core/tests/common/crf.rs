//! Brute-force oracles for the CRF numerics.

use proc2bpmn::ner::crf::{backward, emission_scores, forward, objective, viterbi, Layout, Positions, Sequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_positions(rng: &mut ChaCha8Rng, len: usize, features: usize) -> Positions {
    (0..len)
        .map(|_| {
            let mut p = Vec::new();
            for f in 0..features {
                if rng.gen_bool(0.5) {
                    let v = if rng.gen_bool(0.3) { rng.gen_range(-1.0..1.0) } else { 1.0 };
                    p.push((f, v));
                }
            }
            if p.is_empty() {
                p.push((0, 1.0));
            }
            p
        })
        .collect()
}

pub fn random_weights(rng: &mut ChaCha8Rng, layout: &Layout) -> Vec<f64> {
    (0..layout.len()).map(|_| rng.gen_range(-1.5..1.5)).collect()
}

/// Path score computed straight from the definition.
pub fn naive_score(layout: &Layout, w: &[f64], pos: &Positions, path: &[usize]) -> f64 {
    let mut s = 0.0;
    for (t, &y) in path.iter().enumerate() {
        for &(f, v) in &pos[t] {
            s += v * w[layout.emission(f, y)];
        }
        if t > 0 {
            s += w[layout.transition(path[t - 1], y)];
        }
    }
    s
}

pub fn all_paths(labels: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..labels).map(move |y| {
                    let mut q = p.clone();
                    q.push(y);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn brute_log_z(layout: &Layout, w: &[f64], pos: &Positions) -> f64 {
    let scores: Vec<f64> = all_paths(layout.num_labels, pos.len())
        .iter()
        .map(|p| naive_score(layout, w, pos, p))
        .collect();
    let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln()
}

pub fn brute_objective(layout: &Layout, w: &[f64], data: &[Sequence], lambda: f64) -> f64 {
    let nll: f64 = data
        .iter()
        .map(|s| brute_log_z(layout, w, &s.positions) - naive_score(layout, w, &s.positions, &s.labels))
        .sum();
    nll + 0.5 * lambda * w.iter().map(|x| x * x).sum::<f64>()
}

pub fn random_problem(seed: u64) -> (Layout, Vec<f64>, Vec<Sequence>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layout = Layout::new(rng.gen_range(2..=5), rng.gen_range(2..=4));
    let w = random_weights(&mut rng, &layout);
    let data = (0..rng.gen_range(1..=3))
        .map(|_| {
            let len = rng.gen_range(1..=4);
            Sequence {
                positions: random_positions(&mut rng, len, layout.num_features),
                labels: (0..len).map(|_| rng.gen_range(0..layout.num_labels)).collect(),
            }
        })
        .collect();
    (layout, w, data)
}

/// Largest relative gap between the analytic gradient and central
/// differences on the random problem drawn from `seed`.
pub fn gradient_gap(seed: u64, lambda: f64) -> f64 {
    let (layout, w, data) = random_problem(seed);
    let (_, grad) = objective(&layout, &w, &data, lambda);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..w.len() {
        let mut up = w.clone();
        up[i] += h;
        let mut down = w.clone();
        down[i] -= h;
        let numeric =
            (objective(&layout, &up, &data, lambda).0 - objective(&layout, &down, &data, lambda).0) / (2.0 * h);
        worst = worst.max((grad[i] - numeric).abs() / grad[i].abs().max(numeric.abs()).max(1.0));
    }
    worst
}

/// Whether Viterbi finds the exhaustive-search optimum on a random
/// instance of length `len` over `labels` labels.
pub fn viterbi_is_exact(rng: &mut ChaCha8Rng, labels: usize, len: usize) -> bool {
    let layout = Layout::new(4, labels);
    let w = random_weights(rng, &layout);
    let pos = random_positions(rng, len, 4);
    let em = emission_scores(&layout, &w, &pos);
    let (path, score) = viterbi(&layout, &w, &em);
    let (best, best_score) = all_paths(labels, len)
        .into_iter()
        .map(|p| {
            let s = naive_score(&layout, &w, &pos, &p);
            (p, s)
        })
        .fold((vec![], f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    path == best && (score - best_score).abs() < 1e-9
}

/// |log Z forward - log Z backward| on a random instance.
pub fn partition_gap(rng: &mut ChaCha8Rng, labels: usize, len: usize) -> f64 {
    let layout = Layout::new(5, labels);
    let w: Vec<f64> = (0..layout.len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let pos = random_positions(rng, len, 5);
    let em = emission_scores(&layout, &w, &pos);
    (forward(&layout, &w, &em).1 - backward(&layout, &w, &em).1).abs()
}
