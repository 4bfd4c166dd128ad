//! Full-batch minimization of the CRF objective.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::crf::{objective, Layout, Sequence};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    /// Limited-memory BFGS with backtracking (Armijo) line search.
    Lbfgs,
    /// Steepest descent with an adaptive step ("bold driver").
    GradientDescent,
}

impl std::str::FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lbfgs" => Ok(Optimizer::Lbfgs),
            "gradient-descent" | "gd" => Ok(Optimizer::GradientDescent),
            other => Err(Error::Config(format!("unknown optimizer `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// L2 strength.
    pub lambda: f64,
    pub max_iterations: usize,
    /// Stop once the gradient norm falls to this value.
    pub tolerance: f64,
    pub optimizer: Optimizer,
    /// Both optimizers are deterministic full-batch methods starting from
    /// zero weights; the seed is recorded with the model.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 0.1,
            max_iterations: 100,
            tolerance: 1e-4,
            optimizer: Optimizer::Lbfgs,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Objective value after the initial point and after every accepted step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainTrace {
    pub objective: Vec<f64>,
    pub final_grad_norm: f64,
    pub converged: bool,
}

const HISTORY: usize = 10;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 40;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn minimize(
    layout: &Layout,
    data: &[Sequence],
    cfg: &TrainConfig,
) -> Result<(Vec<f64>, TrainTrace)> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyTrainingData);
    }
    let eval = |w: &[f64]| objective(layout, w, data, cfg.lambda);

    let mut w = vec![0.0; layout.len()];
    let (mut f, mut g) = eval(&w);
    if !f.is_finite() {
        return Err(Error::NonFiniteObjective { iteration: 0 });
    }
    let mut trace = TrainTrace {
        objective: vec![f],
        ..Default::default()
    };
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut step_size = 1.0 / norm(&g).max(1.0);

    for iteration in 1..=cfg.max_iterations {
        let gnorm = norm(&g);
        if gnorm <= cfg.tolerance {
            trace.converged = true;
            break;
        }

        let direction = match cfg.optimizer {
            Optimizer::Lbfgs => {
                let d = two_loop(&g, &history);
                if dot(&d, &g) < 0.0 {
                    d
                } else {
                    history.clear();
                    g.iter().map(|x| -x).collect()
                }
            }
            Optimizer::GradientDescent => g.iter().map(|x| -x).collect(),
        };
        let slope = dot(&g, &direction);

        let mut step = match cfg.optimizer {
            Optimizer::Lbfgs if !history.is_empty() => 1.0,
            Optimizer::Lbfgs => 1.0 / gnorm.max(1.0),
            Optimizer::GradientDescent => step_size,
        };
        let mut accepted = None;
        let mut saw_non_finite = false;
        for _ in 0..MAX_BACKTRACK {
            let candidate: Vec<f64> = w
                .iter()
                .zip(&direction)
                .map(|(wi, di)| wi + step * di)
                .collect();
            let (fc, gc) = eval(&candidate);
            if fc.is_finite() && fc <= f + ARMIJO * step * slope {
                accepted = Some((candidate, fc, gc));
                break;
            }
            saw_non_finite |= !fc.is_finite();
            step *= 0.5;
        }
        let Some((w_new, f_new, g_new)) = accepted else {
            if saw_non_finite {
                return Err(Error::NonFiniteObjective { iteration });
            }
            // No decrease possible along the search direction.
            break;
        };

        if cfg.optimizer == Optimizer::Lbfgs {
            let s: Vec<f64> = w_new.iter().zip(&w).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-12 {
                if history.len() == HISTORY {
                    history.pop_front();
                }
                history.push_back((s, y, 1.0 / sy));
            }
        } else {
            step_size = step * 1.2;
        }
        w = w_new;
        f = f_new;
        g = g_new;
        trace.objective.push(f);
    }
    trace.final_grad_norm = norm(&g);
    if trace.final_grad_norm <= cfg.tolerance {
        trace.converged = true;
    }
    Ok((w, trace))
}

/// L-BFGS two-loop recursion: returns `-H g`.
fn two_loop(g: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in &mut q {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|x| *x = -*x);
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Layout, Vec<Sequence>) {
        // features: 0 bias, 1 word-a, 2 word-b; labels 0/1/2
        let layout = Layout::new(3, 3);
        let seq = |words: &[usize], labels: &[usize]| Sequence {
            positions: words.iter().map(|&w| vec![(0, 1.0), (w, 1.0)]).collect(),
            labels: labels.to_vec(),
        };
        (
            layout,
            vec![seq(&[1, 2, 2], &[1, 0, 0]), seq(&[2, 1], &[0, 1]), seq(&[1], &[1])],
        )
    }

    #[test]
    fn objective_non_increasing_for_both_optimizers() {
        let (layout, data) = toy();
        for optimizer in [Optimizer::Lbfgs, Optimizer::GradientDescent] {
            let cfg = TrainConfig {
                optimizer,
                max_iterations: 50,
                ..Default::default()
            };
            let (_, trace) = minimize(&layout, &data, &cfg).unwrap();
            assert!(trace.objective.len() > 1);
            for pair in trace.objective.windows(2) {
                assert!(pair[1] <= pair[0], "{optimizer:?}: {pair:?}");
            }
        }
    }

    #[test]
    fn lbfgs_converges_on_toy() {
        let (layout, data) = toy();
        let cfg = TrainConfig {
            max_iterations: 500,
            tolerance: 1e-6,
            ..Default::default()
        };
        let (_, trace) = minimize(&layout, &data, &cfg).unwrap();
        assert!(trace.converged, "grad norm {}", trace.final_grad_norm);
    }

    #[test]
    fn empty_data_and_bad_config() {
        let (layout, _) = toy();
        assert!(matches!(
            minimize(&layout, &[], &TrainConfig::default()),
            Err(Error::EmptyTrainingData)
        ));
        let (layout, data) = toy();
        let cfg = TrainConfig {
            lambda: -1.0,
            ..Default::default()
        };
        assert!(matches!(minimize(&layout, &data, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn non_finite_features_are_reported() {
        let layout = Layout::new(1, 2);
        let data = vec![Sequence {
            positions: vec![vec![(0, f64::INFINITY)]],
            labels: vec![0],
        }];
        let cfg = TrainConfig::default();
        assert!(matches!(
            minimize(&layout, &data, &cfg),
            Err(Error::NonFiniteObjective { .. })
        ));
    }
}
