use super::{ParamStore, Result, TensorError};
use serde::{Deserialize, Serialize};

/// `p ← p − lr · grad(p)` for every parameter, then zeroes the gradients.
pub fn sgd_step(params: &mut ParamStore, lr: f64) -> Result<()> {
    for id in params.ids() {
        if params.grad(id).is_none() {
            return Err(TensorError::MissingGrad(params.name(id).to_string()));
        }
    }
    for id in params.ids().collect::<Vec<_>>() {
        let grad = params.grad(id).expect("checked above").clone();
        let value = params.value_mut(id);
        for (p, g) in value.data_mut().iter_mut().zip(grad.data()) {
            *p -= lr * g;
        }
    }
    params.zero_grads();
    Ok(())
}

/// Rescales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
pub fn clip_grad_norm(params: &mut ParamStore, max_norm: f64) -> f64 {
    let norm = params.grad_norm();
    if norm > max_norm && norm > 0.0 {
        let s = max_norm / norm;
        for id in params.ids().collect::<Vec<_>>() {
            if let Some(g) = params.grad_mut(id) {
                g.data_mut().iter_mut().for_each(|v| *v *= s);
            }
        }
    }
    norm
}

/// Multiplicative learning-rate decay applied on every epoch whose dev
/// score did not improve on the best so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    pub lr: f64,
    pub decay: f64,
    pub bad_epochs: usize,
}

impl LrSchedule {
    pub fn new(lr: f64, decay: f64) -> Self {
        LrSchedule {
            lr,
            decay,
            bad_epochs: 0,
        }
    }

    /// Records the outcome of one epoch and returns the learning rate for
    /// the next one.
    pub fn observe(&mut self, improved: bool) -> f64 {
        if improved {
            self.bad_epochs = 0;
        } else {
            self.bad_epochs += 1;
            self.lr *= self.decay;
        }
        self.lr
    }

    /// Replays a dev-metric history (higher is better) from scratch.
    pub fn replay(initial: f64, decay: f64, history: &[f64]) -> f64 {
        let mut sched = LrSchedule::new(initial, decay);
        let mut best = f64::NEG_INFINITY;
        for &m in history {
            let improved = m > best;
            if improved {
                best = m;
            }
            sched.observe(improved);
        }
        sched.lr
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{Tape, Tensor};

    #[test]
    fn sgd_arithmetic() {
        let mut ps = ParamStore::new();
        let p = ps.add("p", Tensor::scalar(1.0));
        ps.zero_grads();
        ps.grad_mut(p).unwrap().data_mut()[0] = 0.5;
        sgd_step(&mut ps, 1.0).unwrap();
        assert_eq!(ps.value(p).item(), 0.5);
        assert_eq!(ps.grad(p).unwrap().item(), 0.0);
    }

    #[test]
    fn zero_lr_leaves_params() {
        let mut ps = ParamStore::new();
        let p = ps.add("p", Tensor::scalar(1.0));
        ps.zero_grads();
        ps.grad_mut(p).unwrap().data_mut()[0] = 3.0;
        sgd_step(&mut ps, 0.0).unwrap();
        assert_eq!(ps.value(p).item(), 1.0);
    }

    #[test]
    fn missing_grad_is_an_error() {
        let mut ps = ParamStore::new();
        ps.add("w", Tensor::scalar(1.0));
        assert_eq!(sgd_step(&mut ps, 1.0).unwrap_err(), TensorError::MissingGrad("w".into()));
    }

    #[test]
    fn quadratic_bowl_converges() {
        // f(p) = Σ (p_i − c_i)², minimum at c.
        let target = [3.0, -2.0, 0.5];
        let mut ps = ParamStore::new();
        let p = ps.add("p", Tensor::row_vector(vec![0.0; 3]));
        for _ in 0..100 {
            let mut tape = Tape::new();
            let pv = tape.param(&ps, p);
            let c = tape.constant(Tensor::row_vector(target.to_vec()));
            let negc = tape.scale(c, -1.0).unwrap();
            let d = tape.add(pv, negc).unwrap();
            let sq = tape.mul(d, d).unwrap();
            let loss = tape.sum(sq).unwrap();
            tape.backward(loss).unwrap();
            ps.zero_grads();
            ps.accumulate(&tape, 1.0);
            sgd_step(&mut ps, 0.1).unwrap();
        }
        for (v, c) in ps.value(p).data().iter().zip(target) {
            assert!((v - c).abs() < 1e-6, "{v} vs {c}");
        }
    }

    #[test]
    fn clipping_caps_norm() {
        let mut ps = ParamStore::new();
        let p = ps.add("p", Tensor::row_vector(vec![0.0; 2]));
        ps.zero_grads();
        ps.grad_mut(p).unwrap().data_mut().copy_from_slice(&[30.0, 40.0]);
        assert_eq!(clip_grad_norm(&mut ps, 5.0), 50.0);
        assert!((ps.grad_norm() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn decay_schedule() {
        assert_eq!(LrSchedule::replay(1.0, 0.8, &[10.0, 11.0, 12.0]), 1.0);
        assert_eq!(LrSchedule::replay(1.0, 0.8, &[10.0, 9.0]), 0.8);
        let lr = LrSchedule::replay(1.0, 0.8, &[10.0, 9.0, 10.0]);
        assert!((lr - 0.64).abs() < 1e-15);
    }
}
