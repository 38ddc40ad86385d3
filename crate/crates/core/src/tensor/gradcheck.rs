use super::{ParamId, ParamStore, Result, Tape, TensorError, Var};

/// Outcome of comparing tape gradients against central differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    pub max_rel_error: f64,
    /// Parameter name, flat index, analytic and numeric gradient of the
    /// worst entry.
    pub worst: Option<(String, usize, f64, f64)>,
    pub checked: usize,
}

impl GradCheck {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_error <= tolerance
    }
}

/// `|a − n| / max(|a|, |n|, floor)`.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Denominator floor used by [`check_gradients`]. Central differences on a
/// loss of magnitude `L` carry rounding noise of about `L · 1e-16 / eps`,
/// around 1e-10 for the losses checked here; without a floor that noise
/// dominates the relative error of gradients near 1e-8.
pub const REL_FLOOR: f64 = 1e-5;

/// Checks every scalar of the listed parameters (all parameters when `only`
/// is `None`). `loss` must build a 1 × 1 value on the tape it is given and
/// be deterministic.
pub fn check_gradients<F>(store: &mut ParamStore, only: Option<&[ParamId]>, eps: f64, loss: F) -> Result<GradCheck>
where
    F: Fn(&mut Tape, &ParamStore) -> Result<Var>,
{
    let mut tape = Tape::new();
    let out = loss(&mut tape, store)?;
    tape.backward(out)?;
    store.zero_grads();
    store.accumulate(&tape, 1.0);

    let ids: Vec<ParamId> = match only {
        Some(ids) => ids.to_vec(),
        None => store.ids().collect(),
    };
    let eval = |store: &ParamStore| -> Result<f64> {
        let mut tape = Tape::new();
        let v = loss(&mut tape, store)?;
        Ok(tape.value(v).item())
    };

    let mut report = GradCheck {
        max_rel_error: 0.0,
        worst: None,
        checked: 0,
    };
    for id in ids {
        let analytic = store
            .grad(id)
            .ok_or_else(|| TensorError::MissingGrad(store.name(id).to_string()))?
            .clone();
        for k in 0..analytic.len() {
            let orig = store.value(id).data()[k];
            store.value_mut(id).data_mut()[k] = orig + eps;
            let plus = eval(store)?;
            store.value_mut(id).data_mut()[k] = orig - eps;
            let minus = eval(store)?;
            store.value_mut(id).data_mut()[k] = orig;
            let numeric = (plus - minus) / (2.0 * eps);
            let err = relative_error(analytic.data()[k], numeric, REL_FLOOR);
            report.checked += 1;
            if report.worst.is_none() || err > report.max_rel_error {
                report.max_rel_error = err;
                report.worst = Some((store.name(id).to_string(), k, analytic.data()[k], numeric));
            }
        }
    }
    store.zero_grads();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor;

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(1.0, 1.0, 1e-6), 0.0);
        assert!((relative_error(2.0, 1.0, 1e-6) - 0.5).abs() < 1e-15);
        assert!((relative_error(0.0, 1e-9, 1e-6) - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn tanh_log_softmax_chain() {
        let mut ps = ParamStore::new();
        let w = ps.add("w", Tensor::from_rows(&[vec![0.3, -0.7], vec![1.1, 0.2]]).unwrap());
        let r = check_gradients(&mut ps, None, 1e-5, |tape, ps| {
            let w = tape.param(ps, w);
            let x = tape.constant(Tensor::row_vector(vec![0.5, -1.5]));
            let y = tape.matmul(x, w)?;
            let y = tape.tanh(y)?;
            let y = tape.log_softmax(y)?;
            tape.pick(y, 0, 1)
        })
        .unwrap();
        assert!(r.passes(1e-6), "{r:?}");
        assert_eq!(r.checked, 4);
    }
}
