use super::{Result, Tape, Tensor, TensorError};
use rand::Rng;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(usize);

impl ParamId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Named, ordered model parameters with accumulated gradients.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    names: Vec<String>,
    values: Vec<Tensor>,
    grads: Vec<Option<Tensor>>,
    index: HashMap<String, ParamId>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, value: Tensor) -> ParamId {
        let name = name.into();
        assert!(!self.index.contains_key(&name), "duplicate parameter `{name}`");
        let id = ParamId(self.values.len());
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.values.push(value);
        self.grads.push(None);
        id
    }

    /// Weights drawn from uniform(−scale, scale).
    pub fn add_uniform<R: Rng + ?Sized>(
        &mut self,
        name: impl Into<String>,
        rows: usize,
        cols: usize,
        scale: f64,
        rng: &mut R,
    ) -> ParamId {
        self.add(name, Tensor::uniform(rows, cols, -scale, scale, rng))
    }

    pub fn add_zeros(&mut self, name: impl Into<String>, rows: usize, cols: usize) -> ParamId {
        self.add(name, Tensor::zeros(rows, cols))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.values.len()).map(ParamId)
    }

    pub fn get(&self, name: &str) -> Option<ParamId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn value(&self, id: ParamId) -> &Tensor {
        &self.values[id.0]
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.values[id.0]
    }

    pub fn grad(&self, id: ParamId) -> Option<&Tensor> {
        self.grads[id.0].as_ref()
    }

    pub fn grad_mut(&mut self, id: ParamId) -> Option<&mut Tensor> {
        self.grads[id.0].as_mut()
    }

    pub fn scalar_count(&self) -> usize {
        self.values.iter().map(Tensor::len).sum()
    }

    /// Resets every gradient to zeros of the parameter's shape.
    pub fn zero_grads(&mut self) {
        for (g, v) in self.grads.iter_mut().zip(&self.values) {
            match g {
                Some(g) => g.data_mut().iter_mut().for_each(|x| *x = 0.0),
                None => *g = Some(Tensor::zeros(v.rows(), v.cols())),
            }
        }
    }

    /// Adds `scale ·` the parameter gradients of a finished tape.
    pub fn accumulate(&mut self, tape: &Tape, scale: f64) {
        for (id, g) in tape.param_grads() {
            let slot = self.grads[id.0].get_or_insert_with(|| Tensor::zeros(g.rows(), g.cols()));
            for (s, v) in slot.data_mut().iter_mut().zip(g.data()) {
                *s += scale * v;
            }
        }
    }

    pub fn grad_norm(&self) -> f64 {
        self.grads
            .iter()
            .flatten()
            .map(Tensor::l2_norm_sq)
            .sum::<f64>()
            .sqrt()
    }

    /// Overwrites values by name, checking shapes.
    pub fn load(&mut self, name: &str, value: Tensor) -> Result<()> {
        let id = self
            .get(name)
            .ok_or_else(|| TensorError::Invalid(format!("unknown parameter `{name}`")))?;
        let current = &self.values[id.0];
        if current.shape() != value.shape() {
            return Err(TensorError::ShapeMismatch {
                op: "load",
                left: current.shape(),
                right: value.shape(),
            });
        }
        self.values[id.0] = value;
        Ok(())
    }
}
