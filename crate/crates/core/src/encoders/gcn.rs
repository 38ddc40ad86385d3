use crate::tensor::{ParamId, ParamStore, Result, Tape, Tensor, Var};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
    Sigmoid,
}

impl Activation {
    fn apply(self, tape: &mut Tape, x: Var) -> Result<Var> {
        match self {
            Activation::Relu => tape.relu(x),
            Activation::Tanh => tape.tanh(x),
            Activation::Sigmoid => tape.sigmoid(x),
        }
    }
}

/// One graph convolution with separate weights for incoming and outgoing
/// edges and an optional highway gate.
#[derive(Debug, Clone)]
pub struct GcnLayer {
    pub w_in: ParamId,
    pub w_out: ParamId,
    pub b: ParamId,
    pub gate_w: Option<ParamId>,
    pub gate_b: Option<ParamId>,
}

#[derive(Debug, Clone)]
pub struct Gcn {
    pub layers: Vec<GcnLayer>,
    pub dim: usize,
    pub activation: Activation,
}

/// Directed adjacency as two dense matrices: `incoming[i][j]` counts edges
/// `j → i`, `outgoing[i][j]` counts edges `i → j`.
pub struct Adjacency {
    pub incoming: Tensor,
    pub outgoing: Tensor,
}

impl Adjacency {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut incoming = Tensor::zeros(n, n);
        let mut outgoing = Tensor::zeros(n, n);
        for (a, b) in edges {
            incoming.set(b, a, incoming.get(b, a) + 1.0);
            outgoing.set(a, b, outgoing.get(a, b) + 1.0);
        }
        Adjacency { incoming, outgoing }
    }
}

impl Gcn {
    pub fn new<R: Rng + ?Sized>(
        store: &mut ParamStore,
        prefix: &str,
        dim: usize,
        layers: usize,
        activation: Activation,
        highway: bool,
        init: f64,
        rng: &mut R,
    ) -> Self {
        let layers = (0..layers)
            .map(|k| GcnLayer {
                w_in: store.add_uniform(format!("{prefix}.{k}.w_in"), dim, dim, init, rng),
                w_out: store.add_uniform(format!("{prefix}.{k}.w_out"), dim, dim, init, rng),
                b: store.add_zeros(format!("{prefix}.{k}.b"), 1, dim),
                gate_w: highway.then(|| store.add_uniform(format!("{prefix}.{k}.gate_w"), dim, dim, init, rng)),
                gate_b: highway.then(|| store.add_zeros(format!("{prefix}.{k}.gate_b"), 1, dim)),
            })
            .collect();
        Gcn {
            layers,
            dim,
            activation,
        }
    }

    /// `h^{k+1}_i = σ(Σ_{j∈N(i)} W_dir(j,i) h^k_j + b)`, then
    /// `t ⊙ h^{k+1} + (1 − t) ⊙ h^k` with `t = sigmoid(W_t h^k + b_t)` when
    /// the layer has a highway gate.
    pub fn forward(&self, tape: &mut Tape, store: &ParamStore, x: Var, adjacency: &Adjacency) -> Result<Var> {
        let a_in = tape.constant(adjacency.incoming.clone());
        let a_out = tape.constant(adjacency.outgoing.clone());
        let mut h = x;
        for layer in &self.layers {
            let w_in = tape.param(store, layer.w_in);
            let w_out = tape.param(store, layer.w_out);
            let b = tape.param(store, layer.b);
            let hin = tape.matmul(h, w_in)?;
            let msg_in = tape.matmul(a_in, hin)?;
            let hout = tape.matmul(h, w_out)?;
            let msg_out = tape.matmul(a_out, hout)?;
            let z = tape.add(msg_in, msg_out)?;
            let z = tape.add(z, b)?;
            let conv = self.activation.apply(tape, z)?;
            h = match (layer.gate_w, layer.gate_b) {
                (Some(gw), Some(gb)) => {
                    let gw = tape.param(store, gw);
                    let gb = tape.param(store, gb);
                    let t = tape.matmul(h, gw)?;
                    let t = tape.add(t, gb)?;
                    let t = tape.sigmoid(t)?;
                    let carry = tape.one_minus(t)?;
                    let a = tape.mul(t, conv)?;
                    let c = tape.mul(carry, h)?;
                    tape.add(a, c)?
                }
                _ => conv,
            };
        }
        Ok(h)
    }
}

/// Keeps each edge independently with probability `1 − rate`.
pub fn drop_edges<R: Rng + ?Sized>(edges: &[(usize, usize)], rate: f64, rng: &mut R) -> Vec<(usize, usize)> {
    if rate <= 0.0 {
        return edges.to_vec();
    }
    edges.iter().copied().filter(|_| rng.gen::<f64>() >= rate).collect()
}
