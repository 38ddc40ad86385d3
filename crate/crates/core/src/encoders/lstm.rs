use crate::tensor::{ParamId, ParamStore, Result, Tape, Tensor, Var};
use rand::Rng;

/// Single-layer LSTM. Gate columns are ordered `[input | forget | output | candidate]`.
#[derive(Debug, Clone)]
pub struct Lstm {
    pub w_x: ParamId,
    pub w_h: ParamId,
    pub b: ParamId,
    pub input_dim: usize,
    pub hidden: usize,
}

impl Lstm {
    pub fn new<R: Rng + ?Sized>(
        store: &mut ParamStore,
        prefix: &str,
        input_dim: usize,
        hidden: usize,
        init: f64,
        rng: &mut R,
    ) -> Self {
        Lstm {
            w_x: store.add_uniform(format!("{prefix}.w_x"), input_dim, 4 * hidden, init, rng),
            w_h: store.add_uniform(format!("{prefix}.w_h"), hidden, 4 * hidden, init, rng),
            b: store.add_zeros(format!("{prefix}.b"), 1, 4 * hidden),
            input_dim,
            hidden,
        }
    }

    /// Input projection `x · W_x + b` for all rows at once.
    pub fn project(&self, tape: &mut Tape, store: &ParamStore, x: Var) -> Result<Var> {
        let w = tape.param(store, self.w_x);
        let b = tape.param(store, self.b);
        let xw = tape.matmul(x, w)?;
        tape.add(xw, b)
    }

    /// One step from a projected input row; returns `(h, c)`.
    pub fn step(&self, tape: &mut Tape, store: &ParamStore, xw: Var, h: Var, c: Var) -> Result<(Var, Var)> {
        let hd = self.hidden;
        let w_h = tape.param(store, self.w_h);
        let hw = tape.matmul(h, w_h)?;
        let gates = tape.add(xw, hw)?;
        let i = tape.slice_cols(gates, 0, hd)?;
        let i = tape.sigmoid(i)?;
        let f = tape.slice_cols(gates, hd, hd)?;
        let f = tape.sigmoid(f)?;
        let o = tape.slice_cols(gates, 2 * hd, hd)?;
        let o = tape.sigmoid(o)?;
        let g = tape.slice_cols(gates, 3 * hd, hd)?;
        let g = tape.tanh(g)?;
        let fc = tape.mul(f, c)?;
        let ig = tape.mul(i, g)?;
        let c_next = tape.add(fc, ig)?;
        let tc = tape.tanh(c_next)?;
        let h_next = tape.mul(o, tc)?;
        Ok((h_next, c_next))
    }

    /// Runs over the rows of `x` (N × input_dim), optionally right to left.
    /// Row `t` of the result is the hidden state after reading row `t`.
    pub fn run(&self, tape: &mut Tape, store: &ParamStore, x: Var, reverse: bool) -> Result<Var> {
        let n = tape.shape(x).0;
        let xw = self.project(tape, store, x)?;
        let mut h = tape.constant(Tensor::zeros(1, self.hidden));
        let mut c = tape.constant(Tensor::zeros(1, self.hidden));
        let mut states = vec![h; n];
        let order: Vec<usize> = if reverse { (0..n).rev().collect() } else { (0..n).collect() };
        for t in order {
            let row = tape.row(xw, t)?;
            (h, c) = self.step(tape, store, row, h, c)?;
            states[t] = h;
        }
        tape.stack_rows(&states)
    }
}

/// Forward and backward LSTMs whose states are concatenated per position.
#[derive(Debug, Clone)]
pub struct BiLstm {
    pub forward: Lstm,
    pub backward: Lstm,
}

impl BiLstm {
    /// `output_dim` is split evenly between the two directions.
    pub fn new<R: Rng + ?Sized>(
        store: &mut ParamStore,
        prefix: &str,
        input_dim: usize,
        output_dim: usize,
        init: f64,
        rng: &mut R,
    ) -> Self {
        assert!(output_dim % 2 == 0, "BiLSTM output dimension must be even");
        BiLstm {
            forward: Lstm::new(store, &format!("{prefix}.fwd"), input_dim, output_dim / 2, init, rng),
            backward: Lstm::new(store, &format!("{prefix}.bwd"), input_dim, output_dim / 2, init, rng),
        }
    }

    pub fn output_dim(&self) -> usize {
        self.forward.hidden + self.backward.hidden
    }

    pub fn forward(&self, tape: &mut Tape, store: &ParamStore, x: Var) -> Result<Var> {
        let f = self.forward.run(tape, store, x, false)?;
        let b = self.backward.run(tape, store, x, true)?;
        tape.concat(&[f, b])
    }
}
