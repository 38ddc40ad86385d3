use super::{matmul_into, ParamId, ParamStore, Result, Tensor, TensorError};
use rand::Rng;
use std::collections::HashMap;

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    /// `b` may be a single row broadcast over the rows of `a`.
    Add(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    OneMinus(Var),
    ConcatCols(Vec<Var>),
    StackRows(Vec<Var>),
    SumRows(Var),
    Sum(Var),
    Tanh(Var),
    Sigmoid(Var),
    Relu(Var),
    Softmax(Var),
    LogSoftmax(Var),
    Mask(Var, Vec<f64>),
    GatherRows(Var, Vec<usize>),
    SliceCols(Var, usize),
    Transpose(Var),
    Pick(Var, usize, usize),
}

struct Node {
    value: Tensor,
    op: Op,
    requires_grad: bool,
}

/// Records operations in execution order; inputs always precede outputs.
pub struct Tape {
    nodes: Vec<Node>,
    grads: Vec<Option<Tensor>>,
    params: HashMap<ParamId, Var>,
    consumed: bool,
    check_finite: bool,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

fn mismatch(op: &'static str, a: &Tensor, b: &Tensor) -> TensorError {
    TensorError::ShapeMismatch {
        op,
        left: a.shape(),
        right: b.shape(),
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape {
            nodes: Vec::new(),
            grads: Vec::new(),
            params: HashMap::new(),
            consumed: false,
            check_finite: false,
        }
    }

    /// Fails any op whose output is NaN or infinite.
    pub fn with_finite_checks(mut self) -> Self {
        self.check_finite = true;
        self
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn shape(&self, v: Var) -> (usize, usize) {
        self.nodes[v.0].value.shape()
    }

    pub fn requires_grad(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    fn push(&mut self, value: Tensor, op: Op, requires_grad: bool, name: &'static str) -> Result<Var> {
        if self.consumed {
            return Err(TensorError::TapeConsumed);
        }
        if self.check_finite && !value.is_finite() {
            return Err(TensorError::NonFinite { op: name });
        }
        self.nodes.push(Node {
            value,
            op,
            requires_grad,
        });
        Ok(Var(self.nodes.len() - 1))
    }

    fn rg(&self, vars: &[Var]) -> bool {
        vars.iter().any(|v| self.nodes[v.0].requires_grad)
    }

    /// A value that gradients do not flow into.
    pub fn constant(&mut self, value: Tensor) -> Var {
        self.nodes.push(Node {
            value,
            op: Op::Leaf,
            requires_grad: false,
        });
        Var(self.nodes.len() - 1)
    }

    /// A leaf that receives a gradient.
    pub fn leaf(&mut self, value: Tensor) -> Var {
        self.nodes.push(Node {
            value,
            op: Op::Leaf,
            requires_grad: true,
        });
        Var(self.nodes.len() - 1)
    }

    /// Loads a parameter; repeated calls return the same leaf.
    pub fn param(&mut self, store: &ParamStore, id: ParamId) -> Var {
        if let Some(&v) = self.params.get(&id) {
            return v;
        }
        let v = self.leaf(store.value(id).clone());
        self.params.insert(id, v);
        v
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = (self.value(a), self.value(b));
        let out = av.matmul(bv).map_err(|_| mismatch("matmul", av, bv))?;
        let rg = self.rg(&[a, b]);
        self.push(out, Op::MatMul(a, b), rg, "matmul")
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = (self.value(a), self.value(b));
        let broadcast = bv.rows() == 1 && av.rows() != 1;
        if av.cols() != bv.cols() || (av.rows() != bv.rows() && !broadcast) {
            return Err(mismatch("add", av, bv));
        }
        let cols = av.cols();
        let mut out = av.clone();
        for (i, o) in out.data_mut().iter_mut().enumerate() {
            *o += if broadcast { bv.data()[i % cols] } else { bv.data()[i] };
        }
        let rg = self.rg(&[a, b]);
        self.push(out, Op::Add(a, b), rg, "add")
    }

    /// Elementwise product of equal shapes.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.shape() != bv.shape() {
            return Err(mismatch("mul", av, bv));
        }
        let mut out = av.clone();
        for (o, b) in out.data_mut().iter_mut().zip(bv.data()) {
            *o *= b;
        }
        let rg = self.rg(&[a, b]);
        self.push(out, Op::Mul(a, b), rg, "mul")
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Result<Var> {
        let mut out = self.value(a).clone();
        out.data_mut().iter_mut().for_each(|v| *v *= c);
        let rg = self.rg(&[a]);
        self.push(out, Op::Scale(a, c), rg, "scale")
    }

    /// `1 − a`.
    pub fn one_minus(&mut self, a: Var) -> Result<Var> {
        let mut out = self.value(a).clone();
        out.data_mut().iter_mut().for_each(|v| *v = 1.0 - *v);
        let rg = self.rg(&[a]);
        self.push(out, Op::OneMinus(a), rg, "one_minus")
    }

    /// Concatenates along columns; all inputs need the same row count.
    pub fn concat(&mut self, parts: &[Var]) -> Result<Var> {
        let first = *parts
            .first()
            .ok_or_else(|| TensorError::Invalid("concat of nothing".into()))?;
        let rows = self.value(first).rows();
        let mut cols = 0;
        for &p in parts {
            let v = self.value(p);
            if v.rows() != rows {
                return Err(mismatch("concat", self.value(first), v));
            }
            cols += v.cols();
        }
        let mut out = Tensor::zeros(rows, cols);
        for r in 0..rows {
            let mut offset = 0;
            for &p in parts {
                let v = self.value(p);
                let c = v.cols();
                out.data_mut()[r * cols + offset..r * cols + offset + c].copy_from_slice(v.row(r));
                offset += c;
            }
        }
        let rg = self.rg(parts);
        self.push(out, Op::ConcatCols(parts.to_vec()), rg, "concat")
    }

    /// Stacks along rows; all inputs need the same column count.
    pub fn stack_rows(&mut self, parts: &[Var]) -> Result<Var> {
        let first = *parts
            .first()
            .ok_or_else(|| TensorError::Invalid("stack of nothing".into()))?;
        let cols = self.value(first).cols();
        let mut data = Vec::new();
        let mut rows = 0;
        for &p in parts {
            let v = self.value(p);
            if v.cols() != cols {
                return Err(mismatch("stack_rows", self.value(first), v));
            }
            data.extend_from_slice(v.data());
            rows += v.rows();
        }
        let out = Tensor::from_vec(rows, cols, data)?;
        let rg = self.rg(parts);
        self.push(out, Op::StackRows(parts.to_vec()), rg, "stack_rows")
    }

    /// Column sums as a single row.
    pub fn sum_rows(&mut self, a: Var) -> Result<Var> {
        let v = self.value(a);
        let mut out = Tensor::zeros(1, v.cols());
        for r in 0..v.rows() {
            for (o, x) in out.data_mut().iter_mut().zip(v.row(r)) {
                *o += x;
            }
        }
        let rg = self.rg(&[a]);
        self.push(out, Op::SumRows(a), rg, "sum_rows")
    }

    /// Sum of all entries as a 1x1 scalar.
    pub fn sum(&mut self, a: Var) -> Result<Var> {
        let s = self.value(a).data().iter().sum();
        let rg = self.rg(&[a]);
        self.push(Tensor::scalar(s), Op::Sum(a), rg, "sum")
    }

    fn map(&mut self, a: Var, f: impl Fn(f64) -> f64, op: Op, name: &'static str) -> Result<Var> {
        let mut out = self.value(a).clone();
        out.data_mut().iter_mut().for_each(|v| *v = f(*v));
        let rg = self.rg(&[a]);
        self.push(out, op, rg, name)
    }

    pub fn tanh(&mut self, a: Var) -> Result<Var> {
        self.map(a, f64::tanh, Op::Tanh(a), "tanh")
    }

    pub fn sigmoid(&mut self, a: Var) -> Result<Var> {
        self.map(a, sigmoid, Op::Sigmoid(a), "sigmoid")
    }

    pub fn relu(&mut self, a: Var) -> Result<Var> {
        self.map(a, |v| v.max(0.0), Op::Relu(a), "relu")
    }

    /// Row-wise softmax.
    pub fn softmax(&mut self, a: Var) -> Result<Var> {
        let mut out = self.value(a).clone();
        let cols = out.cols();
        for row in out.data_mut().chunks_mut(cols.max(1)) {
            let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for v in row.iter_mut() {
                *v = (*v - m).exp();
                z += *v;
            }
            row.iter_mut().for_each(|v| *v /= z);
        }
        let rg = self.rg(&[a]);
        self.push(out, Op::Softmax(a), rg, "softmax")
    }

    /// Row-wise log-softmax.
    pub fn log_softmax(&mut self, a: Var) -> Result<Var> {
        let mut out = self.value(a).clone();
        let cols = out.cols();
        for row in out.data_mut().chunks_mut(cols.max(1)) {
            let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + row.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            row.iter_mut().for_each(|v| *v -= lse);
        }
        let rg = self.rg(&[a]);
        self.push(out, Op::LogSoftmax(a), rg, "log_softmax")
    }

    /// Multiplies by a fixed mask (already scaled by the inverse keep rate).
    pub fn dropout_mask_apply(&mut self, a: Var, mask: Vec<f64>) -> Result<Var> {
        let v = self.value(a);
        if mask.len() != v.len() {
            return Err(TensorError::ShapeMismatch {
                op: "dropout_mask_apply",
                left: v.shape(),
                right: (mask.len(), 1),
            });
        }
        let mut out = v.clone();
        for (o, m) in out.data_mut().iter_mut().zip(&mask) {
            *o *= m;
        }
        let rg = self.rg(&[a]);
        self.push(out, Op::Mask(a, mask), rg, "dropout")
    }

    /// Inverted dropout with keep probability `keep` in (0, 1]. At `keep == 1`
    /// the input is returned unchanged.
    pub fn dropout<R: Rng + ?Sized>(&mut self, a: Var, keep: f64, rng: &mut R) -> Result<Var> {
        if !(keep > 0.0 && keep <= 1.0) {
            return Err(TensorError::Invalid(format!("keep probability {keep} outside (0, 1]")));
        }
        if keep == 1.0 {
            return Ok(a);
        }
        let n = self.value(a).len();
        let mask = (0..n)
            .map(|_| if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 })
            .collect();
        self.dropout_mask_apply(a, mask)
    }

    /// Selects rows by index (also the embedding lookup).
    pub fn gather_rows(&mut self, a: Var, idx: &[usize]) -> Result<Var> {
        let v = self.value(a);
        let cols = v.cols();
        let mut data = Vec::with_capacity(idx.len() * cols);
        for &i in idx {
            if i >= v.rows() {
                return Err(TensorError::OutOfRange {
                    op: "gather_rows",
                    index: i,
                    shape: v.shape(),
                });
            }
            data.extend_from_slice(v.row(i));
        }
        let out = Tensor::from_vec(idx.len(), cols, data)?;
        let rg = self.rg(&[a]);
        self.push(out, Op::GatherRows(a, idx.to_vec()), rg, "gather_rows")
    }

    pub fn embedding_lookup(&mut self, table: Var, ids: &[usize]) -> Result<Var> {
        self.gather_rows(table, ids)
    }

    pub fn row(&mut self, a: Var, i: usize) -> Result<Var> {
        self.gather_rows(a, &[i])
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, len: usize) -> Result<Var> {
        let v = self.value(a);
        if start + len > v.cols() {
            return Err(TensorError::OutOfRange {
                op: "slice_cols",
                index: start + len,
                shape: v.shape(),
            });
        }
        let mut out = Tensor::zeros(v.rows(), len);
        for r in 0..v.rows() {
            out.data_mut()[r * len..(r + 1) * len].copy_from_slice(&v.row(r)[start..start + len]);
        }
        let rg = self.rg(&[a]);
        self.push(out, Op::SliceCols(a, start), rg, "slice_cols")
    }

    pub fn transpose(&mut self, a: Var) -> Result<Var> {
        let out = self.value(a).transpose();
        let rg = self.rg(&[a]);
        self.push(out, Op::Transpose(a), rg, "transpose")
    }

    /// A single entry as a 1x1 scalar.
    pub fn pick(&mut self, a: Var, r: usize, c: usize) -> Result<Var> {
        let v = self.value(a);
        if r >= v.rows() || c >= v.cols() {
            return Err(TensorError::OutOfRange {
                op: "pick",
                index: r * v.cols() + c,
                shape: v.shape(),
            });
        }
        let out = Tensor::scalar(v.get(r, c));
        let rg = self.rg(&[a]);
        self.push(out, Op::Pick(a, r, c), rg, "pick")
    }

    /// Gradient of the last backward pass with respect to `v`.
    pub fn grad(&self, v: Var) -> Option<&Tensor> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }

    /// Gradients of all parameters loaded on this tape.
    pub fn param_grads(&self) -> impl Iterator<Item = (ParamId, &Tensor)> {
        self.params
            .iter()
            .filter_map(|(&id, &v)| self.grad(v).map(|g| (id, g)))
    }

    /// Propagates d loss / d value back to every node that requires a
    /// gradient. The tape cannot record or run backward again afterwards.
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        if self.consumed {
            return Err(TensorError::TapeConsumed);
        }
        let shape = self.shape(loss);
        if shape != (1, 1) {
            return Err(TensorError::NotScalar(shape));
        }
        self.consumed = true;
        let mut grads: Vec<Option<Tensor>> = vec![None; self.nodes.len()];
        grads[loss.0] = Some(Tensor::scalar(1.0));

        for i in (0..=loss.0).rev() {
            let Some(g) = grads[i].take() else { continue };
            let node = &self.nodes[i];
            if node.requires_grad {
                self.backprop(i, &g, &mut grads);
            }
            grads[i] = Some(g);
        }
        self.grads = grads;
        Ok(())
    }

    fn backprop(&self, i: usize, g: &Tensor, grads: &mut [Option<Tensor>]) {
        let nodes = &self.nodes;
        let out = &nodes[i].value;
        let needs = |v: Var| nodes[v.0].requires_grad;
        let mut acc = |v: Var, f: &mut dyn FnMut(&mut [f64])| {
            if !nodes[v.0].requires_grad {
                return;
            }
            let slot = grads[v.0].get_or_insert_with(|| {
                let (r, c) = nodes[v.0].value.shape();
                Tensor::zeros(r, c)
            });
            f(slot.data_mut());
        };
        match &nodes[i].op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (av, bv) = (&nodes[a.0].value, &nodes[b.0].value);
                let (m, k, n) = (av.rows(), av.cols(), bv.cols());
                if needs(*a) {
                    let bt = bv.transpose();
                    acc(*a, &mut |d| matmul_into(g.data(), bt.data(), d, m, n, k));
                }
                if needs(*b) {
                    let at = av.transpose();
                    acc(*b, &mut |d| matmul_into(at.data(), g.data(), d, k, m, n));
                }
            }
            Op::Add(a, b) => {
                acc(*a, &mut |d| d.iter_mut().zip(g.data()).for_each(|(d, g)| *d += g));
                let bv = &nodes[b.0].value;
                let cols = bv.cols();
                if bv.rows() == 1 && g.rows() != 1 {
                    acc(*b, &mut |d| {
                        for (j, gv) in g.data().iter().enumerate() {
                            d[j % cols] += gv;
                        }
                    });
                } else {
                    acc(*b, &mut |d| d.iter_mut().zip(g.data()).for_each(|(d, g)| *d += g));
                }
            }
            Op::Mul(a, b) => {
                let (av, bv) = (&nodes[a.0].value, &nodes[b.0].value);
                acc(*a, &mut |d| {
                    for ((d, g), b) in d.iter_mut().zip(g.data()).zip(bv.data()) {
                        *d += g * b;
                    }
                });
                acc(*b, &mut |d| {
                    for ((d, g), a) in d.iter_mut().zip(g.data()).zip(av.data()) {
                        *d += g * a;
                    }
                });
            }
            Op::Scale(a, c) => {
                acc(*a, &mut |d| d.iter_mut().zip(g.data()).for_each(|(d, g)| *d += c * g));
            }
            Op::OneMinus(a) => {
                acc(*a, &mut |d| d.iter_mut().zip(g.data()).for_each(|(d, g)| *d -= g));
            }
            Op::ConcatCols(parts) => {
                let cols = out.cols();
                let mut offset = 0;
                for p in parts {
                    let c = nodes[p.0].value.cols();
                    acc(*p, &mut |d| {
                        for r in 0..g.rows() {
                            for j in 0..c {
                                d[r * c + j] += g.data()[r * cols + offset + j];
                            }
                        }
                    });
                    offset += c;
                }
            }
            Op::StackRows(parts) => {
                let mut offset = 0;
                for p in parts {
                    let n = nodes[p.0].value.len();
                    acc(*p, &mut |d| {
                        d.iter_mut()
                            .zip(&g.data()[offset..offset + n])
                            .for_each(|(d, g)| *d += g)
                    });
                    offset += n;
                }
            }
            Op::SumRows(a) => {
                let cols = g.cols();
                acc(*a, &mut |d| {
                    for (j, d) in d.iter_mut().enumerate() {
                        *d += g.data()[j % cols];
                    }
                });
            }
            Op::Sum(a) => {
                let gv = g.item();
                acc(*a, &mut |d| d.iter_mut().for_each(|d| *d += gv));
            }
            Op::Tanh(a) => acc(*a, &mut |d| {
                for ((d, g), y) in d.iter_mut().zip(g.data()).zip(out.data()) {
                    *d += g * (1.0 - y * y);
                }
            }),
            Op::Sigmoid(a) => acc(*a, &mut |d| {
                for ((d, g), y) in d.iter_mut().zip(g.data()).zip(out.data()) {
                    *d += g * y * (1.0 - y);
                }
            }),
            Op::Relu(a) => {
                let x = &nodes[a.0].value;
                acc(*a, &mut |d| {
                    for ((d, g), x) in d.iter_mut().zip(g.data()).zip(x.data()) {
                        if *x > 0.0 {
                            *d += g;
                        }
                    }
                })
            }
            Op::Softmax(a) => {
                let cols = out.cols();
                acc(*a, &mut |d| {
                    for r in 0..out.rows() {
                        let y = out.row(r);
                        let gr = g.row(r);
                        let dot: f64 = y.iter().zip(gr).map(|(y, g)| y * g).sum();
                        for j in 0..cols {
                            d[r * cols + j] += y[j] * (gr[j] - dot);
                        }
                    }
                })
            }
            Op::LogSoftmax(a) => {
                let cols = out.cols();
                acc(*a, &mut |d| {
                    for r in 0..out.rows() {
                        let y = out.row(r);
                        let gr = g.row(r);
                        let total: f64 = gr.iter().sum();
                        for j in 0..cols {
                            d[r * cols + j] += gr[j] - y[j].exp() * total;
                        }
                    }
                })
            }
            Op::Mask(a, mask) => acc(*a, &mut |d| {
                for ((d, g), m) in d.iter_mut().zip(g.data()).zip(mask) {
                    *d += g * m;
                }
            }),
            Op::GatherRows(a, idx) => {
                let cols = g.cols();
                acc(*a, &mut |d| {
                    for (r, &i) in idx.iter().enumerate() {
                        for j in 0..cols {
                            d[i * cols + j] += g.data()[r * cols + j];
                        }
                    }
                })
            }
            Op::SliceCols(a, start) => {
                let src_cols = nodes[a.0].value.cols();
                let len = g.cols();
                acc(*a, &mut |d| {
                    for r in 0..g.rows() {
                        for j in 0..len {
                            d[r * src_cols + start + j] += g.data()[r * len + j];
                        }
                    }
                })
            }
            Op::Transpose(a) => {
                let gt = g.transpose();
                acc(*a, &mut |d| d.iter_mut().zip(gt.data()).for_each(|(d, g)| *d += g));
            }
            Op::Pick(a, r, c) => {
                let cols = nodes[a.0].value.cols();
                let gv = g.item();
                acc(*a, &mut |d| d[r * cols + c] += gv);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn softmax_of_constant_is_uniform() {
        let mut t = Tape::new();
        let x = t.constant(Tensor::filled(2, 5, 3.7));
        let y = t.softmax(x).unwrap();
        for v in t.value(y).data() {
            assert!((v - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = Tape::new();
        let x = t.constant(Tensor::uniform(4, 7, -20.0, 20.0, &mut rng));
        let y = t.softmax(x).unwrap();
        for r in 0..4 {
            let s: f64 = t.value(y).row(r).iter().sum();
            assert!((s - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn tanh_gradient_at_zero_is_one() {
        let mut t = Tape::new();
        let x = t.leaf(Tensor::scalar(0.0));
        let y = t.tanh(x).unwrap();
        t.backward(y).unwrap();
        assert_eq!(t.grad(x).unwrap().item(), 1.0);
    }

    #[test]
    fn linear_sum_gradient_is_outer_product() {
        // loss = sum(W x), W is 2x3, x is 3x1 -> dL/dW[i][j] = x[j].
        let mut t = Tape::new();
        let w = t.leaf(Tensor::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap());
        let x = t.constant(Tensor::from_rows(&[vec![0.5], vec![-1.0], vec![2.0]]).unwrap());
        let y = t.matmul(w, x).unwrap();
        let loss = t.sum(y).unwrap();
        t.backward(loss).unwrap();
        assert_eq!(t.grad(w).unwrap().data(), &[0.5, -1.0, 2.0, 0.5, -1.0, 2.0]);
        assert!(t.grad(x).is_none());
    }

    #[test]
    fn backward_requires_scalar_and_runs_once() {
        let mut t = Tape::new();
        let x = t.leaf(Tensor::zeros(2, 2));
        assert_eq!(t.backward(x).unwrap_err(), TensorError::NotScalar((2, 2)));
        let s = t.sum(x).unwrap();
        t.backward(s).unwrap();
        assert_eq!(t.backward(s).unwrap_err(), TensorError::TapeConsumed);
        assert_eq!(t.tanh(x).unwrap_err(), TensorError::TapeConsumed);
    }

    #[test]
    fn dropout_keep_one_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut t = Tape::new();
        let x = t.leaf(Tensor::uniform(3, 3, -1.0, 1.0, &mut rng));
        let y = t.dropout(x, 1.0, &mut rng).unwrap();
        assert_eq!(x, y);
        assert!(t.dropout(x, 0.0, &mut rng).is_err());
    }

    #[test]
    fn add_broadcasts_single_row() {
        let mut t = Tape::new();
        let a = t.leaf(Tensor::zeros(3, 2));
        let b = t.leaf(Tensor::row_vector(vec![1.0, 2.0]));
        let y = t.add(a, b).unwrap();
        assert_eq!(t.value(y).row(2), &[1.0, 2.0]);
        let s = t.sum(y).unwrap();
        t.backward(s).unwrap();
        assert_eq!(t.grad(b).unwrap().data(), &[3.0, 3.0]);
    }

    #[test]
    fn shape_errors_name_the_op() {
        let mut t = Tape::new();
        let a = t.leaf(Tensor::zeros(2, 3));
        let b = t.leaf(Tensor::zeros(3, 2));
        assert!(matches!(t.mul(a, b), Err(TensorError::ShapeMismatch { op: "mul", .. })));
        assert!(matches!(t.add(a, b), Err(TensorError::ShapeMismatch { op: "add", .. })));
    }

    #[test]
    fn finite_checks() {
        let mut t = Tape::new().with_finite_checks();
        let a = t.leaf(Tensor::scalar(f64::INFINITY));
        let b = t.leaf(Tensor::scalar(0.0));
        assert!(matches!(t.mul(a, b), Err(TensorError::NonFinite { op: "mul" })));
    }
}
