use super::lstm::Lstm;
use super::EncodeError;
use crate::tensor::{ParamId, ParamStore, Tape, Tensor, Var};
use rand::Rng;

/// Child-Sum TreeLSTM cell. Input-projection columns are ordered
/// `[input | output | update | forget]`.
#[derive(Debug, Clone)]
pub struct ChildSumCell {
    pub w: ParamId,
    pub u_iou: ParamId,
    pub u_f: ParamId,
    pub b: ParamId,
    pub hidden: usize,
}

impl ChildSumCell {
    fn new<R: Rng + ?Sized>(store: &mut ParamStore, prefix: &str, input_dim: usize, hidden: usize, init: f64, rng: &mut R) -> Self {
        ChildSumCell {
            w: store.add_uniform(format!("{prefix}.w"), input_dim, 4 * hidden, init, rng),
            u_iou: store.add_uniform(format!("{prefix}.u_iou"), hidden, 3 * hidden, init, rng),
            u_f: store.add_uniform(format!("{prefix}.u_f"), hidden, hidden, init, rng),
            b: store.add_zeros(format!("{prefix}.b"), 1, 4 * hidden),
            hidden,
        }
    }

    /// `xw` is the projected input row; `children` are `(h, c)` pairs.
    fn step(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        xw: Var,
        children: &[(Var, Var)],
    ) -> Result<(Var, Var), EncodeError> {
        let hd = self.hidden;
        let u_iou = tape.param(store, self.u_iou);
        let u_f = tape.param(store, self.u_f);
        let h_sum = if children.is_empty() {
            tape.constant(Tensor::zeros(1, hd))
        } else {
            let hs: Vec<Var> = children.iter().map(|c| c.0).collect();
            let stacked = tape.stack_rows(&hs)?;
            tape.sum_rows(stacked)?
        };
        let x_iou = tape.slice_cols(xw, 0, 3 * hd)?;
        let x_f = tape.slice_cols(xw, 3 * hd, hd)?;
        let h_iou = tape.matmul(h_sum, u_iou)?;
        let iou = tape.add(x_iou, h_iou)?;
        let i = tape.slice_cols(iou, 0, hd)?;
        let i = tape.sigmoid(i)?;
        let o = tape.slice_cols(iou, hd, hd)?;
        let o = tape.sigmoid(o)?;
        let u = tape.slice_cols(iou, 2 * hd, hd)?;
        let u = tape.tanh(u)?;
        let mut c = tape.mul(i, u)?;
        for &(hk, ck) in children {
            let hf = tape.matmul(hk, u_f)?;
            let f = tape.add(x_f, hf)?;
            let f = tape.sigmoid(f)?;
            let fc = tape.mul(f, ck)?;
            c = tape.add(c, fc)?;
        }
        let tc = tape.tanh(c)?;
        let h = tape.mul(o, tc)?;
        Ok((h, c))
    }
}

/// Bidirectional Child-Sum TreeLSTM: a bottom-up Child-Sum pass followed by
/// a top-down pass. Per node the output row is `[h↓ ; h↑]`.
///
/// The root's top-down state is `tanh(W_r h↑_root + b)`, which also seeds the
/// root's top-down cell. Every other node runs one LSTM step with input
/// `h↑_i`, previous hidden state `h↑_p(i)` and previous cell `c↓_p(i)`.
#[derive(Debug, Clone)]
pub struct TreeLstm {
    pub up: ChildSumCell,
    pub down: Lstm,
    pub root_w: ParamId,
    pub root_b: ParamId,
    pub hidden: usize,
}

/// Per-node outputs of a [`TreeLstm`] pass, all in node order.
pub struct TreeStates {
    pub output: Var,
    pub up: Var,
    pub down: Var,
}

/// Parent of each node plus a root-first order, or an error when the edges
/// do not form a tree rooted at `root`.
pub(crate) fn tree_order(n: usize, edges: &[(usize, usize)], root: usize) -> Result<(Vec<Option<usize>>, Vec<usize>, Vec<Vec<usize>>), EncodeError> {
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(EncodeError::NotATree(format!("edge ({a}, {b}) outside {n} nodes")));
        }
        if parent[b].is_some() || b == root {
            return Err(EncodeError::NotATree(format!(
                "node {b} has more than one parent; convert the graph with to_tree first"
            )));
        }
        parent[b] = Some(a);
        children[a].push(b);
    }
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend(children[v].iter().rev());
    }
    if order.len() != n {
        return Err(EncodeError::NotATree("some nodes are not reachable from the root".into()));
    }
    Ok((parent, order, children))
}

impl TreeLstm {
    /// `hidden` is the size of each direction; the output has `2 · hidden` columns.
    pub fn new<R: Rng + ?Sized>(store: &mut ParamStore, prefix: &str, input_dim: usize, hidden: usize, init: f64, rng: &mut R) -> Self {
        TreeLstm {
            up: ChildSumCell::new(store, &format!("{prefix}.up"), input_dim, hidden, init, rng),
            down: Lstm::new(store, &format!("{prefix}.down"), hidden, hidden, init, rng),
            root_w: store.add_uniform(format!("{prefix}.root_w"), hidden, hidden, init, rng),
            root_b: store.add_zeros(format!("{prefix}.root_b"), 1, hidden),
            hidden,
        }
    }

    pub fn output_dim(&self) -> usize {
        2 * self.hidden
    }

    pub fn forward(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        x: Var,
        edges: &[(usize, usize)],
        root: usize,
    ) -> Result<TreeStates, EncodeError> {
        let n = tape.shape(x).0;
        let (parent, order, children) = tree_order(n, edges, root)?;

        let w = tape.param(store, self.up.w);
        let b = tape.param(store, self.up.b);
        let xw = tape.matmul(x, w)?;
        let xw = tape.add(xw, b)?;

        let mut up: Vec<Option<(Var, Var)>> = vec![None; n];
        for &v in order.iter().rev() {
            let kids: Vec<(Var, Var)> = children[v]
                .iter()
                .map(|&k| up[k].expect("children precede parents in reverse preorder"))
                .collect();
            let row = tape.row(xw, v)?;
            up[v] = Some(self.up.step(tape, store, row, &kids)?);
        }
        let up: Vec<(Var, Var)> = up.into_iter().map(Option::unwrap).collect();

        let root_w = tape.param(store, self.root_w);
        let root_b = tape.param(store, self.root_b);
        let up_h: Vec<Var> = up.iter().map(|s| s.0).collect();
        let up_all = tape.stack_rows(&up_h)?;
        let down_xw = self.down.project(tape, store, up_all)?;

        let mut down: Vec<Option<(Var, Var)>> = vec![None; n];
        for &v in &order {
            let state = match parent[v] {
                None => {
                    let z = tape.matmul(up[v].0, root_w)?;
                    let z = tape.add(z, root_b)?;
                    let h = tape.tanh(z)?;
                    (h, h)
                }
                Some(p) => {
                    let parent_cell = down[p].expect("parents precede children in preorder").1;
                    let row = tape.row(down_xw, v)?;
                    self.down.step(tape, store, row, up[p].0, parent_cell)?
                }
            };
            down[v] = Some(state);
        }
        let down_h: Vec<Var> = down.into_iter().map(|s| s.unwrap().0).collect();
        let down_all = tape.stack_rows(&down_h)?;
        let output = tape.concat(&[down_all, up_all])?;
        Ok(TreeStates {
            output,
            up: up_all,
            down: down_all,
        })
    }
}
