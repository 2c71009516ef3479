use std::rc::Rc;

use super::Tensor;
use crate::error::{Error, Result};

/// Handle to a value recorded on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    AddRow(Var, Var),
    LeakyRelu(Var, f64),
    SegmentSoftmax(Var, Rc<[usize]>),
    SegmentWeightedSum {
        weights: Var,
        values: Var,
        segments: Rc<[usize]>,
    },
    GatherRows(Var, Rc<[usize]>),
    GatherElems {
        input: Var,
        rows: Rc<[usize]>,
        cols: Rc<[usize]>,
    },
    SliceRows(Var, usize),
    SliceCols(Var, usize),
    ConcatRows(Vec<Var>),
    ConcatCols(Vec<Var>),
    MeanRows(Var),
    Sum(Var),
    L1(Var, Tensor),
    Bce(Var, Tensor),
}

#[derive(Debug)]
struct Record {
    value: Tensor,
    op: Op,
    needs_grad: bool,
}

/// Output of [`Tape::segment_weighted_sum`].
#[derive(Clone, Debug)]
pub struct SegmentSum {
    pub out: Var,
    /// Segments that received no entries; their output rows are zero.
    pub isolated: Vec<usize>,
}

/// Append-only record of primitive applications. Every op validates shapes
/// and rejects non-finite results, so a tape never holds NaN or Inf.
#[derive(Debug, Default)]
pub struct Tape {
    records: Vec<Record>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Leaf whose gradient is tracked.
    pub fn param(&mut self, value: Tensor) -> Result<Var> {
        let value = value.check_finite("param")?;
        Ok(self.push(value, Op::Leaf, true))
    }

    /// Leaf treated as a constant.
    pub fn constant(&mut self, value: Tensor) -> Result<Var> {
        let value = value.check_finite("constant")?;
        Ok(self.push(value, Op::Leaf, false))
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.records[v.0].value
    }

    fn push(&mut self, value: Tensor, op: Op, needs_grad: bool) -> Var {
        self.records.push(Record {
            value,
            op,
            needs_grad,
        });
        Var(self.records.len() - 1)
    }

    fn needs(&self, vars: &[Var]) -> bool {
        vars.iter().any(|v| self.records[v.0].needs_grad)
    }

    fn record(&mut self, name: &'static str, value: Tensor, op: Op, inputs: &[Var]) -> Result<Var> {
        let value = value.check_finite(name)?;
        let needs = self.needs(inputs);
        Ok(self.push(value, op, needs))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ta, tb) = (self.value(a), self.value(b));
        if ta.cols() != tb.rows() {
            return Err(Error::shape(
                "matmul",
                format!("{:?} x {:?}", ta.shape(), tb.shape()),
            ));
        }
        let out = matmul_raw(ta, tb, false, false);
        self.record("matmul", out, Op::MatMul(a, b), &[a, b])
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ta, tb) = (self.value(a), self.value(b));
        if ta.shape() != tb.shape() {
            return Err(Error::shape("add", format!("{:?} + {:?}", ta.shape(), tb.shape())));
        }
        let data = ta.data().iter().zip(tb.data()).map(|(x, y)| x + y).collect();
        let out = Tensor::new(ta.rows(), ta.cols(), data)?;
        self.record("add", out, Op::Add(a, b), &[a, b])
    }

    /// Adds the `1×c` row `b` to every row of `a`.
    pub fn add_broadcast_row(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ta, tb) = (self.value(a), self.value(b));
        if tb.rows() != 1 || tb.cols() != ta.cols() {
            return Err(Error::shape(
                "add_broadcast_row",
                format!("{:?} + row {:?}", ta.shape(), tb.shape()),
            ));
        }
        let c = ta.cols();
        let data = ta
            .data()
            .iter()
            .enumerate()
            .map(|(i, x)| x + tb.data()[i % c])
            .collect();
        let out = Tensor::new(ta.rows(), c, data)?;
        self.record("add_broadcast_row", out, Op::AddRow(a, b), &[a, b])
    }

    /// Elementwise `max(x, slope*x)` for `slope` in `(0, 1)`.
    pub fn leaky_relu(&mut self, x: Var, slope: f64) -> Result<Var> {
        let t = self.value(x);
        let data = t
            .data()
            .iter()
            .map(|&v| if v > 0.0 { v } else { slope * v })
            .collect();
        let out = Tensor::new(t.rows(), t.cols(), data)?;
        self.record("leaky_relu", out, Op::LeakyRelu(x, slope), &[x])
    }

    /// Softmax within groups of rows sharing a segment id, independently per
    /// column. Uses per-segment max subtraction.
    pub fn segment_softmax(&mut self, scores: Var, segments: Rc<[usize]>, n_segments: usize) -> Result<Var> {
        let t = self.value(scores);
        check_segments("segment_softmax", t.rows(), &segments, n_segments)?;
        let c = t.cols();
        let mut max = vec![f64::NEG_INFINITY; n_segments * c];
        for (e, &s) in segments.iter().enumerate() {
            for k in 0..c {
                let m = &mut max[s * c + k];
                *m = m.max(t.get(e, k));
            }
        }
        let mut out = vec![0.0; t.len()];
        let mut denom = vec![0.0; n_segments * c];
        for (e, &s) in segments.iter().enumerate() {
            for k in 0..c {
                let v = (t.get(e, k) - max[s * c + k]).exp();
                out[e * c + k] = v;
                denom[s * c + k] += v;
            }
        }
        for (e, &s) in segments.iter().enumerate() {
            for k in 0..c {
                out[e * c + k] /= denom[s * c + k];
            }
        }
        let out = Tensor::new(t.rows(), c, out)?;
        self.record("segment_softmax", out, Op::SegmentSoftmax(scores, segments), &[scores])
    }

    /// `out[s] = sum_{e in s} weights[e] * values[e]`, an `n_segments×d`
    /// result. Empty segments give zero rows and are reported as isolated.
    pub fn segment_weighted_sum(
        &mut self,
        weights: Var,
        values: Var,
        segments: Rc<[usize]>,
        n_segments: usize,
    ) -> Result<SegmentSum> {
        let (tw, tv) = (self.value(weights), self.value(values));
        if tw.cols() != 1 || tw.rows() != tv.rows() {
            return Err(Error::shape(
                "segment_weighted_sum",
                format!("weights {:?}, values {:?}", tw.shape(), tv.shape()),
            ));
        }
        check_segments("segment_weighted_sum", tw.rows(), &segments, n_segments)?;
        let d = tv.cols();
        let mut out = vec![0.0; n_segments * d];
        let mut count = vec![0usize; n_segments];
        for (e, &s) in segments.iter().enumerate() {
            count[s] += 1;
            let w = tw.data()[e];
            let row = &mut out[s * d..(s + 1) * d];
            for (o, v) in row.iter_mut().zip(tv.row(e)) {
                *o += w * v;
            }
        }
        let isolated = (0..n_segments).filter(|&s| count[s] == 0).collect();
        let out = Tensor::new(n_segments, d, out)?;
        let op = Op::SegmentWeightedSum {
            weights,
            values,
            segments,
        };
        let out = self.record("segment_weighted_sum", out, op, &[weights, values])?;
        Ok(SegmentSum { out, isolated })
    }

    /// Row `i` of the output is row `index[i]` of the input.
    pub fn gather_rows(&mut self, x: Var, index: Rc<[usize]>) -> Result<Var> {
        let t = self.value(x);
        if let Some(&bad) = index.iter().find(|&&i| i >= t.rows()) {
            return Err(Error::shape("gather_rows", format!("row {bad} of {}", t.rows())));
        }
        let c = t.cols();
        let mut data = Vec::with_capacity(index.len() * c);
        for &i in index.iter() {
            data.extend_from_slice(t.row(i));
        }
        let out = Tensor::new(index.len(), c, data)?;
        self.record("gather_rows", out, Op::GatherRows(x, index), &[x])
    }

    /// Column vector of `x[rows[i], cols[i]]`.
    pub fn gather_elems(&mut self, x: Var, rows: Rc<[usize]>, cols: Rc<[usize]>) -> Result<Var> {
        let t = self.value(x);
        if rows.len() != cols.len() {
            return Err(Error::shape("gather_elems", "index lengths differ"));
        }
        if rows.iter().zip(cols.iter()).any(|(&r, &c)| r >= t.rows() || c >= t.cols()) {
            return Err(Error::shape("gather_elems", "index out of bounds"));
        }
        let data = rows.iter().zip(cols.iter()).map(|(&r, &c)| t.get(r, c)).collect();
        let out = Tensor::column(data);
        self.record("gather_elems", out, Op::GatherElems { input: x, rows, cols }, &[x])
    }

    pub fn slice_rows(&mut self, x: Var, start: usize, len: usize) -> Result<Var> {
        let t = self.value(x);
        if start + len > t.rows() {
            return Err(Error::shape(
                "slice_rows",
                format!("rows {start}..{} of {}", start + len, t.rows()),
            ));
        }
        let c = t.cols();
        let out = Tensor::new(len, c, t.data()[start * c..(start + len) * c].to_vec())?;
        self.record("slice_rows", out, Op::SliceRows(x, start), &[x])
    }

    pub fn slice_cols(&mut self, x: Var, start: usize, len: usize) -> Result<Var> {
        let t = self.value(x);
        if start + len > t.cols() {
            return Err(Error::shape(
                "slice_cols",
                format!("cols {start}..{} of {}", start + len, t.cols()),
            ));
        }
        let mut data = Vec::with_capacity(t.rows() * len);
        for r in 0..t.rows() {
            data.extend_from_slice(&t.row(r)[start..start + len]);
        }
        let out = Tensor::new(t.rows(), len, data)?;
        self.record("slice_cols", out, Op::SliceCols(x, start), &[x])
    }

    pub fn concat_rows(&mut self, parts: &[Var]) -> Result<Var> {
        let Some(first) = parts.first() else {
            return Err(Error::shape("concat_rows", "nothing to concatenate"));
        };
        let c = self.value(*first).cols();
        let mut data = Vec::new();
        let mut rows = 0;
        for &p in parts {
            let t = self.value(p);
            if t.cols() != c {
                return Err(Error::shape("concat_rows", format!("{} vs {} columns", t.cols(), c)));
            }
            rows += t.rows();
            data.extend_from_slice(t.data());
        }
        let out = Tensor::new(rows, c, data)?;
        self.record("concat_rows", out, Op::ConcatRows(parts.to_vec()), parts)
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Result<Var> {
        let Some(first) = parts.first() else {
            return Err(Error::shape("concat_cols", "nothing to concatenate"));
        };
        let r = self.value(*first).rows();
        if let Some(bad) = parts.iter().find(|&&p| self.value(p).rows() != r) {
            return Err(Error::shape(
                "concat_cols",
                format!("{} vs {} rows", self.value(*bad).rows(), r),
            ));
        }
        let total: usize = parts.iter().map(|&p| self.value(p).cols()).sum();
        let mut data = Vec::with_capacity(r * total);
        for row in 0..r {
            for &p in parts {
                data.extend_from_slice(self.value(p).row(row));
            }
        }
        let out = Tensor::new(r, total, data)?;
        self.record("concat_cols", out, Op::ConcatCols(parts.to_vec()), parts)
    }

    /// Column means, a `1×d` row.
    pub fn mean_rows(&mut self, x: Var) -> Result<Var> {
        let t = self.value(x);
        if t.rows() == 0 {
            return Err(Error::EmptyReadout);
        }
        let mut out = vec![0.0; t.cols()];
        for r in 0..t.rows() {
            for (o, v) in out.iter_mut().zip(t.row(r)) {
                *o += v;
            }
        }
        let n = t.rows() as f64;
        out.iter_mut().for_each(|o| *o /= n);
        self.record("mean_rows", Tensor::row_vector(out), Op::MeanRows(x), &[x])
    }

    pub fn sum(&mut self, x: Var) -> Result<Var> {
        let s = self.value(x).data().iter().sum();
        self.record("sum", Tensor::scalar(s), Op::Sum(x), &[x])
    }

    /// Mean absolute error against a constant target.
    pub fn l1_loss(&mut self, pred: Var, target: &Tensor) -> Result<Var> {
        let t = self.value(pred);
        if t.shape() != target.shape() || t.is_empty() {
            return Err(Error::shape(
                "l1_loss",
                format!("{:?} vs target {:?}", t.shape(), target.shape()),
            ));
        }
        let s: f64 = t.data().iter().zip(target.data()).map(|(p, y)| (p - y).abs()).sum();
        let out = Tensor::scalar(s / t.len() as f64);
        self.record("l1_loss", out, Op::L1(pred, target.clone()), &[pred])
    }

    /// Binary cross entropy on logits, summed over entries. Uses
    /// `max(x,0) - x*y + ln(1 + exp(-|x|))`.
    pub fn bce_with_logits(&mut self, logits: Var, labels: &Tensor) -> Result<Var> {
        let t = self.value(logits);
        if t.shape() != labels.shape() {
            return Err(Error::shape(
                "bce_with_logits",
                format!("{:?} vs labels {:?}", t.shape(), labels.shape()),
            ));
        }
        let s: f64 = t
            .data()
            .iter()
            .zip(labels.data())
            .map(|(&x, &y)| x.max(0.0) - x * y + (-x.abs()).exp().ln_1p())
            .sum();
        self.record("bce_with_logits", Tensor::scalar(s), Op::Bce(logits, labels.clone()), &[logits])
    }

    /// Reverse sweep from a scalar. Gradients are accumulated in reverse
    /// recording order, which is a valid topological order by construction.
    pub fn backward(&self, loss: Var) -> Result<Gradients> {
        let lt = self.value(loss);
        if lt.shape() != [1, 1] {
            return Err(Error::shape("backward", format!("loss has shape {:?}", lt.shape())));
        }
        let mut grads: Vec<Option<Tensor>> = vec![None; self.records.len()];
        grads[loss.0] = Some(Tensor::scalar(1.0));
        for idx in (0..=loss.0).rev() {
            let rec = &self.records[idx];
            if !rec.needs_grad {
                continue;
            }
            let Some(g) = grads[idx].take() else { continue };
            self.propagate(rec, &g, &mut grads)?;
            grads[idx] = Some(g);
        }
        let grads = grads
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.filter(|_| matches!(self.records[i].op, Op::Leaf)))
            .collect::<Vec<_>>();
        if grads.iter().flatten().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("backward"));
        }
        Ok(Gradients {
            grads,
            shapes: self.records.iter().map(|r| r.value.shape()).collect(),
        })
    }

    fn accumulate(&self, grads: &mut [Option<Tensor>], v: Var, g: Tensor) {
        if !self.records[v.0].needs_grad {
            return;
        }
        match &mut grads[v.0] {
            Some(acc) => acc.add_assign(&g),
            slot => *slot = Some(g),
        }
    }

    fn propagate(&self, rec: &Record, g: &Tensor, grads: &mut [Option<Tensor>]) -> Result<()> {
        match &rec.op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (ta, tb) = (self.value(*a), self.value(*b));
                if self.records[a.0].needs_grad {
                    self.accumulate(grads, *a, matmul_raw(g, tb, false, true));
                }
                if self.records[b.0].needs_grad {
                    self.accumulate(grads, *b, matmul_raw(ta, g, true, false));
                }
            }
            Op::Add(a, b) => {
                self.accumulate(grads, *a, g.clone());
                self.accumulate(grads, *b, g.clone());
            }
            Op::AddRow(a, b) => {
                self.accumulate(grads, *a, g.clone());
                let c = g.cols();
                let mut col = vec![0.0; c];
                for r in 0..g.rows() {
                    for (o, v) in col.iter_mut().zip(g.row(r)) {
                        *o += v;
                    }
                }
                self.accumulate(grads, *b, Tensor::row_vector(col));
            }
            Op::LeakyRelu(x, slope) => {
                let tx = self.value(*x);
                let data = tx
                    .data()
                    .iter()
                    .zip(g.data())
                    .map(|(&v, &gv)| if v > 0.0 { gv } else { slope * gv })
                    .collect();
                self.accumulate(grads, *x, Tensor::new(g.rows(), g.cols(), data)?);
            }
            Op::SegmentSoftmax(x, segments) => {
                let y = &rec.value;
                let c = y.cols();
                let n = segments.iter().max().map_or(0, |m| m + 1);
                let mut dot = vec![0.0; n * c];
                for (e, &s) in segments.iter().enumerate() {
                    for k in 0..c {
                        dot[s * c + k] += g.get(e, k) * y.get(e, k);
                    }
                }
                let mut data = vec![0.0; y.len()];
                for (e, &s) in segments.iter().enumerate() {
                    for k in 0..c {
                        data[e * c + k] = y.get(e, k) * (g.get(e, k) - dot[s * c + k]);
                    }
                }
                self.accumulate(grads, *x, Tensor::new(y.rows(), c, data)?);
            }
            Op::SegmentWeightedSum {
                weights,
                values,
                segments,
            } => {
                let (tw, tv) = (self.value(*weights), self.value(*values));
                let d = tv.cols();
                if self.records[weights.0].needs_grad {
                    let dw = segments
                        .iter()
                        .enumerate()
                        .map(|(e, &s)| tv.row(e).iter().zip(g.row(s)).map(|(v, gv)| v * gv).sum())
                        .collect();
                    self.accumulate(grads, *weights, Tensor::column(dw));
                }
                if self.records[values.0].needs_grad {
                    let mut dv = Vec::with_capacity(tv.len());
                    for (e, &s) in segments.iter().enumerate() {
                        let w = tw.data()[e];
                        dv.extend(g.row(s).iter().map(|gv| w * gv));
                    }
                    self.accumulate(grads, *values, Tensor::new(tv.rows(), d, dv)?);
                }
            }
            Op::GatherRows(x, index) => {
                let tx = self.value(*x);
                let c = tx.cols();
                let mut dx = Tensor::zeros(tx.rows(), c);
                for (i, &src) in index.iter().enumerate() {
                    let row = &mut dx.data_mut()[src * c..(src + 1) * c];
                    for (o, v) in row.iter_mut().zip(g.row(i)) {
                        *o += v;
                    }
                }
                self.accumulate(grads, *x, dx);
            }
            Op::GatherElems { input, rows, cols } => {
                let tx = self.value(*input);
                let c = tx.cols();
                let mut dx = Tensor::zeros(tx.rows(), c);
                for (i, (&r, &k)) in rows.iter().zip(cols.iter()).enumerate() {
                    dx.data_mut()[r * c + k] += g.data()[i];
                }
                self.accumulate(grads, *input, dx);
            }
            Op::SliceRows(x, start) => {
                let tx = self.value(*x);
                let c = tx.cols();
                let mut dx = Tensor::zeros(tx.rows(), c);
                dx.data_mut()[start * c..start * c + g.len()].copy_from_slice(g.data());
                self.accumulate(grads, *x, dx);
            }
            Op::SliceCols(x, start) => {
                let tx = self.value(*x);
                let (c, len) = (tx.cols(), g.cols());
                let mut dx = Tensor::zeros(tx.rows(), c);
                for r in 0..tx.rows() {
                    dx.data_mut()[r * c + start..r * c + start + len].copy_from_slice(g.row(r));
                }
                self.accumulate(grads, *x, dx);
            }
            Op::ConcatRows(parts) => {
                let c = g.cols();
                let mut offset = 0;
                for &p in parts {
                    let r = self.value(p).rows();
                    let part = g.data()[offset * c..(offset + r) * c].to_vec();
                    self.accumulate(grads, p, Tensor::new(r, c, part)?);
                    offset += r;
                }
            }
            Op::ConcatCols(parts) => {
                let mut offset = 0;
                for &p in parts {
                    let t = self.value(p);
                    let (r, c) = (t.rows(), t.cols());
                    let mut part = Vec::with_capacity(r * c);
                    for row in 0..r {
                        part.extend_from_slice(&g.row(row)[offset..offset + c]);
                    }
                    self.accumulate(grads, p, Tensor::new(r, c, part)?);
                    offset += c;
                }
            }
            Op::MeanRows(x) => {
                let tx = self.value(*x);
                let n = tx.rows() as f64;
                let row: Vec<f64> = g.data().iter().map(|v| v / n).collect();
                let data = row.repeat(tx.rows());
                self.accumulate(grads, *x, Tensor::new(tx.rows(), tx.cols(), data)?);
            }
            Op::Sum(x) => {
                let tx = self.value(*x);
                let gv = g.data()[0];
                self.accumulate(grads, *x, Tensor::filled(tx.rows(), tx.cols(), gv));
            }
            Op::L1(pred, target) => {
                let tp = self.value(*pred);
                let scale = g.data()[0] / tp.len() as f64;
                let data = tp
                    .data()
                    .iter()
                    .zip(target.data())
                    .map(|(p, y)| {
                        let d = p - y;
                        if d > 0.0 {
                            scale
                        } else if d < 0.0 {
                            -scale
                        } else {
                            0.0
                        }
                    })
                    .collect();
                self.accumulate(grads, *pred, Tensor::new(tp.rows(), tp.cols(), data)?);
            }
            Op::Bce(logits, labels) => {
                let tl = self.value(*logits);
                let gv = g.data()[0];
                let data = tl
                    .data()
                    .iter()
                    .zip(labels.data())
                    .map(|(&x, &y)| gv * (sigmoid(x) - y))
                    .collect();
                self.accumulate(grads, *logits, Tensor::new(tl.rows(), tl.cols(), data)?);
            }
        }
        Ok(())
    }
}

/// Gradients of leaf values, indexed by [`Var`].
#[derive(Clone, Debug)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
    shapes: Vec<[usize; 2]>,
}

impl Gradients {
    /// Gradient of a leaf; zeros when the loss does not depend on it.
    pub fn get(&self, v: Var) -> Tensor {
        match self.grads.get(v.0).and_then(Option::as_ref) {
            Some(g) => g.clone(),
            None => {
                let [r, c] = self.shapes[v.0];
                Tensor::zeros(r, c)
            }
        }
    }

    pub fn wrt(&self, vars: &[Var]) -> Vec<Tensor> {
        vars.iter().map(|&v| self.get(v)).collect()
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn check_segments(op: &'static str, entries: usize, segments: &[usize], n: usize) -> Result<()> {
    if segments.len() != entries {
        return Err(Error::shape(
            op,
            format!("{} segment ids for {entries} entries", segments.len()),
        ));
    }
    if let Some(&bad) = segments.iter().find(|&&s| s >= n) {
        return Err(Error::shape(op, format!("segment {bad} >= {n}")));
    }
    Ok(())
}

/// `op(a) * op(b)` where `op` optionally transposes.
fn matmul_raw(a: &Tensor, b: &Tensor, ta: bool, tb: bool) -> Tensor {
    let (m, k) = if ta { (a.cols(), a.rows()) } else { (a.rows(), a.cols()) };
    let n = if tb { b.rows() } else { b.cols() };
    let (ad, bd) = (a.data(), b.data());
    let (ac, bc) = (a.cols(), b.cols());
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        let orow = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let av = if ta { ad[p * ac + i] } else { ad[i * ac + p] };
            if av == 0.0 {
                continue;
            }
            if tb {
                for (j, o) in orow.iter_mut().enumerate() {
                    *o += av * bd[j * bc + p];
                }
            } else {
                for (o, bv) in orow.iter_mut().zip(&bd[p * bc..(p + 1) * bc]) {
                    *o += av * bv;
                }
            }
        }
    }
    Tensor::new(m, n, out).expect("matmul output shape")
}
