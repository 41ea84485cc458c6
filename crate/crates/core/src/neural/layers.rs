//! LSTM and layer normalization over time-major stacked batches.
//!
//! A batch of `B` sequences of length `T` is held as a `(T*B) x width`
//! matrix whose row `t*B + b` is step `t` of sequence `b`, so input and
//! output projections run as single matrix products.

use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;

pub const LAYER_NORM_EPS: f64 = 1e-5;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `tanh` through a single `exp`; the libm version is several times slower.
fn tanh(x: f64) -> f64 {
    1.0 - 2.0 / ((2.0 * x).exp() + 1.0)
}

/// Gate blocks are stacked in the order input, forget, cell, output.
#[derive(Debug, Clone, PartialEq)]
pub struct Lstm {
    /// `4H x input`
    pub w: Array2<f64>,
    /// `4H x H`
    pub u: Array2<f64>,
    /// `4H`
    pub b: Array1<f64>,
}

pub struct LstmCache {
    steps: usize,
    batch: usize,
    /// Post-activation gates, `TB x 4H`.
    gates: Array2<f64>,
    c: Array2<f64>,
    /// `tanh(c)`
    tc: Array2<f64>,
    pub h: Array2<f64>,
}

impl Lstm {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        Lstm {
            w: Array2::zeros((4 * hidden, input)),
            u: Array2::zeros((4 * hidden, hidden)),
            b: Array1::zeros(4 * hidden),
        }
    }

    /// Weights uniform in `±1/sqrt(fan_in)`, biases zero except the forget
    /// gate's, which start at 1.
    pub fn init(input: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        let mut l = Lstm::zeros(input, hidden);
        let bw = 1.0 / (input as f64).sqrt();
        l.w.mapv_inplace(|_| rng.gen_range(-bw..bw));
        let bu = 1.0 / (hidden as f64).sqrt();
        l.u.mapv_inplace(|_| rng.gen_range(-bu..bu));
        l.b.slice_mut(s![hidden..2 * hidden]).fill(1.0);
        l
    }

    pub fn hidden(&self) -> usize {
        self.u.ncols()
    }

    pub fn input(&self) -> usize {
        self.w.ncols()
    }

    /// Applies gate nonlinearities and the state update to one step.
    /// `a` holds pre-activations on entry and post-activations on exit.
    fn cell(
        &self,
        a: &mut Array2<f64>,
        c_prev: &Array2<f64>,
        c: &mut Array2<f64>,
        tc: &mut Array2<f64>,
        h: &mut Array2<f64>,
    ) {
        let hd = self.hidden();
        for r in 0..a.nrows() {
            let mut row = a.row_mut(r);
            let row = row.as_slice_mut().expect("standard layout");
            for j in 0..hd {
                let i = sigmoid(row[j]);
                let f = sigmoid(row[hd + j]);
                let g = tanh(row[2 * hd + j]);
                let o = sigmoid(row[3 * hd + j]);
                row[j] = i;
                row[hd + j] = f;
                row[2 * hd + j] = g;
                row[3 * hd + j] = o;
                let cv = f * c_prev[[r, j]] + i * g;
                let t = tanh(cv);
                c[[r, j]] = cv;
                tc[[r, j]] = t;
                h[[r, j]] = o * t;
            }
        }
    }

    /// Runs `steps` steps over `x` (`TB x input`) from zero state.
    pub fn forward(&self, x: ArrayView2<f64>, steps: usize, batch: usize) -> LstmCache {
        let hd = self.hidden();
        let mut pre = x.dot(&self.w.t());
        pre += &self.b;
        let mut c = Array2::zeros((steps * batch, hd));
        let mut tc = Array2::zeros((steps * batch, hd));
        let mut h = Array2::zeros((steps * batch, hd));
        let mut h_prev = Array2::<f64>::zeros((batch, hd));
        let mut c_prev = Array2::<f64>::zeros((batch, hd));
        for t in 0..steps {
            let rows = s![t * batch..(t + 1) * batch, ..];
            let mut a = pre.slice(rows).to_owned();
            if t > 0 {
                a += &h_prev.dot(&self.u.t());
            }
            let mut ct = Array2::zeros((batch, hd));
            let mut tct = Array2::zeros((batch, hd));
            let mut ht = Array2::zeros((batch, hd));
            self.cell(&mut a, &c_prev, &mut ct, &mut tct, &mut ht);
            pre.slice_mut(rows).assign(&a);
            c.slice_mut(rows).assign(&ct);
            tc.slice_mut(rows).assign(&tct);
            h.slice_mut(rows).assign(&ht);
            h_prev = ht;
            c_prev = ct;
        }
        LstmCache { steps, batch, gates: pre, c, tc, h }
    }

    /// One step from explicit state; returns the new `(h, c)`.
    pub fn step(&self, x: ArrayView2<f64>, h: &Array2<f64>, c: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
        let mut a = x.dot(&self.w.t()) + h.dot(&self.u.t());
        a += &self.b;
        let mut c_new = Array2::zeros(c.raw_dim());
        let mut tc = Array2::zeros(c.raw_dim());
        let mut h_new = Array2::zeros(h.raw_dim());
        self.cell(&mut a, c, &mut c_new, &mut tc, &mut h_new);
        (h_new, c_new)
    }

    /// Backpropagation through time. Accumulates parameter gradients into
    /// `grad` and returns the gradient with respect to the input when
    /// `want_dx` is set.
    pub fn backward(
        &self,
        x: ArrayView2<f64>,
        cache: &LstmCache,
        dh_out: &Array2<f64>,
        grad: &mut Lstm,
        want_dx: bool,
    ) -> Option<Array2<f64>> {
        let (steps, batch, hd) = (cache.steps, cache.batch, self.hidden());
        let mut da = Array2::<f64>::zeros((steps * batch, 4 * hd));
        let mut dh_next = Array2::<f64>::zeros((batch, hd));
        let mut dc_next = Array2::<f64>::zeros((batch, hd));
        for t in (0..steps).rev() {
            for bi in 0..batch {
                let r = t * batch + bi;
                let gates = cache.gates.row(r);
                let mut dar = da.row_mut(r);
                for j in 0..hd {
                    let (i, f, g, o) = (gates[j], gates[hd + j], gates[2 * hd + j], gates[3 * hd + j]);
                    let tc = cache.tc[[r, j]];
                    let c_prev = if t > 0 { cache.c[[r - batch, j]] } else { 0.0 };
                    let dh = dh_out[[r, j]] + dh_next[[bi, j]];
                    let dc = dh * o * (1.0 - tc * tc) + dc_next[[bi, j]];
                    dar[j] = dc * g * i * (1.0 - i);
                    dar[hd + j] = dc * c_prev * f * (1.0 - f);
                    dar[2 * hd + j] = dc * i * (1.0 - g * g);
                    dar[3 * hd + j] = dh * tc * o * (1.0 - o);
                    dc_next[[bi, j]] = dc * f;
                }
            }
            if t > 0 {
                dh_next = da.slice(s![t * batch..(t + 1) * batch, ..]).dot(&self.u);
            }
        }
        if steps > 1 {
            let tail = da.slice(s![batch.., ..]);
            let h_prev = cache.h.slice(s![..(steps - 1) * batch, ..]);
            grad.u += &tail.t().dot(&h_prev);
        }
        grad.w += &da.t().dot(&x);
        grad.b += &da.sum_axis(Axis(0));
        want_dx.then(|| da.dot(&self.w))
    }
}

pub struct LayerNormCache {
    xhat: Array2<f64>,
    inv_std: Array1<f64>,
}

/// Normalizes each row to zero mean and unit variance, then scales and shifts.
pub fn layer_norm(x: &Array2<f64>, gain: &Array1<f64>, bias: &Array1<f64>) -> (Array2<f64>, LayerNormCache) {
    let n = x.ncols() as f64;
    let mut xhat = x.clone();
    let mut inv_std = Array1::zeros(x.nrows());
    for (r, mut row) in xhat.rows_mut().into_iter().enumerate() {
        let mean = row.sum() / n;
        row -= mean;
        let var = row.iter().map(|v| v * v).sum::<f64>() / n;
        let is = 1.0 / (var + LAYER_NORM_EPS).sqrt();
        row *= is;
        inv_std[r] = is;
    }
    let y = &xhat * gain + bias;
    (y, LayerNormCache { xhat, inv_std })
}

/// Returns the input gradient and accumulates gain and bias gradients.
pub fn layer_norm_backward(
    dy: ArrayView2<f64>,
    cache: &LayerNormCache,
    gain: &Array1<f64>,
    dgain: &mut Array1<f64>,
    dbias: &mut Array1<f64>,
) -> Array2<f64> {
    *dgain += &(&dy * &cache.xhat).sum_axis(Axis(0));
    *dbias += &dy.sum_axis(Axis(0));
    let n = dy.ncols() as f64;
    let mut dx = &dy * gain;
    for (r, mut row) in dx.rows_mut().into_iter().enumerate() {
        let xh = cache.xhat.row(r);
        let sum = row.sum();
        let dot: f64 = row.iter().zip(xh.iter()).map(|(a, b)| a * b).sum();
        let is = cache.inv_std[r];
        for (v, &xv) in row.iter_mut().zip(xh.iter()) {
            *v = is / n * (n * *v - sum - xv * dot);
        }
    }
    dx
}
