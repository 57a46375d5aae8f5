//! Layered affine-plus-ReLU field network over a flat parameter vector, with
//! batched forward evaluation and exact reverse-mode gradients (including the
//! input encoding).
//!
//! Weights are stored input-major (`W[i][o]` contiguous over outputs), which
//! keeps both the forward accumulation and the weight-gradient update as
//! contiguous fused-multiply-add sweeps.

use crate::encoding::EncodingSpec;
use surfrec_core::Real;

/// Architecture description.
///
/// `hidden_layers = H` gives linears `enc->h`, `H-1` of `h->h` (the one at
/// `skip_at` consumes `[h, enc]`), then `h->out`. ReLU on hidden outputs,
/// identity on the final output.
#[derive(Debug, Clone)]
pub struct NetworkSpec {
    pub encoding: EncodingSpec,
    pub hidden: usize,
    pub hidden_layers: usize,
    pub out_dim: usize,
    /// Linear index in `1..hidden_layers` whose input is `[previous, encoded]`.
    pub skip_at: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Linear {
    w_off: usize,
    b_off: usize,
    in_dim: usize,
    out_dim: usize,
    takes_skip: bool,
}

#[derive(Debug, Clone)]
pub struct FieldNetwork<T> {
    spec: NetworkSpec,
    linears: Vec<Linear>,
    params: Vec<T>,
}

/// Cached activations from one batched forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache<T> {
    pub batch: usize,
    raw: Vec<T>,
    encoded: Vec<T>,
    /// Post-ReLU activations, one buffer per hidden layer.
    hidden: Vec<Vec<T>>,
    /// batch x out_dim.
    pub output: Vec<T>,
}

/// `acc[o] += sum over the 4-tile of x[i] * w_row_i[o]`, input-tiled so each
/// accumulator load/store amortizes four fused multiply-adds.
#[inline(always)]
fn accumulate_rows<T: Real>(x: &[T], w: &[T], out_dim: usize, acc: &mut [T]) {
    debug_assert_eq!(acc.len(), out_dim);
    debug_assert_eq!(w.len(), x.len() * out_dim);
    let mut i = 0;
    while i + 8 <= x.len() {
        let base = i * out_dim;
        let wt = &w[base..base + 8 * out_dim];
        for o in 0..out_dim {
            let mut a = acc[o];
            a = wt[o].mul_add(x[i], a);
            a = wt[out_dim + o].mul_add(x[i + 1], a);
            a = wt[2 * out_dim + o].mul_add(x[i + 2], a);
            a = wt[3 * out_dim + o].mul_add(x[i + 3], a);
            a = wt[4 * out_dim + o].mul_add(x[i + 4], a);
            a = wt[5 * out_dim + o].mul_add(x[i + 5], a);
            a = wt[6 * out_dim + o].mul_add(x[i + 6], a);
            a = wt[7 * out_dim + o].mul_add(x[i + 7], a);
            acc[o] = a;
        }
        i += 8;
    }
    while i < x.len() {
        let xi = x[i];
        let wr = &w[i * out_dim..(i + 1) * out_dim];
        for o in 0..out_dim {
            acc[o] = wr[o].mul_add(xi, acc[o]);
        }
        i += 1;
    }
}

/// `dw[i][o] += x[i] * dy[o]` over the input-major weight gradient block.
#[inline(always)]
fn accumulate_weight_grads<T: Real>(x: &[T], dy: &[T], out_dim: usize, dw: &mut [T]) {
    for (i, &xi) in x.iter().enumerate() {
        let row = &mut dw[i * out_dim..(i + 1) * out_dim];
        for o in 0..out_dim {
            row[o] = dy[o].mul_add(xi, row[o]);
        }
    }
}

/// `dx[i] += dot(w_row_i, dy)`.
#[inline(always)]
fn accumulate_input_grads<T: Real>(w: &[T], dy: &[T], out_dim: usize, dx: &mut [T]) {
    for (i, dxi) in dx.iter_mut().enumerate() {
        let row = &w[i * out_dim..(i + 1) * out_dim];
        let mut acc = [T::zero(); 8];
        let mut ri = row.chunks_exact(8);
        let mut yi = dy.chunks_exact(8);
        for (cr, cy) in (&mut ri).zip(&mut yi) {
            for k in 0..8 {
                acc[k] = cr[k].mul_add(cy[k], acc[k]);
            }
        }
        let mut s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
        for (&a, &b) in ri.remainder().iter().zip(yi.remainder()) {
            s = a.mul_add(b, s);
        }
        *dxi = *dxi + s;
    }
}

impl<T: Real> FieldNetwork<T> {
    /// Zero-initialized network. `sphere_init` / `random_init` fill weights.
    pub fn new(spec: NetworkSpec) -> Self {
        assert!(spec.hidden_layers >= 1, "need at least one hidden layer");
        if let Some(s) = spec.skip_at {
            assert!(
                (1..spec.hidden_layers).contains(&s),
                "skip_at must name a hidden layer after the first"
            );
        }
        let enc = spec.encoding.encoded_dim();
        let mut linears = Vec::new();
        let mut off = 0;
        let push = |in_dim: usize, out_dim: usize, takes_skip: bool, off: &mut usize| {
            let lin = Linear {
                w_off: *off,
                b_off: *off + in_dim * out_dim,
                in_dim,
                out_dim,
                takes_skip,
            };
            *off += (in_dim + 1) * out_dim;
            lin
        };
        linears.push(push(enc, spec.hidden, false, &mut off));
        for l in 1..spec.hidden_layers {
            let skip = spec.skip_at == Some(l);
            let in_dim = if skip { spec.hidden + enc } else { spec.hidden };
            linears.push(push(in_dim, spec.hidden, skip, &mut off));
        }
        linears.push(push(spec.hidden, spec.out_dim, false, &mut off));
        Self {
            spec,
            linears,
            params: vec![T::zero(); off],
        }
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    pub fn set_params(&mut self, p: &[T]) {
        assert_eq!(p.len(), self.params.len());
        self.params.copy_from_slice(p);
    }

    pub fn input_dim(&self) -> usize {
        self.spec.encoding.input_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.spec.out_dim
    }

    pub fn n_linears(&self) -> usize {
        self.linears.len()
    }

    /// (weight offset, bias offset, in_dim, out_dim) of linear `l` within the
    /// flat parameter vector. Weights are input-major: entry `W[i][o]` lives
    /// at `w_off + i * out_dim + o`.
    pub fn layer_layout(&self, l: usize) -> (usize, usize, usize, usize) {
        let lin = self.linears[l];
        (lin.w_off, lin.b_off, lin.in_dim, lin.out_dim)
    }

    fn layer(&self, l: usize) -> (&[T], &[T], Linear) {
        let lin = self.linears[l];
        (
            &self.params[lin.w_off..lin.w_off + lin.in_dim * lin.out_dim],
            &self.params[lin.b_off..lin.b_off + lin.out_dim],
            lin,
        )
    }

    /// Batched forward pass; `inputs` is `batch x input_dim`, row-major.
    pub fn forward(&self, inputs: &[T], batch: usize) -> ForwardCache<T> {
        let in_dim = self.input_dim();
        assert_eq!(inputs.len(), batch * in_dim);
        let enc_dim = self.spec.encoding.encoded_dim();
        let h = self.spec.hidden;
        let out_dim = self.spec.out_dim;
        let n_hidden = self.spec.hidden_layers;

        let mut encoded = vec![T::zero(); batch * enc_dim];
        for b in 0..batch {
            self.spec.encoding.encode(
                &inputs[b * in_dim..(b + 1) * in_dim],
                &mut encoded[b * enc_dim..(b + 1) * enc_dim],
            );
        }

        let mut hidden: Vec<Vec<T>> = (0..n_hidden).map(|_| vec![T::zero(); batch * h]).collect();
        let mut output = vec![T::zero(); batch * out_dim];

        for l in 0..n_hidden {
            let (w, bias, lin) = self.layer(l);
            let (prev_part, cur_part) = hidden.split_at_mut(l);
            let cur = &mut cur_part[0];
            for b in 0..batch {
                let enc_row = &encoded[b * enc_dim..(b + 1) * enc_dim];
                let dst = &mut cur[b * h..(b + 1) * h];
                dst.copy_from_slice(bias);
                if l == 0 {
                    accumulate_rows(enc_row, w, h, dst);
                } else {
                    let prev = &prev_part[l - 1][b * h..(b + 1) * h];
                    if lin.takes_skip {
                        accumulate_rows(prev, &w[..h * lin.out_dim], h, dst);
                        accumulate_rows(enc_row, &w[h * lin.out_dim..], h, dst);
                    } else {
                        accumulate_rows(prev, w, h, dst);
                    }
                }
                for v in dst.iter_mut() {
                    if *v < T::zero() {
                        *v = T::zero();
                    }
                }
            }
        }
        {
            let (w, bias, _) = self.layer(n_hidden);
            let last = &hidden[n_hidden - 1];
            for b in 0..batch {
                let dst = &mut output[b * out_dim..(b + 1) * out_dim];
                dst.copy_from_slice(bias);
                accumulate_rows(&last[b * h..(b + 1) * h], w, out_dim, dst);
            }
        }

        ForwardCache {
            batch,
            raw: inputs.to_vec(),
            encoded,
            hidden,
            output,
        }
    }

    /// Reverse-mode gradients for a cached batch.
    ///
    /// `upstream` is d(loss)/d(output), `batch x out_dim`. Parameter gradients
    /// accumulate into `param_grads`; when `input_grads` is given, gradients
    /// w.r.t. the raw (pre-encoding) inputs accumulate there.
    ///
    /// Runs layer-major so each layer's weight-gradient block stays cache
    /// resident across the batch; rows whose running gradient is all zero
    /// (e.g. zero upstream) are skipped per layer.
    pub fn backward(
        &self,
        cache: &ForwardCache<T>,
        upstream: &[T],
        param_grads: &mut [T],
        mut input_grads: Option<&mut [T]>,
    ) {
        let batch = cache.batch;
        let in_dim = self.input_dim();
        let enc_dim = self.spec.encoding.encoded_dim();
        let h = self.spec.hidden;
        let out_dim = self.spec.out_dim;
        let n_hidden = self.spec.hidden_layers;
        assert_eq!(upstream.len(), batch * out_dim);
        assert_eq!(param_grads.len(), self.params.len());
        if let Some(gi) = input_grads.as_ref() {
            assert_eq!(gi.len(), batch * in_dim);
        }

        // Rows with zero upstream produce zero gradients everywhere.
        let live: Vec<bool> = (0..batch)
            .map(|b| {
                upstream[b * out_dim..(b + 1) * out_dim]
                    .iter()
                    .any(|u| *u != T::zero())
            })
            .collect();

        let mut d_enc = vec![T::zero(); batch * enc_dim];
        let mut d_prev = vec![T::zero(); batch * h];
        let mut d_cur = vec![T::zero(); batch * h];

        // Final linear.
        {
            let (w, _, lin) = self.layer(n_hidden);
            let gw_w = lin.w_off..lin.w_off + lin.in_dim * lin.out_dim;
            for b in 0..batch {
                if !live[b] {
                    continue;
                }
                let up = &upstream[b * out_dim..(b + 1) * out_dim];
                let last = &cache.hidden[n_hidden - 1][b * h..(b + 1) * h];
                accumulate_weight_grads(last, up, out_dim, &mut param_grads[gw_w.clone()]);
                accumulate_input_grads(w, up, out_dim, &mut d_prev[b * h..(b + 1) * h]);
                let gb = &mut param_grads[lin.b_off..lin.b_off + lin.out_dim];
                for o in 0..out_dim {
                    gb[o] = gb[o] + up[o];
                }
            }
        }

        // Hidden layers, last to first.
        for l in (0..n_hidden).rev() {
            let (w, _, lin) = self.layer(l);
            let gw_w = lin.w_off..lin.w_off + lin.in_dim * lin.out_dim;
            for b in 0..batch {
                if !live[b] {
                    continue;
                }
                let act = &cache.hidden[l][b * h..(b + 1) * h];
                let dp = &mut d_prev[b * h..(b + 1) * h];
                for o in 0..h {
                    if act[o] <= T::zero() {
                        dp[o] = T::zero();
                    }
                }
                let enc_row = &cache.encoded[b * enc_dim..(b + 1) * enc_dim];
                let de = &mut d_enc[b * enc_dim..(b + 1) * enc_dim];
                let gw = &mut param_grads[gw_w.clone()];
                if lin.takes_skip {
                    let prev = &cache.hidden[l - 1][b * h..(b + 1) * h];
                    let split = h * lin.out_dim;
                    accumulate_weight_grads(prev, dp, h, &mut gw[..split]);
                    accumulate_weight_grads(enc_row, dp, h, &mut gw[split..]);
                    accumulate_input_grads(&w[..split], dp, h, &mut d_cur[b * h..(b + 1) * h]);
                    accumulate_input_grads(&w[split..], dp, h, de);
                } else if l == 0 {
                    accumulate_weight_grads(enc_row, dp, h, gw);
                    accumulate_input_grads(w, dp, h, de);
                } else {
                    let prev = &cache.hidden[l - 1][b * h..(b + 1) * h];
                    accumulate_weight_grads(prev, dp, h, gw);
                    accumulate_input_grads(w, dp, h, &mut d_cur[b * h..(b + 1) * h]);
                }
                let gb = &mut param_grads[lin.b_off..lin.b_off + lin.out_dim];
                for o in 0..h {
                    gb[o] = gb[o] + dp[o];
                }
            }
            if l > 0 {
                std::mem::swap(&mut d_prev, &mut d_cur);
                for v in d_cur.iter_mut() {
                    *v = T::zero();
                }
            }
        }

        if let Some(gi) = input_grads.as_deref_mut() {
            for b in 0..batch {
                if !live[b] {
                    continue;
                }
                let raw_row = &cache.raw[b * in_dim..(b + 1) * in_dim];
                self.spec.encoding.encode_backward(
                    raw_row,
                    &d_enc[b * enc_dim..(b + 1) * enc_dim],
                    &mut gi[b * in_dim..(b + 1) * in_dim],
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_net() -> FieldNetwork<f64> {
        let spec = NetworkSpec {
            encoding: EncodingSpec::new(vec![(2, 1)]),
            hidden: 5,
            hidden_layers: 3,
            out_dim: 2,
            skip_at: Some(2),
        };
        let mut net = FieldNetwork::new(spec);
        // Deterministic pseudo-random fill.
        let n = net.param_count();
        for (i, p) in net.params_mut().iter_mut().enumerate() {
            *p = ((i as f64 * 0.7391 + 0.1).sin()) * 0.6;
        }
        assert_eq!(
            n,
            (6 + 1) * 5 + (5 + 1) * 5 + (5 + 6 + 1) * 5 + (5 + 1) * 2
        );
        net
    }

    #[test]
    fn param_count_matches_layer_sums() {
        tiny_net();
    }

    #[test]
    fn batch_equals_per_item() {
        let net = tiny_net();
        let inputs = [0.3, -0.2, 0.9, 0.5, -0.7, 0.1];
        let all = net.forward(&inputs, 3);
        for b in 0..3 {
            let one = net.forward(&inputs[2 * b..2 * b + 2], 1);
            assert_eq!(&all.output[2 * b..2 * b + 2], &one.output[..]);
        }
    }

    #[test]
    fn single_linear_layer_closed_form() {
        // One hidden layer; check dW2[j][o] = hidden[j] * up[o] exactly.
        let spec = NetworkSpec {
            encoding: EncodingSpec::new(vec![(3, 0)]),
            hidden: 4,
            hidden_layers: 1,
            out_dim: 2,
            skip_at: None,
        };
        let mut net = FieldNetwork::<f64>::new(spec);
        // Positive weights so every ReLU stays active.
        for p in net.params_mut().iter_mut() {
            *p = 0.21;
        }
        let x = [1.0, 2.0, 3.0];
        let cache = net.forward(&x, 1);
        let up = [1.0, -1.0];
        let mut grads = vec![0.0; net.param_count()];
        let mut gin = vec![0.0; 3];
        net.backward(&cache, &up, &mut grads, Some(&mut gin));
        let h0 = cache.hidden[0].clone();
        let (w2_off, _, _, out_dim) = net.layer_layout(1);
        for j in 0..4 {
            for o in 0..2 {
                let want = up[o] * h0[j];
                assert!((grads[w2_off + j * out_dim + o] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_upstream_zero_grads() {
        let net = tiny_net();
        let cache = net.forward(&[0.4, 0.6], 1);
        let mut grads = vec![0.0; net.param_count()];
        let mut gin = vec![0.0; 2];
        net.backward(&cache, &[0.0, 0.0], &mut grads, Some(&mut gin));
        assert!(grads.iter().all(|g| *g == 0.0));
        assert!(gin.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut net = tiny_net();
        let inputs = [0.25, -0.4, -0.1, 0.8];
        let upstream = [0.7, -0.3, 0.2, 1.1];
        let cache = net.forward(&inputs, 2);
        let mut grads = vec![0.0; net.param_count()];
        let mut gin = vec![0.0; 4];
        net.backward(&cache, &upstream, &mut grads, Some(&mut gin));

        let loss = |net: &FieldNetwork<f64>, inputs: &[f64]| {
            let c = net.forward(inputs, 2);
            c.output
                .iter()
                .zip(&upstream)
                .map(|(o, u)| o * u)
                .sum::<f64>()
        };

        let h = 1e-6;
        let n = net.param_count();
        for k in (0..n).step_by(n / 17) {
            let orig = net.params()[k];
            net.params_mut()[k] = orig + h;
            let lp = loss(&net, &inputs);
            net.params_mut()[k] = orig - h;
            let lm = loss(&net, &inputs);
            net.params_mut()[k] = orig;
            let fd = (lp - lm) / (2.0 * h);
            assert!(
                (fd - grads[k]).abs() < 1e-6 * (1.0 + fd.abs()),
                "param {k}: fd {fd} vs analytic {}",
                grads[k]
            );
        }
        for k in 0..4 {
            let mut plus = inputs;
            let mut minus = inputs;
            plus[k] += h;
            minus[k] -= h;
            let fd = (loss(&net, &plus) - loss(&net, &minus)) / (2.0 * h);
            assert!(
                (fd - gin[k]).abs() < 1e-6 * (1.0 + fd.abs()),
                "input {k}: fd {fd} vs analytic {}",
                gin[k]
            );
        }
    }
}
