//! Adam with bias correction, plus the state bookkeeping needed when
//! parameter rows are cloned or pruned mid-run.

use surfrec_core::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub t: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new(n: usize) -> Self {
        Self {
            m: vec![T::zero(); n],
            v: vec![T::zero(); n],
            t: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// Duplicate the moment rows of `src_row` onto the end (used when a
    /// Gaussian is cloned or split).
    pub fn append_copy_of_row(&mut self, src_row: usize, stride: usize) {
        let start = src_row * stride;
        for k in 0..stride {
            self.m.push(self.m[start + k]);
            self.v.push(self.v[start + k]);
        }
    }

    /// Keep only rows with `keep[row]` true.
    pub fn retain_rows(&mut self, keep: &[bool], stride: usize) {
        debug_assert_eq!(keep.len() * stride, self.m.len());
        let mut w = 0;
        for (row, &k) in keep.iter().enumerate() {
            if k {
                let src = row * stride;
                for j in 0..stride {
                    self.m[w * stride + j] = self.m[src + j];
                    self.v[w * stride + j] = self.v[src + j];
                }
                w += 1;
            }
        }
        self.m.truncate(w * stride);
        self.v.truncate(w * stride);
    }
}

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// One Adam update. Standard bias-corrected form; `state.t` counts steps.
pub fn adam_step<T: Real>(
    params: &mut [T],
    grads: &[T],
    state: &mut AdamState<T>,
    lr: T,
    beta1: T,
    beta2: T,
    eps: T,
) {
    assert_eq!(params.len(), grads.len());
    assert_eq!(params.len(), state.m.len());
    state.t += 1;
    let t = state.t as i32;
    let bc1 = T::one() - beta1.powi(t);
    let bc2 = T::one() - beta2.powi(t);
    let one = T::one();
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = beta1 * state.m[i] + (one - beta1) * g;
        state.v[i] = beta2 * state.v[i] + (one - beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] = params[i] - lr * m_hat / (v_hat.sqrt() + eps);
    }
}

/// `adam_step` with the usual (0.9, 0.999, 1e-8) constants.
pub fn adam_step_default<T: Real>(
    params: &mut [T],
    grads: &[T],
    state: &mut AdamState<T>,
    lr: T,
) {
    adam_step(
        params,
        grads,
        state,
        lr,
        T::of(ADAM_BETA1),
        T::of(ADAM_BETA2),
        T::of(ADAM_EPS),
    );
}
