//! Sinusoidal input encoding.
//!
//! A block of `d` input components with `L` bands expands to
//! `[x, sin(2^0 pi x), cos(2^0 pi x), ..., sin(2^{L-1} pi x), cos(2^{L-1} pi x)]`
//! laid out blockwise, so the encoded width is `d * (1 + 2L)`.

use surfrec_core::Real;

/// Per-block (component count, frequency band count).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingSpec {
    pub blocks: Vec<(usize, usize)>,
}

impl EncodingSpec {
    pub fn new(blocks: Vec<(usize, usize)>) -> Self {
        Self { blocks }
    }

    pub fn input_dim(&self) -> usize {
        self.blocks.iter().map(|(d, _)| d).sum()
    }

    pub fn encoded_dim(&self) -> usize {
        self.blocks.iter().map(|(d, l)| d * (1 + 2 * l)).sum()
    }

    /// Encode one item; `input` has `input_dim()` entries, `out` receives
    /// `encoded_dim()` entries.
    pub fn encode<T: Real>(&self, input: &[T], out: &mut [T]) {
        debug_assert_eq!(input.len(), self.input_dim());
        debug_assert_eq!(out.len(), self.encoded_dim());
        let pi = T::of(std::f64::consts::PI);
        let mut src = 0;
        let mut dst = 0;
        for &(d, bands) in &self.blocks {
            let x = &input[src..src + d];
            out[dst..dst + d].copy_from_slice(x);
            dst += d;
            let mut freq = pi;
            for _ in 0..bands {
                for &xi in x {
                    out[dst] = (freq * xi).sin();
                    dst += 1;
                }
                for &xi in x {
                    out[dst] = (freq * xi).cos();
                    dst += 1;
                }
                freq = freq + freq;
            }
            src += d;
        }
    }

    /// Accumulate d(loss)/d(input) given d(loss)/d(encoded).
    pub fn encode_backward<T: Real>(&self, input: &[T], d_encoded: &[T], d_input: &mut [T]) {
        debug_assert_eq!(d_input.len(), self.input_dim());
        let pi = T::of(std::f64::consts::PI);
        let mut src = 0;
        let mut dst = 0;
        for &(d, bands) in &self.blocks {
            let x = &input[src..src + d];
            for i in 0..d {
                d_input[src + i] += d_encoded[dst + i];
            }
            dst += d;
            let mut freq = pi;
            for _ in 0..bands {
                for (i, &xi) in x.iter().enumerate() {
                    // d sin(f x) = f cos(f x); d cos(f x) = -f sin(f x)
                    let s = (freq * xi).sin();
                    let c = (freq * xi).cos();
                    d_input[src + i] += freq * (c * d_encoded[dst + i] - s * d_encoded[dst + d + i]);
                }
                dst += 2 * d;
                freq = freq + freq;
            }
            src += d;
        }
    }
}
