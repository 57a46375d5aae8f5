//! Image serialization: 8-bit PNG for LDR color, PFM (float32, little-endian)
//! for depth and normal maps.

use crate::error::CoreError;
use crate::real::Real;
use byteorder::{ByteOrder, LittleEndian};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

/// Row-major image with 1 or 3 channels.
#[derive(Debug, Clone)]
pub struct ImageBuffer<T> {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<T>,
}

impl<T: Real> ImageBuffer<T> {
    pub fn new(width: usize, height: usize, channels: usize) -> Self {
        Self {
            width,
            height,
            channels,
            data: vec![T::zero(); width * height * channels],
        }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize, c: usize) -> T {
        self.data[(row * self.width + col) * self.channels + c]
    }

    #[inline]
    pub fn at_mut(&mut self, row: usize, col: usize, c: usize) -> &mut T {
        &mut self.data[(row * self.width + col) * self.channels + c]
    }

    pub fn cast<U: Real>(&self) -> ImageBuffer<U> {
        ImageBuffer {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data: self.data.iter().map(|v| U::of(v.as_f64())).collect(),
        }
    }
}

/// Clamp to [0,1], quantize to 8 bits, write PNG. Unclamped values are only
/// clamped here, at write time.
pub fn save_png<T: Real>(img: &ImageBuffer<T>, path: &Path) -> Result<(), CoreError> {
    assert!(img.channels == 3 || img.channels == 1, "PNG expects 1 or 3 channels");
    let quantize = |v: T| -> u8 {
        let x = v.as_f64().clamp(0.0, 1.0);
        (x * 255.0).round() as u8
    };
    let bytes: Vec<u8> = img.data.iter().map(|&v| quantize(v)).collect();
    let (w, h) = (img.width as u32, img.height as u32);
    let result = if img.channels == 3 {
        image::RgbImage::from_raw(w, h, bytes)
            .expect("raw buffer sized to image")
            .save(path)
    } else {
        image::GrayImage::from_raw(w, h, bytes)
            .expect("raw buffer sized to image")
            .save(path)
    };
    result.map_err(|e| CoreError::Image {
        path: path.into(),
        source: e,
    })
}

pub fn load_png<T: Real>(path: &Path) -> Result<ImageBuffer<T>, CoreError> {
    let img = image::open(path).map_err(|e| CoreError::Image {
        path: path.into(),
        source: e,
    })?;
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let scale = T::of(1.0 / 255.0);
    let data = rgb
        .into_raw()
        .into_iter()
        .map(|b| T::from_u8(b).unwrap() * scale)
        .collect();
    Ok(ImageBuffer {
        width: w,
        height: h,
        channels: 3,
        data,
    })
}

/// PFM: `PF`/`Pf` header, dimensions, negative scale for little-endian, then
/// f32 scanlines bottom-to-top.
pub fn save_pfm<T: Real>(img: &ImageBuffer<T>, path: &Path) -> Result<(), CoreError> {
    assert!(img.channels == 3 || img.channels == 1, "PFM expects 1 or 3 channels");
    let mut out = Vec::new();
    let tag = if img.channels == 3 { "PF" } else { "Pf" };
    out.extend_from_slice(format!("{tag}\n{} {}\n-1.0\n", img.width, img.height).as_bytes());
    let mut row_bytes = vec![0u8; img.width * img.channels * 4];
    for row in (0..img.height).rev() {
        let start = row * img.width * img.channels;
        let row_data = &img.data[start..start + img.width * img.channels];
        for (i, &v) in row_data.iter().enumerate() {
            LittleEndian::write_f32(&mut row_bytes[i * 4..i * 4 + 4], v.to_f32_bits());
        }
        out.extend_from_slice(&row_bytes);
    }
    File::create(path)
        .and_then(|mut f| f.write_all(&out))
        .map_err(|e| CoreError::io(path, e))
}

pub fn load_pfm<T: Real>(path: &Path) -> Result<ImageBuffer<T>, CoreError> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| CoreError::io(path, e))?;
    let err = |reason: &str| CoreError::Pfm {
        path: path.into(),
        reason: reason.to_string(),
    };

    // Four whitespace-delimited header tokens: tag, width, height, scale.
    fn token(bytes: &[u8], pos: usize) -> Option<(String, usize)> {
        let mut start = pos;
        while start < bytes.len() && bytes[start].is_ascii_whitespace() {
            start += 1;
        }
        let mut end = start;
        while end < bytes.len() && !bytes[end].is_ascii_whitespace() {
            end += 1;
        }
        if start == end {
            return None;
        }
        // Consume exactly one whitespace after the token.
        Some((String::from_utf8_lossy(&bytes[start..end]).to_string(), end + 1))
    }

    let (tag, pos) = token(&bytes, 0).ok_or_else(|| err("missing tag"))?;
    let channels = match tag.as_str() {
        "PF" => 3,
        "Pf" => 1,
        _ => return Err(err("tag is not PF/Pf")),
    };
    let (w_str, pos) = token(&bytes, pos).ok_or_else(|| err("missing width"))?;
    let (h_str, pos) = token(&bytes, pos).ok_or_else(|| err("missing height"))?;
    let (scale_str, pos) = token(&bytes, pos).ok_or_else(|| err("missing scale"))?;
    let width: usize = w_str.parse().map_err(|_| err("bad width"))?;
    let height: usize = h_str.parse().map_err(|_| err("bad height"))?;
    let scale: f64 = scale_str.parse().map_err(|_| err("bad scale"))?;
    if scale >= 0.0 {
        return Err(err("big-endian PFM not supported"));
    }

    let needed = width * height * channels * 4;
    if bytes.len() < pos + needed {
        return Err(err("truncated pixel data"));
    }
    let mut img = ImageBuffer::<T>::new(width, height, channels);
    for row in 0..height {
        let src_row = height - 1 - row;
        let src = pos + src_row * width * channels * 4;
        for i in 0..width * channels {
            let v = LittleEndian::read_f32(&bytes[src + i * 4..src + i * 4 + 4]);
            img.data[row * width * channels + i] = T::from_f32_bits(v);
        }
    }
    Ok(img)
}
