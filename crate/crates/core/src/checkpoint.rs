//! Self-describing binary checkpoint: magic "GSRF", a format version, then
//! length-prefixed little-endian f32 arrays. Round-trips bit-exactly.

use crate::error::CoreError;
use crate::gaussian::GaussianPrimitive;
use crate::real::Real;
use crate::vec::{Quat, Vec3};
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const MAGIC: [u8; 4] = *b"GSRF";
pub const VERSION: u32 = 1;

/// Everything a training run needs to resume or render.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<T> {
    pub iter: u32,
    pub gaussians: Vec<GaussianPrimitive<T>>,
    pub sdf_params: Vec<T>,
    pub app_params: Vec<T>,
}

fn write_array<W: Write, T: Real>(w: &mut W, data: &[T]) -> std::io::Result<()> {
    w.write_u32::<LittleEndian>(data.len() as u32)?;
    for &v in data {
        w.write_f32::<LittleEndian>(v.to_f32_bits())?;
    }
    Ok(())
}

fn read_array<R: Read, T: Real>(r: &mut R, path: &Path) -> Result<Vec<T>, CoreError> {
    let len = r
        .read_u32::<LittleEndian>()
        .map_err(|_| CoreError::UnexpectedEof { path: path.into() })? as usize;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let v = r
            .read_f32::<LittleEndian>()
            .map_err(|_| CoreError::UnexpectedEof { path: path.into() })?;
        out.push(T::from_f32_bits(v));
    }
    Ok(out)
}

pub fn save_checkpoint<T: Real>(
    gaussians: &[GaussianPrimitive<T>],
    sdf_params: &[T],
    app_params: &[T],
    iter: u32,
    path: &Path,
) -> Result<(), CoreError> {
    let file = File::create(path).map_err(|e| CoreError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res = (|| -> std::io::Result<()> {
        w.write_all(&MAGIC)?;
        w.write_u32::<LittleEndian>(VERSION)?;
        w.write_u32::<LittleEndian>(iter)?;

        let n = gaussians.len();
        let mut centroids = Vec::with_capacity(3 * n);
        let mut rotations = Vec::with_capacity(4 * n);
        let mut log_scales = Vec::with_capacity(2 * n);
        let mut opacity_logits = Vec::with_capacity(n);
        let mut seeds = Vec::with_capacity(3 * n);
        for g in gaussians {
            centroids.extend_from_slice(&g.centroid.to_array());
            rotations.extend_from_slice(&[g.rotation.w, g.rotation.x, g.rotation.y, g.rotation.z]);
            log_scales.extend_from_slice(&[g.log_scale_u, g.log_scale_v]);
            opacity_logits.push(g.opacity_logit);
            seeds.extend_from_slice(&g.appearance_seed.to_array());
        }
        write_array(&mut w, &centroids)?;
        write_array(&mut w, &rotations)?;
        write_array(&mut w, &log_scales)?;
        write_array(&mut w, &opacity_logits)?;
        write_array(&mut w, &seeds)?;
        write_array(&mut w, sdf_params)?;
        write_array(&mut w, app_params)?;
        w.flush()
    })();
    res.map_err(|e| CoreError::io(path, e))
}

pub fn load_checkpoint<T: Real>(path: &Path) -> Result<Checkpoint<T>, CoreError> {
    let file = File::open(path).map_err(|e| CoreError::io(path, e))?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| CoreError::UnexpectedEof { path: path.into() })?;
    if magic != MAGIC {
        return Err(CoreError::BadMagic {
            path: path.into(),
            expected: MAGIC,
        });
    }
    let version = r
        .read_u32::<LittleEndian>()
        .map_err(|_| CoreError::UnexpectedEof { path: path.into() })?;
    if version != VERSION {
        return Err(CoreError::VersionMismatch {
            path: path.into(),
            found: version,
            expected: VERSION,
        });
    }
    let iter = r
        .read_u32::<LittleEndian>()
        .map_err(|_| CoreError::UnexpectedEof { path: path.into() })?;

    let centroids: Vec<T> = read_array(&mut r, path)?;
    let rotations: Vec<T> = read_array(&mut r, path)?;
    let log_scales: Vec<T> = read_array(&mut r, path)?;
    let opacity_logits: Vec<T> = read_array(&mut r, path)?;
    let seeds: Vec<T> = read_array(&mut r, path)?;
    let sdf_params: Vec<T> = read_array(&mut r, path)?;
    let app_params: Vec<T> = read_array(&mut r, path)?;

    let n = opacity_logits.len();
    if centroids.len() != 3 * n
        || rotations.len() != 4 * n
        || log_scales.len() != 2 * n
        || seeds.len() != 3 * n
    {
        return Err(CoreError::Checkpoint {
            path: path.into(),
            reason: "inconsistent array lengths".into(),
        });
    }

    let gaussians = (0..n)
        .map(|i| GaussianPrimitive {
            centroid: Vec3::new(centroids[3 * i], centroids[3 * i + 1], centroids[3 * i + 2]),
            rotation: Quat::new(
                rotations[4 * i],
                rotations[4 * i + 1],
                rotations[4 * i + 2],
                rotations[4 * i + 3],
            ),
            log_scale_u: log_scales[2 * i],
            log_scale_v: log_scales[2 * i + 1],
            opacity_logit: opacity_logits[i],
            appearance_seed: Vec3::new(seeds[3 * i], seeds[3 * i + 1], seeds[3 * i + 2]),
        })
        .collect();

    Ok(Checkpoint {
        iter,
        gaussians,
        sdf_params,
        app_params,
    })
}
