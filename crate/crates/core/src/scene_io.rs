//! Scene directory serialization: cameras as a JSON array of records.

use crate::camera::{Camera, CameraRecord};
use crate::error::CoreError;
use crate::real::Real;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

pub fn save_cameras<T: Real>(cams: &[Camera<T>], path: &Path) -> Result<(), CoreError> {
    let records: Vec<CameraRecord> = cams.iter().map(CameraRecord::from_camera).collect();
    let file = File::create(path).map_err(|e| CoreError::io(path, e))?;
    serde_json::to_writer_pretty(BufWriter::new(file), &records).map_err(|e| CoreError::Json {
        path: path.into(),
        source: e,
    })
}

pub fn load_cameras<T: Real>(path: &Path) -> Result<Vec<Camera<T>>, CoreError> {
    let file = File::open(path).map_err(|e| CoreError::io(path, e))?;
    let records: Vec<CameraRecord> =
        serde_json::from_reader(BufReader::new(file)).map_err(|e| CoreError::Json {
            path: path.into(),
            source: e,
        })?;
    Ok(records.iter().map(|r| r.to_camera()).collect())
}
