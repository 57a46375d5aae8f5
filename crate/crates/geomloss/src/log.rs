//! Append-only CSV training log.

use crate::assemble::LossBreakdown;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use surfrec_core::Real;

pub const LOG_HEADER: &str =
    "iter,l_rgb,l_dep,l_dnc,l_pos,l_eik,l_off,l_ori,l_nor,l_ent,total,n_gaussians,mean_opacity";

pub struct LossLog {
    writer: BufWriter<File>,
}

impl LossLog {
    pub fn create(path: &Path) -> std::io::Result<Self> {
        let mut writer = BufWriter::new(File::create(path)?);
        writeln!(writer, "{LOG_HEADER}")?;
        Ok(Self { writer })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn append<T: Real>(
        &mut self,
        iter: usize,
        parts: &LossBreakdown<T>,
        total: T,
        n_gaussians: usize,
        mean_opacity: T,
    ) -> std::io::Result<()> {
        writeln!(
            self.writer,
            "{iter},{},{},{},{},{},{},{},{},{},{},{n_gaussians},{}",
            parts.l_rgb.as_f64(),
            parts.l_dep.as_f64(),
            parts.l_dnc.as_f64(),
            parts.l_pos.as_f64(),
            parts.l_eik.as_f64(),
            parts.l_off.as_f64(),
            parts.l_ori.as_f64(),
            parts.l_nor.as_f64(),
            parts.l_ent.as_f64(),
            total.as_f64(),
            mean_opacity.as_f64()
        )
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.writer.flush()
    }
}
