//! Training configuration. The JSON config file mirrors these field names.

use serde::{Deserialize, Serialize};

/// Hyperparameters and run controls for joint splat + SDF training.
///
/// Loss weights follow the usual convention: `total = l_gs + lambda_pos*l_pos
/// + lambda_eik*l_eik + lambda_off*l_off + lambda_ori*l_ori + lambda_nor*l_nor
/// + lambda_ent*l_ent`, with the SDF terms held at zero for the first
/// `sdf_warmup_iters` iterations. All spatial thresholds assume the scene has
/// been normalized so the object fits in [-1,1]^3.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct TrainConfig {
    // Loss weights (lambda_1..lambda_6) and the off-surface sharpness alpha.
    pub lambda_pos: f64,
    pub lambda_eik: f64,
    pub lambda_off: f64,
    pub lambda_ori: f64,
    pub lambda_nor: f64,
    pub lambda_ent: f64,
    pub alpha_off: f64,

    // Rendering-loss shape: rgb = (1-ssim_mix)*L1 + ssim_mix*(1-SSIM),
    // plus weighted depth-distortion and depth-normal-consistency terms.
    pub ssim_mix: f64,
    pub lambda_dep: f64,
    pub lambda_dnc: f64,

    // Schedule.
    pub sdf_warmup_iters: usize,
    pub total_iters: usize,
    pub checkpoint_interval: usize,

    // Densification / pruning.
    pub prune_opacity_threshold: f64,
    pub densify_interval: usize,
    pub densify_grad_threshold: f64,
    pub densify_until_frac: f64,
    pub split_scale_divisor: f64,

    // Learning rates. Centroid lr decays exponentially from lr_centroid_init
    // to lr_centroid_final over total_iters.
    pub lr_centroid_init: f64,
    pub lr_centroid_final: f64,
    pub lr_gaussian_other: f64,
    pub lr_network: f64,
    pub lr_static_color: f64,

    // SDF query batches per iteration.
    pub surface_batch: usize,
    pub uniform_batch: usize,
    pub near_batch: usize,
    pub near_sigma: f64,

    // Field-network shapes. Feature dimension equals sdf_hidden.
    pub sdf_hidden: usize,
    pub sdf_layers: usize,
    pub app_hidden: usize,
    pub app_layers: usize,
    pub pos_encode_bands: usize,
    pub dir_encode_bands: usize,
    pub grad_step: f64,
    pub sphere_init_radius: f64,

    // Scene / run shape.
    pub n_gaussians: usize,
    pub n_views: usize,
    pub image_size: usize,
    pub mc_resolution: usize,
    pub seed: u64,

    // Geometry-guided appearance on/off (off = per-Gaussian static colors)
    // and which parameter sets the normal-map loss updates.
    pub use_appearance_net: bool,
    pub normal_loss_targets: NormalLossTargets,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum NormalLossTargets {
    Both,
    SplatOnly,
    SdfOnly,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda_pos: 0.1,
            lambda_eik: 0.01,
            lambda_off: 0.01,
            lambda_ori: 0.05,
            lambda_nor: 0.05,
            lambda_ent: 0.01,
            alpha_off: 100.0,

            ssim_mix: 0.2,
            lambda_dep: 1.0,
            lambda_dnc: 1.0,

            sdf_warmup_iters: 500,
            total_iters: 5000,
            checkpoint_interval: 1000,

            prune_opacity_threshold: 0.05,
            densify_interval: 200,
            densify_grad_threshold: 6e-3,
            densify_until_frac: 0.7,
            split_scale_divisor: 1.6,

            lr_centroid_init: 1e-3,
            lr_centroid_final: 1.6e-6,
            lr_gaussian_other: 5e-3,
            lr_network: 5e-4,
            lr_static_color: 2.5e-3,

            surface_batch: 4096,
            uniform_batch: 768,
            near_batch: 768,
            near_sigma: 0.05,

            sdf_hidden: 32,
            sdf_layers: 8,
            app_hidden: 32,
            app_layers: 4,
            pos_encode_bands: 6,
            dir_encode_bands: 4,
            grad_step: 1e-4,
            sphere_init_radius: 0.5,

            n_gaussians: 2000,
            n_views: 16,
            image_size: 64,
            mc_resolution: 128,
            seed: 0,

            use_appearance_net: true,
            normal_loss_targets: NormalLossTargets::Both,
        }
    }
}

impl TrainConfig {
    /// Basic sanity checks; call after deserializing user input.
    pub fn validate(&self) -> Result<(), String> {
        let lambdas = [
            self.lambda_pos,
            self.lambda_eik,
            self.lambda_off,
            self.lambda_ori,
            self.lambda_nor,
            self.lambda_ent,
            self.lambda_dep,
            self.lambda_dnc,
        ];
        if lambdas.iter().any(|l| *l < 0.0) {
            return Err("loss weights must be non-negative".into());
        }
        if self.sdf_warmup_iters >= self.total_iters {
            return Err("sdf_warmup_iters must be below total_iters".into());
        }
        if !(0.0..=1.0).contains(&self.ssim_mix) {
            return Err("ssim_mix must lie in [0,1]".into());
        }
        if self.mc_resolution < 8 {
            return Err("mc_resolution must be at least 8".into());
        }
        if self.sdf_layers < 2 || self.app_layers < 1 {
            return Err("network depth too small".into());
        }
        Ok(())
    }

    /// Exponentially decayed centroid learning rate at `iter`.
    pub fn lr_centroid_at(&self, iter: usize) -> f64 {
        if self.total_iters <= 1 {
            return self.lr_centroid_init;
        }
        let t = iter as f64 / (self.total_iters - 1) as f64;
        self.lr_centroid_init * (self.lr_centroid_final / self.lr_centroid_init).powf(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        TrainConfig::default().validate().unwrap();
    }

    #[test]
    fn json_roundtrip_and_partial_override() {
        let cfg = TrainConfig::default();
        let s = serde_json::to_string(&cfg).unwrap();
        let back: TrainConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(cfg, back);

        // Partial configs fall back to defaults.
        let partial: TrainConfig = serde_json::from_str(r#"{"total_iters": 10, "sdf_warmup_iters": 2}"#).unwrap();
        assert_eq!(partial.total_iters, 10);
        assert_eq!(partial.lambda_pos, 0.1);
    }

    #[test]
    fn centroid_lr_decays_to_final() {
        let cfg = TrainConfig::default();
        assert!((cfg.lr_centroid_at(0) - 1.6e-4).abs() < 1e-12);
        assert!((cfg.lr_centroid_at(cfg.total_iters - 1) - 1.6e-6).abs() < 1e-10);
        assert!(cfg.lr_centroid_at(1000) < cfg.lr_centroid_at(0));
    }
}
