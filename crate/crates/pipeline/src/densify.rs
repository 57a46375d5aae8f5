//! Densification (clone small / split large) driven by accumulated
//! view-space positional gradients, plus opacity pruning.

use crate::train::{TrainError, TrainState};
use rand_distr::{Distribution, Normal};
use surfrec_core::{Real, TrainConfig};

#[derive(Debug, Default, Clone, Copy)]
pub struct DensifyStats {
    pub cloned: usize,
    pub split: usize,
    pub pruned: usize,
}

/// Clone/split Gaussians whose mean view-space gradient exceeds the
/// threshold (small disks clone, large disks split with scales / 1.6), prune
/// those with opacity under the threshold, and keep every Adam state row
/// aligned. Gradient accumulators reset afterwards.
pub fn densify_and_prune<T: Real>(
    state: &mut TrainState<T>,
    config: &TrainConfig,
) -> Result<DensifyStats, TrainError> {
    let n = state.gaussians.len();
    let mut stats = DensifyStats::default();

    // Median max-scale separates "clone" from "split".
    let mut scales: Vec<T> = state
        .gaussians
        .iter()
        .map(|g| g.scale_u().max(g.scale_v()))
        .collect();
    scales.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let median_scale = scales[n / 2];

    let threshold = T::of(config.densify_grad_threshold);
    let split_shrink = T::of(config.split_scale_divisor.ln());
    let noise = Normal::new(0.0, 1.0).unwrap();

    for i in 0..n {
        if state.seen_count[i] == 0 {
            continue;
        }
        let mean_grad = state.grad_accum[i] / T::from_u32(state.seen_count[i]).unwrap();
        if mean_grad <= threshold {
            continue;
        }
        let parent = state.gaussians[i];
        if parent.scale_u().max(parent.scale_v()) <= median_scale {
            // Clone in place; the optimizer pulls the copies apart.
            state.gaussians.push(parent);
            state.push_adam_rows_from(i);
            stats.cloned += 1;
        } else {
            // Split: shrink both, move the new copy to a disk sample.
            let frame = parent.frame();
            let xi_u = T::of(noise.sample(&mut state.rng));
            let xi_v = T::of(noise.sample(&mut state.rng));
            let offset =
                frame.col(0) * (parent.scale_u() * xi_u) + frame.col(1) * (parent.scale_v() * xi_v);
            let mut child = parent;
            child.log_scale_u -= split_shrink;
            child.log_scale_v -= split_shrink;
            child.centroid = parent.centroid + offset;
            let host = &mut state.gaussians[i];
            host.log_scale_u -= split_shrink;
            host.log_scale_v -= split_shrink;
            state.gaussians.push(child);
            state.push_adam_rows_from(i);
            stats.split += 1;
        }
    }

    // Prune transparent Gaussians.
    let prune_below = T::of(config.prune_opacity_threshold);
    let keep: Vec<bool> = state
        .gaussians
        .iter()
        .map(|g| g.opacity() >= prune_below)
        .collect();
    stats.pruned = keep.iter().filter(|k| !**k).count();
    if keep.iter().all(|k| !k) {
        return Err(TrainError::AllPruned { iter: state.iter });
    }
    if stats.pruned > 0 {
        let mut w = 0;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                state.gaussians[w] = state.gaussians[i];
                w += 1;
            }
        }
        state.gaussians.truncate(w);
        state.retain_adam_rows(&keep);
    }

    state.reset_densify_stats();
    Ok(stats)
}
