//! Total-objective assembly and the per-iteration loss record.

use surfrec_core::{Real, TrainConfig};

/// Raw (unweighted) loss terms for one iteration.
#[derive(Debug, Clone, Copy, Default)]
pub struct LossBreakdown<T> {
    pub l_rgb: T,
    pub l_dep: T,
    pub l_dnc: T,
    pub l_pos: T,
    pub l_eik: T,
    pub l_off: T,
    pub l_ori: T,
    pub l_nor: T,
    pub l_ent: T,
}

/// Effective weights after the warmup gate, in the same scalar type the
/// gradients are scaled with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveWeights<T> {
    pub dep: T,
    pub dnc: T,
    pub pos: T,
    pub eik: T,
    pub off: T,
    pub ori: T,
    pub nor: T,
    pub ent: T,
}

/// Weights at `iter`: the five SDF terms are zero before the warmup ends;
/// the rendering terms and the entropy term are always live.
pub fn effective_weights<T: Real>(config: &TrainConfig, iter: usize) -> EffectiveWeights<T> {
    let sdf_on = iter >= config.sdf_warmup_iters;
    let gate = |w: f64| if sdf_on { T::of(w) } else { T::zero() };
    EffectiveWeights {
        dep: T::of(config.lambda_dep),
        dnc: T::of(config.lambda_dnc),
        pos: gate(config.lambda_pos),
        eik: gate(config.lambda_eik),
        off: gate(config.lambda_off),
        ori: gate(config.lambda_ori),
        nor: gate(config.lambda_nor),
        ent: T::of(config.lambda_ent),
    }
}

/// `total = l_gs + sum lambda_i l_i + lambda_6 l_ent`, with
/// `l_gs = l_rgb + lambda_dep l_dep + lambda_dnc l_dnc`.
pub fn assemble_total<T: Real>(parts: &LossBreakdown<T>, config: &TrainConfig, iter: usize) -> T {
    let w = effective_weights::<T>(config, iter);
    parts.l_rgb
        + w.dep * parts.l_dep
        + w.dnc * parts.l_dnc
        + w.pos * parts.l_pos
        + w.eik * parts.l_eik
        + w.off * parts.l_off
        + w.ori * parts.l_ori
        + w.nor * parts.l_nor
        + w.ent * parts.l_ent
}
