//! SDF supervision losses, the opacity entropy loss, query-point sampling,
//! and total-objective assembly with the warmup gate.

pub mod assemble;
pub mod log;
pub mod losses;
pub mod query;

pub use assemble::{assemble_total, effective_weights, EffectiveWeights, LossBreakdown};
pub use log::{LossLog, LOG_HEADER};
pub use losses::{
    eikonal_loss, entropy_loss, normal_map_loss, offsurface_loss, orientation_loss, position_loss,
};
pub use query::{sample_query_batch, QueryBatch, QUERY_CLAMP};
