//! Input spaces, message spaces, protocols, labels and the elementary
//! statistics every other module consumes.

pub mod game;
pub mod input;
pub mod labels;
pub mod message;
pub mod protocol;
pub mod stats;

pub use game::{EvalMode, GameKind, GameSpec};
pub use input::{dist, sq_dist, InputSpace};
pub use labels::LabelMap;
pub use message::{MessageAtom, MessageMetric, MessageSpace};
pub use protocol::Protocol;
pub use stats::{
    conditional_stats, expected_pairwise_sqdist, input_variance, message_probabilities,
    ConditionalStats,
};
